"""Desk-scale algebraic entropy: trajectory and cotrajectory growth curves.

Sizes are exact group orders; consecutive ratios are exact integers (each
trajectory is a subgroup of the next). A limit is declared only when the
ratio is exactly constant over a trailing window of four steps with at least
eight steps computed; nothing is ever extrapolated from noisy slopes.
Logarithms appear only in human-readable output; all comparisons are integer
comparisons of ratios, e.g. the generalized-shift law checks
|T_(n+1)| / |T_n| == |K|^s exactly.

Adjoint growth is reported as a lower bound with an ``unbounded`` flag when
the ratio is still above 1 at the end of the run; a finite window never
asserts an infinite supremum.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import AmbientInfinite, InfiniteIndex, InputError, NotFinite
from .groups import Endomorphism, FgGroup, Subgroup
from .selfmaps import WindowedMap, materialize_windowed, EXACT_STRING_NUMBER

STABILITY_WINDOW = 4
MIN_STEPS_FOR_LIMIT = 8


@dataclass(frozen=True)
class GrowthCurve:
    sizes: tuple[int, ...]  # |T_1|, |T_2|, ...
    ratios: tuple[int, ...]
    detected: str  # "limit" | "undetermined"
    limit_ratio: int | None
    unbounded: bool
    window: int = STABILITY_WINDOW

    @property
    def log_slopes(self) -> tuple[float, ...]:
        return tuple(math.log(s) / (i + 1) for i, s in enumerate(self.sizes))

    @property
    def limit_log(self) -> float | None:
        return math.log(self.limit_ratio) if self.limit_ratio is not None else None

    def to_json(self):
        return {
            "sizes": list(self.sizes),
            "ratios": list(self.ratios),
            "log_slopes": list(self.log_slopes),
            "detected": self.detected,
            "limit_ratio": self.limit_ratio,
            "limit_log": self.limit_log,
            "unbounded": self.unbounded,
            "stability_window": self.window,
        }

    def csv_rows(self):
        return [(i + 1, s, ls) for i, (s, ls) in enumerate(zip(self.sizes, self.log_slopes))]


def _curve_from_sizes(sizes: list[int]) -> GrowthCurve:
    ratios = []
    for a, b in zip(sizes, sizes[1:]):
        assert b % a == 0, "trajectory sizes must divide each other"
        ratios.append(b // a)
    detected, limit = "undetermined", None
    if (len(sizes) >= MIN_STEPS_FOR_LIMIT and len(ratios) >= STABILITY_WINDOW
            and len(set(ratios[-STABILITY_WINDOW:])) == 1):
        detected, limit = "limit", ratios[-1]
    unbounded = bool(ratios) and ratios[-1] > 1
    return GrowthCurve(tuple(sizes), tuple(ratios), detected, limit, unbounded)


def trajectory_growth(phi: Endomorphism, f: Subgroup, n_max: int) -> GrowthCurve:
    """Exact |T_n| for T_n = F + phi(F) + ... + phi^(n-1)(F), n = 1..n_max."""
    if f.ambient != phi.group:
        raise InputError("F", "subgroup of a different group")
    if f.order() is None:
        raise NotFinite("trajectory growth needs a finite subgroup")
    if n_max < 2:
        raise InputError("n_max", "need at least two steps")
    sizes = []
    total = f
    power_image = f
    sizes.append(total.order())
    for _ in range(n_max - 1):
        power_image = power_image.image_under(phi)
        total = total.sum(power_image)
        sizes.append(total.order())
    return _curve_from_sizes(sizes)


def cotrajectory_growth(phi: Endomorphism, n_sub: Subgroup, n_max: int) -> GrowthCurve:
    """Exact |C_n| for C_n = G / (N meet phi^-1 N meet ... meet phi^-(n-1) N)."""
    if n_sub.ambient != phi.group:
        raise InputError("N", "subgroup of a different group")
    if n_sub.index() is None:
        raise InfiniteIndex("cotrajectory growth needs a finite-index subgroup")
    if n_max < 2:
        raise InputError("n_max", "need at least two steps")
    sizes = []
    inter = n_sub
    pre = n_sub
    sizes.append(inter.index())
    for _ in range(n_max - 1):
        pre = pre.preimage_under(phi)
        inter = inter.intersect(pre)
        sizes.append(inter.index())
    return _curve_from_sizes(sizes)


def _all_subgroups(group: FgGroup, cap: int) -> list[Subgroup]:
    """Every subgroup of a finite group, via upper-triangular lattice bases."""
    assert group.free_rank == 0
    k = len(group.torsion)
    if k == 0:
        return [Subgroup.full(group)]

    def divisors(n):
        return [d for d in range(1, n + 1) if n % d == 0]

    seen = {}
    diag_choices = [[]]
    for d in group.torsion:
        diag_choices = [c + [dv] for c in diag_choices for dv in divisors(d)]
    for diag in diag_choices:
        # row j: zeros, pivot diag[j] at column j, then entries in [0, diag[i])
        # at each later column i (the row-HNF reduced range)
        rows_sets = [[]]
        for j in range(k):
            tails = [[]]
            for i in range(j + 1, k):
                tails = [t + [v] for t in tails for v in range(diag[i])]
            rows_sets = [rs + [[0] * j + [diag[j]] + t] for rs in rows_sets for t in tails]
            if len(rows_sets) > 50 * cap:
                raise InputError("exhaustive", "subgroup enumeration exceeds the cap")
        for rows in rows_sets:
            sub = Subgroup.from_rows(group, rows)
            seen[sub.rows] = sub
            if len(seen) > cap:
                raise InputError("exhaustive", "subgroup enumeration exceeds the cap")
    return list(seen.values())


def _cyclic_sample(phi: Endomorphism, budget: int, seed: int) -> list[Subgroup]:
    """Cyclic finite subgroups: all of them when small, a seeded sample otherwise."""
    g = phi.group
    k = len(g.torsion)
    if k == 0:
        return []
    torsion_order = 1
    for d in g.torsion:
        torsion_order *= d
    seen = {}
    if torsion_order <= budget:
        gens = (g.element([0] * g.free_rank, t.torsion)
                for t in FgGroup(0, g.torsion).elements())
        for x in gens:
            sub = Subgroup.generated_by([x], g)
            seen[sub.rows] = sub
    else:
        rng = random.Random(seed)
        for i in range(g.free_rank, g.dim):
            rows = [[1 if j == i else 0 for j in range(g.dim)]]
            sub = Subgroup.from_rows(g, rows)
            seen[sub.rows] = sub
        for _ in range(budget):
            x = g.element([0] * g.free_rank, [rng.randrange(d) for d in g.torsion])
            sub = Subgroup.generated_by([x], g)
            seen[sub.rows] = sub
    return list(seen.values())


@dataclass(frozen=True)
class EntropyEstimate:
    sup_ratio: int  # detected sup of |T_(n+1)|/|T_n| limits; entropy = log of it
    curves: int
    undetermined: int
    exhaustive: bool

    @property
    def log_value(self) -> float:
        return math.log(self.sup_ratio)

    def to_json(self):
        return {
            "sup_ratio": self.sup_ratio,
            "entropy_log": self.log_value,
            "curves": self.curves,
            "undetermined": self.undetermined,
            "exhaustive": self.exhaustive,
        }


def entropy_estimate(phi: Endomorphism, exhaustive: bool, n_max: int = 8,
                     budget: int = 512, seed: int = 0, cap: int = 20000) -> EntropyEstimate:
    """Sup of detected trajectory limits over finite subgroups.

    Exhaustive mode enumerates every subgroup and requires a finite ambient
    group; otherwise cyclic subgroups are used (all of them when the torsion
    part is small, a seeded deterministic sample otherwise).
    """
    g = phi.group
    if exhaustive:
        if g.order() is None:
            raise AmbientInfinite("exhaustive entropy needs a finite ambient group")
        candidates = _all_subgroups(g, cap)
    else:
        candidates = _cyclic_sample(phi, budget, seed)
    sup = 1
    undetermined = 0
    count = 0
    for f in candidates:
        if f.order() in (None, 1) and not f.is_trivial:
            continue
        if f.is_trivial:
            continue
        curve = trajectory_growth(phi, f, n_max)
        count += 1
        if curve.detected == "limit":
            sup = max(sup, curve.limit_ratio)
        else:
            undetermined += 1
    return EntropyEstimate(sup, count, undetermined, exhaustive)


@dataclass(frozen=True)
class ShiftCheck:
    builtin: str
    k_order: int
    window: tuple[int, int]
    expected_ratio: int
    curve: GrowthCurve
    stable_upto: int
    match: bool

    def to_json(self):
        return {
            "builtin": self.builtin,
            "k_order": self.k_order,
            "window": list(self.window),
            "expected_ratio": self.expected_ratio,
            "stable_upto": self.stable_upto,
            "match": self.match,
            "curve": self.curve.to_json(),
        }


def shift_formula_check(builtin: str, k_order: int, windows) -> list[ShiftCheck]:
    """Check |T_(n+1)|/|T_n| == |K|^s(lambda) exactly in the stable regime.

    The trajectory starts from the coordinate subgroup at the origin of the
    window; the stable regime excludes the steps where the support has hit
    the window edge.
    """
    if builtin not in EXACT_STRING_NUMBER:
        raise InputError("builtin", f"no exact string number for {builtin!r}")
    s_val = EXACT_STRING_NUMBER[builtin]
    expected = k_order ** s_val
    out = []
    for w in windows:
        if builtin == "shift_z":
            window = (-w, w)
        else:
            window = (0, w)
        wm = WindowedMap.named(builtin, window)
        mat = materialize_windowed(wm, k_order)
        f = Subgroup.generated_by([mat.unit(0)], mat.group)
        span = w  # steps before the moving support reaches the window edge
        n_max = max(span, 2)
        curve = trajectory_growth(mat.endo, f, n_max)
        stable_upto = max(span - 2, 0)
        match = all(r == expected for r in curve.ratios[:stable_upto])
        out.append(ShiftCheck(builtin, k_order, window, expected, curve, stable_upto, match))
    return out
