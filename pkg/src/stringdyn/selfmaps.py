"""Self-maps of sets: finite functional graphs and windowed countable maps.

Finite graphs are analyzed exactly (tail/cycle decomposition, periodic points,
surjective core). Countable maps (N or Z, piecewise affine by residue class,
or the named built-ins succ / pred_floor / shift_z) are probed through a
finite window.

Window semantics: a window [lo, hi) is half-open. A backward chain counts as
string evidence only when its maximal extension is cut off by the window
edge; a chain that dies intrinsically (no preimage at all, or only a cyclic
repeat) can never be the prefix of an infinite string, so it is discarded.
That convention keeps the successor map at bound 0 for every window while
pred_floor and the two-sided shift report their true value 1.

``materialize`` turns a finite-to-one self-map into the coordinate
permutation endomorphism of (Z/k)^window, with out-of-window coordinates
reading zero so that trajectory counts of the direct-sum model stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, NotFiniteToOne, WindowTooSmall
from .groups import Endomorphism, FgGroup

BUILTINS = ("succ", "pred_floor", "shift_z")

# Exact string numbers s and infinite-orbit numbers o of the built-ins.
# succ has no backward chains deeper than the start point; pred_floor and
# shift_z have exactly one string up to tail-sharing. Every forward orbit of
# pred_floor falls into the fixed point 0, so it has no infinite orbit at
# all, while succ and shift_z each have exactly one up to tail-sharing.
EXACT_STRING_NUMBER = {"succ": 0, "pred_floor": 1, "shift_z": 1}
EXACT_ORBIT_NUMBER = {"succ": 1, "pred_floor": 0, "shift_z": 1}


@dataclass(frozen=True)
class FunctionalGraph:
    successors: tuple[int, ...]

    def __post_init__(self):
        n = len(self.successors)
        for v in self.successors:
            if not 0 <= v < n:
                raise InputError("succ", f"successor {v} out of range for {n} nodes")

    @property
    def n(self) -> int:
        return len(self.successors)

    def to_json(self):
        return {"n": self.n, "succ": list(self.successors)}

    @staticmethod
    def from_json(obj) -> FunctionalGraph:
        try:
            n = int(obj["n"])
            succ = tuple(int(x) for x in obj["succ"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("graph", f"bad functional graph: {exc}") from exc
        if len(succ) != n:
            raise InputError("graph.succ", f"expected {n} entries")
        return FunctionalGraph(succ)


@dataclass(frozen=True)
class OrbitReport:
    tail_length: tuple[int, ...]
    cycle_length: tuple[int, ...]
    periodic: tuple[int, ...]
    quasi_periodic: tuple[int, ...]
    core: tuple[int, ...]
    string_number: int

    def to_json(self):
        return {
            "tail_length": list(self.tail_length),
            "cycle_length": list(self.cycle_length),
            "periodic": list(self.periodic),
            "quasi_periodic": list(self.quasi_periodic),
            "surjective_core": list(self.core),
            "string_number": self.string_number,
        }


def analyze_finite(g: FunctionalGraph) -> OrbitReport:
    """Tail/cycle decomposition; core = cycle nodes = eventual image."""
    n = g.n
    image = set(range(n))
    while True:
        nxt = {g.successors[v] for v in image}
        if nxt == image:
            break
        image = nxt
    cycle_nodes = image
    cycle_len = [0] * n
    for v in cycle_nodes:
        length = 1
        cur = g.successors[v]
        while cur != v:
            cur = g.successors[cur]
            length += 1
        cycle_len[v] = length
    tail = [0] * n
    for v in range(n):
        steps = 0
        cur = v
        while cur not in cycle_nodes:
            cur = g.successors[cur]
            steps += 1
        tail[v] = steps
        if v not in cycle_nodes:
            cycle_len[v] = cycle_len[cur]
    per = sorted(cycle_nodes)
    return OrbitReport(tuple(tail), tuple(cycle_len), tuple(per),
                       tuple(range(n)), tuple(per), 0)


@dataclass(frozen=True)
class AffineCase:
    mod: int
    residue: int
    a: int
    b: int


@dataclass(frozen=True)
class WindowedMap:
    """lambda on N or Z: built-in or piecewise affine by residue class."""

    domain: str  # "N" | "Z"
    builtin: str | None = None
    cases: tuple[AffineCase, ...] = ()
    window: tuple[int, int] = (0, 0)  # [lo, hi)

    def __post_init__(self):
        if self.domain not in ("N", "Z"):
            raise InputError("domain", "must be N or Z")
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise InputError("builtin", f"unknown builtin {self.builtin!r}")
        if self.builtin is None and not self.cases:
            raise InputError("cases", "need a builtin or at least one affine case")

    @staticmethod
    def named(builtin: str, window: tuple[int, int]) -> WindowedMap:
        dom = "Z" if builtin == "shift_z" else "N"
        return WindowedMap(dom, builtin, (), tuple(window))

    def in_domain(self, x: int) -> bool:
        return self.domain == "Z" or x >= 0

    def evaluate(self, x: int) -> int:
        if not self.in_domain(x):
            raise InputError("point", f"{x} outside domain {self.domain}")
        if self.builtin == "succ":
            return x + 1
        if self.builtin == "pred_floor":
            return max(x - 1, 0)
        if self.builtin == "shift_z":
            return x - 1
        for case in self.cases:
            if x % case.mod == case.residue % case.mod:
                y = case.a * x + case.b
                if self.domain == "N" and y < 0:
                    raise InputError("rule", f"case maps {x} to negative {y} on N")
                return y
        raise InputError("rule", f"no affine case covers {x}")

    def preimages_in(self, y: int, lo: int, hi: int) -> list[int]:
        """All x in [lo, hi) with lambda(x) = y, ascending."""
        if self.builtin == "succ":
            cands = [y - 1]
        elif self.builtin == "pred_floor":
            cands = [0, 1] if y == 0 else [y + 1]
        elif self.builtin == "shift_z":
            cands = [y + 1]
        else:
            out = []
            for case in self.cases:
                if case.a == 0:
                    if case.b == y:  # the whole residue class maps there
                        first = lo + (case.residue - lo) % case.mod
                        out.extend(range(first, hi, case.mod))
                    continue
                num = y - case.b
                if num % case.a == 0:
                    x = num // case.a
                    if x % case.mod == case.residue % case.mod:
                        out.append(x)
            cands = out
        return sorted(x for x in set(cands)
                      if lo <= x < hi and self.in_domain(x) and self.evaluate(x) == y)

    def has_outside_preimage(self, y: int, lo: int, hi: int) -> bool:
        """Does some x outside [lo, hi) (but in the domain) map to y?"""
        if self.builtin == "succ":
            x = y - 1
            return x >= 0 and not lo <= x < hi
        if self.builtin == "pred_floor":
            xs = [y + 1] + ([0, 1] if y == 0 else [])
            return any(x >= 0 and not lo <= x < hi for x in set(xs))
        if self.builtin == "shift_z":
            x = y + 1
            return not lo <= x < hi
        for case in self.cases:
            if case.a == 0:
                if case.b == y:
                    return True  # a whole residue class maps there
                continue
            num = y - case.b
            if num % case.a == 0:
                x = num // case.a
                if x % case.mod == case.residue % case.mod and self.in_domain(x):
                    if not lo <= x < hi:
                        return True
        return False

    def is_finite_to_one(self) -> bool:
        if self.builtin is not None:
            return True
        return all(case.a != 0 for case in self.cases)

    def to_json(self):
        out = {"domain": self.domain, "window": list(self.window)}
        if self.builtin is not None:
            out["builtin"] = self.builtin
        else:
            out["cases"] = [{"mod": c.mod, "r": c.residue, "a": c.a, "b": c.b}
                            for c in self.cases]
        return out

    @staticmethod
    def from_json(obj) -> WindowedMap:
        try:
            domain = obj["domain"]
            window = tuple(int(x) for x in obj["window"])
            if "builtin" in obj:
                return WindowedMap(domain, obj["builtin"], (), window)
            cases = tuple(AffineCase(int(c["mod"]), int(c["r"]), int(c["a"]), int(c["b"]))
                          for c in obj["cases"])
            return WindowedMap(domain, None, cases, window)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("map", f"bad windowed map: {exc}") from exc


@dataclass(frozen=True)
class BoundReport:
    requested: int
    achieved: int
    depth: int
    window: tuple[int, int]
    chains: tuple[tuple[int, ...], ...]
    exact_value: int | None
    consistent: bool

    def to_json(self):
        return {
            "requested": self.requested,
            "achieved": self.achieved,
            "depth": self.depth,
            "window": list(self.window),
            "chains": [list(c) for c in self.chains],
            "exact_value": self.exact_value,
            "consistent": self.consistent,
        }


def _window(w: WindowedMap, window=None, anchor: bool = False) -> tuple[int, int]:
    lo, hi = window if window is not None else w.window
    if w.domain == "N":
        # search windows on N are anchored at the true boundary 0 so that an
        # intrinsic dead end there is never mistaken for window truncation
        lo = 0 if anchor else max(lo, 0)
    return lo, hi


def windowed_string_bound(w: WindowedMap, k: int, depth: int, window=None,
                          node_budget: int = 200_000) -> BoundReport:
    """Largest k' <= k pairwise disjoint window-viable backward chains.

    A chain x_0 <- x_1 <- ... is viable when it reaches ``depth`` and its
    maximal in-window extension stops only at the window edge. Exhaustive
    backtracking in canonical ascending order; the node budget caps work but
    can only cause under-reporting, never over-reporting.
    """
    lo, hi = _window(w, window, anchor=True)
    if hi - lo <= depth:
        raise WindowTooSmall(f"window [{lo}, {hi}) cannot hold depth-{depth} paths")
    budget = [node_budget]

    def viable_extensions(chain: list[int], used: set[int]) -> list[tuple[int, ...]]:
        """All maximal viable chains exhausting preimages from chain's end."""
        out = []
        stack = [(chain, used)]
        while stack:
            cur, cur_used = stack.pop()
            budget[0] -= 1
            if budget[0] <= 0:
                break
            last = cur[-1]
            pres = [x for x in w.preimages_in(last, lo, hi) if x not in cur_used]
            if not pres:
                # maximal in-window: viable iff cut by the edge, not intrinsic
                if len(cur) > depth and w.has_outside_preimage(last, lo, hi):
                    out.append(tuple(cur))
                continue
            if len(cur) > depth and w.has_outside_preimage(last, lo, hi):
                out.append(tuple(cur))
            for x in reversed(pres):
                stack.append((cur + [x], cur_used | {x}))
        return out

    best: list[tuple[int, ...]] = []

    def search(start_from: int, taken: list[tuple[int, ...]], used: set[int]) -> None:
        nonlocal best
        if len(taken) > len(best):
            best = list(taken)
        if len(taken) == k or budget[0] <= 0:
            return
        for x0 in range(max(start_from, lo), hi):
            if x0 in used:
                continue
            for chain in viable_extensions([x0], used | {x0}):
                search(x0 + 1, taken + [chain], used | set(chain))
                if len(best) == k or budget[0] <= 0:
                    return

    search(lo, [], set())
    exact = EXACT_STRING_NUMBER.get(w.builtin) if w.builtin else None
    consistent = exact is None or min(exact, k) == len(best)
    return BoundReport(k, len(best), depth, (lo, hi),
                       tuple(best), exact, consistent)


def infinite_orbit_bound(w: WindowedMap, k: int, depth: int, window=None,
                         node_budget: int = 200_000) -> BoundReport:
    """Largest k' <= k pairwise disjoint forward chains of distinct elements.

    Forward orbits are deterministic; an orbit is viable when it reaches
    ``depth`` and leaves the window (an in-window repeat is an intrinsic
    cycle, which can never be an infinite orbit).
    """
    lo, hi = _window(w, window, anchor=True)
    if hi - lo <= depth:
        raise WindowTooSmall(f"window [{lo}, {hi}) cannot hold depth-{depth} orbits")

    def orbit(x0: int) -> tuple[int, ...] | None:
        seen = []
        seen_set = set()
        cur = x0
        while lo <= cur < hi and w.in_domain(cur):
            if cur in seen_set:
                return None  # intrinsic cycle
            seen.append(cur)
            seen_set.add(cur)
            cur = w.evaluate(cur)
        if len(seen) > depth:
            return tuple(seen)
        return None

    orbits = []
    for x0 in range(lo, hi):
        if not w.in_domain(x0):
            continue
        o = orbit(x0)
        if o is not None:
            orbits.append(o)

    best: list[tuple[int, ...]] = []

    def search(idx: int, taken, used) -> None:
        nonlocal best
        if len(taken) > len(best):
            best = list(taken)
        if len(taken) == k:
            return
        for i in range(idx, len(orbits)):
            o = orbits[i]
            if used & set(o):
                continue
            search(i + 1, taken + [o], used | set(o))
            if len(best) == k:
                return

    search(0, [], set())
    exact = EXACT_ORBIT_NUMBER.get(w.builtin) if w.builtin else None
    consistent = exact is None or min(exact, k) == len(best)
    return BoundReport(k, len(best), depth, (lo, hi), tuple(best), exact, consistent)


@dataclass(frozen=True)
class Materialized:
    group: FgGroup
    endo: Endomorphism
    coordinates: tuple[int, ...]  # domain point of each coordinate index

    def unit(self, point: int, value: int = 1):
        idx = self.coordinates.index(point)
        k = len(self.coordinates)
        return self.group.element([], [value if j == idx else 0 for j in range(k)])


def materialize_windowed(w: WindowedMap, k_order: int, window=None) -> Materialized:
    """The coordinate shift x |-> (x_(lambda(i)))_i on (Z/k)^window.

    Coordinates whose lambda-image leaves the window read zero, matching the
    direct-sum model where almost all coordinates vanish.
    """
    if k_order < 2:
        raise InputError("korder", "coefficient order must be at least 2")
    if not w.is_finite_to_one():
        raise NotFiniteToOne("a zero-slope affine case has infinite fibres")
    lo, hi = _window(w, window)
    if hi <= lo:
        raise WindowTooSmall("empty window")
    points = [x for x in range(lo, hi) if w.in_domain(x)]
    n = len(points)
    index = {x: i for i, x in enumerate(points)}
    d = [[0] * n for _ in range(n)]
    for i, x in enumerate(points):
        y = w.evaluate(x)
        if y in index:
            d[i][index[y]] = 1
    g = FgGroup(0, (k_order,) * n)
    endo = Endomorphism.make(g, [], [[] for _ in range(n)], d)
    return Materialized(g, endo, tuple(points))


def materialize_graph(g: FunctionalGraph, k_order: int) -> Materialized:
    if k_order < 2:
        raise InputError("korder", "coefficient order must be at least 2")
    n = g.n
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        d[i][g.successors[i]] = 1
    grp = FgGroup(0, (k_order,) * n)
    return Materialized(grp, Endomorphism.make(grp, [], [[] for _ in range(n)], d),
                        tuple(range(n)))


def shift_pattern_matrix(kind: str, n: int, offset: int = 0) -> list[list[int]]:
    """Direct constructions of the truncated shift patterns for comparison.

    left: row i reads coordinate i+1 (drop head). right: row i reads
    max(i-1, 0) (the direct-sum approximation of prepend-zero). two_sided:
    row i reads i-1 on a window of Z shifted by ``offset``.
    """
    d = [[0] * n for _ in range(n)]
    for i in range(n):
        if kind == "left":
            j = i + 1
        elif kind == "right":
            j = max(i - 1, 0)
        elif kind == "two_sided":
            j = i - 1
        else:
            raise InputError("kind", f"unknown shift pattern {kind!r}")
        if 0 <= j < n:
            d[i][j] = 1
    return d
