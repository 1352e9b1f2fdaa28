"""Finitely generated abelian groups Z^r + Z/d1 + ... + Z/dk and their maps.

A subgroup is represented by the full-preimage lattice of its elements in
Z^(r+k): the row lattice always contains d_i * e_(r+i), so one Hermite form
serves mixed free/torsion arithmetic uniformly. Endomorphisms are block
integer matrices acting on column lifts; the congruence condition on the
torsion-to-torsion block makes the lifted matrix commute with projection.

Everything here is immutable and pure: safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm

from . import intlin
from .errors import AmbientMismatch, DimensionMismatch, InputError


@dataclass(frozen=True)
class FgGroup:
    """Invariant-factor form: free rank ``r`` and torsion chain d1 | d2 | ... | dk."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise InputError("free_rank", "must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise InputError("torsion", f"invariant {d} must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InputError("torsion", f"divisibility chain broken: {a} does not divide {b}")

    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.dim == 0

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def exponent(self) -> int:
        return self.torsion[-1] if self.torsion else 1

    def torsion_relation_rows(self) -> list[list[int]]:
        """Rows d_i * e_(r+i): the kernel lattice of the projection Z^n -> G."""
        r, n = self.free_rank, self.dim
        return [[self.torsion[i] if j == r + i else 0 for j in range(n)]
                for i in range(len(self.torsion))]

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.free_rank, (0,) * len(self.torsion))

    def element(self, free=(), torsion=()) -> GroupElement:
        return GroupElement(self, tuple(free), tuple(t % d for t, d in zip(torsion, self.torsion)))

    def from_lift(self, vec) -> GroupElement:
        if len(vec) != self.dim:
            raise DimensionMismatch(f"lift of length {len(vec)} for dimension {self.dim}")
        r = self.free_rank
        return self.element(vec[:r], vec[r:])

    def elements(self):
        """All elements; only for finite groups."""
        if self.free_rank:
            raise InputError("group", "cannot enumerate an infinite group")
        def rec(i, acc):
            if i == len(self.torsion):
                yield self.element((), acc)
                return
            for t in range(self.torsion[i]):
                yield from rec(i + 1, acc + [t])
        yield from rec(0, [])

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @staticmethod
    def from_json(obj) -> FgGroup:
        try:
            return FgGroup(int(obj["free_rank"]), tuple(int(d) for d in obj.get("torsion", ())))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("group", f"bad group object: {exc}") from exc


@dataclass(frozen=True)
class GroupElement:
    group: FgGroup
    free: tuple[int, ...]
    torsion: tuple[int, ...]

    def __post_init__(self):
        if len(self.free) != self.group.free_rank or len(self.torsion) != len(self.group.torsion):
            raise DimensionMismatch("element shape disagrees with group")
        for t, d in zip(self.torsion, self.group.torsion):
            if not 0 <= t < d:
                raise DimensionMismatch("torsion residue not reduced")

    def lift(self) -> list[int]:
        return list(self.free) + list(self.torsion)

    @property
    def is_zero(self) -> bool:
        return not (any(self.free) or any(self.torsion))

    def __add__(self, other: GroupElement) -> GroupElement:
        self._same(other)
        return self.group.element(
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple(a + b for a, b in zip(self.torsion, other.torsion)),
        )

    def __neg__(self) -> GroupElement:
        return self.group.element(tuple(-a for a in self.free), tuple(-a for a in self.torsion))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def scale(self, m: int) -> GroupElement:
        return self.group.element(tuple(m * a for a in self.free), tuple(m * a for a in self.torsion))

    def order(self) -> int | None:
        """Element order, or None when infinite."""
        if any(self.free):
            return None
        return reduce(lcm, (d // gcd(d, t) for t, d in zip(self.torsion, self.group.torsion)), 1)

    def _same(self, other: GroupElement) -> None:
        if self.group != other.group:
            raise AmbientMismatch("elements of different groups")


@dataclass(frozen=True)
class Endomorphism:
    """phi(u, t) = (A u, C u + D t) with D[j][i] a multiple of d_j / gcd(d_i, d_j)."""

    group: FgGroup
    A: tuple[tuple[int, ...], ...]
    C: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        r, k = self.group.free_rank, len(self.group.torsion)
        if len(self.A) != r or any(len(row) != r for row in self.A):
            raise DimensionMismatch("A block must be r x r")
        if len(self.C) != k or any(len(row) != r for row in self.C):
            raise DimensionMismatch("C block must be k x r")
        if len(self.D) != k or any(len(row) != k for row in self.D):
            raise DimensionMismatch("D block must be k x k")
        ds = self.group.torsion
        for j in range(k):
            for t in self.C[j]:
                if not 0 <= t < ds[j]:
                    raise DimensionMismatch("C entries must be reduced mod d_j")
            for i in range(k):
                if not 0 <= self.D[j][i] < ds[j]:
                    raise DimensionMismatch("D entries must be reduced mod d_j")
                step = ds[j] // gcd(ds[i], ds[j])
                if self.D[j][i] % step:
                    raise InputError(
                        f"D[{j}][{i}]",
                        f"must be a multiple of {step} to map Z/{ds[i]} into Z/{ds[j]}",
                    )

    @staticmethod
    def make(group: FgGroup, a, c, d) -> Endomorphism:
        """Build with row-wise reduction of the residue blocks."""
        ds = group.torsion
        cc = tuple(tuple(x % ds[j] for x in row) for j, row in enumerate(c))
        dd = tuple(tuple(x % ds[j] for x in row) for j, row in enumerate(d))
        return Endomorphism(group, tuple(tuple(row) for row in a), cc, dd)

    @staticmethod
    def identity(group: FgGroup) -> Endomorphism:
        r, k = group.free_rank, len(group.torsion)
        return Endomorphism.make(group, intlin.identity(r),
                                 [[0] * r for _ in range(k)], intlin.identity(k))

    @staticmethod
    def zero(group: FgGroup) -> Endomorphism:
        r, k = group.free_rank, len(group.torsion)
        return Endomorphism.make(group, intlin.zeros(r, r),
                                 intlin.zeros(k, r), intlin.zeros(k, k))

    @staticmethod
    def multiplication(group: FgGroup, m: int) -> Endomorphism:
        r, k = group.free_rank, len(group.torsion)
        return Endomorphism.make(group, [[m if i == j else 0 for j in range(r)] for i in range(r)],
                                 intlin.zeros(k, r),
                                 [[m if i == j else 0 for j in range(k)] for i in range(k)])

    def apply(self, x: GroupElement) -> GroupElement:
        if x.group != self.group:
            raise AmbientMismatch("element of a different group")
        u = intlin.mat_vec([list(row) for row in self.A], list(x.free))
        t = [sum(c * a for c, a in zip(row, x.free)) + sum(d * b for d, b in zip(drow, x.torsion))
             for row, drow in zip(self.C, self.D)]
        return self.group.element(u, t)

    def compose(self, other: Endomorphism) -> Endomorphism:
        """self after other."""
        if self.group != other.group:
            raise AmbientMismatch("endomorphisms of different groups")
        r, k = self.group.free_rank, len(self.group.torsion)

        def mul(x, y, rows, inner, cols):  # shape-explicit product
            return [[sum(x[i][t] * y[t][j] for t in range(inner)) for j in range(cols)]
                    for i in range(rows)]

        a = mul(self.A, other.A, r, r, r)
        ca = mul(self.C, other.A, k, r, r)
        dc = mul(self.D, other.C, k, k, r)
        c = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(ca, dc)]
        d = mul(self.D, other.D, k, k, k)
        return Endomorphism.make(self.group, a, c, d)

    def power(self, n: int) -> Endomorphism:
        assert n >= 0
        out = Endomorphism.identity(self.group)
        base = self
        while n:
            if n & 1:
                out = out.compose(base)
            base = base.compose(base)
            n >>= 1
        return out

    def __add__(self, other: Endomorphism) -> Endomorphism:
        if self.group != other.group:
            raise AmbientMismatch("endomorphisms of different groups")
        add = lambda x, y: [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(x, y)]
        return Endomorphism.make(self.group, add(self.A, other.A), add(self.C, other.C),
                                 add(self.D, other.D))

    def __sub__(self, other: Endomorphism) -> Endomorphism:
        neg = Endomorphism.make(other.group, [[-x for x in r] for r in other.A],
                                [[-x for x in r] for r in other.C],
                                [[-x for x in r] for r in other.D])
        return self + neg

    def lifted_matrix(self) -> list[list[int]]:
        """(r+k) x (r+k) block matrix [[A, 0], [C, D]] acting on column lifts."""
        r, k = self.group.free_rank, len(self.group.torsion)
        n = r + k
        m = intlin.zeros(n, n)
        for i in range(r):
            for j in range(r):
                m[i][j] = self.A[i][j]
        for i in range(k):
            for j in range(r):
                m[r + i][j] = self.C[i][j]
            for j in range(k):
                m[r + i][r + j] = self.D[i][j]
        return m

    def is_identity(self) -> bool:
        return self == Endomorphism.identity(self.group)

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "C": [list(r) for r in self.C],
                "D": [list(r) for r in self.D]}

    @staticmethod
    def from_json(group: FgGroup, obj) -> Endomorphism:
        try:
            a = [[int(x) for x in row] for row in obj["A"]]
            c = [[int(x) for x in row] for row in obj["C"]]
            d = [[int(x) for x in row] for row in obj["D"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("endo", f"bad endomorphism object: {exc}") from exc
        r, k = group.free_rank, len(group.torsion)
        if len(a) != r or any(len(row) != r for row in a):
            raise InputError("endo.A", f"must be {r} x {r}")
        if len(c) != k or any(len(row) != r for row in c):
            raise InputError("endo.C", f"must be {k} x {r}")
        if len(d) != k or any(len(row) != k for row in d):
            raise InputError("endo.D", f"must be {k} x {k}")
        ds = group.torsion
        for j in range(k):
            for i in range(k):
                step = ds[j] // gcd(ds[i], ds[j])
                if d[j][i] % step:
                    raise InputError(
                        f"endo.D[{j}][{i}]",
                        f"value {d[j][i]} is not a multiple of {step}, so Z/{ds[i]} -> Z/{ds[j]} is ill-defined",
                    )
        return Endomorphism.make(group, a, c, d)


@dataclass(frozen=True)
class Subgroup:
    """Canonical full-preimage lattice of a subgroup; rows are HNF over Z^(r+k)."""

    ambient: FgGroup
    rows: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(ambient: FgGroup, rows) -> Subgroup:
        full = [list(r) for r in rows] + ambient.torsion_relation_rows()
        return Subgroup(ambient, tuple(tuple(r) for r in intlin.hnf(full, ambient.dim)))

    @staticmethod
    def trivial(ambient: FgGroup) -> Subgroup:
        return Subgroup.from_rows(ambient, [])

    @staticmethod
    def full(ambient: FgGroup) -> Subgroup:
        return Subgroup.from_rows(ambient, intlin.identity(ambient.dim))

    @staticmethod
    def torsion_part(ambient: FgGroup) -> Subgroup:
        r, n = ambient.free_rank, ambient.dim
        rows = [[1 if j == i else 0 for j in range(n)] for i in range(r, n)]
        return Subgroup.from_rows(ambient, rows)

    @staticmethod
    def generated_by(gens, ambient: FgGroup) -> Subgroup:
        rows = []
        for g in gens:
            if g.group != ambient:
                raise DimensionMismatch("generator is not an element of the ambient group")
            rows.append(g.lift())
        sub = Subgroup.from_rows(ambient, rows)
        for g in gens:
            assert sub.contains(g), "canonicalized subgroup lost a generator"
        return sub

    @property
    def row_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def contains(self, x: GroupElement) -> bool:
        if x.group != self.ambient:
            raise AmbientMismatch("element of a different ambient group")
        return intlin.in_row_lattice(x.lift(), self.row_list)

    def contains_subgroup(self, other: Subgroup) -> bool:
        self._same(other)
        return all(intlin.in_row_lattice(list(r), self.row_list) for r in other.rows)

    @property
    def is_trivial(self) -> bool:
        return self == Subgroup.trivial(self.ambient)

    def is_full(self) -> bool:
        return self == Subgroup.full(self.ambient)

    def order(self) -> int | None:
        """Number of elements of the subgroup, or None when infinite."""
        k = len(self.ambient.torsion)
        if len(self.rows) != k:
            return None
        rel = self.ambient.torsion_relation_rows()
        if not rel:
            return 1
        return intlin.lattice_index(intlin.hnf(rel, self.ambient.dim), self.row_list)

    def index(self) -> int | None:
        """Index in the ambient group, or None when infinite."""
        if len(self.rows) != self.ambient.dim:
            return None
        piv = [next(j for j, x in enumerate(row) if x) for row in self.rows]
        out = 1
        for row, c in zip(self.rows, piv):
            out *= row[c]
        return out

    def generators(self) -> list[GroupElement]:
        """Projections of the basis rows, zero images dropped."""
        out = []
        for row in self.rows:
            g = self.ambient.from_lift(list(row))
            if not g.is_zero:
                out.append(g)
        return out

    def sum(self, other: Subgroup) -> Subgroup:
        self._same(other)
        return Subgroup.from_rows(self.ambient, self.row_list + other.row_list)

    def intersect(self, other: Subgroup) -> Subgroup:
        self._same(other)
        rows = intlin.intersect_rows(self.row_list, other.row_list, self.ambient.dim)
        return Subgroup.from_rows(self.ambient, rows)

    def saturate(self) -> Subgroup:
        rows = intlin.saturate_rows(self.row_list, self.ambient.dim)
        return Subgroup.from_rows(self.ambient, rows)

    def image_under(self, phi: Endomorphism) -> Subgroup:
        if phi.group != self.ambient:
            raise AmbientMismatch("endomorphism of a different group")
        m = phi.lifted_matrix()
        rows = [intlin.mat_vec(m, list(r)) for r in self.rows]
        return Subgroup.from_rows(self.ambient, rows)

    def preimage_under(self, phi: Endomorphism) -> Subgroup:
        if phi.group != self.ambient:
            raise AmbientMismatch("endomorphism of a different group")
        n = self.ambient.dim
        m = phi.lifted_matrix()
        basis = self.row_list
        big = [[m[i][j] for j in range(n)] + [-basis[j][i] for j in range(len(basis))]
               for i in range(n)]
        ker = intlin.kernel(big, n + len(basis))
        rows = [y[:n] for y in ker]
        return Subgroup.from_rows(self.ambient, rows)

    def _same(self, other: Subgroup) -> None:
        if self.ambient != other.ambient:
            raise AmbientMismatch("subgroups of different ambients")

    def to_json(self) -> dict:
        return {"ambient": self.ambient.to_json(), "lattice_rows": self.row_list}

    @staticmethod
    def from_json(obj) -> Subgroup:
        try:
            amb = FgGroup.from_json(obj["ambient"])
            rows = [[int(x) for x in row] for row in obj["lattice_rows"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("subgroup", f"bad subgroup object: {exc}") from exc
        for row in rows:
            if len(row) != amb.dim:
                raise InputError("subgroup.lattice_rows", "row length disagrees with ambient")
        return Subgroup.from_rows(amb, rows)


# ---------------------------------------------------------------------------
# Named operation surface


def smith_decompose(m):
    """(U, S, V) with S = U M V diagonal, divisibility chain, exact arithmetic."""
    return intlin.smith([list(r) for r in m])


def subgroup_canonicalize(gens, ambient: FgGroup) -> Subgroup:
    return Subgroup.generated_by(list(gens), ambient)


def subgroup_combine(op: str, h1: Subgroup, h2: Subgroup | None = None) -> Subgroup:
    if op == "sum":
        assert h2 is not None
        return h1.sum(h2)
    if op == "intersect":
        assert h2 is not None
        return h1.intersect(h2)
    if op == "saturate":
        return h1.saturate()
    raise InputError("op", f"unknown combine op {op!r}")


def subgroup_transport(mode: str, phi: Endomorphism, h: Subgroup) -> Subgroup:
    if mode == "image":
        return h.image_under(phi)
    if mode == "preimage":
        return h.preimage_under(phi)
    raise InputError("mode", f"unknown transport mode {mode!r}")


def solve_preimage(phi: Endomorphism, b: GroupElement,
                   constraint: Subgroup | None = None) -> GroupElement | None:
    """One x with phi(x) = b, x inside ``constraint`` when given; None if none.

    Deterministic: the lifted solution is reduced against the Hermite form of
    the relevant kernel lattice, giving the canonical coset representative.
    The answer is re-checked by applying phi before returning.
    """
    if b.group != phi.group:
        raise AmbientMismatch("target element of a different group")
    g = phi.group
    if constraint is not None and constraint.ambient != g:
        raise AmbientMismatch("constraint subgroup of a different group")
    basis = constraint.row_list if constraint is not None else intlin.identity(g.dim)
    m = phi.lifted_matrix()
    rel = g.torsion_relation_rows()
    cols = [intlin.mat_vec(m, row) for row in basis] + rel
    big = [[col[i] for col in cols] for i in range(g.dim)]
    sol = intlin.solve(big, b.lift())
    if sol is None:
        return None
    x = [0] * g.dim
    for coef, row in zip(sol[: len(basis)], basis):
        for j in range(g.dim):
            x[j] += coef * row[j]
    kernel_sub = Subgroup.trivial(g).preimage_under(phi)
    if constraint is not None:
        kernel_sub = kernel_sub.intersect(constraint)
    x = intlin.reduce_mod_rows(x, kernel_sub.row_list)
    out = g.from_lift(x)
    assert phi.apply(out) == b, "solve_preimage post-check failed"
    if constraint is not None:
        assert constraint.contains(out)
    return out


# ---------------------------------------------------------------------------
# Change-of-presentation machinery: restriction to a subgroup and quotients.


def _layout_from_invariants(s_diag: list[int], total: int) -> tuple[FgGroup, list[int], list[int]]:
    """Abstract group for Z^total modulo relations diag(s_diag).

    Returns the group, the y-positions of its free coordinates and the
    y-positions of its torsion coordinates (invariants >= 2, ascending).
    """
    free_pos = [i for i in range(total) if i >= len(s_diag) or s_diag[i] == 0]
    tors_pos = [i for i in range(len(s_diag)) if s_diag[i] >= 2]
    grp = FgGroup(len(free_pos), tuple(s_diag[i] for i in tors_pos))
    return grp, free_pos, tors_pos


@dataclass(frozen=True)
class SubgroupPresentation:
    """A subgroup H of G presented as a group in its own right.

    ``group`` is the abstract invariant-factor form of H; ``embed`` and
    ``coords`` translate elements both ways, ``push``/``pull`` translate
    subgroups, ``restrict`` builds phi|H when H is phi-invariant.
    """

    subgroup: Subgroup
    group: FgGroup
    _basis: tuple[tuple[int, ...], ...]
    _v: tuple[tuple[int, ...], ...]
    _vinv: tuple[tuple[int, ...], ...]
    _s_diag: tuple[int, ...]
    _free_pos: tuple[int, ...]
    _tors_pos: tuple[int, ...]

    @staticmethod
    def of(h: Subgroup) -> SubgroupPresentation:
        amb = h.ambient
        basis = h.row_list
        m = len(basis)
        rel_rows = amb.torsion_relation_rows()
        coords = []
        for row in rel_rows:
            c = intlin.coords_in_basis(row, basis)
            assert c is not None, "torsion relations must lie in a subgroup lattice"
            coords.append(c)
        if coords:
            u, s, v = intlin.smith(coords)
            s_diag = intlin.smith_diagonal(s)
        else:
            v = intlin.identity(m)
            s_diag = []
        vinv = _unimodular_inverse(v)
        grp, free_pos, tors_pos = _layout_from_invariants(list(s_diag), m)
        return SubgroupPresentation(
            h, grp, tuple(map(tuple, basis)), tuple(map(tuple, v)),
            tuple(map(tuple, vinv)), tuple(s_diag), tuple(free_pos), tuple(tors_pos))

    def _y_to_ambient_lift(self, y: list[int]) -> list[int]:
        x = intlin.vec_mat(y, [list(r) for r in self._vinv])
        return intlin.vec_mat(x, [list(r) for r in self._basis])

    def embed(self, e: GroupElement) -> GroupElement:
        """Abstract element of H -> element of the ambient group."""
        assert e.group == self.group
        m = len(self._basis)
        y = [0] * m
        for val, pos in zip(e.free, self._free_pos):
            y[pos] = val
        for val, pos in zip(e.torsion, self._tors_pos):
            y[pos] = val
        return self.subgroup.ambient.from_lift(self._y_to_ambient_lift(y))

    def coords(self, g: GroupElement) -> GroupElement:
        """Ambient element known to lie in H -> abstract element."""
        x = intlin.coords_in_basis(g.lift(), [list(r) for r in self._basis])
        if x is None:
            raise AmbientMismatch("element does not lie in the subgroup")
        y = intlin.vec_mat(x, [list(r) for r in self._v])
        free = tuple(y[p] for p in self._free_pos)
        tors = tuple(y[p] for p in self._tors_pos)
        return self.group.element(free, tors)

    def restrict(self, phi: Endomorphism) -> Endomorphism:
        """phi restricted to H, as an endomorphism of the abstract group."""
        assert phi.group == self.subgroup.ambient
        r, k = self.group.free_rank, len(self.group.torsion)
        a_cols, c_cols, d_cols = [], [], []
        for i in range(r):
            gen = self.group.element([1 if j == i else 0 for j in range(r)], [0] * k)
            img = phi.apply(self.embed(gen))
            if not self.subgroup.contains(img):
                raise AmbientMismatch("subgroup is not invariant under the endomorphism")
            e = self.coords(img)
            a_cols.append(list(e.free))
            c_cols.append(list(e.torsion))
        for i in range(k):
            gen = self.group.element([0] * r, [1 if j == i else 0 for j in range(k)])
            img = phi.apply(self.embed(gen))
            if not self.subgroup.contains(img):
                raise AmbientMismatch("subgroup is not invariant under the endomorphism")
            e = self.coords(img)
            assert not any(e.free), "torsion generator mapped to a free direction"
            d_cols.append(list(e.torsion))
        a = [[a_cols[j][i] for j in range(r)] for i in range(r)]
        c = [[c_cols[j][i] for j in range(r)] for i in range(k)]
        d = [[d_cols[j][i] for j in range(k)] for i in range(k)]
        return Endomorphism.make(self.group, a, c, d)

    def push_subgroup(self, s: Subgroup) -> Subgroup:
        """Subgroup of the abstract group -> subgroup of the ambient group."""
        assert s.ambient == self.group
        rows = [self.embed_lift(list(r)) for r in s.rows]
        return Subgroup.from_rows(self.subgroup.ambient, rows)

    def embed_lift(self, abstract_lift: list[int]) -> list[int]:
        m = len(self._basis)
        r = self.group.free_rank
        y = [0] * m
        for i, pos in enumerate(self._free_pos):
            y[pos] = abstract_lift[i]
        for i, pos in enumerate(self._tors_pos):
            y[pos] = abstract_lift[r + i]
        return self._y_to_ambient_lift(y)


@dataclass(frozen=True)
class QuotientPresentation:
    """G / H in invariant-factor form, with projection, section and induced maps."""

    modulus: Subgroup
    group: FgGroup
    _v: tuple[tuple[int, ...], ...]
    _vinv: tuple[tuple[int, ...], ...]
    _s_diag: tuple[int, ...]
    _free_pos: tuple[int, ...]
    _tors_pos: tuple[int, ...]

    @staticmethod
    def of(h: Subgroup) -> QuotientPresentation:
        amb = h.ambient
        basis = h.row_list
        n = amb.dim
        if basis:
            u, s, v = intlin.smith(basis)
            s_diag = intlin.smith_diagonal(s)
        else:
            v = intlin.identity(n)
            s_diag = []
        vinv = _unimodular_inverse(v)
        grp, free_pos, tors_pos = _layout_from_invariants(list(s_diag), n)
        return QuotientPresentation(h, grp, tuple(map(tuple, v)), tuple(map(tuple, vinv)),
                                    tuple(s_diag), tuple(free_pos), tuple(tors_pos))

    def project(self, g: GroupElement) -> GroupElement:
        assert g.group == self.modulus.ambient
        y = intlin.vec_mat(g.lift(), [list(r) for r in self._v])
        free = tuple(y[p] for p in self._free_pos)
        tors = tuple(y[p] for p in self._tors_pos)
        return self.group.element(free, tors)

    def section(self, e: GroupElement) -> GroupElement:
        """One ambient preimage of a quotient element."""
        assert e.group == self.group
        n = self.modulus.ambient.dim
        y = [0] * n
        r = self.group.free_rank
        for i, pos in enumerate(self._free_pos):
            y[pos] = e.free[i]
        for i, pos in enumerate(self._tors_pos):
            y[pos] = e.torsion[i]
        x = intlin.vec_mat(y, [list(rr) for rr in self._vinv])
        return self.modulus.ambient.from_lift(x)

    def induce(self, phi: Endomorphism) -> Endomorphism:
        """The endomorphism induced on G/H; requires phi(H) <= H."""
        assert phi.group == self.modulus.ambient
        if not self.modulus.contains_subgroup(self.modulus.image_under(phi)):
            raise AmbientMismatch("subgroup is not invariant under the endomorphism")
        r, k = self.group.free_rank, len(self.group.torsion)
        a_cols, c_cols, d_cols = [], [], []
        for i in range(r):
            gen = self.group.element([1 if j == i else 0 for j in range(r)], [0] * k)
            e = self.project(phi.apply(self.section(gen)))
            a_cols.append(list(e.free))
            c_cols.append(list(e.torsion))
        for i in range(k):
            gen = self.group.element([0] * r, [1 if j == i else 0 for j in range(k)])
            e = self.project(phi.apply(self.section(gen)))
            assert not any(e.free), "torsion class mapped to a free direction"
            d_cols.append(list(e.torsion))
        a = [[a_cols[j][i] for j in range(r)] for i in range(r)]
        c = [[c_cols[j][i] for j in range(r)] for i in range(k)]
        d = [[d_cols[j][i] for j in range(k)] for i in range(k)]
        return Endomorphism.make(self.group, a, c, d)

    def project_subgroup(self, s: Subgroup) -> Subgroup:
        assert s.ambient == self.modulus.ambient
        rows = [self.project(self.modulus.ambient.from_lift(list(r))).lift() for r in s.rows]
        return Subgroup.from_rows(self.group, rows)

    def lift_subgroup(self, s: Subgroup) -> Subgroup:
        """Full preimage in G of a subgroup of G/H."""
        assert s.ambient == self.group
        rows = [self.section(self.group.from_lift(list(r))).lift() for r in s.rows]
        rows += self.modulus.row_list
        return Subgroup.from_rows(self.modulus.ambient, rows)


def _unimodular_inverse(v) -> list[list[int]]:
    m = [list(r) for r in v]
    n = len(m)
    if n == 0:
        return []
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = intlin.solve(m, e)
        assert x is not None, "matrix is not unimodular"
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def direct_sum(g1: FgGroup, g2: FgGroup):
    """Invariant-factor form of G1 + G2 with the two coordinate embeddings.

    Returns ``(G, emb1, emb2)`` where each ``emb`` maps elements into G.
    The product of endomorphisms is available through ``product_endo``.
    """
    n1, n2 = g1.dim, g2.dim
    rel = []
    for row in g1.torsion_relation_rows():
        rel.append(row + [0] * n2)
    for row in g2.torsion_relation_rows():
        rel.append([0] * n1 + row)
    amb = FgGroup(n1 + n2, ())
    q = QuotientPresentation.of(Subgroup.from_rows(amb, rel))

    def emb1(x: GroupElement) -> GroupElement:
        return q.project(amb.element(tuple(x.lift()) + (0,) * n2, ()))

    def emb2(x: GroupElement) -> GroupElement:
        return q.project(amb.element((0,) * n1 + tuple(x.lift()), ()))

    return q.group, emb1, emb2, q


def product_endo(q: QuotientPresentation, g1: FgGroup, g2: FgGroup,
                 f1: Endomorphism, f2: Endomorphism) -> Endomorphism:
    """phi1 x phi2 on the direct sum produced by ``direct_sum``."""
    amb = q.modulus.ambient
    n1 = g1.dim
    lifted1 = f1.lifted_matrix()
    lifted2 = f2.lifted_matrix()
    n = amb.dim
    big = intlin.zeros(n, n)
    for i in range(n1):
        for j in range(n1):
            big[i][j] = lifted1[i][j]
    for i in range(g2.dim):
        for j in range(g2.dim):
            big[n1 + i][n1 + j] = lifted2[i][j]
    phi_amb = Endomorphism.make(amb, big, [], [])
    return q.induce(phi_amb)


def dumps_canonical(obj) -> str:
    """Deterministic JSON text used for every machine-readable artifact."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
