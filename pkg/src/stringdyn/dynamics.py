"""Dynamical subgroups of an endomorphism: Per, QPer, hyperkernel, surjective core.

The computations avoid astronomically large matrix powers by splitting along
structure:

* hyperkernel: ascending chain ker(phi^n) computed as iterated preimages of
  the trivial subgroup; consecutive equality is a valid stop (the chain is
  monotone and equality propagates).
* surjective core: the free part of any phi-surjective subgroup is killed by
  the product of the characteristic factors with unit constant term (a
  surjective restriction has determinant +-1, and conversely those factors
  support a surjective action). Starting from that over-approximation the
  image chain stabilizes in finitely many steps because the quotient by the
  candidate's image is bounded by the torsion size. The fixed point is
  certified by re-checking phi(S) = S.
* periodic points: all periodic points live in W + T where W is the integer
  kernel of the squarefree product of cyclotomic characteristic factors.
  Restricted there, the free block has verified finite order L, and phi^L has
  identity free block; its periodic points have periods dividing
  lcm(1..|torsion|), which a modular binary power reaches cheaply.

Every returned subgroup carries machine-checked certificates collected in
``DynamicalProfile``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm

from . import intlin
from .errors import BoundExhausted, CertificateFailure
from .groups import (
    Endomorphism,
    FgGroup,
    QuotientPresentation,
    Subgroup,
    SubgroupPresentation,
)


def _iter_cap(group: FgGroup) -> int:
    env = os.environ.get("STRINGDYN_MAX_ITER")
    if env:
        return int(env)
    return 10 * (group.free_rank + len(group.torsion) + 1)


def kernel(phi: Endomorphism) -> Subgroup:
    """{x : phi(x) = 0} in canonical form."""
    return Subgroup.trivial(phi.group).preimage_under(phi)


def image(phi: Endomorphism) -> Subgroup:
    return Subgroup.full(phi.group).image_under(phi)


def hyperkernel(phi: Endomorphism) -> Subgroup:
    """Union of ker(phi^n); stabilization index available via ``hyperkernel_chain``."""
    return hyperkernel_chain(phi)[0]


def hyperkernel_chain(phi: Endomorphism) -> tuple[Subgroup, int]:
    cap = _iter_cap(phi.group)
    cur = kernel(phi)
    n = 1
    while True:
        nxt = cur.preimage_under(phi)
        if nxt == cur:
            return cur, n
        cur = nxt
        n += 1
        if n > cap:
            raise BoundExhausted(f"kernel chain still rising after {cap} steps")


# -- characteristic-polynomial helpers (sympy is imported lazily: the CLI's
#    symbolic paths never need it) ------------------------------------------


@lru_cache(maxsize=None)
def _factor_int_poly(coeffs: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Irreducible monic factors over Q of a monic integer polynomial.

    Returns ((coeffs_high_first, multiplicity), ...); content is discarded
    (inputs are monic).
    """
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(coeffs), x, domain="ZZ")
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        fc = [int(c) for c in sympy.Poly(fac, x).all_coeffs()]
        if fc[0] < 0:
            fc = [-c for c in fc]
        out.append((tuple(fc), int(mult)))
    return tuple(out)


@lru_cache(maxsize=None)
def _cyclotomic_order(coeffs: tuple[int, ...]) -> int | None:
    """n such that the (irreducible, monic) polynomial is the n-th cyclotomic."""
    import sympy

    deg = len(coeffs) - 1
    if deg <= 0:
        return None
    x = sympy.Symbol("x")
    n = 1
    bound = 2 * deg * deg + 4 * deg + 10
    while n <= bound:
        if sympy.totient(n) == deg:
            cyc = [int(c) for c in sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()]
            if tuple(cyc) == coeffs:
                return n
        n += 1
    return None


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _free_block(phi: Endomorphism) -> list[list[int]]:
    return [list(r) for r in phi.A]


def _unit_constant_factor_product(a: list[list[int]]) -> list[int]:
    """Product (with multiplicity) of charpoly factors with constant term +-1."""
    cp = tuple(intlin.charpoly(a))
    out = [1]
    for fac, mult in _factor_int_poly(cp):
        if abs(fac[-1]) == 1:
            for _ in range(mult):
                out = _poly_mul(out, list(fac))
    return out


def _cyclotomic_part(a: list[list[int]]) -> tuple[list[int], int]:
    """Squarefree product of cyclotomic charpoly factors and the lcm of their orders."""
    cp = tuple(intlin.charpoly(a))
    out = [1]
    order = 1
    for fac, _mult in _factor_int_poly(cp):
        n = _cyclotomic_order(fac)
        if n is not None:
            out = _poly_mul(out, list(fac))
            order = lcm(order, n)
    return out, order


def _free_kernel_subgroup(phi: Endomorphism, poly: list[int]) -> Subgroup:
    """W + T where W = integer kernel of poly(A) inside the free part."""
    g = phi.group
    r = g.free_rank
    pa = intlin.poly_eval_matrix(poly, _free_block(phi))
    ker = intlin.kernel(pa, r)
    rows = [list(row) + [0] * len(g.torsion) for row in ker]
    return Subgroup.from_rows(g, rows).sum(Subgroup.torsion_part(g))


def surjective_core(phi: Endomorphism) -> Subgroup:
    """Largest subgroup S with phi(S) = S, with the certificate re-checked."""
    g = phi.group
    poly = _unit_constant_factor_product(_free_block(phi))
    cand = _free_kernel_subgroup(phi, poly)
    cap = max(_iter_cap(g), _torsion_log2(g) + 2)
    for _ in range(cap + 1):
        nxt = cand.image_under(phi)
        if nxt == cand:
            break
        cand = nxt
    else:
        raise BoundExhausted("surjective-core image chain did not stabilize")
    if cand.image_under(phi) != cand:
        raise CertificateFailure("surjective core candidate is not phi-surjective")
    return cand


def _torsion_log2(g: FgGroup) -> int:
    n = 1
    for d in g.torsion:
        n *= d
    return n.bit_length()


def _modpow_affine(c0: list[list[int]], d0: list[list[int]], n: int,
                   torsion: tuple[int, ...], r: int):
    """(C_n, D_n) for the n-th power of [[I, 0], [C, D]], entries reduced rowwise.

    Uses C_(a+b) = C_b + D_b C_a and D_(a+b) = D_b D_a, so n may be
    astronomically large; only log2(n) modular multiplies happen.
    """
    k = len(torsion)

    def red(mat, cols):
        return [[x % torsion[j] for x in mat[j]] for j in range(k)] if cols else [
            [x % torsion[j] for x in mat[j]] for j in range(k)]

    def mul(x, y, inner, cols):
        return [[sum(x[i][t] * y[t][j] for t in range(inner)) % torsion[i]
                 for j in range(cols)] for i in range(k)]

    def add(x, y, cols):
        return [[(x[i][j] + y[i][j]) % torsion[i] for j in range(cols)] for i in range(k)]

    # accumulator = identity power (C = 0, D = I)
    acc_c = [[0] * r for _ in range(k)]
    acc_d = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    base_c = red(c0, r)
    base_d = red(d0, k)
    while n:
        if n & 1:
            # new = base after acc:  C = C_base + D_base C_acc, D = D_base D_acc
            acc_c = add(base_c, mul(base_d, acc_c, k, r), r)
            acc_d = mul(base_d, acc_d, k, k)
        nc = add(base_c, mul(base_d, base_c, k, r), r)
        nd = mul(base_d, base_d, k, k)
        base_c, base_d = nc, nd
        n >>= 1
    return acc_c, acc_d


def _lcm_up_to(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out = lcm(out, i)
    return out


def periodic_subgroup(phi: Endomorphism) -> Subgroup:
    """Per(phi) as a canonical subgroup, certified by a doubled-exponent check."""
    g = phi.group
    c_poly, order = _cyclotomic_part(_free_block(phi))
    g1 = _free_kernel_subgroup(phi, c_poly)
    pres = SubgroupPresentation.of(g1)
    phi1 = pres.restrict(phi)
    # Free block of the restriction has finite order dividing `order`.
    a1 = _free_block(phi1)
    r1 = len(a1)
    psi = phi1.power(order)
    if _free_block(psi) != intlin.identity(r1):
        raise CertificateFailure("restricted free block does not have the predicted order")
    tsize = 1
    for d in phi1.group.torsion:
        tsize *= d
    exponent = _lcm_up_to(tsize)
    per1 = _fixed_points_of_affine_power(psi, exponent)
    per2 = _fixed_points_of_affine_power(psi, 2 * exponent)
    if per1 != per2:
        raise BoundExhausted("periodic-point bound failed its doubling check")
    per = pres.push_subgroup(per1)
    if per.image_under(phi) != per:
        raise CertificateFailure("phi is not an automorphism of its periodic subgroup")
    return per


def _fixed_points_of_affine_power(psi: Endomorphism, n: int) -> Subgroup:
    """ker(psi^n - id) for psi with identity free block, via modular powering."""
    g = psi.group
    r, k = g.free_rank, len(g.torsion)
    cn, dn = _modpow_affine([list(row) for row in psi.C], [list(row) for row in psi.D],
                            n, g.torsion, r)
    # kernel of the lifted matrix of psi^n - id, which is [[0, 0], [C_n, D_n - I]]
    m = intlin.zeros(r + k, r + k)
    for i in range(k):
        for j in range(r):
            m[r + i][j] = cn[i][j]
        for j in range(k):
            m[r + i][r + j] = dn[i][j] - (1 if i == j else 0)
    basis = Subgroup.trivial(g).row_list
    big = [[m[i][j] for j in range(r + k)] + [-basis[jj][i] for jj in range(len(basis))]
           for i in range(r + k)]
    ker = intlin.kernel(big, r + k + len(basis))
    rows = [y[: r + k] for y in ker]
    return Subgroup.from_rows(g, rows)


def quasiperiodic_subgroup(phi: Endomorphism) -> Subgroup:
    """QPer(phi) = Per(phi) + hyperkernel(phi)."""
    return periodic_subgroup(phi).sum(hyperkernel(phi))


@dataclass(frozen=True)
class Classification:
    kind: str  # "periodic" | "quasi_periodic" | "neither"
    n: int | None = None
    m: int | None = None

    def to_json(self):
        if self.kind == "periodic":
            return {"kind": "periodic", "n": self.n}
        if self.kind == "quasi_periodic":
            return {"kind": "quasi_periodic", "n": self.n, "m": self.m}
        return {"kind": "neither"}


def classify_periodicity(phi: Endomorphism) -> Classification:
    """Periodic(n) if phi^n = id (minimal n), QuasiPeriodic(n, m) if phi^n = phi^m."""
    g = phi.group
    hyper, stab = hyperkernel_chain(phi)
    q = QuotientPresentation.of(hyper)
    bar = q.induce(phi)
    # bar is injective; phi is quasi-periodic iff bar has finite order.
    a = _free_block(bar)
    cp = tuple(intlin.charpoly(a))
    base = 1
    for fac, _mult in _factor_int_poly(cp):
        n = _cyclotomic_order(fac)
        if n is None:
            return Classification("neither")
        base = lcm(base, n)
    psi = bar.power(base)
    if _free_block(psi) != intlin.identity(len(a)):
        return Classification("neither")  # non-semisimple unit-root action
    e = _affine_identity_order(psi)
    if e is None:
        return Classification("neither")
    p = base * e
    # minimal shift n with phi^n (id - phi^p) = 0
    diff = Endomorphism.identity(g) - phi.power(p)
    cur = diff
    n = 0
    while not _is_zero_endo(cur):
        cur = phi.compose(cur)
        n += 1
        if n > stab + 1:
            return Classification("neither")
    if n == 0:
        return Classification("periodic", p)
    return Classification("quasi_periodic", n, n + p)


def _is_zero_endo(e: Endomorphism) -> bool:
    return e == Endomorphism.zero(e.group)


def _affine_identity_order(psi: Endomorphism) -> int | None:
    """Minimal e >= 1 with psi^e = id, for psi with identity free block; None if infinite.

    The torsion block of an injective map on a finite group is a permutation,
    so its order is the lcm of cycle lengths; the free-to-torsion block then
    needs a further integer scaling to die.
    """
    g = psi.group
    k = len(g.torsion)
    if k == 0:
        return 1
    # order of D as a permutation of the finite torsion group
    tors = FgGroup(0, g.torsion)
    dmap = Endomorphism.make(tors, [], [[] for _ in range(k)], [list(r) for r in psi.D])
    o = 1
    visited = set()
    for x in tors.elements():
        if x in visited:
            continue
        orbit = []
        cur = x
        while cur not in visited:
            visited.add(cur)
            orbit.append(cur)
            cur = dmap.apply(cur)
        if cur in orbit:  # walk closed on itself: a genuine cycle
            o = lcm(o, len(orbit) - orbit.index(cur))
        else:
            return None  # tail into an earlier orbit: D is not injective
    psi_o = psi.power(o)
    if [list(r) for r in psi_o.D] != intlin.identity(k):
        return None
    # psi_o = [[I,0],[c,I]]: (psi_o)^j has C block j*c; kill it mod torsion
    j = 1
    for i in range(k):
        for x in psi_o.C[i]:
            if x:
                d = g.torsion[i]
                j = lcm(j, d // gcd(d, x))
    return o * j


@dataclass(frozen=True)
class DynamicalProfile:
    phi: Endomorphism
    per: Subgroup
    qper: Subgroup
    hyper: Subgroup
    core: Subgroup
    classification: Classification
    certificates: tuple[tuple[str, bool], ...]

    def to_json(self):
        return {
            "per": self.per.to_json(),
            "qper": self.qper.to_json(),
            "hyperkernel": self.hyper.to_json(),
            "surjective_core": self.core.to_json(),
            "classification": self.classification.to_json(),
            "certificates": [{"name": n, "ok": ok} for n, ok in self.certificates],
        }


@lru_cache(maxsize=4096)
def profile(phi: Endomorphism) -> DynamicalProfile:
    per = periodic_subgroup(phi)
    hyper = hyperkernel(phi)
    qper = per.sum(hyper)
    core = surjective_core(phi)
    cls = classify_periodicity(phi)
    certs = (
        ("per_inside_qper", qper.contains_subgroup(per)),
        ("qper_is_per_plus_hyperkernel", qper == per.sum(hyper)),
        ("core_fixed_by_phi", core.image_under(phi) == core),
        ("per_invariant", per.contains_subgroup(per.image_under(phi))),
        ("hyperkernel_invariant", hyper.contains_subgroup(hyper.image_under(phi))),
    )
    if not all(ok for _, ok in certs):
        raise CertificateFailure(f"profile certificates failed: {certs}")
    return DynamicalProfile(phi, per, qper, hyper, core, cls, certs)
