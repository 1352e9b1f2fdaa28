import random

import pytest

from stringdyn.errors import (
    GarlandCheckFailed,
    NoRepeatFound,
    PrefixTooShort,
    PseudostringFailure,
    VerdictMismatch,
)
from stringdyn.groups import Endomorphism, FgGroup
from stringdyn.strings import (
    INFINITE,
    ZERO,
    StringPrefix,
    build_garland,
    build_pseudostring,
    fan_family,
    garland_family,
    null_from_singular,
    recheck_family,
    string_verdicts,
    verify_distinct,
    verify_relation,
    witness_family,
)

from oracles import random_endo_on, random_finite_group

Z = FgGroup(1)
Z2 = FgGroup(2)


def corzan():
    return Endomorphism.make(Z2, [[1, 1], [0, 1]], [], [])


def values(phi):
    return tuple(v.value for v in string_verdicts(phi))


def test_verdicts_corzan():
    assert values(corzan()) == (INFINITE, INFINITE, ZERO)


def test_verdicts_mu2_on_Z():
    assert values(Endomorphism.multiplication(Z, 2)) == (ZERO, ZERO, ZERO)


def test_verdicts_finite_groups_always_zero():
    rng = random.Random(61)
    for _ in range(25):
        g = random_finite_group(rng, max_order=128)
        phi = random_endo_on(rng, g)
        assert values(phi) == (ZERO, ZERO, ZERO)


def test_verdicts_automorphism_shear():
    # the shear is an automorphism with a non-periodic direction
    assert values(Endomorphism.make(Z2, [[1, 2], [0, 1]], [], [])) == (INFINITE, INFINITE, ZERO)
    # -identity is periodic: all zero
    assert values(Endomorphism.make(Z2, [[-1, 0], [0, -1]], [], [])) == (ZERO, ZERO, ZERO)


def test_pseudostring_corzan_matches_known_terms():
    phi = corzan()
    s = build_pseudostring(phi, Z2.element([1, 1]), 3)
    assert [t.lift() for t in s.terms] == [[1, 1], [0, 1], [-1, 1], [-2, 1]]
    assert s.is_string


def test_pseudostring_identity_constant_flagged():
    g = FgGroup(1, (3,))
    phi = Endomorphism.identity(g)
    x = g.element([2], [1])
    s = build_pseudostring(phi, x, 4)
    assert s.relation_checked and not s.distinct
    assert not s.is_string
    assert set(s.terms) == {x}


def test_pseudostring_rejections():
    phi = corzan()
    with pytest.raises(PseudostringFailure) as ei:
        build_pseudostring(phi, Z2.zero(), 3)
    assert ei.value.reason == "degenerate"
    mu2 = Endomorphism.multiplication(Z, 2)
    with pytest.raises(PseudostringFailure) as ei:
        build_pseudostring(mu2, Z.element([1]), 3)
    assert ei.value.reason == "not_in_core"


def test_pseudostring_fibonacci_backward():
    # Oracle: re-apply A to every solved preimage.
    fib = Endomorphism.make(Z2, [[0, 1], [1, 1]], [], [])
    s = build_pseudostring(fib, Z2.element([1, 0]), 2)
    assert [t.lift() for t in s.terms] == [[1, 0], [-1, 1], [2, -1]]
    assert verify_relation(s.terms, fib.apply)


def test_garland_corzan_small_passes_large_fails():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 14)
    fam = garland_family(base, 2, phi, "plain", n=10)
    assert len(fam.strings) == 2
    assert fam.evidence.guarantee == "empirical"
    assert recheck_family(fam, phi.apply, Z2.zero())["passed"]
    with pytest.raises(GarlandCheckFailed):
        garland_family(base, 4, phi, "plain", n=10)


def test_garland_prefix_too_short():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 3)
    with pytest.raises(PrefixTooShort):
        garland_family(base, 3, phi, "plain", n=5)


def test_garland_rejects_zero_base():
    phi = corzan()
    base = StringPrefix((Z2.zero(),) * 5, True, False)
    with pytest.raises(PseudostringFailure):
        build_garland(base, 2, 2, phi.apply, zero=Z2.zero())


def test_convex_garland_corzan():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 16)
    fam = garland_family(base, 3, phi, "convex", n=10)
    assert fam.strategy == "convex_garland"
    # convex garland members have pairwise distinct torsion-free "weights"
    firsts = [p.terms[0].lift()[1] for p in fam.strings]
    assert firsts == [2, 3, 4]
    assert recheck_family(fam, phi.apply, Z2.zero())["passed"]


def test_fan_corzan_natural_multipliers():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 12)
    fam = fan_family(base, phi, count=4, n=12, multipliers=[1, 2, 3, 4])
    assert fam.multipliers == (1, 2, 3, 4)
    assert fam.evidence.guarantee == "invariant-functional-separation"
    assert recheck_family(fam, phi.apply, Z2.zero())["passed"]
    # multiplier list {1} returns the base itself
    fam1 = fan_family(base, phi, count=1, n=12, multipliers=[1])
    assert fam1.strings[0].terms == base.terms[:13]


def test_fan_corzan_prime_selection():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 10)
    fam = fan_family(base, phi, count=3, n=10)
    assert fam.multipliers == (2, 3, 5)
    assert fam.evidence.guarantee == "prime-fan-coprime"
    assert recheck_family(fam, phi.apply, Z2.zero())["passed"]


def test_null_from_singular_windowed_left_shift():
    # Truncated left shift on (Z/2)^30: x_n = e_n + e_(n+5) is a pseudostring
    # whose forward orbit reaches the zero vector; the difference construction
    # must emit a verified null string with 20 distinct terms.
    w = 30
    g = FgGroup(0, (2,) * w)
    d = [[1 if j == i + 1 else 0 for j in range(w)] for i in range(w)]
    shift = Endomorphism.make(g, [], [[] for _ in range(w)], d)

    def unit(i):
        return g.element([], [1 if j == i else 0 for j in range(w)])

    terms = tuple(unit(n) + unit(n + 5) for n in range(25))
    assert verify_relation(terms, shift.apply)
    base = StringPrefix(terms, True, True)
    out = null_from_singular(base, shift.apply, g.zero(), horizon=40, length=19)
    assert len(out.terms) == 20
    assert out.kind == ("null", 1)
    assert verify_distinct(out.terms)
    assert shift.apply(out.terms[0]) == g.zero()


def test_null_from_singular_already_null_degenerates_to_shift():
    w = 12
    g = FgGroup(0, (2,) * w)
    d = [[1 if j == i + 1 else 0 for j in range(w)] for i in range(w)]
    shift = Endomorphism.make(g, [], [[] for _ in range(w)], d)

    def unit(i):
        return g.element([], [1 if j == i else 0 for j in range(w)])

    base = StringPrefix(tuple(unit(n) for n in range(10)), True, True)
    out = null_from_singular(base, shift.apply, g.zero(), horizon=10, length=8)
    # x0 already maps to the fixed point 0, so the repeat pair is (-2, -1) and
    # the difference formula gives y_n = x_(n-1) - x_n with x_(-1) = 0
    assert out.terms[0] == base.terms[0]
    for n in range(1, 9):
        assert out.terms[n] == base.terms[n - 1] - base.terms[n]
    assert out.kind == ("null", 1)


def test_null_from_singular_no_repeat():
    phi = corzan()
    base = build_pseudostring(phi, Z2.element([0, 1]), 10)
    with pytest.raises(NoRepeatFound):
        null_from_singular(base, phi.apply, Z2.zero(), horizon=50)


def test_witness_family_corzan_ns_via_fan():
    phi = corzan()
    fam = witness_family(phi, "ns", count=5, length=20)
    assert fam.strategy == "fan"
    assert len(fam.strings) == 5
    for p in fam.strings:
        assert p.kind == ("nonsingular",)
        assert len(p.terms) == 21
    assert fam.evidence.guarantee == "prime-fan-coprime"
    assert recheck_family(fam, phi.apply, Z2.zero())["passed"]


def test_witness_family_s_delegates():
    phi = corzan()
    fam = witness_family(phi, "s", count=3, length=10)
    assert len(fam.strings) == 3


def test_witness_family_small_count_uses_garland():
    phi = corzan()
    fam = witness_family(phi, "ns", count=2, length=10)
    assert fam.strategy == "garland"
    assert fam.evidence.guarantee == "empirical"


def test_witness_family_verdict_mismatch():
    phi = corzan()
    with pytest.raises(VerdictMismatch):
        witness_family(phi, "s0", count=3, length=10)
    mu2 = Endomorphism.multiplication(Z, 2)
    with pytest.raises(VerdictMismatch):
        witness_family(mu2, "s", count=3, length=10)


def test_witness_family_mixed_torsion_group():
    # Z^2 + Z/4 with the shear on the free part: fan needs the torsion-killing
    # premultiplier, and every emitted prefix must still verify in the group.
    g = FgGroup(2, (4,))
    phi = Endomorphism.make(g, [[1, 1], [0, 1]], [[0, 0]], [[1]])
    s, ns, s0 = string_verdicts(phi)
    assert ns.value == INFINITE
    fam = witness_family(phi, "ns", count=4, length=12)
    assert len(fam.strings) == 4
    assert recheck_family(fam, phi.apply, g.zero())["passed"]
    if fam.strategy == "fan":
        assert all(m % 4 == 0 for m in fam.multipliers)


def test_verdict_json():
    s, ns, s0 = string_verdicts(corzan())
    j = s.to_json()
    assert j == {"kind": "s", "value": "infinite", "basis": "core-exceeds-periodic"}
    assert s.symbol() == "inf" and s0.symbol() == "0"
