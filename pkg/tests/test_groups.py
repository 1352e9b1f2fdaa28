import random

import pytest

from stringdyn import intlin
from stringdyn.errors import AmbientMismatch, DimensionMismatch, InputError
from stringdyn.groups import (
    Endomorphism,
    FgGroup,
    QuotientPresentation,
    Subgroup,
    SubgroupPresentation,
    direct_sum,
    product_endo,
    smith_decompose,
    solve_preimage,
    subgroup_canonicalize,
    subgroup_combine,
    subgroup_transport,
)

Z = FgGroup(1)
Z2 = FgGroup(2)


def corzan():
    # phi(e1) = e1, phi(e2) = e1 + e2 on Z^2, column action A = [[1,1],[0,1]]
    return Endomorphism.make(Z2, [[1, 1], [0, 1]], [], [])


def random_group(rng, max_rank=2, pool=(2, 3, 4, 9)):
    r = rng.randint(0, max_rank)
    k = rng.randint(0, 2)
    tors = []
    cur = 1
    for _ in range(k):
        choices = [d for d in pool if d % cur == 0] if cur > 1 else list(pool)
        if not choices:
            break
        cur = rng.choice(choices)
        tors.append(cur)
    return FgGroup(r, tuple(tors))


def random_endo(rng, g, lo=-5, hi=5):
    r, k = g.free_rank, len(g.torsion)
    a = [[rng.randint(lo, hi) for _ in range(r)] for _ in range(r)]
    c = [[rng.randint(lo, hi) for _ in range(r)] for _ in range(k)]
    d = []
    for j in range(k):
        row = []
        for i in range(k):
            step = g.torsion[j] // __import__("math").gcd(g.torsion[i], g.torsion[j])
            row.append(step * rng.randint(lo, hi))
        d.append(row)
    return Endomorphism.make(g, a, c, d)


def random_element(rng, g, lo=-6, hi=6):
    return g.element([rng.randint(lo, hi) for _ in range(g.free_rank)],
                     [rng.randint(0, d - 1) for d in g.torsion])


def test_group_validation():
    with pytest.raises(InputError):
        FgGroup(-1)
    with pytest.raises(InputError):
        FgGroup(0, (3, 2))
    with pytest.raises(InputError):
        FgGroup(0, (1,))
    assert FgGroup(0, ()).is_trivial
    assert FgGroup(0, (2, 4)).order() == 8
    assert FgGroup(1, (2,)).order() is None


def test_element_arithmetic():
    g = FgGroup(1, (4,))
    x = g.element([3], [3])
    y = g.element([-1], [2])
    assert (x + y) == g.element([2], [1])
    assert (x - x).is_zero
    assert x.scale(4) == g.element([12], [0])
    assert g.element([0], [2]).order() == 2
    assert x.order() is None


def test_endo_congruence_condition():
    g = FgGroup(0, (2, 4))
    # Z/2 -> Z/4 must land in multiples of 2
    with pytest.raises(InputError):
        Endomorphism(g, (), ((), ()), ((0, 0), (1, 0)))
    e = Endomorphism.make(g, [], [[], []], [[1, 1], [2, 2]])
    x = g.element([], [1, 3])
    assert e.apply(x) == g.element([], [0, 0])


def test_endo_compose_power():
    rng = random.Random(3)
    for _ in range(60):
        g = random_group(rng)
        f1 = random_endo(rng, g)
        f2 = random_endo(rng, g)
        x = random_element(rng, g)
        assert f1.compose(f2).apply(x) == f1.apply(f2.apply(x))
        assert f1.power(3).apply(x) == f1.apply(f1.apply(f1.apply(x)))
        assert f1.power(0).apply(x) == x


def test_smith_decompose_surface():
    u, s, v = smith_decompose([[2, 4], [6, 8]])
    assert intlin.smith_diagonal(s) == [2, 4]


def test_canonicalize_empty_is_trivial():
    assert subgroup_canonicalize([], Z2).is_trivial


def test_canonicalize_diag_2_3():
    # Brute-force oracle: residues of Z^2 modulo <(2,0),(0,3)> in the 2x3 box.
    h = subgroup_canonicalize([Z2.element([2, 0]), Z2.element([0, 3])], Z2)
    assert h.row_list == [[2, 0], [0, 3]]
    reps = {tuple(intlin.reduce_mod_rows([x, y], h.row_list)) for x in range(2) for y in range(3)}
    assert len(reps) == 6
    assert h.index() == 6


def test_canonicalize_e1_line():
    h = subgroup_canonicalize([Z2.element([1, 0])], Z2)
    assert h.row_list == [[1, 0]]
    assert h.index() is None


def test_canonicalize_idempotent_order_free():
    rng = random.Random(11)
    for _ in range(80):
        g = random_group(rng)
        gens = [random_element(rng, g) for _ in range(rng.randint(0, 4))]
        h = subgroup_canonicalize(gens, g)
        rng.shuffle(gens)
        assert subgroup_canonicalize(gens, g) == h
        assert subgroup_canonicalize(h.generators(), g) == h


def test_canonicalize_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        subgroup_canonicalize([Z.element([1])], Z2)


def test_combine_identities():
    rng = random.Random(13)
    for _ in range(40):
        g = random_group(rng)
        h = subgroup_canonicalize([random_element(rng, g) for _ in range(2)], g)
        k = subgroup_canonicalize([random_element(rng, g) for _ in range(2)], g)
        assert subgroup_combine("sum", h, Subgroup.trivial(g)) == h
        assert subgroup_combine("intersect", h, Subgroup.full(g)) == h
        assert subgroup_combine("sum", h, subgroup_combine("intersect", h, k)) == h
        assert subgroup_combine("intersect", h, subgroup_combine("sum", h, k)) == h


def test_combine_coprime_intersection():
    h2 = subgroup_canonicalize([Z2.element([2, 0]), Z2.element([0, 2])], Z2)
    h3 = subgroup_canonicalize([Z2.element([3, 0]), Z2.element([0, 3])], Z2)
    assert h2.intersect(h3).row_list == [[6, 0], [0, 6]]


def test_saturate_primitive_vector():
    h = subgroup_canonicalize([Z2.element([2, 4])], Z2)
    sat = subgroup_combine("saturate", h)
    assert sat.row_list == [[1, 2]]
    assert sat.contains(Z2.element([1, 2]))
    assert h.contains(Z2.element([1, 2]).scale(2))


def test_saturate_touches_all_torsion():
    g = FgGroup(1, (4,))
    h = subgroup_canonicalize([g.element([2], [0])], g)
    sat = h.saturate()
    # every torsion element has a multiple (zero) inside h
    assert sat.contains(g.element([0], [1]))
    assert sat.contains(g.element([1], [0]))


def test_transport_image_identity_and_mu2():
    idz = Endomorphism.identity(Z)
    mu2 = Endomorphism.multiplication(Z, 2)
    h3 = subgroup_canonicalize([Z.element([3])], Z)
    assert subgroup_transport("image", idz, h3) == h3
    assert subgroup_transport("image", mu2, Subgroup.full(Z)).row_list == [[2]]
    # Brute-force oracle: x in [-30, 30] with 2x in 3Z is exactly 3Z.
    pre = subgroup_transport("preimage", mu2, h3)
    want = {x for x in range(-30, 31) if (2 * x) % 3 == 0}
    got = {x for x in range(-30, 31) if pre.contains(Z.element([x]))}
    assert got == want
    assert pre == h3


def test_transport_ambient_mismatch():
    mu2 = Endomorphism.multiplication(Z, 2)
    with pytest.raises(AmbientMismatch):
        subgroup_transport("image", mu2, Subgroup.full(Z2))


def test_preimage_and_image_adjoint_containment():
    rng = random.Random(17)
    for _ in range(60):
        g = random_group(rng)
        phi = random_endo(rng, g)
        h = subgroup_canonicalize([random_element(rng, g) for _ in range(2)], g)
        pre = h.preimage_under(phi)
        img_back = pre.image_under(phi)
        assert h.contains_subgroup(img_back)
        img = h.image_under(phi)
        assert img.preimage_under(phi).contains_subgroup(h)


def test_solve_preimage_identity():
    rng = random.Random(19)
    for _ in range(20):
        g = random_group(rng)
        b = random_element(rng, g)
        assert solve_preimage(Endomorphism.identity(g), b) == b


def test_solve_preimage_corzan():
    phi = corzan()
    b = Z2.element([1, 1])
    x = solve_preimage(phi, b)
    assert x == Z2.element([0, 1])
    assert phi.apply(x) == b


def test_solve_preimage_odd_fails():
    mu2 = Endomorphism.multiplication(Z, 2)
    assert solve_preimage(mu2, Z.element([1])) is None
    assert solve_preimage(mu2, Z.element([4])) == Z.element([2])


def test_solve_preimage_with_constraint():
    g = FgGroup(2)
    phi = Endomorphism.make(g, [[2, 0], [0, 1]], [], [])
    h = subgroup_canonicalize([g.element([0, 1])], g)
    got = solve_preimage(phi, g.element([0, 3]), constraint=h)
    assert got == g.element([0, 3])
    # target outside phi(constraint): no solution inside the constraint
    assert solve_preimage(phi, g.element([2, 0]), constraint=h) is None
    assert solve_preimage(phi, g.element([2, 0])) == g.element([1, 0])


def test_solve_preimage_randomized_postcheck():
    rng = random.Random(23)
    for _ in range(80):
        g = random_group(rng)
        phi = random_endo(rng, g)
        x = random_element(rng, g)
        b = phi.apply(x)
        got = solve_preimage(phi, b)
        assert got is not None
        assert phi.apply(got) == b


def test_json_roundtrips_bit_exact():
    g = FgGroup(2, (2, 4))
    assert FgGroup.from_json(g.to_json()) == g
    phi = random_endo(random.Random(1), g)
    assert Endomorphism.from_json(g, phi.to_json()) == phi
    h = subgroup_canonicalize([random_element(random.Random(2), g) for _ in range(2)], g)
    assert Subgroup.from_json(h.to_json()) == h


def test_endo_from_json_validates_congruence():
    g = FgGroup(0, (2, 4))
    with pytest.raises(InputError) as ei:
        Endomorphism.from_json(g, {"A": [], "C": [[], []], "D": [[0, 0], [1, 0]]})
    assert "D[1][0]" in str(ei.value)


def test_subgroup_order_and_index():
    g = FgGroup(0, (2, 4))
    full = Subgroup.full(g)
    assert full.order() == 8
    assert full.index() == 1
    two = subgroup_canonicalize([g.element([], [0, 2])], g)
    assert two.order() == 2
    assert two.index() == 4
    mixed = FgGroup(1, (3,))
    line = subgroup_canonicalize([mixed.element([1], [0])], mixed)
    assert line.order() is None
    assert line.index() == 3  # quotient is Z/3
    assert subgroup_canonicalize([], mixed).index() is None


def test_subgroup_presentation_roundtrip():
    rng = random.Random(29)
    for _ in range(60):
        g = random_group(rng)
        h = subgroup_canonicalize([random_element(rng, g) for _ in range(rng.randint(1, 3))], g)
        pres = SubgroupPresentation.of(h)
        # abstract order matches subgroup order
        assert pres.group.order() == h.order()
        for _ in range(5):
            e = random_element(rng, pres.group)
            amb = pres.embed(e)
            assert h.contains(amb)
            assert pres.coords(amb) == e
        e1, e2 = random_element(rng, pres.group), random_element(rng, pres.group)
        assert pres.embed(e1) + pres.embed(e2) == pres.embed(e1 + e2)


def test_restriction_commutes():
    rng = random.Random(31)
    done = 0
    while done < 40:
        g = random_group(rng)
        phi = random_endo(rng, g)
        # build an invariant subgroup: closure of a random element's orbit span
        h = subgroup_canonicalize([random_element(rng, g)], g)
        for _ in range(20):
            nxt = h.sum(h.image_under(phi))
            if nxt == h:
                break
            h = nxt
        else:
            continue
        pres = SubgroupPresentation.of(h)
        res = pres.restrict(phi)
        for _ in range(5):
            e = random_element(rng, pres.group)
            assert pres.embed(res.apply(e)) == phi.apply(pres.embed(e))
        done += 1


def test_quotient_commutes():
    rng = random.Random(37)
    done = 0
    while done < 40:
        g = random_group(rng)
        phi = random_endo(rng, g)
        h = subgroup_canonicalize([random_element(rng, g)], g)
        for _ in range(20):
            nxt = h.sum(h.image_under(phi))
            if nxt == h:
                break
            h = nxt
        else:
            continue
        q = QuotientPresentation.of(h)
        bar = q.induce(phi)
        for _ in range(5):
            x = random_element(rng, g)
            assert q.project(phi.apply(x)) == bar.apply(q.project(x))
            assert q.project(q.section(q.project(x))) == q.project(x)
        # kernel of projection is exactly h
        assert q.project_subgroup(h).is_trivial
        done += 1


def test_quotient_known_shape():
    # Z^2 / <e1> is Z; Z^2 / <2e1, e2> is Z/2
    q1 = QuotientPresentation.of(subgroup_canonicalize([Z2.element([1, 0])], Z2))
    assert q1.group == FgGroup(1)
    q2 = QuotientPresentation.of(
        subgroup_canonicalize([Z2.element([2, 0]), Z2.element([0, 1])], Z2))
    assert q2.group == FgGroup(0, (2,))


def test_direct_sum():
    g1 = FgGroup(1, (2,))
    g2 = FgGroup(0, (3,))
    g, emb1, emb2, q = direct_sum(g1, g2)
    assert g.free_rank == 1
    assert sorted(g.torsion) == [6]
    rng = random.Random(41)
    for _ in range(20):
        x1, y1 = random_element(rng, g1), random_element(rng, g1)
        assert emb1(x1) + emb1(y1) == emb1(x1 + y1)
        x2 = random_element(rng, g2)
        assert emb1(x1) + emb2(x2) == emb2(x2) + emb1(x1)
    f1 = random_endo(rng, g1)
    f2 = random_endo(rng, g2)
    f = product_endo(q, g1, g2, f1, f2)
    for _ in range(20):
        x1 = random_element(rng, g1)
        x2 = random_element(rng, g2)
        assert f.apply(emb1(x1) + emb2(x2)) == emb1(f1.apply(x1)) + emb2(f2.apply(x2))


def test_trivial_group_edge_cases():
    t = FgGroup(0, ())
    assert list(t.elements()) == [t.zero()]
    e = Endomorphism.identity(t)
    assert e.apply(t.zero()) == t.zero()
    assert Subgroup.full(t) == Subgroup.trivial(t)
    assert solve_preimage(e, t.zero()) == t.zero()
