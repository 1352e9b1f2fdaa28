import math

import pytest

from stringdyn.entropy import (
    cotrajectory_growth,
    entropy_estimate,
    shift_formula_check,
    trajectory_growth,
    _all_subgroups,
)
from stringdyn.errors import AmbientInfinite, InfiniteIndex, NotFinite
from stringdyn.groups import Endomorphism, FgGroup, Subgroup, subgroup_canonicalize
from stringdyn.selfmaps import WindowedMap, materialize_windowed

Z = FgGroup(1)


def truncated_beta(window: int, k_order: int = 2):
    wm = WindowedMap.named("pred_floor", (0, window))
    return materialize_windowed(wm, k_order)


def test_trajectory_identity_constant():
    g = FgGroup(0, (4, 8))
    f = subgroup_canonicalize([g.element([], [2, 0])], g)
    curve = trajectory_growth(Endomorphism.identity(g), f, 8)
    assert set(curve.sizes) == {2}
    assert curve.detected == "limit" and curve.limit_ratio == 1
    assert not curve.unbounded


def test_trajectory_truncated_right_shift_doubles():
    mat = truncated_beta(12)
    f = Subgroup.generated_by([mat.unit(0)], mat.group)
    curve = trajectory_growth(mat.endo, f, 12)
    assert list(curve.sizes) == [2 ** n for n in range(1, 13)]
    assert curve.detected == "limit" and curve.limit_ratio == 2
    assert math.isclose(curve.limit_log, math.log(2))


def test_trajectory_truncated_left_shift_constant():
    wm = WindowedMap.named("succ", (0, 12))
    mat = materialize_windowed(wm, 2)
    f = Subgroup.generated_by([mat.unit(0)], mat.group)
    curve = trajectory_growth(mat.endo, f, 10)
    assert set(curve.sizes) == {2}
    assert curve.limit_ratio == 1


def test_trajectory_requires_finite():
    with pytest.raises(NotFinite):
        trajectory_growth(Endomorphism.identity(Z), Subgroup.full(Z), 8)


def test_cotrajectory_identity_constant():
    h3 = subgroup_canonicalize([Z.element([3])], Z)
    curve = cotrajectory_growth(Endomorphism.identity(Z), h3, 8)
    assert set(curve.sizes) == {3}
    assert curve.limit_ratio == 1
    assert not curve.unbounded


def test_cotrajectory_mu2_3Z_constant():
    # mu2^{-1}(3Z) = 3Z (brute-checked in the groups tests), so the chain is constant
    mu2 = Endomorphism.multiplication(Z, 2)
    h3 = subgroup_canonicalize([Z.element([3])], Z)
    curve = cotrajectory_growth(mu2, h3, 8)
    assert set(curve.sizes) == {3}


def test_cotrajectory_requires_finite_index():
    mu2 = Endomorphism.multiplication(Z, 2)
    with pytest.raises(InfiniteIndex):
        cotrajectory_growth(mu2, Subgroup.trivial(Z), 8)


def test_cotrajectory_truncated_beta_kernel_of_last():
    for w in (4, 8, 12):
        mat = truncated_beta(w)
        rows = [[1 if j == i else 0 for j in range(w)] for i in range(w - 1)]
        n_last = Subgroup.from_rows(mat.group, rows)
        assert n_last.index() == 2
        curve = cotrajectory_growth(mat.endo, n_last, w)
        assert list(curve.sizes) == [2 ** n for n in range(1, w + 1)]
        assert curve.unbounded
        slope = curve.log_slopes[-1]
        assert math.isclose(slope, math.log(2))


def test_entropy_estimate_finite_group_zero():
    g = FgGroup(0, (2, 8))
    mu3 = Endomorphism.multiplication(g, 3)
    est = entropy_estimate(mu3, exhaustive=True)
    assert est.sup_ratio == 1
    assert est.log_value == 0.0
    assert est.curves > 1


def test_entropy_estimate_requires_finite_for_exhaustive():
    with pytest.raises(AmbientInfinite):
        entropy_estimate(Endomorphism.identity(Z), exhaustive=True)


def test_entropy_estimate_truncated_beta_log3():
    mat = truncated_beta(10, 3)
    est = entropy_estimate(mat.endo, exhaustive=False, n_max=8, budget=128, seed=7)
    assert est.sup_ratio == 3
    assert math.isclose(est.log_value, math.log(3))


def test_entropy_estimate_sigma_pred_floor_log2():
    mat = truncated_beta(10, 2)
    est = entropy_estimate(mat.endo, exhaustive=False, n_max=8, budget=128, seed=7)
    assert est.sup_ratio == 2


def test_all_subgroups_of_z8_z2():
    g = FgGroup(0, (2, 8))
    subs = _all_subgroups(g, 2000)
    # Z/2 + Z/8 has 11 subgroups
    assert len(subs) == 11
    orders = sorted(s.order() for s in subs)
    assert orders == [1, 2, 2, 2, 4, 4, 4, 8, 8, 8, 16]


def test_shift_formula_checks():
    for builtin, s_val in (("pred_floor", 1), ("succ", 0), ("shift_z", 1)):
        for k in (2, 3, 4):
            for check in shift_formula_check(builtin, k, [8, 12]):
                assert check.expected_ratio == k ** s_val
                assert check.match, (builtin, k, check.window)
                assert check.stable_upto >= 6


def test_curve_csv_rows():
    mat = truncated_beta(6)
    f = Subgroup.generated_by([mat.unit(0)], mat.group)
    curve = trajectory_growth(mat.endo, f, 6)
    rows = curve.csv_rows()
    assert rows[0][0] == 1 and rows[0][1] == 2
    assert len(rows) == 6


def test_trajectory_size_divides_F_power():
    import random
    from oracles import random_endo_on, random_finite_group

    rng = random.Random(81)
    for _ in range(30):
        g = random_finite_group(rng, max_order=128)
        phi = random_endo_on(rng, g)
        elem = g.element([], [rng.randrange(d) for d in g.torsion])
        f = subgroup_canonicalize([elem], g)
        if f.order() == 1:
            continue
        curve = trajectory_growth(phi, f, 8)
        for n, size in enumerate(curve.sizes, start=1):
            assert f.order() ** n % size == 0


def test_quasi_periodic_endo_has_zero_detected_entropy():
    import random
    from oracles import random_endo_on, random_finite_group

    rng = random.Random(82)
    for _ in range(20):
        g = random_finite_group(rng, max_order=128)
        phi = random_endo_on(rng, g)  # finite group: always quasi-periodic
        est = entropy_estimate(phi, exhaustive=False, n_max=10, budget=64, seed=3)
        assert est.sup_ratio == 1


def test_growth_curve_conjugation_invariance():
    import random
    from oracles import random_automorphism, random_endo_on, random_finite_group

    rng = random.Random(83)
    for _ in range(20):
        g = random_finite_group(rng, max_order=128)
        phi = random_endo_on(rng, g)
        p, p_inv = random_automorphism(rng, g)
        conj = p.compose(phi).compose(p_inv)
        elem = g.element([], [rng.randrange(d) for d in g.torsion])
        f = subgroup_canonicalize([elem], g)
        pf = subgroup_canonicalize([p.apply(elem)], g)
        if f.order() == 1:
            continue
        a = trajectory_growth(phi, f, 8)
        b = trajectory_growth(conj, pf, 8)
        assert a.sizes == b.sizes
