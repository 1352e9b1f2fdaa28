"""Cross-checks between the symbolic catalog, the lattice engine and backends."""

import random

from stringdyn.backends import MulEndo, concrete_string_numbers
from stringdyn.catalog import QMODZ, Q, Z, mu_p_verdicts, prufer, zmod
from stringdyn.dynamics import classify_periodicity
from stringdyn.groups import Endomorphism, FgGroup
from stringdyn.strings import ZERO, string_verdicts

from oracles import random_endo_on, random_finite_group


def vals(verdicts):
    return tuple(v.value for v in verdicts)


def test_catalog_matches_engine_on_Z_and_Zn():
    for p in (2, 3, 5):
        engine = string_verdicts(Endomorphism.multiplication(FgGroup(1), p))
        assert vals(mu_p_verdicts(Z, p)) == vals(engine)
        for n in (4, 6, 9, 12):
            g = FgGroup(0, (n,))
            engine = string_verdicts(Endomorphism.multiplication(g, p))
            assert vals(mu_p_verdicts(zmod(n), p)) == vals(engine)


def test_catalog_matches_backends():
    for p in (2, 3):
        q = 5
        assert vals(mu_p_verdicts(Q, p)) == vals(concrete_string_numbers(MulEndo.on_q(p)))
        assert vals(mu_p_verdicts(prufer(p), p)) == vals(
            concrete_string_numbers(MulEndo.on_prufer(p, p)))
        assert vals(mu_p_verdicts(prufer(q), p)) == vals(
            concrete_string_numbers(MulEndo.on_prufer(q, p)))
        assert vals(mu_p_verdicts(QMODZ, p)) == vals(
            concrete_string_numbers(MulEndo.on_qmodz(p)))


def test_quasi_periodic_classification_forces_zero_string_number():
    rng = random.Random(101)
    hits = 0
    for _ in range(120):
        g = random_finite_group(rng, max_order=128)
        phi = random_endo_on(rng, g)
        cls = classify_periodicity(phi)
        if cls.kind in ("periodic", "quasi_periodic"):
            assert string_verdicts(phi)[0].value == ZERO
            hits += 1
    assert hits >= 100  # finite groups are always quasi-periodic
    # and a couple of infinite-group cases
    for a in ([[1, 0], [0, 1]], [[0, 1], [0, 0]], [[-1, 0], [0, -1]]):
        phi = Endomorphism.make(FgGroup(2), a, [], [])
        cls = classify_periodicity(phi)
        assert cls.kind in ("periodic", "quasi_periodic")
        assert string_verdicts(phi)[0].value == ZERO


def test_classification_witnesses_verified():
    rng = random.Random(103)
    for _ in range(60):
        g = random_finite_group(rng, max_order=64)
        phi = random_endo_on(rng, g)
        cls = classify_periodicity(phi)
        assert cls.kind in ("periodic", "quasi_periodic")
        if cls.kind == "periodic":
            assert phi.power(cls.n).is_identity()
        else:
            assert phi.power(cls.n) == phi.power(cls.m)
