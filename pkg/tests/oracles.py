"""Brute-force pointwise oracles used against the subgroup-algebra computations.

These deliberately avoid the lattice machinery: a finite group is flattened
to a successor array and analyzed as a functional graph, so agreement with
the algebraic computations is meaningful evidence.
"""

from __future__ import annotations

import random
from collections import deque
from math import gcd


def pointwise_sets(group, phi):
    """(per, qper, hyper, core) as frozensets of elements of a finite group."""
    elems = list(group.elements())
    index = {e: i for i, e in enumerate(elems)}
    succ = [index[phi.apply(e)] for e in elems]

    # eventual image = cycle nodes = periodic points
    image = set(range(len(elems)))
    while True:
        nxt = {succ[i] for i in image}
        if nxt == image:
            break
        image = nxt
    per = frozenset(elems[i] for i in image)

    # hyperkernel: nodes whose forward walk reaches 0, found by reverse BFS
    rev = [[] for _ in elems]
    for i, j in enumerate(succ):
        rev[j].append(i)
    zero_i = index[group.zero()]
    reach = {zero_i}
    queue = deque([zero_i])
    while queue:
        j = queue.popleft()
        for i in rev[j]:
            if i not in reach:
                reach.add(i)
                queue.append(i)
    hyper = frozenset(elems[i] for i in reach)

    qper = frozenset(elems)  # every point of a finite set is quasi-periodic
    core = per  # on a finite set the eventual image is the surjective core
    return per, qper, hyper, core


def subgroup_elements(group, sub):
    return frozenset(x for x in group.elements() if sub.contains(x))


def random_finite_group(rng: random.Random, max_order=512):
    """Random invariant-factor chain with product of invariants <= max_order."""
    from stringdyn.groups import FgGroup

    while True:
        k = rng.randint(1, 3)
        tors = []
        cur = 1
        total = 1
        ok = True
        for _ in range(k):
            if cur == 1:
                d = rng.choice([2, 3, 4, 5, 6, 8, 9])
            else:
                d = cur * rng.choice([1, 1, 2, 2, 3, 4])
            if total * d > max_order:
                ok = False
                break
            tors.append(d)
            cur = d
            total *= d
        if ok and tors:
            return FgGroup(0, tuple(tors))


def random_endo_on(rng: random.Random, group, lo=-5, hi=5):
    from stringdyn.groups import Endomorphism

    r, k = group.free_rank, len(group.torsion)
    a = [[rng.randint(lo, hi) for _ in range(r)] for _ in range(r)]
    c = [[rng.randint(lo, hi) for _ in range(r)] for _ in range(k)]
    d = []
    for j in range(k):
        row = []
        for i in range(k):
            step = group.torsion[j] // gcd(group.torsion[i], group.torsion[j])
            row.append(step * rng.randint(lo, hi))
        d.append(row)
    return Endomorphism.make(group, a, c, d)


def random_automorphism(rng: random.Random, group, steps=6):
    """Product of elementary automorphisms, with its exact inverse."""
    from stringdyn.groups import Endomorphism

    r, k = group.free_rank, len(group.torsion)
    fwd = Endomorphism.identity(group)
    inv = Endomorphism.identity(group)
    for _ in range(steps):
        kind = rng.choice(["shear", "swap", "negate", "unit", "mix"])
        a = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        c = [[0] * r for _ in range(k)]
        d = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        ai, ci, di = [list(map(list, m)) for m in (a, c, d)]
        if kind == "shear" and r >= 2:
            i, j = rng.sample(range(r), 2)
            q = rng.randint(-3, 3)
            a[i][j] = q
            ai[i][j] = -q
        elif kind == "swap" and r >= 2:
            i, j = rng.sample(range(r), 2)
            for m in (a, ai):
                m[i][i] = m[j][j] = 0
                m[i][j] = m[j][i] = 1
        elif kind == "negate" and r >= 1:
            i = rng.randrange(r)
            a[i][i] = -1
            ai[i][i] = -1
        elif kind == "unit" and k >= 1:
            j = rng.randrange(k)
            dj = group.torsion[j]
            units = [u for u in range(1, dj) if gcd(u, dj) == 1]
            u = rng.choice(units)
            d[j][j] = u
            di[j][j] = pow(u, -1, dj)
        elif kind == "mix" and k >= 1 and r >= 1:
            j = rng.randrange(k)
            i = rng.randrange(r)
            q = rng.randint(0, group.torsion[j] - 1)
            c[j][i] = q
            ci[j][i] = -q
        step_fwd = Endomorphism.make(group, a, c, d)
        step_inv = Endomorphism.make(group, ai, ci, di)
        fwd = step_fwd.compose(fwd)
        inv = inv.compose(step_inv)
    assert fwd.compose(inv).is_identity() and inv.compose(fwd).is_identity()
    return fwd, inv
