"""Randomized self-test behind ``gmdet selftest``."""

import random

from . import linalg as la
from . import oracle
from .cohomology import derham_operator, higgs_operator
from .errors import GenerationFailed
from .funcfield import FunctionField, dlog_class_reduce
from .localformula import torsion_factor, verify


def random_euler_instance(rng, K):
    """(g, h) with r ≤ 3, m ≤ 4 and an invertible leading coefficient."""
    while True:
        r = rng.randint(1, 3)
        m = rng.randint(1, 4)
        g = oracle.random_matpoly(K, r, m, rng)
        if la.det(g[-1]):
            h = oracle.random_matpoly(K, r, rng.randint(0, m + 1), rng)
            return g, h


def random_commutator_instance(rng, K):
    while True:
        r = rng.randint(1, 3)
        m = rng.randint(1, 3)
        a = oracle.random_matpoly(K, r, m, rng, zero_constant=True)
        if la.det(a[-1]):
            return a, oracle.solve_commutator_partner(a, rng)


SHAPES = [(1, [2]), (1, [3]), (1, [2, 1]), (1, [2, 2]), (2, [2]), (2, [3]), (2, [2, 1]), (2, [2, 2])]


def run_selftest(seed, count, out):
    rng = random.Random(seed)
    K = FunctionField.get(("x",))
    results = []

    ok = 0
    for _ in range(count):
        g, h = random_euler_instance(rng, K)
        ok += la.trace(oracle.companion_trace(g, h)) == oracle.euler_residue_trace(g, h)
    results.append(("euler residue trace", ok, count))

    ok = 0
    for _ in range(count):
        r, m, p = rng.randint(1, 2), rng.randint(1, 4), rng.randint(1, 6)
        a = [oracle.random_matrix(K, r, rng) for _ in range(m)]
        ok += oracle.lemma62_sum(a, p) == oracle.naive_power_trace(a, p)
    results.append(("companion power traces", ok, count))

    ok = 0
    for _ in range(count):
        a, b = random_commutator_instance(rng, K)
        ok += oracle.commutator_identity_check(a, b) == 0
    results.append(("commutator identity", ok, count))

    n_fix = max(1, count // 10)
    ok_h = ok_v = 0
    for k in range(n_fix):
        shape = SHAPES[k % len(SHAPES)]
        try:
            C = oracle.vertical_random(shape, rng.randrange(2 ** 31))
        except GenerationFailed:
            continue
        diff = higgs_operator(C).trace() - derham_operator(C).trace() - torsion_factor(C)
        ok_h += dlog_class_reduce(diff) is not None
        ok_v += verify(C).verdict
    results.append(("higgs versus de Rham", ok_h, n_fix))
    results.append(("local formula", ok_v, n_fix))

    for name, good, total in results:
        out.append(f"{name}: {good}/{total} {'ok' if good == total else 'FAILED'}")
    return all(good == total for _, good, total in results)
