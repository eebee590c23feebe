import random
from fractions import Fraction

import pytest

from gmdet import linalg as la
from gmdet.connection import (Connection, dual, gauge_transform, translate)
from gmdet.funcfield import OneFormK, d_K, dlog_class_reduce
from gmdet.gaussmanin import gm_determinant_lhs, gm_matrix, psi_trace
from gmdet.oracle import (bessel_transported, random_matrix, rank1_single_point,
                          rank1_two_point, rank3_direct_sum, vertical_random)

FIXTURES = [((1, [2, 1]), 0), ((2, [2, 1]), 1), ((2, [3]), 2), ((1, [2, 2]), 3),
            ((2, [2, 2]), 4), ((1, [3, 1]), 5), ((2, [2, 1, 1]), 6)]


def fixture(shape, seed):
    return vertical_random(shape, seed, resonant_log=True)


def test_psi_trace_two_point_example():
    C = rank1_two_point()
    K = C.K
    x, al, _ = K.gens()
    expected = d_K(x) * (K(Fraction(1, 2)) / x - al / x ** 2)
    assert psi_trace(C) == expected
    assert gm_matrix(C).psi_part.trace() == expected


def test_psi_trace_vanishes_for_constant_points():
    C = vertical_random((2, [2, 1]), 0, constant_points=True)
    assert psi_trace(C).is_zero()
    assert gm_matrix(C).psi_part.is_zero()


def test_psi_trace_independent_of_input_order():
    C = rank1_two_point()
    D = Connection(C.K, 1, list(zip(C.points, C.mult))[::-1], list(C.g)[::-1],
                   list(C.eta)[::-1], C.eta0)
    assert psi_trace(D) == psi_trace(C)


@pytest.mark.parametrize("shape,seed", FIXTURES)
def test_psi_closed_formula_matches_projection(shape, seed):
    C = fixture(shape, seed)
    assert gm_matrix(C).psi_part.trace() == psi_trace(C)


@pytest.mark.parametrize("shape,seed", FIXTURES)
def test_trace_additivity(shape, seed):
    C = fixture(shape, seed)
    gm = gm_matrix(C)
    assert gm.total.trace() == psi_trace(C) + gm.eta_part.trace()
    assert gm_determinant_lhs(C, gm) == -(psi_trace(C) + gm.eta_part.trace())


def test_additivity_on_named_fixtures():
    for C in (rank3_direct_sum(), bessel_transported()):
        gm = gm_matrix(C)
        assert gm.total.trace() == psi_trace(C) + gm.eta_part.trace()


def test_single_point_rank1_is_empty():
    C = rank1_single_point()
    gm = gm_matrix(C)
    assert gm.basis == []
    assert gm_determinant_lhs(C).is_zero()


def test_zero_eta_gives_zero_eta_part():
    C = vertical_random((2, [2, 1]), 7, constant_points=True)
    C0 = C.replace(eta=[[F.map(lambda X: la.zeros(C.K, 2)) for F in ei] for ei in C.eta],
                   eta0=C.eta0.map(lambda X: la.zeros(C.K, 2)))
    assert gm_matrix(C0).eta_part.is_zero()


@pytest.mark.parametrize("shape,seed", FIXTURES[:5])
def test_dual_negates_mod_dlog(shape, seed):
    C = fixture(shape, seed)
    assert dlog_class_reduce(gm_determinant_lhs(dual(C)) + gm_determinant_lhs(C)) is not None


@pytest.mark.parametrize("seed", range(5))
def test_constant_gauge_invariance_mod_dlog(seed):
    rng = random.Random(seed)
    C = fixture(*FIXTURES[seed % 4])
    while True:
        phi = random_matrix(C.K, C.r, rng)
        if la.det(phi):
            break
    diff = gm_determinant_lhs(gauge_transform(C, phi)) - gm_determinant_lhs(C)
    assert dlog_class_reduce(diff) is not None


@pytest.mark.parametrize("seed", range(4))
def test_translation_invariance_mod_dlog(seed):
    C = fixture(*FIXTURES[seed])
    c = C.K.gens()[seed % 2] + seed
    diff = gm_determinant_lhs(translate(C, c)) - gm_determinant_lhs(C)
    assert dlog_class_reduce(diff) is not None


def test_rank3_lhs_is_not_a_dlog():
    C = rank3_direct_sum()
    lhs = gm_determinant_lhs(C)
    assert isinstance(lhs, OneFormK)
    assert not lhs.is_zero()
    assert dlog_class_reduce(lhs) is None
