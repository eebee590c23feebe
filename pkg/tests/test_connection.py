import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gmdet import linalg as la
from gmdet.connection import (CONST, Connection, FormMatrix, classify_point,
                              connection_form, curvature, dual,
                              gauge_transform, is_vertical, is_vertical_polar,
                              mixed_curvature_polar, transport_mobius,
                              translate, twist_block_step)
from gmdet.errors import (AllLogarithmic, PointAtInfinity, SingularGauge,
                          StructureError)
from gmdet.funcfield import FunctionField, d_K
from gmdet.oracle import (random_matrix, rank1_single_point, rank1_two_point,
                          rank3_direct_sum, vertical_random)
from gmdet.ratline import AbsForm1, T, line_field

K = FunctionField.get(("x", "y"))
x, y = K.gens()


def zero_eta(K, r, mults):
    return [[FormMatrix(K, r) for _ in range(m - 1 if m >= 2 else 1)] for m in mults]


def polar_to_Kt(C, expansion):
    """Σ X/(t − a_i)^ρ (+ constant) as a matrix over K(t)."""
    Kt = line_field(C.K)
    t = Kt.gen(T)
    out = [[Kt.zero] * C.r for _ in range(C.r)]
    for key, X in expansion.items():
        if key == CONST:
            f = Kt.one
        else:
            i, rho = key
            f = (t - Kt.embed(C.points[i])) ** (-rho)
        for p in range(C.r):
            for q in range(C.r):
                out[p][q] = out[p][q] + Kt.embed(X[p][q]) * f
    return out


def random_connection(seed, r=2, mults=(2, 1)):
    """Arbitrary (typically non-vertical) data with Σ g_1 = 0."""
    rng = random.Random(seed)
    pts = [K.zero, x + 1, y - 2][:len(mults)]
    g = [[random_matrix(K, r, rng) for _ in range(m)] for m in mults]
    total = la.zeros(K, r)
    for gi in g[1:]:
        total = la.mat_add(total, gi[0])
    g[0][0] = la.mat_neg(total)
    eta = []
    for m in mults:
        eta.append([FormMatrix(K, r, {"x": random_matrix(K, r, rng), "y": random_matrix(K, r, rng)})
                    for _ in range(m - 1 if m >= 2 else 1)])
    eta0 = FormMatrix(K, r, {"y": random_matrix(K, r, rng)})
    return Connection(K, r, list(zip(pts, mults)), g, eta, eta0)


# -- curvature -----------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_polar_curvature_matches_absolute_curvature(seed):
    C = random_connection(seed, r=1 + seed % 2, mults=[(2, 1), (3,), (2, 2)][seed % 3])
    F = curvature(C)
    for n in K.names:
        polar = polar_to_Kt(C, mixed_curvature_polar(C, n))
        for p in range(C.r):
            for q in range(C.r):
                assert F[p][q].mixed.get(n, polar[p][q].field.zero) == polar[p][q]


@pytest.mark.parametrize("shape,seed", [((1, [2]), 0), ((2, [2, 1]), 1), ((2, [3]), 2), ((2, [2, 2]), 3)])
def test_generated_connections_are_vertical_both_ways(shape, seed):
    C = vertical_random(shape, seed)
    assert is_vertical(C)
    assert is_vertical_polar(C)


def test_rank1_vertical_iff_eta_is_minus_dg():
    C = rank1_single_point()
    assert is_vertical(C)
    K1 = C.K
    al = K1.gen("alpha")
    wrong = C.replace(eta=[[FormMatrix.from_matrix(K1, [[K1.one]], d_K(al))]])
    assert not is_vertical(wrong)
    assert not is_vertical_polar(wrong)


def test_named_fixtures_vertical():
    assert is_vertical(rank1_two_point())
    assert is_vertical_polar(rank3_direct_sum())


# -- classification ------------------------------------------------------

def diag(*vals):
    X = la.zeros(K, len(vals))
    for k, v in enumerate(vals):
        X[k][k] = K(v)
    return X


def with_log_residue(res):
    r = len(res)
    return Connection(K, r, [(0, 1), (x, 2)], [[res], [la.mat_neg(res), la.identity(K, r)]],
                      zero_eta(K, r, [1, 2]), FormMatrix(K, r))


def test_classify_logarithmic_deligne():
    C = with_log_residue(diag(Fraction(1, 2), x))
    tags = {C.mult[i]: classify_point(C, i).tag for i in range(C.N)}
    assert tags == {1: "LogarithmicDeligne", 2: "Admissible"}


def test_classify_integer_eigenvalue():
    C = with_log_residue(diag(2, Fraction(1, 3)))
    c = classify_point(C, C.mult.index(1))
    assert c.tag == "PseudoLog" and "2" in c.diagnostics


def test_classify_singular_residue_with_zero_eigenvalue():
    C = with_log_residue(diag(0, 1))
    assert classify_point(C, C.mult.index(1)).tag == "Invalid"


def test_classify_singular_leading_matrix():
    C = Connection(K, 2, [(0, 2)], [[la.zeros(K, 2), diag(1, 0)]], zero_eta(K, 2, [2]), FormMatrix(K, 2))
    assert classify_point(C, 0).tag == "Invalid"


def test_classify_negative_integers_are_fine():
    C = with_log_residue(diag(-1, -3))
    assert classify_point(C, C.mult.index(1)).tag == "LogarithmicDeligne"


def test_classify_special_shape():
    res = diag(1, 2)
    res[1][0] = K(3)
    C = with_log_residue(res)
    assert classify_point(C, C.mult.index(1)).tag == "SpecialPseudoLog"


def test_eigenvalue_depending_on_parameter_is_not_integer():
    C = with_log_residue(diag(x, -x))
    assert classify_point(C, C.mult.index(1)).tag == "LogarithmicDeligne"


# -- gauge ---------------------------------------------------------------

def test_gauge_identity():
    C = vertical_random((2, [2, 1]), 5)
    assert gauge_transform(C, la.identity(K, 2)) == C


def test_gauge_scalar_shifts_by_dlog():
    C = vertical_random((2, [2]), 6)
    D = gauge_transform(C, la.scalar(K, 2, x))
    assert D.g == C.g
    diff = C.eta0 - D.eta0
    assert diff == FormMatrix.from_matrix(K, la.identity(K, 2), d_K(x) * x.inverse())


def test_gauge_singular():
    C = vertical_random((2, [2]), 7)
    with pytest.raises(SingularGauge):
        gauge_transform(C, diag(1, 0))


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_gauge_preserves_verticality(seed):
    rng = random.Random(seed)
    C = vertical_random((2, [2, 1]), seed % 7)
    while True:
        phi = random_matrix(K, 2, rng)
        if la.det(phi):
            break
    D = gauge_transform(C, phi)
    assert is_vertical_polar(D)
    assert [classify_point(D, i).tag for i in range(D.N)] == [classify_point(C, i).tag for i in range(C.N)]


def test_gauge_composition():
    C = vertical_random((2, [2]), 8)
    phi = [[K.one, x], [K.zero, K.one]]
    psi = [[y, K.zero], [K.one, K.one]]
    assert gauge_transform(gauge_transform(C, phi), psi) == gauge_transform(C, la.mat_mul(psi, phi))


# -- dual, twist ---------------------------------------------------------

def test_dual_is_involution():
    C = vertical_random((2, [2, 1]), 9)
    assert dual(dual(C)) == C
    assert is_vertical_polar(dual(C))


def test_dual_negates_trace():
    C = vertical_random((2, [2, 1]), 10)
    D = dual(C)
    for gi, hi in zip(C.g, D.g):
        for X, Y in zip(gi, hi):
            assert la.trace(Y) == -la.trace(X)


def test_twist_block_step_example():
    Kt = line_field(K)
    t = Kt.gen(T)
    M = [[AbsForm1(Kt, 1), AbsForm1(Kt, t)], [AbsForm1(Kt, t ** 2), AbsForm1(Kt, 0, {"x": 1})]]
    out = twist_block_step(M, t)
    assert out[0][0] == M[0][0]
    assert out[0][1] == AbsForm1(Kt, t ** 2)
    assert out[1][0] == AbsForm1(Kt, t)
    assert out[1][1] == AbsForm1(Kt, 1 / t, {"x": 1})


def test_twist_block_step_is_gauge():
    """Twisting equals φ⁻¹Mφ + φ⁻¹dφ for φ = diag(1, z)."""
    Kt = line_field(K)
    t = Kt.gen(T)
    z = t - Kt.embed(x)
    M = [[AbsForm1(Kt, t, {"x": 1}), AbsForm1(Kt, 2, {"y": t})],
         [AbsForm1(Kt, 1 / t), AbsForm1(Kt, 0, {"x": t, "y": 3})]]
    out = twist_block_step(M, z)
    dz = AbsForm1(Kt, 1, {"x": -1})
    assert out[1][1] == M[1][1] + dz * z.inverse()
    assert out[0][1] == M[0][1] * z
    assert out[1][0] == M[1][0] * z.inverse()


# -- Möbius --------------------------------------------------------------

def test_mobius_identity():
    C = vertical_random((2, [2, 1]), 11)
    assert transport_mobius(C, 1, 0, 0, 1) == C


def test_translation_moves_points():
    C = vertical_random((1, [2, 1]), 12)
    D = translate(C, x)
    assert sorted(map(str, D.points)) == sorted(str(a - x) for a in C.points)
    assert D.g == C.g
    assert is_vertical_polar(D)


def test_mobius_round_trip():
    C = vertical_random((2, [2, 1]), 13)
    # t = (2τ + 1)/(τ + 3), inverse τ = (3t − 1)/(−t + 2)
    D = transport_mobius(C, 2, 1, 1, 3)
    assert is_vertical_polar(D)
    assert transport_mobius(D, 3, -1, -1, 2) == C


def test_mobius_errors():
    C = vertical_random((1, [2]), 14)
    with pytest.raises(StructureError):
        transport_mobius(C, 1, 1, 1, 1)
    a = C.points[0]
    with pytest.raises(PointAtInfinity):
        transport_mobius(C, a, 0, 1, 1)


# -- construction --------------------------------------------------------

def test_points_sorted_by_multiplicity():
    C = with_log_residue(diag(Fraction(1, 2), Fraction(1, 3)))
    assert C.mult == (1, 2)


@pytest.mark.parametrize("build,err", [
    (lambda: Connection(K, 1, [(0, 1), (1, 1)], [[[[K.one]]], [[[-K.one]]]],
                        zero_eta(K, 1, [1, 1]), FormMatrix(K, 1)), AllLogarithmic),
    (lambda: Connection(K, 1, [(0, 2)], [[[[K.one]], [[K.one]]]],
                        zero_eta(K, 1, [2]), FormMatrix(K, 1)), StructureError),
    (lambda: Connection(K, 1, [(x, 2), (x, 2)], [[[[K.zero]], [[K.one]]]] * 2,
                        zero_eta(K, 1, [2, 2]), FormMatrix(K, 1)), StructureError),
    (lambda: Connection(K, 1, [(0, 2)], [[[[K.zero]]]],
                        zero_eta(K, 1, [2]), FormMatrix(K, 1)), StructureError),
    (lambda: Connection(K, 2, [(0, 2)], [[[[K.zero]], [[K.one]]]],
                        zero_eta(K, 2, [2]), FormMatrix(K, 2)), StructureError),
    (lambda: Connection(K, 0, [(0, 2)], [], [], FormMatrix(K, 1)), StructureError),
])
def test_construction_errors(build, err):
    with pytest.raises(err):
        build()


def test_connection_form_dt_part():
    C = rank1_single_point()
    A = connection_form(C)
    Kt = line_field(C.K)
    t = Kt.gen(T)
    al = Kt.gen("alpha")
    assert A[0][0].dt == al / t ** 2
