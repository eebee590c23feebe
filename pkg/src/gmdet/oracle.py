"""Brute-force verifiers for the standalone identities, and fixture generators.

Matrix polynomials in u are lists of K-matrices indexed by degree.
"""

import random
from fractions import Fraction

from . import linalg as la
from .connection import (Connection, FormMatrix, classify_point,
                         connection_from_form, is_vertical_polar,
                         mixed_curvature_polar, pullback_form)
from .errors import ConstraintViolated, GenerationFailed, SingularLeadingMatrix
from .funcfield import FunctionField
from .polar import CONST, padd, pderiv_t, pmul
from .ratline import AbsForm1, T, line_field, residue_at_infinity


def _trim(poly):
    out = list(poly)
    while len(out) > 1 and la.is_zero_matrix(out[-1]):
        out.pop()
    return out


def _leading_inverse(g):
    try:
        return la.inverse(g[-1])
    except la.SingularMatrix:
        raise SingularLeadingMatrix("leading coefficient of g is singular") from None


# ---------------------------------------------------------------------------
# trace of multiplication on V[u]/g V[u]

def companion_operator(g, h):
    """Matrix of w ↦ h·w mod g·V[u] on the basis e_μ u^k (k < deg g)."""
    g = _trim(g)
    m = len(g) - 1
    r = len(g[0])
    K = g[0][0][0].field
    lead_inv = _leading_inverse(g)
    n = r * m
    op = la.zeros(K, n)
    for k in range(m):
        for mu in range(r):
            w = [[K.zero] * r for _ in range(max(len(h) + k, m))]
            for e, H in enumerate(h):
                col = [H[p][mu] for p in range(r)]
                w[e + k] = la.vec_add(w[e + k], col)
            for d in range(len(w) - 1, m - 1, -1):
                c = w[d]
                if not any(c):
                    continue
                y = la.mat_vec(lead_inv, c)
                for s, G in enumerate(g):
                    w[d - m + s] = la.vec_sub(w[d - m + s], la.mat_vec(G, y))
            for kk in range(m):
                for p in range(r):
                    op[kk * r + p][k * r + mu] = w[kk][p]
    return op


def companion_trace(g, h):
    """Block trace Σ_k (k,k)-block of φ(h); its trace is Tr φ(h)."""
    g = _trim(g)
    m = len(g) - 1
    r = len(g[0])
    K = g[0][0][0].field
    op = companion_operator(g, h)
    out = la.zeros(K, r)
    for k in range(m):
        for p in range(r):
            for q in range(r):
                out[p][q] = out[p][q] + op[k * r + p][k * r + q]
    return out


def inverse_series(g, order):
    """B_0..B_order with g(u)^{-1} = u^{-m} Σ_k B_k u^{-k}."""
    g = _trim(g)
    m = len(g) - 1
    K = g[0][0][0].field
    r = len(g[0])
    inv = _leading_inverse(g)
    B = [inv]
    for k in range(1, order + 1):
        acc = la.zeros(K, r)
        for j in range(1, min(k, m) + 1):
            acc = la.mat_add(acc, la.mat_mul(g[m - j], B[k - j]))
        B.append(la.mat_neg(la.mat_mul(inv, acc)))
    return B


def euler_residue_trace(g, h):
    """−Tr res_{u=∞}(dg·g⁻¹·h)."""
    g = _trim(g)
    m = len(g) - 1
    K = g[0][0][0].field
    r = len(g[0])
    order = m + len(h)
    B = inverse_series(g, order)
    coef = la.zeros(K, r)
    # u^{-1} coefficient of Σ d a_d u^{d-1} · u^{-m} Σ B_k u^{-k} · Σ h_e u^e
    for d in range(1, m + 1):
        if la.is_zero_matrix(g[d]):
            continue
        for e, H in enumerate(h):
            k = d + e - m
            if k < 0 or la.is_zero_matrix(H):
                continue
            term = la.mat_mul(la.mat_mul(la.mat_scale(g[d], d), B[k]), H)
            coef = la.mat_add(coef, term)
    res = residue_at_infinity({-1: coef})
    return -la.trace(res)


# ---------------------------------------------------------------------------
# powers of the block companion matrix

def block_companion(a_coeffs):
    """M with M_{i+1,i} = I and M_{i,m} = −a_{m+1−i} (blocks, 1-indexed)."""
    m = len(a_coeffs)
    r = len(a_coeffs[0])
    K = a_coeffs[0][0][0].field
    n = m * r
    M = la.zeros(K, n)
    for i in range(1, m):
        for p in range(r):
            M[i * r + p][(i - 1) * r + p] = K.one
    for i in range(1, m + 1):
        A = a_coeffs[m - i]  # a_{m+1-i}
        for p in range(r):
            for q in range(r):
                M[(i - 1) * r + p][(m - 1) * r + q] = -A[p][q]
    return M


def naive_power_trace(a_coeffs, p):
    m = len(a_coeffs)
    r = len(a_coeffs[0])
    K = a_coeffs[0][0][0].field
    M = block_companion(a_coeffs)
    P = la.identity(K, m * r)
    for _ in range(p):
        P = la.mat_mul(P, M)
    out = la.zeros(K, r)
    for i in range(m):
        for x in range(r):
            for y in range(r):
                out[x][y] = out[x][y] + P[i * r + x][i * r + y]
    return out


def _compositions(p, m):
    if p == 0:
        yield ()
        return
    for first in range(1, min(m, p) + 1):
        for rest in _compositions(p - first, m):
            yield (first,) + rest


def lemma62_sum(a_coeffs, p):
    """Σ_q (−1)^q Σ a_{m_1}⋯a_{m_q} over Σ m_k = p, i ∈ [1, m], m_1 ≥ m − i + 1."""
    m = len(a_coeffs)
    r = len(a_coeffs[0])
    K = a_coeffs[0][0][0].field
    out = la.zeros(K, r)
    for comp in _compositions(p, m):
        q = len(comp)
        prod = la.identity(K, r)
        for mk in comp:
            prod = la.mat_mul(prod, a_coeffs[mk - 1])
        for i in range(1, m + 1):
            if comp[0] >= m - i + 1:
                out = la.mat_add(out, prod if q % 2 == 0 else la.mat_neg(prod))
    return out


# ---------------------------------------------------------------------------
# the commutator identity

def poly_commutator(a, b):
    K = a[0][0][0].field
    r = len(a[0])
    c = [la.zeros(K, r) for _ in range(len(a) + len(b) - 1)]
    for i, A in enumerate(a):
        for j, B in enumerate(b):
            if la.is_zero_matrix(A) or la.is_zero_matrix(B):
                continue
            c[i + j] = la.mat_add(c[i + j], la.commutator(A, B))
    return c


def commutator_identity_check(a, b):
    """Tr(a_m⁻¹ c_m) for c = [a(t), b(t)], provided c has degree ≤ m."""
    m = len(a) - 1
    if not la.is_zero_matrix(a[0]) or not la.is_zero_matrix(b[0]):
        raise ConstraintViolated("a(0) and b(0) must vanish")
    c = poly_commutator(a, b)
    for n in range(m + 1, len(c)):
        if not la.is_zero_matrix(c[n]):
            raise ConstraintViolated(f"commutator has a nonzero coefficient in degree {n} > {m}")
    try:
        inv = la.inverse(a[m])
    except la.SingularMatrix:
        raise SingularLeadingMatrix("a_m is singular") from None
    return la.trace(la.mat_mul(inv, c[m]))


def solve_commutator_partner(a, rng, coeffs=(-2, -1, 1, 2)):
    """Random b with b(0) = 0 and deg [a, b] ≤ m, from the linear constraints."""
    m = len(a) - 1
    r = len(a[0])
    K = a[0][0][0].field
    unknowns = [(d, p, q) for d in range(1, m + 1) for p in range(r) for q in range(r)]
    rows = []
    for n in range(m + 1, 2 * m + 1):
        for p in range(r):
            for q in range(r):
                row = []
                for (d, x, y) in unknowns:
                    E = la.zeros(K, r)
                    E[x][y] = K.one
                    if 0 <= n - d <= m:
                        row.append(la.commutator(a[n - d], E)[p][q])
                    else:
                        row.append(K.zero)
                rows.append(row)
    null = la.nullspace(rows)
    b = [la.zeros(K, r) for _ in range(m + 1)]
    vec = [K.zero] * len(unknowns)
    for v in null:
        c = rng.choice(coeffs)
        vec = la.vec_add(vec, la.vec_scale(v, c))
    for (d, p, q), x in zip(unknowns, vec):
        b[d][p][q] = x
    return b


# ---------------------------------------------------------------------------
# random entries

def random_entry(K, rng, params=None, allow_params=True):
    names = list(K.names if params is None else params)
    choices = list(range(-3, 4))
    if allow_params and names:
        choices += [("+", n) for n in names] + [("-", n) for n in names]
    c = rng.choice(choices)
    if isinstance(c, int):
        return K(c)
    sign, n = c
    return K.gen(n) if sign == "+" else -K.gen(n)


def random_matrix(K, r, rng, allow_params=True, lower=False):
    out = la.zeros(K, r)
    for p in range(r):
        for q in range(r):
            if lower and q > p:
                continue
            out[p][q] = random_entry(K, rng, allow_params=allow_params)
    return out


def random_matpoly(K, r, m, rng, allow_params=True, zero_constant=False):
    out = []
    for d in range(m + 1):
        if zero_constant and d == 0:
            out.append(la.zeros(K, r))
        else:
            out.append(random_matrix(K, r, rng, allow_params))
    return out


# ---------------------------------------------------------------------------
# random vertical connections

def _random_points(K, N, rng, constant_points=False):
    pts = []
    names = list(K.names)
    tries = 0
    while len(pts) < N:
        tries += 1
        kind = rng.random()
        if constant_points or not names or kind < 0.4:
            a = K(rng.randint(-3, 3))
        elif kind < 0.7:
            a = K.gen(rng.choice(names)) * rng.choice((1, -1))
        else:
            a = K.gen(rng.choice(names)) + rng.choice((-2, -1, 1, 2))
        if all(a != b for b in pts):
            pts.append(a)
        if tries > 1000:
            raise GenerationFailed("could not choose distinct points")
    return pts


def _verticality_system(C, name, mask):
    """Linear system in the η entries (one base direction) for vertical C."""
    K, r = C.K, C.r
    F = C.gamma_polar()
    base = mixed_curvature_polar(C, name)
    unknowns = []
    for i in range(C.N):
        for s in range(1, C.M(i) + 1):
            for p in range(r):
                for q in range(r):
                    if mask((i, s), p, q):
                        unknowns.append(((i, s), p, q))
    for p in range(r):
        for q in range(r):
            if mask(CONST, p, q):
                unknowns.append((CONST, p, q))
    images = []
    for key, p, q in unknowns:
        E = la.zeros(K, r)
        E[p][q] = K.one
        term = {key: E}
        img = pderiv_t(term, la.mat_scale)
        img = padd(img, pmul(C.polar, F, term, la.mat_mul, la.mat_scale))
        img = padd(img, {k: la.mat_neg(v) for k, v in
                         pmul(C.polar, term, F, la.mat_mul, la.mat_scale).items()})
        images.append(img)
    slots = sorted(set(base) | {k for img in images for k in img})
    rows, rhs = [], []
    for slot in slots:
        for p in range(r):
            for q in range(r):
                rows.append([img[slot][p][q] if slot in img else K.zero for img in images])
                rhs.append(-base[slot][p][q] if slot in base else K.zero)
    return unknowns, rows, rhs


def solve_vertical_eta(C, rng, mask=None, coeffs=(-2, -1, 0, 1, 2)):
    """Replace the η data of C by a random solution of the verticality system."""
    K, r = C.K, C.r
    mask = mask or (lambda key, p, q: True)
    eta = [[{n: la.zeros(K, r) for n in K.names} for _ in range(C.M(i))] for i in range(C.N)]
    eta0 = {n: la.zeros(K, r) for n in K.names}
    for name in K.names:
        unknowns, rows, rhs = _verticality_system(C, name, mask)
        if not rows:
            continue
        sol = la.solve_affine(rows, rhs)
        if sol is None:
            return None
        x, null = sol
        for v in null:
            c = rng.choice(coeffs)
            if c:
                x = la.vec_add(x, la.vec_scale(v, c))
        for (key, p, q), val in zip(unknowns, x):
            if key == CONST:
                eta0[name][p][q] = val
            else:
                i, s = key
                eta[i][s - 1][name][p][q] = val
    eta_fm = [[FormMatrix(K, r, comps) for comps in ei] for ei in eta]
    return C.replace(eta=eta_fm, eta0=FormMatrix(K, r, eta0))


def _resonant_residue(K, r, rng, lam=Fraction(1, 2)):
    """P·diag(λ, λ−1, λ, ...)·P⁻¹ for a random integral P.

    Eigenvalues differing by 1 are what allows η_1 ≠ 0 at a log point:
    verticality there reads η_1 = [g_1, η_1].
    """
    while True:
        P = random_matrix(K, r, rng, allow_params=False)
        if la.det(P):
            break
    D = la.zeros(K, r)
    for k in range(r):
        D[k][k] = K(lam - (k % 2))
    return la.mat_mul(la.mat_mul(P, D), la.inverse(P))


def vertical_random(shape, seed, params=("x", "y"), attempts=60, constant_points=False,
                    log_params=False, resonant_log=False):
    """A random vertical connection with all points Admissible or LogarithmicDeligne.

    shape = (r, [m_1, ..., m_N]).  With resonant_log the residues at log
    points have eigenvalues 1/2, −1/2 (rank ≥ 2), so their η_1 can be nonzero.
    """
    r, mults = shape
    if all(m == 1 for m in mults):
        raise GenerationFailed("shape needs a point of multiplicity >= 2")
    K = FunctionField.get(tuple(params))
    rng = random.Random(seed)
    # the point carrying the compensating g_1 should not be logarithmic
    order = sorted(range(len(mults)), key=lambda k: mults[k])
    for attempt in range(attempts):
        pts = _random_points(K, len(mults), rng, constant_points)
        # parameter-dependent g rarely admits a vertical η; fall back to
        # constant g (the points still move) in the second half
        with_params = attempt < attempts // 2 and rng.random() < 0.5
        g = []
        for k, m in enumerate(mults):
            mats = []
            for rho in range(1, m + 1):
                const_only = not with_params or (rho == 1 and not log_params)
                mats.append(random_matrix(K, r, rng, allow_params=not const_only))
            g.append(mats)
        if resonant_log and r >= 2:
            for k, m in enumerate(mults):
                if m == 1:
                    g[k][0] = _resonant_residue(K, r, rng)
        comp = order[-1]
        total = la.zeros(K, r)
        for k in range(len(mults)):
            if k != comp:
                total = la.mat_add(total, g[k][0])
        g[comp][0] = la.mat_neg(total)
        zero_eta = [[FormMatrix(K, r) for _ in range(m - 1 if m >= 2 else 1)] for m in mults]
        try:
            C0 = Connection(K, r, list(zip(pts, mults)), g, zero_eta, FormMatrix(K, r))
        except Exception:
            continue
        if any(classify_point(C0, i).tag not in ("Admissible", "LogarithmicDeligne")
               for i in range(C0.N)):
            continue
        C = solve_vertical_eta(C0, rng)
        if C is None:
            continue
        if not is_vertical_polar(C):
            raise AssertionError("generator produced a non-vertical connection")
        return C
    raise GenerationFailed(f"no vertical connection of shape {shape} after {attempts} attempts (seed {seed})")


def special_pseudo_log_random(seed, mult_other=2, eigen=(-2, -1), params=("x", "y"), attempts=60):
    """Rank 2, a special log point with g_1 = [[m,0],[c,n]], plus one irregular point.

    All data are lower triangular, so the upper-right block vanishes to
    first order at the log point; η_1 there is confined to the lower-left
    entry.
    """
    K = FunctionField.get(tuple(params))
    rng = random.Random(seed)
    mval, nval = eigen
    for _ in range(attempts):
        pts = _random_points(K, 2, rng)
        g1 = la.zeros(K, 2)
        g1[0][0] = K(mval)
        g1[1][1] = K(nval)
        g1[1][0] = random_entry(K, rng, allow_params=False)
        if not g1[1][0]:
            continue
        g_other = [la.mat_neg(g1)] + [random_matrix(K, 2, rng, lower=True) for _ in range(mult_other - 1)]
        eta_shape = [[FormMatrix(K, 2)], [FormMatrix(K, 2) for _ in range(mult_other - 1)]]
        try:
            C0 = Connection(K, 2, [(pts[0], 1), (pts[1], mult_other)], [[g1], g_other],
                            eta_shape, FormMatrix(K, 2))
        except Exception:
            continue
        if classify_point(C0, 1 if C0.mult[1] >= 2 else 0).tag != "Admissible":
            continue
        log_index = C0.mult.index(1)

        def mask(key, p, q):
            if q > p:
                return False
            if key == (log_index, 1):
                return (p, q) == (1, 0)
            return True

        C = solve_vertical_eta(C0, rng, mask)
        if C is None or not is_vertical_polar(C):
            continue
        return C
    raise GenerationFailed(f"no special pseudo-log fixture after {attempts} attempts (seed {seed})")


# ---------------------------------------------------------------------------
# named fixtures

def rank1_single_point():
    K = FunctionField.get(("alpha",))
    al = K.gen("alpha")
    from .funcfield import d_K
    return Connection(K, 1, [(0, 2)], [[[[K.zero]], [[al]]]],
                      [[FormMatrix.from_matrix(K, [[K.one]], -d_K(al))]], FormMatrix(K, 1))


def rank1_two_point(lam=Fraction(1, 2)):
    """a_1 = 0 (m = 1, residue λ), a_2 = x (m = 2, g_2 = α); η_1^{(2)} = −dα, η_0 = x dβ."""
    from .funcfield import d_K
    K = FunctionField.get(("x", "alpha", "beta"))
    x, al, be = K.gens()
    one = [[K.one]]
    return Connection(K, 1, [(0, 1), (x, 2)],
                      [[[[K(lam)]]], [[[K(-lam)]], [[al]]]],
                      [[FormMatrix(K, 1)], [FormMatrix.from_matrix(K, one, -d_K(al))]],
                      FormMatrix.from_matrix(K, one, d_K(be) * x))


def bessel_form(K, n):
    """(z/2)(1 − 1/u²)du + ½(u + 1/u)dz − n du/u on the u-line (u named t)."""
    Kt = line_field(K)
    u = Kt.gen(T)
    z = Kt.gen("z")
    half = Fraction(1, 2)
    F = z * half * (1 - u ** -2) - Kt(n) / u
    return [[AbsForm1(Kt, F, {"z": (u + 1 / u) * half})]]


def bessel_transported(n=Fraction(1, 3)):
    """The Bessel-type connection pulled back along u = (τ − z)/(τ − 1).

    u = 0 and u = ∞ move to τ = z and τ = 1; τ = ∞ maps to the regular
    point u = 1.
    """
    K = FunctionField.get(("z",))
    z = K.gen("z")
    A = pullback_form(bessel_form(K, n), K.one, -z, K.one, -K.one)
    return connection_from_form(K, A, [(z, 2), (K.one, 2)])


def exact_rank1(K, points, alphas, lam):
    """Rank-1 connection d(Σ α_i/(t − a_i)) + λ dlog((t − a_1)/(t − a_2)).

    Both points have multiplicity 2; closed, hence flat.
    """
    from .funcfield import d_K
    g = []
    eta = []
    for k, (a, al) in enumerate(zip(points, alphas)):
        g1 = K(lam) if k == 0 else K(-lam)
        g.append([[[g1]], [[-al]]])
        eta.append([FormMatrix.from_matrix(K, [[K.one]], d_K(al))])
    return Connection(K, 1, [(a, 2) for a in points], g, eta, FormMatrix(K, 1))


def closed_rank1(K, data, eta0=None):
    """Rank-1 connection with arbitrary polar parts, made closed by its η.

    data = [(a_i, [g_1, ..., g_{m_i}])] with constant residues g_1 summing
    to zero.  g_ρ dz/z^ρ = d(−g_ρ/((ρ−1)z^{ρ−1})) + dg_ρ/((ρ−1)z^{ρ−1}),
    so η_{ρ−1} = −dg_ρ/(ρ−1) makes A closed, hence vertical.
    """
    from .funcfield import d_K
    one = [[K.one]]
    g, eta = [], []
    for a, gs in data:
        g.append([[[K(c)]] for c in gs])
        if len(gs) == 1:
            eta.append([FormMatrix(K, 1)])
        else:
            eta.append([FormMatrix.from_matrix(K, one, d_K(K(gs[rho])) * Fraction(-1, rho))
                        for rho in range(1, len(gs))])
    pts = [(a, len(gs)) for a, gs in data]
    return Connection(K, 1, pts, g, eta, eta0 if eta0 is not None else FormMatrix(K, 1))


def rank3_direct_sum():
    """diag(L⊗M, L⁻¹, M⁻¹) with trivial determinant (points 0 and y)."""
    from .connection import direct_sum, dual, tensor_rank1
    K = FunctionField.get(("x", "y"))
    x, y = K.gens()
    pts = [K.zero, y]
    L = exact_rank1(K, pts, [x, x * y], Fraction(1, 3))
    M = exact_rank1(K, pts, [y, K(1) + x], Fraction(1, 5))
    return direct_sum(tensor_rank1(L, M), dual(L), dual(M))


# ---------------------------------------------------------------------------
# the Higgs trace at one point as a companion trace

def point_polynomials(C, i, name):
    """g(u) = θ(u)·γ_K and h(u) = Σ_s η_s^{(i)} u^s in the coordinate u = 1/(t − a_i).

    θ(u) = ∏_{k≠i} (1 − (a_k − a_i)u)^{m_k} clears the other poles, so g has
    degree m with leading coefficient g_{m_i}^{(i)} ∏_{k≠i} (a_i − a_k)^{m_k}.
    """
    K, r = C.K, C.r
    m = C.m
    a_i = C.points[i]

    def linear_power(c, e):
        # (1 − c u)^e as a coefficient list
        out = [K.one]
        for _ in range(e):
            out = [x - (c * out[k - 1] if k else K.zero) for k, x in enumerate(out + [K.zero])]
        return out

    def pmul_scalar(p, q):
        out = [K.zero] * (len(p) + len(q) - 1)
        for x, a in enumerate(p):
            for y, b in enumerate(q):
                out[x + y] = out[x + y] + a * b
        return out

    g = [la.zeros(K, r) for _ in range(m + 1)]
    for j in range(C.N):
        base = [K.one]
        for k in range(C.N):
            if k != i and k != j:
                base = pmul_scalar(base, linear_power(C.points[k] - a_i, C.mult[k]))
        for s, X in enumerate(C.g[j], start=1):
            if la.is_zero_matrix(X):
                continue
            if j == i:
                scal = [K.zero] * s + base
            else:
                scal = pmul_scalar([K.zero] * s + [K.one],
                                   pmul_scalar(base, linear_power(C.points[j] - a_i, C.mult[j] - s)))
            for d, c in enumerate(scal):
                if c:
                    g[d] = la.mat_add(g[d], la.mat_scale(X, c))
    h = [la.zeros(K, r)]
    for F in C.eta[i]:
        h.append(F.component(name))
    return g, h


def point_higgs_companion_trace(C, i, name):
    g, h = point_polynomials(C, i, name)
    return la.trace(companion_trace(g, h))


# ---------------------------------------------------------------------------
# Tr(h_∇ − h_γ) for h = η_1^{(i)}/(t − a_i) at a log point

def _log_point_pattern(C, i, left):
    K, r = C.K, C.r
    g1 = C.g[i][0]
    D = la.mat_sub(la.inverse(g1), la.inverse(la.mat_sub(g1, la.identity(K, r))))
    L = la.mat_mul(left, D)
    coeffs = {n: la.trace(la.mat_mul(L, C.eta[i][0].component(n))) for n in K.names}
    from .funcfield import OneFormK
    return OneFormK(K, coeffs)


def _value_of_others(C, i):
    """γ'(a_i) = Σ_{j≠i, r} (a_i − a_j)^{-r} g_r^{(j)}."""
    K, r = C.K, C.r
    S = la.zeros(K, r)
    for j in range(C.N):
        if j == i:
            continue
        inv = (C.points[i] - C.points[j]).inverse()
        for k, X in enumerate(C.g[j]):
            S = la.mat_add(S, la.mat_scale(X, inv ** (k + 1)))
    return S


def log_point_difference_literal(C, i):
    """Tr(γ'(a_i)((g_1 − I)^{-1} − g_1^{-1})η_1), the display as printed."""
    return -_log_point_pattern(C, i, _value_of_others(C, i))


def log_point_difference(C, i):
    """Tr((γ'(a_i) − g_1/(a_N − a_i))(g_1^{-1} − (g_1 − I)^{-1})η_1).

    The second summand comes from the constant v_0 that removes the
    (t − a_N)^{-m_N} coefficient left over after the first reduction step.
    """
    S = _value_of_others(C, i)
    S = la.mat_sub(S, la.mat_scale(C.g[i][0], (C.points[C.N - 1] - C.points[i]).inverse()))
    return _log_point_pattern(C, i, S)
