"""Connections d + A on the trivial rank-r bundle over the t-line.

A = γ + η with
    γ = Σ_i Σ_{r=1}^{m_i} g_r^{(i)} d(t−a_i)/(t−a_i)^r,
    η = Σ_i Σ_{s=1}^{M_i} η_s^{(i)}/(t−a_i)^s + η_0,
g's in Mat_r(K), η's in Mat_r(Ω¹_K).  The relative part is
γ_K = Σ g_r^{(i)} dt/(t−a_i)^r.
"""

from dataclasses import dataclass
from fractions import Fraction

import flint

from . import linalg as la
from .errors import (AllLogarithmic, PointAtInfinity, SingularGauge,
                     StructureError)
from .funcfield import OneFormK, d_K, render
from .polar import CONST, PolarContext, padd, pderiv_t, pmul
from .ratline import (AbsForm1, T, d1, line_field, partial_fractions,
                      wedge1)


class FormMatrix:
    """An r×r matrix of 1-forms on K, stored by direction: Σ_j X_j ds_j."""

    __slots__ = ("K", "r", "comps")

    def __init__(self, K, r, comps=None):
        self.K = K
        self.r = r
        self.comps = {}
        for name in K.names:
            X = (comps or {}).get(name)
            if X is not None and not la.is_zero_matrix(X):
                self.comps[name] = [[K(x) for x in row] for row in X]

    @staticmethod
    def zero(K, r):
        return FormMatrix(K, r)

    @staticmethod
    def from_entries(K, entries):
        r = len(entries)
        comps = {n: [[entries[a][b][n] for b in range(r)] for a in range(r)] for n in K.names}
        return FormMatrix(K, r, comps)

    @staticmethod
    def from_matrix(K, X, w):
        """X ⊗ w for a K-matrix X and a 1-form w."""
        return FormMatrix(K, len(X), {n: la.mat_scale(X, c) for n, c in w.items()})

    def component(self, name):
        X = self.comps.get(name)
        return X if X is not None else la.zeros(self.K, self.r)

    def entries(self):
        return [[OneFormK(self.K, {n: X[a][b] for n, X in self.comps.items()})
                 for b in range(self.r)] for a in range(self.r)]

    def trace(self):
        return OneFormK(self.K, {n: la.trace(X) for n, X in self.comps.items()})

    def map(self, f):
        return FormMatrix(self.K, self.r, {n: f(X) for n, X in self.comps.items()})

    def __add__(self, other):
        comps = dict(self.comps)
        for n, X in other.comps.items():
            comps[n] = la.mat_add(comps[n], X) if n in comps else X
        return FormMatrix(self.K, self.r, comps)

    def __neg__(self):
        return self.map(la.mat_neg)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, FormMatrix) and self.comps == other.comps

    def is_zero(self):
        return not self.comps

    def __repr__(self):
        return f"FormMatrix({self.entries()})"


def _check_matrix(X, r, what):
    if len(X) != r or any(len(row) != r for row in X):
        raise StructureError(f"{what} must be a {r}x{r} matrix")


class Connection:
    """The datum (r, a_i, m_i, g_r^{(i)}, η_s^{(i)}, η_0) over K."""

    def __init__(self, K, rank, points, g, eta, eta0):
        self.K = K
        self.r = rank
        if rank < 1:
            raise StructureError("rank must be positive")
        if not points:
            raise StructureError("at least one singular point is required")
        if len(g) != len(points) or len(eta) != len(points):
            raise StructureError("g and eta need one entry per point")
        entries = []
        for (a, m), gi, ei in zip(points, g, eta):
            a = K(a)
            if m < 1:
                raise StructureError(f"multiplicity of {render(a)} must be positive")
            Mi = m - 1 if m >= 2 else 1
            if len(gi) != m:
                raise StructureError(f"point {render(a)}: expected {m} g matrices, got {len(gi)}")
            if len(ei) != Mi:
                raise StructureError(f"point {render(a)}: expected {Mi} eta matrices, got {len(ei)}")
            gi = [[[K(x) for x in row] for row in X] for X in gi]
            for k, X in enumerate(gi):
                _check_matrix(X, rank, f"g_{k + 1} at {render(a)}")
            ei = [_as_form_matrix(K, rank, X) for X in ei]
            entries.append((a, m, gi, ei))
        for k in range(len(entries)):
            for l in range(k + 1, len(entries)):
                if entries[k][0] == entries[l][0]:
                    raise StructureError(f"duplicate points: {render(entries[k][0])} occurs twice")
        if all(m == 1 for _, m, _, _ in entries):
            raise AllLogarithmic("all points have multiplicity 1; at least one point of "
                                 "multiplicity >= 2 is required (purely logarithmic case)")
        total = la.zeros(K, rank)
        for _, _, gi, _ in entries:
            total = la.mat_add(total, gi[0])
        if not la.is_zero_matrix(total):
            raise StructureError("regularity at infinity fails: the g_1 matrices do not sum to zero")
        entries.sort(key=lambda e: (e[1], render(e[0])))
        self.points = tuple(e[0] for e in entries)
        self.mult = tuple(e[1] for e in entries)
        self.g = tuple(tuple(e[2]) for e in entries)
        self.eta = tuple(tuple(e[3]) for e in entries)
        self.eta0 = _as_form_matrix(K, rank, eta0)
        self._polar = None

    # -- basic accessors ------------------------------------------------
    @property
    def N(self):
        return len(self.points)

    @property
    def m(self):
        return sum(self.mult)

    def M(self, i):
        return self.mult[i] - 1 if self.mult[i] >= 2 else 1

    @property
    def names(self):
        return self.K.names

    @property
    def polar(self):
        if self._polar is None:
            self._polar = PolarContext(self.points)
        return self._polar

    def leading(self, i):
        return self.g[i][self.mult[i] - 1]

    def __eq__(self, other):
        return (isinstance(other, Connection) and self.K is other.K and self.r == other.r
                and self.points == other.points and self.mult == other.mult
                and self.g == other.g and self.eta == other.eta and self.eta0 == other.eta0)

    def __repr__(self):
        pts = ", ".join(f"{render(a)}^{m}" for a, m in zip(self.points, self.mult))
        return f"Connection(rank={self.r}, points=[{pts}], K={self.K})"

    def replace(self, points=None, g=None, eta=None, eta0=None):
        pts = points if points is not None else list(zip(self.points, self.mult))
        return Connection(self.K, self.r, pts,
                          g if g is not None else self.g,
                          eta if eta is not None else self.eta,
                          eta0 if eta0 is not None else self.eta0)

    # -- polar views ----------------------------------------------------
    def gamma_polar(self):
        """γ_K/dt as {(i, r): g_r^{(i)}}."""
        out = {}
        for i in range(self.N):
            for k, X in enumerate(self.g[i]):
                if not la.is_zero_matrix(X):
                    out[(i, k + 1)] = X
        return out

    def eta_polar(self, name):
        """The ds_name component of η as {(i, s): X} plus CONST."""
        out = {}
        for i in range(self.N):
            for k, F in enumerate(self.eta[i]):
                X = F.comps.get(name)
                if X is not None:
                    out[(i, k + 1)] = X
        X = self.eta0.comps.get(name)
        if X is not None:
            out[CONST] = X
        return out

    def eta_point_polar(self, i, name):
        """Only the principal part η^{(i)} at a_i."""
        out = {}
        for k, F in enumerate(self.eta[i]):
            X = F.comps.get(name)
            if X is not None:
                out[(i, k + 1)] = X
        return out


def _as_form_matrix(K, r, X):
    if isinstance(X, FormMatrix):
        return X
    _check_matrix(X, r, "eta matrix")
    return FormMatrix.from_entries(K, [[x if isinstance(x, OneFormK) else OneFormK(K, x)
                                        for x in row] for row in X])


# ---------------------------------------------------------------------------
# the absolute connection form and its curvature

def connection_form(C):
    """A = γ + η as an r×r matrix of AbsForm1 over K(t)."""
    K, r = C.K, C.r
    Kt = line_field(K)
    t = Kt.gen(T)
    A = [[AbsForm1(Kt) for _ in range(r)] for _ in range(r)]
    for i, a in enumerate(C.points):
        ta = t - Kt.embed(a)
        da = d_K(a)
        for k, X in enumerate(C.g[i]):
            inv = ta ** (-(k + 1))
            for p in range(r):
                for q in range(r):
                    if X[p][q]:
                        c = Kt.embed(X[p][q]) * inv
                        A[p][q] = A[p][q] + AbsForm1(Kt, c, {n: -c * Kt.embed(v) for n, v in da.items()})
        for k, F in enumerate(C.eta[i]):
            inv = ta ** (-(k + 1))
            for n, X in F.comps.items():
                for p in range(r):
                    for q in range(r):
                        if X[p][q]:
                            A[p][q] = A[p][q] + AbsForm1(Kt, None, {n: Kt.embed(X[p][q]) * inv})
    for n, X in C.eta0.comps.items():
        for p in range(r):
            for q in range(r):
                if X[p][q]:
                    A[p][q] = A[p][q] + AbsForm1(Kt, None, {n: Kt.embed(X[p][q])})
    return A


def curvature(C):
    """dA + A ∧ A as an r×r matrix of AbsForm2."""
    A = connection_form(C)
    r = C.r
    out = []
    for p in range(r):
        row = []
        for q in range(r):
            acc = d1(A[p][q])
            for k in range(r):
                if not A[p][k].is_zero() and not A[k][q].is_zero():
                    acc = acc + wedge1(A[p][k], A[k][q])
            row.append(acc)
        out.append(row)
    return out


def is_vertical(C):
    return all(x.mixed_is_zero() for row in curvature(C) for x in row)


def mixed_curvature_polar(C, name):
    """The dt ∧ ds_name coefficient of the curvature, in polar coordinates.

    Writing A = F dt + Σ C_j ds_j, the coefficient is ∂_t C_j − ∂_j F + [F, C_j].
    """
    F = C.gamma_polar()
    Cj = dict(C.eta_polar(name))
    dF = {}
    for i, a in enumerate(C.points):
        da = a.derivative(name)
        for k, X in enumerate(C.g[i]):
            rho = k + 1
            if da:
                term = la.mat_scale(X, -da)
                Cj[(i, rho)] = la.mat_add(Cj[(i, rho)], term) if (i, rho) in Cj else term
                # ∂_j of X/(t−a)^ρ includes ρ X ∂_j a/(t−a)^{ρ+1}
                term = la.mat_scale(X, da * rho)
                dF[(i, rho + 1)] = la.mat_add(dF[(i, rho + 1)], term) if (i, rho + 1) in dF else term
            dX = [[x.derivative(name) for x in row] for row in X]
            if not la.is_zero_matrix(dX):
                dF[(i, rho)] = la.mat_add(dF[(i, rho)], dX) if (i, rho) in dF else dX
    out = pderiv_t(Cj, la.mat_scale)
    out = padd(out, {k: la.mat_neg(v) for k, v in dF.items()})
    out = padd(out, pmul(C.polar, F, Cj, la.mat_mul, la.mat_scale))
    out = padd(out, {k: la.mat_neg(v) for k, v in pmul(C.polar, Cj, F, la.mat_mul, la.mat_scale).items()})
    return {k: v for k, v in out.items() if not la.is_zero_matrix(v)}


def is_vertical_polar(C):
    return all(not mixed_curvature_polar(C, n) for n in C.names)


# ---------------------------------------------------------------------------
# classification of points

@dataclass(frozen=True)
class PointClass:
    tag: str
    diagnostics: str = ""

    @property
    def pseudo_admissible(self):
        return self.tag in ("Admissible", "LogarithmicDeligne", "PseudoLog", "SpecialPseudoLog")


def nonnegative_integer_eigenvalues(X):
    """Eigenvalues of X lying in {0, 1, 2, ...}, decided by exact factorization.

    The characteristic polynomial is cleared of denominators and factored
    in Q[s, λ]; an eigenvalue n ∈ Z≥0 is exactly a factor λ − n.
    """
    K = X[0][0].field
    coeffs = la.charpoly(X)
    lam = "lambda_"
    ctx = flint.fmpq_mpoly_ctx.get(K._ctx_names + (lam,), "deglex")
    den = ctx.constant(1)
    for c in coeffs:
        d = c.den.project_to_context(ctx)
        den = den * d / den.gcd(d)
    lv = ctx.gen(len(K._ctx_names))
    poly = ctx.constant(0)
    for k, c in enumerate(coeffs):
        num = c.num.project_to_context(ctx)
        poly = poly + num * (den / c.den.project_to_context(ctx)) * lv ** k
    roots = []
    _, facs = poly.factor()
    for q, _ in facs:
        degs = q.degrees()
        if degs[-1] != 1 or any(degs[:-1]):
            continue
        # q = α λ + β with α, β ∈ Q
        alpha = q.coefficient(0)
        beta = q.coefficient(1) if len(q) > 1 else flint.fmpq(0)
        root = Fraction(int((-beta / alpha).p), int((-beta / alpha).q))
        if root.denominator == 1 and root >= 0:
            roots.append(int(root))
    return sorted(set(roots))


def regular_constant_terms(C, i):
    """Constant terms at a_i of the dt-part and ds-parts, in the local frame z = t − a_i.

    dt-part: g_0 = Σ_{j≠i, r} g_r^{(j)} (a_i − a_j)^{-r}.
    ds-part: η_0 + Σ_{j≠i, s} η_s^{(j)} (a_i − a_j)^{-s} + Σ_{j≠i, r} g_r^{(j)} ∂(a_i − a_j)(a_i − a_j)^{-r}.
    """
    K, r = C.K, C.r
    a = C.points[i]
    g0 = la.zeros(K, r)
    ds = C.eta0
    for j, b in enumerate(C.points):
        if j == i:
            continue
        inv = (a - b).inverse()
        dab = d_K(a - b)
        for k, X in enumerate(C.g[j]):
            c = inv ** (k + 1)
            g0 = la.mat_add(g0, la.mat_scale(X, c))
            ds = ds + FormMatrix.from_matrix(K, la.mat_scale(X, c), dab)
        for k, F in enumerate(C.eta[j]):
            c = inv ** (k + 1)
            ds = ds + F.map(lambda Y, c=c: la.mat_scale(Y, c))
    return g0, ds


def _special_split(C, i):
    """Block size s of a block-triangular shape at a log point, or None."""
    r = C.r
    g1 = C.g[i][0]
    eta1 = C.eta[i][0]
    g0, ds = regular_constant_terms(C, i)
    for s in range(1, r):
        top = range(s)
        bottom = range(s, r)
        ok = True
        diag = []
        for p in range(r):
            for q in range(r):
                x = g1[p][q]
                if p == q:
                    diag.append(x)
                elif (p in top and q in top) or (p in bottom and q in bottom) or (p in top and q in bottom):
                    if x:
                        ok = False
        if not ok:
            continue
        mvals = {diag[p] for p in top}
        nvals = {diag[p] for p in bottom}
        if len(mvals) != 1 or len(nvals) != 1:
            continue
        mval, nval = next(iter(mvals)), next(iter(nvals))
        if not (mval.is_constant() and nval.is_constant()):
            continue
        if mval.to_fraction().denominator != 1 or nval.to_fraction().denominator != 1:
            continue
        for n, X in eta1.comps.items():
            for p in range(r):
                for q in range(r):
                    if X[p][q] and not (p in bottom and q in top):
                        ok = False
        if not ok:
            continue
        upper_right = [(p, q) for p in top for q in bottom]
        if any(g0[p][q] for p, q in upper_right):
            continue
        if any(X[p][q] for X in ds.comps.values() for p, q in upper_right):
            continue
        return s
    return None


def classify_point(C, i):
    m = C.mult[i]
    if m >= 2:
        d = la.det(C.leading(i))
        if d:
            return PointClass("Admissible")
        return PointClass("Invalid", f"leading matrix g_{m} is singular")
    g1 = C.g[i][0]
    bad = nonnegative_integer_eigenvalues(g1)
    if not bad:
        return PointClass("LogarithmicDeligne")
    if la.det(g1):
        if _special_split(C, i) is not None:
            return PointClass("SpecialPseudoLog", f"residue eigenvalues {bad} in {{0,1,2,...}}")
        return PointClass("PseudoLog", f"residue eigenvalues {bad} in {{0,1,2,...}}")
    return PointClass("Invalid", f"Deligne condition fails: residue eigenvalues {bad} "
                                 "in {0,1,2,...} and the residue is singular")


# ---------------------------------------------------------------------------
# operations on connections

def gauge_transform(C, phi):
    """A ↦ φAφ⁻¹ − (d_K φ)φ⁻¹ for a t-constant invertible φ.

    This is the frame change e ↦ eφ⁻¹ for ∇e = eA, the convention in which
    the curvature is dA + A ∧ A.
    """
    K = C.K
    try:
        inv = la.inverse(phi)
    except la.SingularMatrix:
        raise SingularGauge("gauge matrix is singular") from None

    def conj(X):
        return la.mat_mul(la.mat_mul(phi, X), inv)

    g = [[conj(X) for X in gi] for gi in C.g]
    eta = [[F.map(conj) for F in ei] for ei in C.eta]
    dphi = {n: [[x.derivative(n) for x in row] for row in phi] for n in K.names}
    shift = FormMatrix(K, C.r, {n: la.mat_mul(X, inv) for n, X in dphi.items()})
    eta0 = C.eta0.map(conj) - shift
    return C.replace(g=g, eta=eta, eta0=eta0)


def dual(C):
    def neg_t(X):
        return la.mat_neg(la.transpose(X))

    g = [[neg_t(X) for X in gi] for gi in C.g]
    eta = [[F.map(neg_t) for F in ei] for ei in C.eta]
    return C.replace(g=g, eta=eta, eta0=C.eta0.map(neg_t))


def direct_sum(*conns):
    """Block-diagonal sum of connections with identical points and multiplicities."""
    C0 = conns[0]
    K = C0.K
    for C in conns[1:]:
        if C.points != C0.points or C.mult != C0.mult or C.K is not K:
            raise StructureError("direct sum needs identical points, multiplicities and field")
    r = sum(C.r for C in conns)

    def block(mats):
        out = la.zeros(K, r)
        off = 0
        for C, X in zip(conns, mats):
            for p in range(C.r):
                for q in range(C.r):
                    out[off + p][off + q] = X[p][q]
            off += C.r
        return out

    def block_forms(forms):
        comps = {n: block([F.component(n) for F in forms]) for n in K.names}
        return FormMatrix(K, r, comps)

    g = [[block([C.g[i][k] for C in conns]) for k in range(C0.mult[i])] for i in range(C0.N)]
    eta = [[block_forms([C.eta[i][k] for C in conns]) for k in range(C0.M(i))] for i in range(C0.N)]
    eta0 = block_forms([C.eta0 for C in conns])
    return Connection(K, r, list(zip(C0.points, C0.mult)), g, eta, eta0)


def tensor_rank1(C1, C2):
    """Tensor product of two rank-1 connections with identical singular data."""
    if C1.r != 1 or C2.r != 1 or C1.points != C2.points or C1.mult != C2.mult:
        raise StructureError("tensor_rank1 needs rank-1 connections on the same points")
    g = [[la.mat_add(X, Y) for X, Y in zip(C1.g[i], C2.g[i])] for i in range(C1.N)]
    eta = [[F + G for F, G in zip(C1.eta[i], C2.eta[i])] for i in range(C1.N)]
    return Connection(C1.K, 1, list(zip(C1.points, C1.mult)), g, eta, C1.eta0 + C2.eta0)


def twist_block_step(M, z, s=None):
    """Basis change (e_1, ..., e_s, z e_{s+1}, ..., z e_r) on a local block matrix.

    M is an r×r matrix of AbsForm1 (local forms in the coordinate of K(t)),
    z ∈ K(t) the local coordinate; the default split is s = r − 1.  Returns
    (A, zB; C/z, D + (dz/z)·I) in block form.
    """
    r = len(M)
    s = r - 1 if s is None else s
    Kt = z.field
    dz = AbsForm1(Kt, z.derivative(T), {n: z.derivative(n) for n in Kt.names[:-1]})
    dlogz = dz * z.inverse()
    out = [[None] * r for _ in range(r)]
    for p in range(r):
        for q in range(r):
            x = M[p][q]
            if p < s and q >= s:
                x = x * z
            elif p >= s and q < s:
                x = x * z.inverse()
            elif p >= s and q >= s and p == q:
                x = x + dlogz
            out[p][q] = x
    return out


# ---------------------------------------------------------------------------
# Möbius transport

def pullback_form(A, p, q, r, w):
    """Pull a matrix of AbsForm1 back along t = (pτ+q)/(rτ+w); τ keeps the name t."""
    Kt = A[0][0].Kt
    t = Kt.gen(T)
    p, q, r, w = (Kt.embed(x) for x in (p, q, r, w))
    phi = (p * t + q) / (r * t + w)
    dphi_t = phi.derivative(T)
    dphi = {n: phi.derivative(n) for n in Kt.names[:-1]}

    def sub(f):
        return f.subs({T: phi}) if f else f

    out = []
    for row in A:
        new_row = []
        for x in row:
            F = sub(x.dt)
            base = {n: sub(c) for n, c in x.base.items()}
            for n, d in dphi.items():
                if d and F:
                    base[n] = base.get(n, Kt.zero) + F * d
            new_row.append(AbsForm1(Kt, F * dphi_t, base))
        out.append(new_row)
    return out


def connection_from_form(K, A, points):
    """Rebuild a Connection from its absolute form and (a_i, m_i) list."""
    r = len(A)
    pts = [K(a) for a, _ in points]
    mults = [m for _, m in points]
    g = [[la.zeros(K, r) for _ in range(m)] for m in mults]
    g_entries = {}
    for p in range(r):
        for q in range(r):
            poly, parts = partial_fractions(A[p][q].dt, pts)
            if any(poly):
                raise StructureError("dt-part not regular at infinity")
            for (i, rho), c in parts.items():
                if rho > mults[i]:
                    raise StructureError(f"pole of order {rho} exceeds multiplicity at {render(pts[i])}")
                g[i][rho - 1][p][q] = c
                g_entries[(i, rho, p, q)] = c
    eta_c = [[{n: la.zeros(K, r) for n in K.names} for _ in range(m - 1 if m >= 2 else 1)] for m in mults]
    eta0 = {n: la.zeros(K, r) for n in K.names}
    Kt = A[0][0].Kt
    t = Kt.gen(T)
    for n in K.names:
        for p in range(r):
            for q in range(r):
                f = A[p][q][n]
                # add back Σ g ∂a/(t−a)^ρ so that only η remains
                for (i, rho, pp, qq), c in g_entries.items():
                    if (pp, qq) == (p, q):
                        da = pts[i].derivative(n)
                        if da:
                            f = f + Kt.embed(c * da) / (t - Kt.embed(pts[i])) ** rho
                poly, parts = partial_fractions(f, pts)
                if len([c for c in poly if c]) > (1 if poly and poly[0] else 0):
                    raise StructureError("base part not regular at infinity")
                eta0[n][p][q] = poly[0] if poly else K.zero
                for (i, s), c in parts.items():
                    Mi = mults[i] - 1 if mults[i] >= 2 else 1
                    if s > Mi:
                        raise StructureError(f"eta pole of order {s} too large at {render(pts[i])}")
                    eta_c[i][s - 1][n][p][q] = c
    eta = [[FormMatrix(K, r, comps) for comps in ei] for ei in eta_c]
    return Connection(K, r, list(zip(pts, mults)), g, eta, FormMatrix(K, r, eta0))


def transport_mobius(C, p, q, r, w):
    """Pullback of C along t = (pτ+q)/(rτ+w)."""
    K = C.K
    p, q, r, w = (K(x) for x in (p, q, r, w))
    if not (p * w - q * r):
        raise StructureError("degenerate Möbius map: pw − qr = 0")
    new_points = []
    for a, m in zip(C.points, C.mult):
        den = p - r * a
        if not den:
            raise PointAtInfinity(f"the singular point {render(a)} is sent to infinity")
        new_points.append(((w * a - q) / den, m))
    A = pullback_form(connection_form(C), p, q, r, w)
    return connection_from_form(K, A, new_points)


def translate(C, c):
    """t ↦ τ + c."""
    K = C.K
    return transport_mobius(C, K.one, K(c), K.zero, K.one)
