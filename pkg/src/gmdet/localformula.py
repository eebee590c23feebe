"""The local formula (right-hand side) and the comparison with the left.

RHS = −global + Σ_i residue_i + torsion, where

* global   = Σ_{p ∈ div(f·s)} mult_p · (Tr A restricted to t = p), with the
             default section s = dt/∏(t−a_j)^{m_j} of divisor (m−2)·∞;
* residue_i = transfer residue at a_i of the mixed part of Tr(dG G⁻¹ A),
             G = ∏_j (t−a_j)^{m_j} γ_K/dt (divided by f for other sections);
* torsion  = ½ Σ_{m_i ≥ 2} m_i dlog det g_{m_i}^{(i)}.

The transfer residue reads a mixed 2-form f dt ∧ ω as (f dt) ⊗ ω, the same
orientation as the Gauß-Manin side; in terms of ``residue_form2`` it is
its negative.
"""

from dataclasses import dataclass, field
from typing import Optional

from . import linalg as la
from .connection import (classify_point, connection_form, is_vertical)
from .errors import BadSection, DeligneFailure, NotVertical, PreconditionError
from .funcfield import (DlogCertificate, OneFormK, d_K, dlog,
                        dlog_class_reduce, irreducible_factors, render)
from .gaussmanin import gm_determinant_lhs
from .ratline import (AbsForm2, T, laurent_coeff, line_field, residue_form2,
                      t_degree)


@dataclass
class RhsBreakdown:
    global_: OneFormK
    residues: dict
    torsion: OneFormK
    total: OneFormK


@dataclass
class VerifyReport:
    lhs: OneFormK
    rhs: RhsBreakdown
    difference: OneFormK
    certificate: Optional[DlogCertificate]
    verdict: bool
    classes: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# G and the residue factors

def big_g(C):
    """G = γ_K/dt · ∏_j (t−a_j)^{m_j}, an r×r polynomial matrix over K(t)."""
    K, r = C.K, C.r
    Kt = line_field(K)
    t = Kt.gen(T)
    lin = [t - Kt.embed(a) for a in C.points]
    out = la.zeros(Kt, r)
    for j in range(C.N):
        for k, X in enumerate(C.g[j]):
            if la.is_zero_matrix(X):
                continue
            cof = Kt.one
            for l in range(C.N):
                e = C.mult[l] - (k + 1 if l == j else 0)
                if e:
                    cof = cof * lin[l] ** e
            out = la.mat_add(out, [[Kt.embed(x) * cof for x in row] for row in X])
    return out


def _mixed_trace_dG(G, A, names, only_eta=False):
    """Mixed coefficients f_n of Tr(dG·G⁻¹ ∧ A): f_n = Tr(∂_tG G⁻¹ C_n) − Tr(∂_nG G⁻¹ F)."""
    Kt = G[0][0].field
    r = len(G)
    try:
        Ginv = la.inverse(G)
    except la.SingularMatrix:
        from .errors import SingularLeadingMatrix
        raise SingularLeadingMatrix("det G vanishes identically") from None
    dGt = [[x.derivative(T) for x in row] for row in G]
    left_t = la.mat_mul(dGt, Ginv)
    F = [[A[p][q].dt for q in range(r)] for p in range(r)]
    mixed = {}
    for n in names:
        Cn = [[A[p][q][n] for q in range(r)] for p in range(r)]
        val = la.trace(la.mat_mul(left_t, Cn))
        if not only_eta:
            dGn = [[x.derivative(n) for x in row] for row in G]
            if not la.is_zero_matrix(dGn):
                val = val - la.trace(la.mat_mul(la.mat_mul(dGn, Ginv), F))
        if val:
            mixed[n] = val
    return AbsForm2(Kt, mixed)


def _dlog_multiplier_correction(f, A, names):
    """Mixed part of Tr(dlog f ∧ A): (∂_t f/f) Tr C_n − (∂_n f/f) Tr F."""
    Kt = f.field
    r = len(A)
    trF = Kt.zero
    for p in range(r):
        trF = trF + A[p][p].dt
    lt = f.derivative(T) / f
    mixed = {}
    for n in names:
        trC = Kt.zero
        for p in range(r):
            trC = trC + A[p][p][n]
        val = lt * trC - f.derivative(n) / f * trF
        if val:
            mixed[n] = val
    return AbsForm2(Kt, mixed)


def transfer_residue(xi, a):
    """(f dt) ⊗ ω reading of the residue; equals −residue_form2."""
    return -residue_form2(xi, a)


def local_residue_factor(C, i, frame="global", multiplier=None, A=None, G=None):
    """Residue at a_i of Tr(dG G⁻¹ A).

    frame="global" uses G; frame="local" uses (t−a_i)^{m_i} γ_K/dt.
    A nontrivial section multiplier f replaces G by G/f.
    """
    K = C.K
    A = connection_form(C) if A is None else A
    if frame == "global":
        G = big_g(C) if G is None else G
        if G is not None:
            Ga = [[laurent_coeff(x, C.points[i], 0) for x in row] for row in G]
            if not la.det(Ga):
                from .errors import SingularLeadingMatrix
                raise SingularLeadingMatrix(f"G(a_{i + 1}) is singular")
    elif frame == "local":
        Kt = line_field(K)
        t = Kt.gen(T)
        z = (t - Kt.embed(C.points[i])) ** C.mult[i]
        r = C.r
        G = [[A[p][q].dt * z for q in range(r)] for p in range(r)]
    else:
        raise ValueError(f"unknown frame {frame!r}")
    xi = _mixed_trace_dG(G, A, K.names)
    if multiplier is not None:
        xi = xi - _dlog_multiplier_correction(multiplier, A, K.names)
    return transfer_residue(xi, C.points[i])


def special_local_factor(C, i):
    """Tr(g_0 g_1⁻¹ η_1) at a log point, in the local frame z = t − a_i."""
    from .connection import regular_constant_terms
    K = C.K
    if C.mult[i] != 1:
        raise ValueError("special_local_factor needs a point of multiplicity 1")
    g0, _ = regular_constant_terms(C, i)
    left = la.mat_mul(g0, la.inverse(C.g[i][0]))
    coeffs = {}
    for n, X in C.eta[i][0].comps.items():
        v = la.trace(la.mat_mul(left, X))
        if v:
            coeffs[n] = v
    return OneFormK(K, coeffs)


def eta_residue(C, i, G=None):
    """Transfer residue at a_i of Tr(dG G⁻¹ η^{(i)})."""
    K = C.K
    Kt = line_field(K)
    t = Kt.gen(T)
    G = big_g(C) if G is None else G
    r = C.r
    ta = t - Kt.embed(C.points[i])
    mixed = {}
    Ginv = la.inverse(G)
    left = la.mat_mul([[x.derivative(T) for x in row] for row in G], Ginv)
    for n in K.names:
        E = la.zeros(Kt, r)
        for k, F in enumerate(C.eta[i]):
            X = F.comps.get(n)
            if X is not None:
                c = ta ** (-(k + 1))
                E = la.mat_add(E, [[Kt.embed(x) * c for x in row] for row in X])
        val = la.trace(la.mat_mul(left, E))
        if val:
            mixed[n] = val
    return transfer_residue(AbsForm2(Kt, mixed), C.points[i])


def summed_residue_factors(C, G=None):
    """−Σ_{i≠j,r} Tr(g_r^{(i)}) m_j (a_j−a_i)^{-r} d(a_j−a_i) + Σ_i res Tr(dG G⁻¹ η^{(i)})."""
    K = C.K
    total = OneFormK(K)
    for i, a in enumerate(C.points):
        for j, b in enumerate(C.points):
            if i == j:
                continue
            diff = b - a
            dd = d_K(diff)
            if dd.is_zero():
                continue
            inv = diff.inverse()
            for k, X in enumerate(C.g[i]):
                total = total - dd * (la.trace(X) * C.mult[j] * inv ** (k + 1))
    G = big_g(C) if G is None else G
    for i in range(C.N):
        total = total + eta_residue(C, i, G)
    return total


# ---------------------------------------------------------------------------
# global and torsion factors

def restrict_det(C, p):
    """Tr A pulled back to the point t = p (p ∈ K, not a singular point)."""
    total = C.eta0.trace()
    for j, a in enumerate(C.points):
        diff = p - a
        inv = diff.inverse()
        dd = d_K(diff)
        for k, X in enumerate(C.g[j]):
            tr = la.trace(X)
            if tr:
                total = total + dd * (tr * inv ** (k + 1))
        for k, F in enumerate(C.eta[j]):
            total = total + F.trace() * inv ** (k + 1)
    return total


def section_divisor(C, f):
    """Divisor of f·s as ([(p, n)], n_∞) for f ∈ K(t)."""
    K = C.K
    Kt = f.field
    finite = []
    for poly, sign in ((f.num, 1), (f.den, -1)):
        for q, e in irreducible_factors(poly) if not poly.is_constant() else []:
            dq = int(q.degrees()[Kt.names.index(T)])
            if dq == 0:
                continue
            if dq > 1:
                raise BadSection("section divisor has non-rational support: " + str(q))
            qe = Kt.poly(q)
            alpha = qe.derivative(T)
            beta = qe - alpha * Kt.gen(T)
            root = K.restrict(-beta / alpha)
            if any(root == a for a in C.points):
                raise BadSection(f"section multiplier vanishes or has a pole at {render(root)}")
            finite.append((root, sign * e))
    dn, dd = t_degree(f)
    at_infinity = (C.m - 2) + dd - dn
    return finite, at_infinity


def global_factor(C, multiplier=None):
    if multiplier is None:
        return C.eta0.trace() * (C.m - 2)
    finite, n_inf = section_divisor(C, multiplier)
    total = C.eta0.trace() * n_inf
    for p, n in finite:
        total = total + restrict_det(C, p) * n
    return total


def torsion_factor(C):
    from fractions import Fraction
    total = OneFormK(C.K)
    for i in range(C.N):
        m = C.mult[i]
        if m >= 2:
            total = total + dlog(la.det(C.leading(i))) * Fraction(m, 2)
    return total


def derham_trace_formula(C, G=None):
    """(m−2)Tr(η_0) − Σ_i res Tr(dG G⁻¹ η^{(i)}) + torsion; ≡ Tr(η_∇) mod dlog K^×."""
    G = big_g(C) if G is None else G
    total = C.eta0.trace() * (C.m - 2) + torsion_factor(C)
    for i in range(C.N):
        total = total - eta_residue(C, i, G)
    return total


def gm_determinant_rhs(C, multiplier=None):
    A = connection_form(C)
    G = big_g(C)
    residues = {i: local_residue_factor(C, i, multiplier=multiplier, A=A, G=G) for i in range(C.N)}
    glob = global_factor(C, multiplier)
    tors = torsion_factor(C)
    total = -glob + tors
    for v in residues.values():
        total = total + v
    return RhsBreakdown(glob, residues, tors, total)


# ---------------------------------------------------------------------------
# the comparison

def check_preconditions(C):
    """Vertical and (special) pseudo-admissible; returns the point classes."""
    classes = [classify_point(C, i) for i in range(C.N)]
    for i, pc in enumerate(classes):
        if pc.tag == "Invalid":
            if C.mult[i] >= 2:
                raise PreconditionError(f"point {i + 1} ({render(C.points[i])}) is not admissible: "
                                        f"{pc.diagnostics}")
            raise DeligneFailure(f"point {i + 1} ({render(C.points[i])}): {pc.diagnostics}")
        if pc.tag == "PseudoLog":
            raise DeligneFailure(f"point {i + 1} ({render(C.points[i])}): {pc.diagnostics}, "
                                 "and the local shape is not special pseudo-logarithmic")
    if not is_vertical(C):
        raise NotVertical("the curvature has a dt-component (connection is not vertical)")
    return classes


def verify(C, multiplier=None, check=True):
    classes = check_preconditions(C) if check else []
    lhs = gm_determinant_lhs(C)
    rhs = gm_determinant_rhs(C, multiplier)
    diff = lhs - rhs.total
    cert = dlog_class_reduce(diff, allow_half=False)
    return VerifyReport(lhs, rhs, diff, cert, cert is not None, classes)
