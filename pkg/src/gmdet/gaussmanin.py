"""The Gauß-Manin connection on H and its determinant (left-hand side).

For a basis element x = e dt/(t−a_i)^ρ the lift s(x) = e d(t−a_i)/(t−a_i)^ρ
is closed, so ∇s(x) = A ∧ s(x).  Mixed 2-forms ds_k ∧ (f dt) are read as
(f dt) ⊗ ds_k; with this orientation

    A ∧ s(x) ↦  Σ_{j,s} g_s^{(j)} e dt/((t−a_j)^s (t−a_i)^ρ) ⊗ d(a_i − a_j)  +  η·x,

the first sum giving the Ψ part and the second the de Rham operator.
"""

from dataclasses import dataclass

from . import linalg as la
from .cohomology import (NABLA, PoleBasis, derham_operator, h_basis,
                         operator_from_images)
from .connection import FormMatrix
from .funcfield import OneFormK, d_K
from .polar import pmul


@dataclass
class GMMatrix:
    basis: list
    psi_part: FormMatrix
    eta_part: FormMatrix

    @property
    def total(self):
        return self.psi_part + self.eta_part


def psi_trace(C):
    """Σ_i m_i Σ_{j≠i} Σ_s Tr(g_s^{(j)}) (a_i − a_j)^{-s} d(a_i − a_j)."""
    K = C.K
    total = OneFormK(K)
    for i, a in enumerate(C.points):
        for j, b in enumerate(C.points):
            if i == j:
                continue
            diff = a - b
            dd = d_K(diff)
            if dd.is_zero():
                continue
            inv = diff.inverse()
            coef = K.zero
            for k, X in enumerate(C.g[j]):
                coef = coef + la.trace(X) * inv ** (k + 1)
            total = total + dd * (coef * C.mult[i])
    return total


def _pieces(C, label):
    """s(x) as [(point, order, sign)]; e = e_mu throughout."""
    if isinstance(label, PoleBasis):
        return [(label.i, label.rho, 1)]
    return [(label.i, 1, 1), (C.N - 1, 1, -1)]


def psi_images(C, basis):
    K, r = C.K, C.r
    gamma_by_point = []
    for j in range(C.N):
        gamma_by_point.append({(j, k + 1): X for k, X in enumerate(C.g[j]) if not la.is_zero_matrix(X)})
    images = {}
    for name in C.names:
        da = [a.derivative(name) for a in C.points]
        if not any(da):
            continue
        cols = []
        for lab in basis:
            e = [K.zero] * r
            e[lab.mu] = K.one
            w = {}
            for i, rho, sign in _pieces(C, lab):
                for j in range(C.N):
                    c = da[i] - da[j]
                    if j == i or not c:
                        continue
                    prod = pmul(C.polar, gamma_by_point[j], {(i, rho): e}, la.mat_vec, la.vec_scale)
                    for key, v in prod.items():
                        v = la.vec_scale(v, c * sign)
                        w[key] = la.vec_add(w[key], v) if key in w else v
            cols.append({k: v for k, v in w.items() if any(v)})
        images[name] = cols
    return images


def gm_matrix(C):
    basis = h_basis(C)
    psi = operator_from_images(C, basis, psi_images(C, basis), NABLA)
    eta = derham_operator(C)
    return GMMatrix(basis, psi, eta)


def gm_determinant_lhs(C, gm=None):
    """−Tr of the Gauß-Manin connection on H¹ (H⁰ = 0)."""
    gm = gm_matrix(C) if gm is None else gm
    return -gm.total.trace()
