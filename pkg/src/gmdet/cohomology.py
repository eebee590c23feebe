"""The basis H of relative H¹ and the projections along γ_K and ∇_{/K}.

Elements of 𝒲 (V-valued forms f dt with poles on D and a zero of order
≥ 2 at infinity) are held in polar coordinates {(i, ρ): vector}; the
factor dt is implicit.  Elements of 𝒱 are {(i, k): vector} plus a
constant vector under CONST.

Two independent projection routes exist:

* ``project`` lowers pole orders point by point, inverting the leading
  matrix of each step (g_{m_i}, or g_1 − k·I resp. g_1 at simple poles);
* ``project_dense`` writes down the whole bounded system
  ω = h + L(v) and solves it by elimination.
"""

from dataclasses import dataclass

from . import linalg as la
from .connection import FormMatrix
from .errors import ReductionFailed
from .polar import CONST, pmul, vadd

NABLA = "nabla"
HIGGS = "higgs"


@dataclass(frozen=True)
class PoleBasis:
    i: int
    rho: int
    mu: int

    def __str__(self):
        return f"pole(i={self.i + 1}, rho={self.rho}, mu={self.mu + 1})"


@dataclass(frozen=True)
class DiffBasis:
    i: int
    mu: int

    def __str__(self):
        return f"diff(i={self.i + 1}, mu={self.mu + 1})"


def h_basis(C):
    labels = []
    last = C.N - 1
    for i in range(C.N):
        top = C.mult[i] if i < last else C.mult[i] - 1
        for rho in range(2, top + 1):
            for mu in range(C.r):
                labels.append(PoleBasis(i, rho, mu))
    for i in range(last):
        for mu in range(C.r):
            labels.append(DiffBasis(i, mu))
    return labels


def _unit(K, r, mu):
    v = [K.zero] * r
    v[mu] = K.one
    return v


def embed_basis(C, label):
    """σ(x) as a 𝒲 element."""
    e = _unit(C.K, C.r, label.mu)
    if isinstance(label, PoleBasis):
        return {(label.i, label.rho): e}
    return {(label.i, 1): e, (C.N - 1, 1): [-x for x in e]}


def embed_coords(C, basis, coords):
    out = {}
    for lab, c in zip(basis, coords):
        if c:
            for k, v in embed_basis(C, lab).items():
                v = la.vec_scale(v, c)
                out[k] = la.vec_add(out[k], v) if k in out else v
    return out


def _clean(w):
    return {k: v for k, v in w.items() if any(v)}


def w_add(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = la.vec_add(out[k], v) if k in out else v
    return out


def w_sub(x, y):
    return w_add(x, {k: [-a for a in v] for k, v in y.items()})


def w_scale(x, c):
    return {k: la.vec_scale(v, c) for k, v in x.items()}


def decays(C, w):
    """The residue vectors sum to zero (no pole at infinity for f dt)."""
    total = [C.K.zero] * C.r
    for (i, rho), v in w.items():
        if rho == 1:
            total = la.vec_add(total, v)
    return not any(total)


# ---------------------------------------------------------------------------
# the operators γ_K and ∇_{/K} on polar coordinates

def apply_operator(C, op, v):
    """γ_K·v or ∇_{/K}(v) = d_t v + γ_K·v for v in polar coordinates (with CONST)."""
    out = pmul(C.polar, C.gamma_polar(), v, la.mat_vec, la.vec_scale)
    if op == NABLA:
        for (i, k), y in v.items():
            if (i, k) == CONST:
                continue
            key = (i, k + 1)
            term = la.vec_scale(y, -k)
            out[key] = vadd(out[key], term) if key in out else term
    return _clean(out)


class _Leading:
    """Inverses of the pivot blocks used by the pole-lowering reduction."""

    def __init__(self, C, op):
        self.C = C
        self.op = op
        self._cache = {}

    def inverse(self, i, k):
        C = self.C
        m = C.mult[i]
        key = (i, k) if (m == 1 and self.op == NABLA) else (i, 0)
        if key not in self._cache:
            if m >= 2:
                X = C.leading(i)
                what = f"g_{m} at point {i + 1}"
            elif self.op == NABLA:
                X = la.mat_sub(C.g[i][0], la.scalar(C.K, C.r, k))
                what = f"g_1 - {k}*I at point {i + 1} (pole order rho = {k + 1})"
            else:
                X = C.g[i][0]
                what = f"g_1 at point {i + 1}"
            try:
                self._cache[key] = la.inverse(X)
            except la.SingularMatrix:
                raise ReductionFailed(f"cannot lower the pole: {what} is singular") from None
        return self._cache[key]


def initial_bound(C, w):
    top = max((rho for (_, rho) in w), default=0)
    return top + max(C.mult)


def reduce(C, w, op, bound=None):
    """Pole-lowering reduction: returns (h coordinates, v) with w = σ(h) + L(v)."""
    K = C.K
    bound = initial_bound(C, w) if bound is None else bound
    lead = _Leading(C, op)
    w = _clean(dict(w))
    v = {}
    for i in range(C.N):
        m = C.mult[i]
        floor = m if m >= 2 else 1
        while True:
            orders = [rho for (j, rho) in w if j == i and rho > floor]
            if not orders:
                break
            rho = max(orders)
            k = rho - floor
            if k > bound:
                raise ReductionFailed(f"pole order {rho} at point {i + 1} exceeds the bound {bound}")
            y = la.mat_vec(lead.inverse(i, k), w[(i, rho)])
            v[(i, k)] = la.vec_add(v[(i, k)], y) if (i, k) in v else y
            w = _clean(w_sub(w, apply_operator(C, op, {(i, k): y})))
            if (i, rho) in w:
                raise AssertionError("pole order did not drop")
    last = C.N - 1
    top = (last, C.mult[last])
    if top in w:
        y0 = la.mat_vec(lead.inverse(last, 0), w[top])
        v[CONST] = y0
        w = _clean(w_sub(w, apply_operator(C, op, {CONST: y0})))
    if not decays(C, w):
        raise ReductionFailed("input form has a pole at infinity")
    basis = h_basis(C)
    coords = []
    for lab in basis:
        if isinstance(lab, PoleBasis):
            vec = w.get((lab.i, lab.rho))
        else:
            vec = w.get((lab.i, 1))
        coords.append(vec[lab.mu] if vec else K.zero)
    return coords, v


def project(C, w, op, bound=None, retries=3):
    bound = initial_bound(C, w) if bound is None else bound
    for attempt in range(retries + 1):
        try:
            return reduce(C, w, op, bound)[0]
        except ReductionFailed as exc:
            if "exceeds the bound" not in str(exc) or attempt == retries:
                raise
            bound += 2


def project_nabla(C, w, bound=None):
    return project(C, w, NABLA, bound)


def project_higgs(C, w, bound=None):
    return project(C, w, HIGGS, bound)


# ---------------------------------------------------------------------------
# dense route

def _v_unknowns(C, P):
    unk = [CONST]
    for i in range(C.N):
        for k in range(1, P + 1):
            unk.append((i, k))
    return unk


def _slots(C, P, w=None):
    slots = []
    for i in range(C.N):
        top = P + C.mult[i]
        if w:
            top = max([top] + [rho for (j, rho) in w if j == i])
        for rho in range(1, top + 1):
            slots.append((i, rho))
    return slots


def dense_system(C, op, P, w=None):
    """Columns: H basis then v unknowns; rows: (slot, component)."""
    K, r = C.K, C.r
    basis = h_basis(C)
    slots = _slots(C, P, w)
    index = {}
    for s in slots:
        for mu in range(r):
            index[(s, mu)] = len(index)
    columns = []
    for lab in basis:
        columns.append(embed_basis(C, lab))
    for key in _v_unknowns(C, P):
        for mu in range(r):
            columns.append(apply_operator(C, op, {key: _unit(K, r, mu)}))
    rows = [[K.zero] * len(columns) for _ in range(len(index))]
    for c, col in enumerate(columns):
        for s, vec in col.items():
            for mu in range(r):
                if vec[mu]:
                    rows[index[(s, mu)]][c] = vec[mu]
    return rows, index, len(basis)


def project_dense(C, w, op, P=None):
    K, r = C.K, C.r
    P = initial_bound(C, w) if P is None else P
    rows, index, n = dense_system(C, op, P, w)
    rhs = [K.zero] * len(rows)
    for s, vec in w.items():
        for mu in range(r):
            if vec[mu]:
                rhs[index[(s, mu)]] = vec[mu]
    sol = la.solve_affine(rows, rhs)
    if sol is None:
        raise ReductionFailed("dense system is inconsistent")
    x, null = sol
    if any(any(v[:n]) for v in null):
        raise ReductionFailed("H coordinates are not determined by the dense system")
    return x[:n]


def dense_square_check(C, op, P):
    """[σ(H) | L(𝒱_P)] against 𝒲_P with the decay row dropped: square and invertible."""
    rows, index, n = dense_system(C, op, P)
    last = C.N - 1
    keep = [row for (key, row) in zip(index, rows) if key[0] != (last, 1)]
    ncols = len(rows[0])
    return len(keep) == ncols and la.rank(keep) == ncols


def h0_check(C, P=None):
    """Kernel of ∇_{/K} on 𝒱_P is zero."""
    P = max(C.mult) + 1 if P is None else P
    rows, index, n = dense_system(C, NABLA, P)
    vcols = [row[n:] for row in rows]
    return la.rank(vcols) == len(vcols[0])


# ---------------------------------------------------------------------------
# operators on H

def multiply_form(C, eta_polar, w):
    """η·w for η given in polar coordinates (one base direction)."""
    return _clean(pmul(C.polar, eta_polar, w, la.mat_vec, la.vec_scale))


def operator_from_images(C, basis, images, op, bound=None):
    """OperatorMatrix (as FormMatrix of size n) from {name: [𝒲 image per basis element]}."""
    n = len(basis)
    comps = {}
    for name, cols in images.items():
        M = la.zeros(C.K, n)
        for c, w in enumerate(cols):
            if not w:
                continue
            coords = project(C, w, op, bound)
            for rrow, val in enumerate(coords):
                M[rrow][c] = val
        comps[name] = M
    return FormMatrix(C.K, n, comps)


def eta_operator(C, op, eta_polar_of=None):
    """Projection of η·σ(x) for every basis element x and direction."""
    basis = h_basis(C)
    if eta_polar_of is None:
        eta_polar_of = C.eta_polar
    images = {}
    for name in C.names:
        eta = eta_polar_of(name)
        if not eta:
            continue
        images[name] = [multiply_form(C, eta, embed_basis(C, lab)) for lab in basis]
    return operator_from_images(C, basis, images, op)


def higgs_operator(C):
    return eta_operator(C, HIGGS)


def derham_operator(C):
    return eta_operator(C, NABLA)


def point_higgs_operator(C, i):
    """The Higgs operator of η^{(i)} alone (the principal part at a_i)."""
    return eta_operator(C, HIGGS, lambda name: C.eta_point_polar(i, name))
