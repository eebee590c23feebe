"""Builders for arbitrary (not necessarily vertical) connection data."""

from gmdet import linalg as la
from gmdet.connection import Connection, FormMatrix
from gmdet.oracle import _random_points, random_matrix


def arbitrary_connection(K, r, mults, rng, with_eta=True, log_residue=None):
    """Random data of the given shape with Σ g_1 = 0 and invertible pivots.

    Leading matrices at irregular points are invertible; at log points
    g_1 and g_1 − kI (k = 1, 2, 3) are invertible, unless ``log_residue``
    prescribes g_1 there.
    """
    while True:
        pts = _random_points(K, len(mults), rng)
        comp = max(range(len(mults)), key=lambda k: mults[k])
        g = [[random_matrix(K, r, rng) for _ in range(m)] for m in mults]
        if log_residue is not None:
            for k, m in enumerate(mults):
                if m == 1 and k != comp:
                    g[k][0] = log_residue
        total = la.zeros(K, r)
        for k in range(len(mults)):
            if k != comp:
                total = la.mat_add(total, g[k][0])
        g[comp][0] = la.mat_neg(total)
        if not all(_pivots_ok(K, r, gi, m, log_residue is not None) for gi, m in zip(g, mults)):
            continue
        eta = []
        for m in mults:
            eta.append([FormMatrix(K, r, {n: random_matrix(K, r, rng) for n in K.names} if with_eta else {})
                        for _ in range(m - 1 if m >= 2 else 1)])
        eta0 = FormMatrix(K, r, {K.names[0]: random_matrix(K, r, rng)} if with_eta else {})
        return Connection(K, r, list(zip(pts, mults)), g, eta, eta0)


def _pivots_ok(K, r, gi, m, prescribed):
    if m >= 2:
        return bool(la.det(gi[-1]))
    if prescribed:
        return True
    return all(la.det(la.mat_sub(gi[0], la.scalar(K, r, k))) for k in range(4))


def trivial_shape(K, r, mults):
    """g_m = I at every irregular point, everything else zero."""
    g = []
    for m in mults:
        mats = [la.zeros(K, r) for _ in range(m)]
        mats[-1] = la.identity(K, r) if m >= 2 else la.zeros(K, r)
        g.append(mats)
    eta = [[FormMatrix(K, r) for _ in range(m - 1 if m >= 2 else 1)] for m in mults]
    return Connection(K, r, [(k, m) for k, m in enumerate(mults)], g, eta, FormMatrix(K, r))
