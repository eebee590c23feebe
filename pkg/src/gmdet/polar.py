"""Arithmetic on partial-fraction coordinates over fixed points a_1..a_N.

An expansion is a dict {(i, ρ): value} standing for Σ value/(t−a_i)^ρ,
plus an optional key CONST = (-1, 0) for a t-constant term.  Values are
anything supporting +, − and a caller-supplied bilinear product (scalars,
vectors, matrices).  Products of two polar terms at different points are
re-expanded with the closed two-point formula in ratline.pf_pair.
"""

from .ratline import pf_pair

CONST = (-1, 0)


class PolarContext:
    """Caches the two-point coefficients for one list of points."""

    def __init__(self, points):
        self.points = list(points)
        self._pairs = {}

    def pair(self, i, r, j, s):
        key = (i, r, j, s)
        if key not in self._pairs:
            A, B = pf_pair(self.points[i], r, self.points[j], s)
            self._pairs[key] = (A, B)
            self._pairs[(j, s, i, r)] = (B, A)
        return self._pairs[key]

    def product_terms(self, k1, k2):
        """Expansion of (t−a_i)^{-r}(t−a_j)^{-s} as [(key, scalar or None)].

        None stands for the scalar 1 (avoids needless multiplications).
        """
        (i, r), (j, s) = k1, k2
        if k1 == CONST:
            return [(k2, None)]
        if k2 == CONST:
            return [(k1, None)]
        if i == j:
            return [((i, r + s), None)]
        A, B = self.pair(i, r, j, s)
        return [((i, p), c) for p, c in A.items()] + [((j, q), c) for q, c in B.items()]


def vadd(u, v):
    """Sum of scalars, vectors or matrices (nested lists)."""
    if isinstance(u, list):
        return [vadd(a, b) for a, b in zip(u, v)]
    return u + v


def padd(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = vadd(out[k], v) if k in out else v
    return out


def pscale(x, f):
    return {k: f(v) for k, v in x.items()}


def pmul(ctx, x, y, op, scale):
    """Product of two expansions with bilinear ``op`` and ``scale(v, c)``."""
    out = {}
    for k1, v1 in x.items():
        for k2, v2 in y.items():
            prod = op(v1, v2)
            for key, c in ctx.product_terms(k1, k2):
                val = prod if c is None else scale(prod, c)
                out[key] = vadd(out[key], val) if key in out else val
    return out


def pderiv_t(x, scale):
    """∂/∂t of an expansion: value/(t−a)^ρ ↦ −ρ·value/(t−a)^{ρ+1}."""
    out = {}
    for (i, rho), v in x.items():
        if (i, rho) == CONST:
            continue
        out[(i, rho + 1)] = scale(v, -rho)
    return out

