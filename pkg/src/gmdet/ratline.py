"""Rational functions of the line coordinate t over K, and absolute forms.

An element of K(t) is a FieldElem of the field Q(s_1, ..., s_k, t); the
name ``t`` is therefore reserved.  Expansions at a point a of K go through
the univariate view (coefficients in K) and synthetic division.

Residue conventions (fixed once, used everywhere):

* ``residue_form2``:  res_{t=a}(ω ∧ f dt) = coeff_{-1}(f) ω.  A 2-form is
  stored through its dt ∧ ds_j coefficients, so the residue of
  Σ f_j dt ∧ ds_j is  −Σ coeff_{-1}(f_j) ds_j.
* ``residue_at_infinity``:  res_{u=∞}(f du) = −coeff_{-1}(f).
"""

from functools import lru_cache
from math import comb

from .errors import UncoveredPole
from .funcfield import FunctionField, OneFormK

T = "t"


def line_field(K):
    """K(t) as a FunctionField on K's names plus ``t``."""
    if T in K.names:
        raise ValueError("the parameter name 't' is reserved for the line coordinate")
    return FunctionField.get(K.names + (T,))


def base_field(Kt):
    return FunctionField.get(Kt.names[:-1])


def tvar(K):
    return line_field(K).gen(T)


# ---------------------------------------------------------------------------
# univariate view

def _t_coeffs(p, K, Kt):
    """Polynomial in Q[s, t] -> list of K-coefficients by t-degree."""
    tpos = Kt.names.index(T)
    groups = {}
    for exps, c in zip(p.monoms(), p.coeffs()):
        d = int(exps[tpos])
        e = tuple(int(x) for k, x in enumerate(exps) if k != tpos)
        groups.setdefault(d, {})[e] = c
    if not groups:
        return [K.zero]
    out = [K.zero] * (max(groups) + 1)
    for d, terms in groups.items():
        if K.names:
            out[d] = K.poly(K.ctx.from_dict(terms))
        else:
            out[d] = K(_frac(terms[()]))
    return out


def _frac(c):
    from fractions import Fraction
    return Fraction(int(c.p), int(c.q))


def t_degree(f):
    """(deg num, deg den) in t."""
    tpos = f.field.names.index(T)
    return int(f.num.degrees()[tpos]), int(f.den.degrees()[tpos])


def upoly_coeffs(f):
    """Coefficients in K of a polynomial element of K(t)."""
    Kt = f.field
    K = base_field(Kt)
    if t_degree(f)[1]:
        raise ValueError("not a polynomial in t")
    den = K.restrict(Kt.poly(f.den))
    return [c / den for c in _t_coeffs(f.num, K, Kt)]


def from_upoly(coeffs, Kt):
    t = Kt.gen(T)
    out = Kt.zero
    for c in reversed(coeffs):
        out = out * t + Kt.embed(c)
    return out


def taylor_shift(coeffs, a):
    """Coefficients of p(a + τ) from those of p(t), by repeated synthetic division."""
    c = list(coeffs)
    n = len(c)
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            c[j] = c[j] + a * c[j + 1]
    return c


def _series_div(num, den, n):
    """First n+1 power-series coefficients of num/den (den[0] ≠ 0)."""
    K = den[0].field
    inv0 = den[0].inverse()
    out = []
    for k in range(n + 1):
        acc = num[k] if k < len(num) else K.zero
        for j in range(1, min(k, len(den) - 1) + 1):
            if den[j] and out[k - j]:
                acc = acc - den[j] * out[k - j]
        out.append(acc * inv0)
    return out


def _valuation(c):
    for k, x in enumerate(c):
        if x:
            return k
    return None


def laurent_expansion(f, a, nmax):
    """Dict {n: coeff} of (t−a)^n for n from the pole order up to nmax."""
    Kt = f.field
    K = base_field(Kt)
    a = K(a)
    if not f:
        return {}
    num = taylor_shift(_t_coeffs(f.num, K, Kt), a)
    den = taylor_shift(_t_coeffs(f.den, K, Kt), a)
    vn, vd = _valuation(num), _valuation(den)
    shift = vn - vd
    num, den = num[vn:], den[vd:]
    if nmax < shift:
        return {}
    series = _series_div(num, den, nmax - shift)
    return {shift + k: c for k, c in enumerate(series) if c}


def laurent_coeff(f, a, n):
    return laurent_expansion(f, a, n).get(n, base_field(f.field).zero)


def pole_order(f, a):
    exp = laurent_expansion(f, a, 0)
    low = min(exp) if exp else 0
    return max(0, -low)


def principal_part(f, a):
    """{ρ: coeff of (t−a)^{-ρ}} for ρ ≥ 1."""
    exp = laurent_expansion(f, a, -1)
    return {-n: c for n, c in exp.items() if n < 0}


def partial_fractions(f, points):
    """f = poly + Σ_i Σ_ρ c_{i,ρ}/(t−a_i)^ρ.

    Returns (poly coefficient list over K, {(i, ρ): c}).  Raises
    UncoveredPole if f has a finite pole outside ``points``.
    """
    Kt = f.field
    t = Kt.gen(T)
    parts = {}
    rest = f
    for i, a in enumerate(points):
        for rho, c in principal_part(f, a).items():
            parts[(i, rho)] = c
            rest = rest - Kt.embed(c) / (t - Kt.embed(a)) ** rho
    if t_degree(rest)[1]:
        raise UncoveredPole(f"pole outside the given points: {rest}")
    return upoly_coeffs(rest), parts


def recompose(poly, parts, points, Kt):
    t = Kt.gen(T)
    out = from_upoly(poly, Kt) if poly else Kt.zero
    for (i, rho), c in parts.items():
        out = out + Kt.embed(c) / (t - Kt.embed(points[i])) ** rho
    return out


# ---------------------------------------------------------------------------
# the two-point identity behind every partial-fraction product

@lru_cache(maxsize=None)
def _pf_integers(r, s):
    """Integer data of 1/((t−a)^r (t−b)^s): [(p, sign*binomial, exponent)]."""
    return tuple((p, (-1) ** (r - p) * comb(s + r - p - 1, r - p), s + r - p)
                 for p in range(1, r + 1))


def pf_pair(a, r, b, s):
    """Coefficients of 1/((t−a)^r (t−b)^s) for a ≠ b.

    Returns ({p: A_p}, {q: B_q}) with the function equal to
    Σ A_p/(t−a)^p + Σ B_q/(t−b)^q.
    """
    inv = (a - b).inverse()
    A = {}
    for p, c, e in _pf_integers(r, s):
        A[p] = inv ** e * c
    ninv = -inv
    B = {}
    for q, c, e in _pf_integers(s, r):
        B[q] = ninv ** e * c
    return A, B


# ---------------------------------------------------------------------------
# absolute forms

class AbsForm1:
    """f dt + Σ_j c_j ds_j with f, c_j in K(t)."""

    __slots__ = ("Kt", "dt", "base")

    def __init__(self, Kt, dt=None, base=None):
        self.Kt = Kt
        self.dt = Kt.zero if dt is None else Kt(dt)
        self.base = {}
        for n, c in (base or {}).items():
            c = Kt(c)
            if c:
                self.base[n] = c

    def __getitem__(self, name):
        return self.base.get(name, self.Kt.zero)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        base = dict(self.base)
        for n, c in other.base.items():
            base[n] = base[n] + c if n in base else c
        return AbsForm1(self.Kt, self.dt + other.dt, base)

    __radd__ = __add__

    def __neg__(self):
        return AbsForm1(self.Kt, -self.dt, {n: -c for n, c in self.base.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = self.Kt(f)
        return AbsForm1(self.Kt, self.dt * f, {n: c * f for n, c in self.base.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, AbsForm1) and self.dt == other.dt and self.base == other.base

    def is_zero(self):
        return not self.dt and not self.base

    def __repr__(self):
        parts = [f"({self.dt}) dt"] if self.dt else []
        parts += [f"({c}) d{n}" for n, c in self.base.items()]
        return " + ".join(parts) or "0"


class AbsForm2:
    """Σ_j f_j dt ∧ ds_j + Σ_{j<k} p_{jk} ds_j ∧ ds_k."""

    __slots__ = ("Kt", "mixed", "pure")

    def __init__(self, Kt, mixed=None, pure=None):
        self.Kt = Kt
        self.mixed = {n: c for n, c in (mixed or {}).items() if c}
        self.pure = {p: c for p, c in (pure or {}).items() if c}

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        mixed = dict(self.mixed)
        for n, c in other.mixed.items():
            mixed[n] = mixed[n] + c if n in mixed else c
        pure = dict(self.pure)
        for n, c in other.pure.items():
            pure[n] = pure[n] + c if n in pure else c
        return AbsForm2(self.Kt, mixed, pure)

    __radd__ = __add__

    def __neg__(self):
        return AbsForm2(self.Kt, {n: -c for n, c in self.mixed.items()},
                        {p: -c for p, c in self.pure.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = self.Kt(f)
        return AbsForm2(self.Kt, {n: c * f for n, c in self.mixed.items()},
                        {p: c * f for p, c in self.pure.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.mixed and not self.pure

    def mixed_is_zero(self):
        return not self.mixed

    def __repr__(self):
        parts = [f"({c}) dt^d{n}" for n, c in self.mixed.items()]
        parts += [f"({c}) d{a}^d{b}" for (a, b), c in self.pure.items()]
        return " + ".join(parts) or "0"


def _pair_key(Kt, a, b, c):
    order = Kt.names
    if order.index(a) < order.index(b):
        return (a, b), c
    return (b, a), -c


def wedge1(x, y):
    """x ∧ y for AbsForm1 values."""
    Kt = x.Kt
    mixed = {}
    for n in set(x.base) | set(y.base):
        v = x.dt * y[n] - x[n] * y.dt
        if v:
            mixed[n] = v
    pure = {}
    for a, ca in x.base.items():
        for b, cb in y.base.items():
            if a == b:
                continue
            key, v = _pair_key(Kt, a, b, ca * cb)
            pure[key] = pure[key] + v if key in pure else v
    return AbsForm2(Kt, mixed, pure)


def d1(x):
    """Exterior derivative of an AbsForm1 (d = d_t + d_K)."""
    Kt = x.Kt
    names = Kt.names[:-1]
    mixed = {}
    for n in names:
        v = x[n].derivative(T) - x.dt.derivative(n)
        if v:
            mixed[n] = v
    pure = {}
    for a, ca in x.base.items():
        for b in names:
            if b == a:
                continue
            db = ca.derivative(b)
            if db:
                key, v = _pair_key(Kt, b, a, db)
                pure[key] = pure[key] + v if key in pure else v
    return AbsForm2(Kt, mixed, pure)


def exact_form(f):
    """df for f in K(t)."""
    Kt = f.field
    return AbsForm1(Kt, f.derivative(T), {n: f.derivative(n) for n in Kt.names[:-1]})


def residue_form2(xi, a):
    """Residue at t = a of the dt-part of a 2-form (see module docstring)."""
    K = base_field(xi.Kt)
    return OneFormK(K, {n: -laurent_coeff(c, a, -1) for n, c in xi.mixed.items()})


def residue_at_infinity(series, zero=0):
    """res_{u=∞} of (Σ_k c_k u^k) du given as {k: c_k}; c_k scalars or matrices."""
    if -1 not in series:
        return zero
    c = series[-1]
    if isinstance(c, list):
        return [[-x for x in row] for row in c]
    return -c
