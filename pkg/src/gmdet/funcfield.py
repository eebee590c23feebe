"""Exact arithmetic in K = Q(s_1, ..., s_k) and its Kähler differentials.

Polynomial arithmetic, gcds and factorization are delegated to FLINT
(python-flint, ``fmpq_mpoly``).  Everything above that (canonical
fractions, 1-forms, 2-forms, the dlog membership test) lives here.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import flint

from .errors import ZeroArgument

_NUMBERS = (int, Fraction)


def _fmpq(c):
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq(c)


def _to_fraction(c):
    return Fraction(int(c.p), int(c.q))


class FunctionField:
    """The field Q(names) with graded-lex monomial order on the names."""

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        self.names = names
        # FLINT refuses zero-variable contexts; Q itself gets a dummy
        # generator that never appears in any element.
        self._ctx_names = names if names else ("_",)
        self.ctx = flint.fmpq_mpoly_ctx.get(self._ctx_names, "deglex")
        self._one_poly = self.ctx.constant(1)
        self._zero_poly = self.ctx.constant(0)
        self.zero = FieldElem(self, self._zero_poly, self._one_poly, True)
        self.one = FieldElem(self, self._one_poly, self._one_poly, True)

    @staticmethod
    @lru_cache(maxsize=None)
    def get(names):
        return FunctionField(names)

    def __repr__(self):
        return f"FunctionField({', '.join(self.names) or 'Q'})"

    def __reduce__(self):
        return (FunctionField.get, (self.names,))

    def gen(self, name):
        return FieldElem(self, self.ctx.gen(self.names.index(name)), self._one_poly, True)

    def gens(self):
        return [self.gen(n) for n in self.names]

    def poly(self, p):
        """Wrap a polynomial of this field's context."""
        return FieldElem(self, p, self._one_poly, True)

    def __call__(self, value):
        if isinstance(value, FieldElem):
            if value.field is self:
                return value
            return self.embed(value)
        if isinstance(value, _NUMBERS):
            return FieldElem(self, self.ctx.constant(_fmpq(value)), self._one_poly, True)
        if isinstance(value, flint.fmpq_mpoly):
            return self.poly(value)
        raise TypeError(f"cannot convert {value!r} into {self}")

    def embed(self, f):
        """Map an element of a field on a subset of our names into this field."""
        missing = set(f.field.names) - set(self.names)
        if missing:
            used = [n for n, d in zip(f.field._ctx_names, f.num.degrees()) if d > 0] + \
                   [n for n, d in zip(f.field._ctx_names, f.den.degrees()) if d > 0]
            if missing & set(used):
                raise ValueError(f"{f} involves {sorted(missing)} outside {self}")
        num = _move(f.num, f.field, self)
        den = _move(f.den, f.field, self)
        return FieldElem(self, num, den)

    def restrict(self, f):
        """Map f into this (smaller) field; f must not involve other names."""
        return self.embed(f)


def _move(p, src, dst):
    if p.is_constant():
        return dst.ctx.constant(p.coefficient(0) if not p.is_zero() else 0)
    idx = [dst.names.index(n) if n in dst.names else None for n in src._ctx_names]
    out = {}
    for exps, c in zip(p.monoms(), p.coeffs()):
        e = [0] * len(dst._ctx_names)
        for k, v in enumerate(exps):
            if v:
                e[idx[k]] = v
        out[tuple(e)] = c
    return dst.ctx.from_dict(out)


class FieldElem:
    """An element num/den of K in canonical form.

    gcd(num, den) = 1 and the graded-lex leading coefficient of den is 1,
    so structural equality is mathematical equality.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, normalized=False):
        self.field = field
        if not normalized:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                num, den = field._zero_poly, field._one_poly
            else:
                if not den.is_constant():
                    g = num.gcd(den)
                    if not g.is_one():
                        num = num / g
                        den = den / g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den

    # -- coercion -------------------------------------------------------
    def _pair(self, other):
        """Bring both operands into one field (the larger one)."""
        if isinstance(other, FieldElem):
            if other.field is self.field:
                return self, other
            if set(other.field.names) <= set(self.field.names):
                return self, self.field.embed(other)
            if set(self.field.names) <= set(other.field.names):
                return other.field.embed(self), other
            raise ValueError(f"incompatible fields {self.field} and {other.field}")
        if isinstance(other, _NUMBERS):
            return self, self.field(other)
        return None, None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        if o.num.is_zero():
            return a
        if a.num.is_zero():
            return o
        if a.den.is_one() and o.den.is_one():
            return FieldElem(a.field, a.num + o.num, a.den, True)
        if a.den == o.den:
            return FieldElem(a.field, a.num + o.num, a.den)
        return FieldElem(a.field, a.num * o.den + o.num * a.den, a.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, -self.num, self.den, True)

    def __sub__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        return a + (-o)

    def __rsub__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        return o + (-a)

    def __mul__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        if a.num.is_zero() or o.num.is_zero():
            return a.field.zero
        if a.den.is_one() and o.den.is_one():
            return FieldElem(a.field, a.num * o.num, a.den, True)
        # cross-cancel first to keep the gcd small
        g1 = a.num.gcd(o.den)
        g2 = o.num.gcd(a.den)
        num = (a.num / g1) * (o.num / g2)
        den = (a.den / g2) * (o.den / g1)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return FieldElem(a.field, num, den, True)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(self.field, self.den, self.num)

    def __truediv__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        return a * o.inverse()

    def __rtruediv__(self, other):
        a, o = self._pair(other)
        if a is None:
            return NotImplemented
        return o * a.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElem(self.field, self.num ** n, self.den ** n, True)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        try:
            a, o = self._pair(other)
        except ValueError:
            return False
        if a is None:
            return False
        return a.num == o.num and a.den == o.den

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        if self.is_constant():
            return hash(self.to_fraction())
        return hash((self.field.names, str(self.num), str(self.den)))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self):
        return self.den.is_constant()

    def to_fraction(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return _to_fraction(self.num.coefficient(0)) / _to_fraction(self.den.coefficient(0))

    def variables(self):
        """Names the element actually depends on."""
        dn = self.num.degrees()
        dd = self.den.degrees()
        return tuple(n for n, a, b in zip(self.field._ctx_names, dn, dd) if a or b)

    # -- calculus -------------------------------------------------------
    def derivative(self, name):
        if name not in self.field.names:
            return self.field.zero
        if self.is_constant():
            return self.field.zero
        num = self.num.derivative(name) * self.den - self.num * self.den.derivative(name)
        if num.is_zero():
            return self.field.zero
        return FieldElem(self.field, num, self.den * self.den)

    def subs(self, values):
        """Substitute {name: FieldElem} simultaneously."""
        f = self.field
        args = [values[n] if n in values else f.gen(n) for n in f.names]
        return _eval_poly(self.num, args, f) / _eval_poly(self.den, args, f)

    # -- display --------------------------------------------------------
    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"FieldElem({render(self)})"


def _eval_poly(p, args, field):
    """Evaluate a polynomial at FieldElem arguments (Horner-free, per term)."""
    total = field.zero
    powers = [dict() for _ in args]
    for exps, c in zip(p.monoms(), p.coeffs()):
        term = field(_to_fraction(c))
        for k, e in enumerate(exps):
            if e:
                cache = powers[k]
                if e not in cache:
                    cache[e] = args[k] ** int(e)
                term = term * cache[e]
        total = total + term
    return total


# ---------------------------------------------------------------------------
# rendering

def _coef_str(c):
    c = _to_fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _monomial_str(names, exps):
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def render_poly(p, names):
    if p.is_zero():
        return "0"
    out = []
    for exps, c in zip(p.monoms(), p.coeffs()):
        mono = _monomial_str(names, exps)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{_coef_str(a)}*{mono}"
        else:
            body = _coef_str(a)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _is_atom(p):
    if len(p) != 1:
        return False
    exps, c = next(iter(zip(p.monoms(), p.coeffs())))
    return c == 1 and sum(1 for e in exps if e) == 1


def render(f):
    names = f.field._ctx_names
    num = render_poly(f.num, names)
    if f.den.is_one():
        return num
    den = render_poly(f.den, names)
    if len(f.num) > 1:
        num = f"({num})"
    if not _is_atom(f.den):
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# differential forms on K

class OneFormK:
    """Σ_j c_j ds_j with c_j ∈ K; zero coefficients are not stored."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=None):
        self.field = field
        clean = {}
        if coeffs:
            for name in field.names:
                c = coeffs.get(name)
                if c is not None:
                    c = field(c)
                    if c:
                        clean[name] = c
            extra = set(coeffs) - set(field.names)
            if extra:
                raise ValueError(f"unknown parameters {sorted(extra)}")
        self.coeffs = clean

    @staticmethod
    def zero(field):
        return OneFormK(field)

    def __getitem__(self, name):
        return self.coeffs.get(name, self.field.zero)

    def items(self):
        return self.coeffs.items()

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return OneFormK(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return OneFormK(self.field, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = self.field(c)
        if not c:
            return OneFormK(self.field)
        return OneFormK(self.field, {k: v * c for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * self.field(c).inverse()

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, OneFormK):
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __str__(self):
        return render_oneform(self)

    __repr__ = __str__


def render_oneform(w):
    if not w.coeffs:
        return "0"
    order = {n: k for k, n in enumerate(w.field.names)}
    terms = sorted(w.coeffs.items(), key=lambda nc: order[nc[0]])
    return " + ".join(f"({render(c)}) * d({n})" for n, c in terms)


class TwoFormK:
    """Σ c_{jk} ds_j ∧ ds_k over pairs j < k in declared order."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=None):
        self.field = field
        clean = {}
        for pair, c in (coeffs or {}).items():
            c = field(c)
            if c:
                clean[pair] = c
        self.coeffs = clean

    def __getitem__(self, pair):
        a, b = pair
        if a == b:
            return self.field.zero
        ia, ib = self.field.names.index(a), self.field.names.index(b)
        if ia < ib:
            return self.coeffs.get((a, b), self.field.zero)
        return -self.coeffs.get((b, a), self.field.zero)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return TwoFormK(self.field, out)

    def __neg__(self):
        return TwoFormK(self.field, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        return isinstance(other, TwoFormK) and self.coeffs == other.coeffs

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c}) * d({a})^d({b})" for (a, b), c in self.coeffs.items())


def _two_form_from_pairs(field, pairs):
    """Antisymmetrize a dict {(a, b): c} meaning Σ c ds_a ∧ ds_b."""
    order = {n: k for k, n in enumerate(field.names)}
    out = {}
    for (a, b), c in pairs.items():
        if a == b or not c:
            continue
        if order[a] > order[b]:
            a, b, c = b, a, -c
        out[(a, b)] = out[(a, b)] + c if (a, b) in out else c
    return TwoFormK(field, out)


def d_K(f):
    field = f.field
    return OneFormK(field, {n: f.derivative(n) for n in f.variables() if n in field.names})


def dlog(f):
    if not f:
        raise ZeroArgument("dlog of zero")
    return d_K(f) / f


def wedge(w1, w2):
    pairs = {}
    for a, c in w1.coeffs.items():
        for b, e in w2.coeffs.items():
            if a != b:
                pairs[(a, b)] = pairs.get((a, b), w1.field.zero) + c * e
    return _two_form_from_pairs(w1.field, pairs)


def d_oneform(w):
    pairs = {}
    for a, c in w.coeffs.items():
        for b in c.variables():
            pairs[(b, a)] = pairs.get((b, a), w.field.zero) + c.derivative(b)
    return _two_form_from_pairs(w.field, pairs)


# ---------------------------------------------------------------------------
# membership in dlog K^x

class DlogCertificate:
    """ω = Σ n_q dlog q; q irreducible, primitive, leading coefficient 1."""

    def __init__(self, field, factors):
        self.field = field
        self.factors = sorted(factors, key=lambda qn: render(qn[0]))

    def is_integral(self):
        return all(n.denominator == 1 for _, n in self.factors)

    def form(self):
        total = OneFormK(self.field)
        for q, n in self.factors:
            total = total + dlog(q) * n
        return total

    def __str__(self):
        if not self.factors:
            return "trivial"
        return ", ".join(f"({render(q)})^({n})" for q, n in self.factors)

    __repr__ = __str__


def irreducible_factors(p):
    """Monic-normalized irreducible factors of a polynomial, with exponents."""
    _, facs = p.factor()
    out = []
    for q, e in facs:
        lc = q.leading_coefficient()
        out.append((q / lc, e))
    return out


def dlog_class_reduce(w, allow_half=False):
    """Certificate that w is an integral (or half-integral) dlog combination.

    The candidate logarithms are the irreducible factors of the
    coefficient denominators; their exponents solve one linear system over
    Q obtained by clearing denominators and comparing monomials.
    """
    field = w.field
    if w.is_zero():
        return DlogCertificate(field, [])
    candidates = []
    keys = []
    for c in w.coeffs.values():
        if c.den.is_constant():
            continue
        for q, e in irreducible_factors(c.den):
            if e > 1:
                # a dlog combination has squarefree denominators
                return None
            key = str(q)
            if key not in keys:
                keys.append(key)
                candidates.append(q)
    if not candidates:
        return None
    L = field._one_poly
    for q in candidates:
        L = L * q
    cofactors = [L / q for q in candidates]
    rows = {}
    nq = len(candidates)

    def row(key):
        if key not in rows:
            rows[key] = [flint.fmpq(0)] * (nq + 1)
        return rows[key]

    for name in field.names:
        c = w[name]
        # right-hand side: c * L must be a polynomial
        if c:
            rhs, rem = divmod(c.num * L, c.den)
            if not rem.is_zero():
                return None
            for exps, coef in zip(rhs.monoms(), rhs.coeffs()):
                row((name, exps))[nq] += coef
        for k, q in enumerate(candidates):
            poly = q.derivative(name) * cofactors[k]
            for exps, coef in zip(poly.monoms(), poly.coeffs()):
                row((name, exps))[k] += coef
    mat = flint.fmpq_mat(len(rows), nq + 1, [x for r in rows.values() for x in r])
    rref, rank = mat.rref()
    solution = [flint.fmpq(0)] * nq
    for i in range(rank):
        pivot = next(j for j in range(nq + 1) if rref[i, j] != 0)
        if pivot == nq:
            return None  # inconsistent
        solution[pivot] = rref[i, nq]
    exps = [_to_fraction(s) for s in solution]
    for n in exps:
        if allow_half:
            if (2 * n).denominator != 1:
                return None
        elif n.denominator != 1:
            return None
    cert = DlogCertificate(field, [(field.poly(q), n) for q, n in zip(candidates, exps) if n])
    if cert.form() != w:
        return None
    return cert


def random_elem(field, rng, max_terms=3, max_deg=2, coeffs=range(-3, 4), allow_den=True):
    """Small random element, used by tests and generators."""
    def rpoly():
        p = field._zero_poly
        gens = [field.ctx.gen(k) for k in range(len(field.names))]
        for _ in range(rng.randint(1, max_terms)):
            term = field.ctx.constant(rng.choice(list(coeffs)))
            for g in gens:
                term = term * g ** rng.randint(0, max_deg)
            p = p + term
        return p
    num = rpoly()
    den = rpoly() if allow_den else field._one_poly
    while den.is_zero():
        den = rpoly()
    return FieldElem(field, num, den)


def pairs_in_order(field):
    return list(combinations(field.names, 2))
