"""Exact arithmetic for Q and Q(t).

Scalars are arbitrary-precision rationals (stdlib ``Fraction``, aliased
``BigRat``).  Elements of Q(t) are kept in a unique canonical shape

    f  =  scale * num / den

with ``scale`` a rational, ``num`` and ``den`` primitive integer
polynomials (content 1, positive leading coefficient) and
gcd(num, den) = 1.  Splitting the rational content from the polynomial
part this way lets p-adic valuations read off ``scale`` and polynomial
valuations read off ``num``/``den`` directly.

The module also provides factor refinement: a pairwise-coprime basis for
a list of integers or primitive polynomials, with an exact exponent
matrix, so that valuation sums can be computed without factoring into
irreducibles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "BigRat",
    "IntPoly",
    "RatFunc",
    "CoprimeBasis",
    "ratfunc_normalize",
    "factor_refinement",
    "eval_complex",
]

# Scalar coefficients over Q. Stdlib Fraction already enforces the
# canonical invariants (reduced, positive denominator).
BigRat = Fraction

POLE_THRESHOLD = 1e-300


class ZeroDenominatorError(ZeroDivisionError):
    pass


# --------------------------------------------------------------------------
# integer polynomials in t
# --------------------------------------------------------------------------


def _trim(coeffs):
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


@dataclass(frozen=True)
class IntPoly:
    """Dense integer polynomial in t, coefficients low degree first.

    The zero polynomial is the empty tuple.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", tuple(_trim(int(c) for c in coeffs)))

    # -- basic structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def lead(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.coeffs[0] if self.coeffs else 0

    def content(self) -> int:
        """gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, abs(c))
        return g

    def primitive_split(self):
        """Return (c, prim) with self = c * prim, prim primitive positive-lead."""
        if not self:
            return 0, IntPoly()
        g = self.content()
        if self.lead < 0:
            g = -g
        return g, IntPoly(c // g for c in self.coeffs)

    def is_primitive(self) -> bool:
        return bool(self) and self.content() == 1 and self.lead > 0

    # -- ring operations ----------------------------------------------------

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPoly(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(other * c for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly()
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of IntPoly")
        result = IntPoly((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int):
        """Multiply by t**k."""
        if not self:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def derivative(self):
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i >= 1)

    def reversed_coeffs(self):
        """rev(P)(t) = t**deg(P) * P(1/t)."""
        return IntPoly(reversed(self.coeffs))

    def subst_neg_t(self):
        """P(-t)."""
        return IntPoly(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))

    # -- evaluation ----------------------------------------------------------

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- division and gcd ----------------------------------------------------

    def trailing_zeros(self) -> int:
        """Multiplicity of the root t = 0."""
        if not self:
            raise ValueError("zero polynomial")
        k = 0
        while self.coeffs[k] == 0:
            k += 1
        return k

    def exact_div(self, other: "IntPoly"):
        """Exact quotient in Q[t] if it is an integer polynomial, else None."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return IntPoly()
        q, r = _qdivmod([Fraction(c) for c in self.coeffs], [Fraction(c) for c in other.coeffs])
        if any(r):
            return None
        if any(c.denominator != 1 for c in q):
            return None
        return IntPoly(int(c) for c in q)

    def multiplicity_of(self, q: "IntPoly") -> int:
        """Largest k with q**k dividing self (q nonconstant)."""
        if not self:
            raise ValueError("zero polynomial")
        if q.degree < 1:
            raise ValueError("multiplicity_of expects a nonconstant polynomial")
        if q.coeffs == (0, 1):
            return self.trailing_zeros()
        count = 0
        cur = self
        while True:
            nxt = cur.exact_div(q)
            if nxt is None:
                return count
            count += 1
            cur = nxt

    def __str__(self):
        if not self:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


IntPoly.ZERO = IntPoly()
IntPoly.ONE = IntPoly((1,))
IntPoly.T = IntPoly((0, 1))


def _qdivmod(a, b):
    """Division with remainder for Fraction coefficient lists."""
    a = list(a)
    db = len(_trim(b)) - 1
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - db, 0)
    while True:
        a = _trim(a)
        da = len(a) - 1
        if da < db:
            break
        c = a[-1] / b[-1]
        q[da - db] = c
        for i in range(db + 1):
            a[da - db + i] -= c * b[i]
        a[-1] = Fraction(0)
    return q, a


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd in Z[t] (positive leading coefficient)."""
    if not a and not b:
        return IntPoly()
    if not a:
        return b.primitive_split()[1] if b.degree >= 1 else IntPoly((math.gcd(0, abs(b.lead)),))
    if not b:
        return poly_gcd(b, a)
    if a.is_constant() or b.is_constant():
        # gcd over Q[t] of a constant with anything is a unit; return the
        # integer gcd so content bookkeeping stays available to callers.
        ga = a.content()
        gb = b.content()
        return IntPoly((math.gcd(ga, gb),))
    fa = [Fraction(c) for c in a.coeffs]
    fb = [Fraction(c) for c in b.coeffs]
    while any(fb):
        _, r = _qdivmod(fa, fb)
        fa, fb = fb, _trim(r)
    # clear to a primitive integer polynomial
    lcm_den = 1
    for c in fa:
        lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
    ints = IntPoly(int(c * lcm_den) for c in fa)
    return ints.primitive_split()[1]


def poly_lcm(a: IntPoly, b: IntPoly) -> IntPoly:
    if not a or not b:
        return IntPoly()
    g = poly_gcd(a, b)
    q = (a * b).exact_div(g)
    return q.primitive_split()[1]


def squarefree_decomposition(p: IntPoly):
    """Yun decomposition: list of (primitive factor, multiplicity).

    The product of factor**multiplicity recovers p up to a rational unit.
    """
    if not p:
        raise ValueError("zero polynomial")
    _, p = p.primitive_split()
    if p.degree < 1:
        return []
    out = []
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return [(p, 1)]
    w = p.exact_div(g)
    w = w.primitive_split()[1]
    mult = 1
    while w.degree >= 1:
        y = poly_gcd(w, g)
        factor = w.exact_div(y)
        if factor is not None:
            factor = factor.primitive_split()[1]
            if factor.degree >= 1:
                out.append((factor, mult))
        gq = g.exact_div(y)
        g = gq.primitive_split()[1] if gq is not None else IntPoly.ONE
        w = y
        mult += 1
    return out


# --------------------------------------------------------------------------
# rational functions in t
# --------------------------------------------------------------------------


PolyLike = Union[IntPoly, Sequence]


def _to_fraction_list(p: PolyLike):
    if isinstance(p, IntPoly):
        return [Fraction(c) for c in p.coeffs]
    return [Fraction(c) for c in p]


def _clear_to_intpoly(fracs):
    """Fraction list -> (alpha, primitive IntPoly) with poly = alpha * prim."""
    fracs = _trim(fracs)
    if not fracs:
        return Fraction(0), IntPoly()
    lcm_den = 1
    for c in fracs:
        lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
    ints = IntPoly(int(c * lcm_den) for c in fracs)
    c0, prim = ints.primitive_split()
    return Fraction(c0, lcm_den), prim


@dataclass(frozen=True)
class RatFunc:
    """Canonical element of Q(t): scale * num / den.

    num and den are coprime primitive integer polynomials with positive
    leading coefficients; zero is scale 0 with num = den = 1.  Canonical
    form is unique per field element, so equality and hashing are
    structural.
    """

    scale: Fraction
    num: IntPoly
    den: IntPoly

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(Fraction(0), IntPoly.ONE, IntPoly.ONE)

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc(Fraction(1), IntPoly.ONE, IntPoly.ONE)

    @staticmethod
    def t() -> "RatFunc":
        return RatFunc(Fraction(1), IntPoly.T, IntPoly.ONE)

    @staticmethod
    def from_rational(q) -> "RatFunc":
        q = Fraction(q)
        return RatFunc(q, IntPoly.ONE, IntPoly.ONE) if q else RatFunc.zero()

    @staticmethod
    def from_intpoly(p: IntPoly) -> "RatFunc":
        return ratfunc_normalize(p, IntPoly.ONE)

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.scale == 0

    def __bool__(self) -> bool:
        return self.scale != 0

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree <= 0

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.scale * Fraction(self.num.constant_value() or 1, self.den.constant_value() or 1)

    def t_monomial(self):
        """(exponent, coefficient) if self = coeff * t**e, else None."""
        if self.is_zero():
            return None
        for p in (self.num, self.den):
            if any(c != 0 for c in p.coeffs[:-1]) or p.lead != 1:
                return None
        return self.num.degree - self.den.degree, self.scale

    @property
    def degree(self) -> int:
        """deg num - deg den (order of growth at infinity); zero raises."""
        if self.is_zero():
            raise ValueError("degree of zero")
        return self.num.degree - self.den.degree

    # -- field operations ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        left = [self.scale * c for c in (self.num * other.den).coeffs]
        right = [other.scale * c for c in (other.num * self.den).coeffs]
        n = max(len(left), len(right))
        num = [
            (left[i] if i < len(left) else Fraction(0))
            + (right[i] if i < len(right) else Fraction(0))
            for i in range(n)
        ]
        return ratfunc_normalize(num, self.den * other.den)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        if self.is_zero():
            return self
        return RatFunc(-self.scale, self.num, self.den)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFunc.zero()
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        num = (self.num.exact_div(g1) or self.num) * (other.num.exact_div(g2) or other.num)
        den = (self.den.exact_div(g2) or self.den) * (other.den.exact_div(g1) or other.den)
        scale = self.scale * other.scale
        # residual integer content from the partial cancellation
        cn, num = num.primitive_split()
        cd, den = den.primitive_split()
        return RatFunc(scale * Fraction(cn, cd), num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(1 / self.scale, self.den, self.num)

    def __truediv__(self, other):
        other = _coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k == 0:
            return RatFunc.one()
        base = self if k > 0 else self.inverse()
        k = abs(k)
        out = RatFunc.one()
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- substitutions -------------------------------------------------------

    def subst_neg_t(self) -> "RatFunc":
        """f(-t), in canonical form."""
        if self.is_zero():
            return self
        num = self.num.subst_neg_t()
        den = self.den.subst_neg_t()
        cn, num = num.primitive_split()
        cd, den = den.primitive_split()
        return RatFunc(self.scale * Fraction(cn, cd), num, den)

    def subst_inv_t(self) -> "RatFunc":
        """f(1/t), in canonical form."""
        if self.is_zero():
            return self
        a, b = self.num.degree, self.den.degree
        num = self.num.reversed_coeffs()
        den = self.den.reversed_coeffs()
        if b >= a:
            num = num.shift(b - a)
        else:
            den = den.shift(a - b)
        cn, num = num.primitive_split()
        cd, den = den.primitive_split()
        return RatFunc(self.scale * Fraction(cn, cd), num, den)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        if self.scale != 1 or (self.num.degree <= 0 and self.den.degree <= 0):
            parts.append(str(self.scale))
        if self.num.degree > 0:
            parts.append(f"({self.num})")
        body = "*".join(parts) if parts else "1"
        if self.den.degree > 0:
            body += f"/({self.den})"
        return body


def _coerce(v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, (int, Fraction)):
        return RatFunc.from_rational(v)
    if isinstance(v, IntPoly):
        return RatFunc.from_intpoly(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to RatFunc")


def ratfunc_normalize(num: PolyLike, den: PolyLike) -> RatFunc:
    """Canonical RatFunc from a fraction of polynomials over Q.

    Raises ZeroDenominatorError when den = 0.  Equal field elements always
    produce identical representations.
    """
    fnum = _to_fraction_list(num)
    fden = _to_fraction_list(den)
    if not _trim(fden):
        raise ZeroDenominatorError("zero denominator")
    if not _trim(fnum):
        return RatFunc.zero()
    alpha, n = _clear_to_intpoly(fnum)
    beta, d = _clear_to_intpoly(fden)
    g = poly_gcd(n, d)
    if g.degree >= 1:
        n = n.exact_div(g)
        d = d.exact_div(g)
    return RatFunc(alpha / beta, n, d)


def eval_complex(f: RatFunc, z: complex):
    """Evaluate f at a complex point.

    Returns (value, is_pole); a pole is flagged when |den(z)| falls below
    the configured threshold and the value is then meaningless.
    """
    if f.is_zero():
        return 0j, False
    dz = f.den.eval_complex(z)
    if abs(dz) < POLE_THRESHOLD:
        return complex(math.inf, 0), True
    nz = f.num.eval_complex(z)
    return complex(f.scale) * nz / dz, False


# --------------------------------------------------------------------------
# factor refinement
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoprimeBasis:
    """Pairwise-coprime basis with exact exponent matrix.

    values[i] = units[i] * prod_k elements[k] ** exponents[i][k], exactly.
    Elements are integers > 1 or primitive polynomials of degree >= 1.
    """

    elements: tuple
    exponents: tuple
    units: tuple

    def reconstruct(self, i: int):
        acc = self.units[i]
        for g, e in zip(self.elements, self.exponents[i]):
            if e:
                acc = acc * g**e
        return acc


def _iroot(v: int, k: int) -> int:
    """Floor of the k-th root of v >= 1."""
    if v < 2 or k == 1:
        return v
    r = 1 << -((-v.bit_length()) // k)  # start at or above the root
    while True:
        nr = ((k - 1) * r + v // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > v:
        r -= 1
    while (r + 1) ** k <= v:
        r += 1
    return r


def _perfect_power_base(v: int) -> int:
    """Smallest base b with v = b**k for some k >= 1."""
    for k in range(v.bit_length(), 1, -1):
        r = _iroot(v, k)
        if r >= 2 and r**k == v:
            return _perfect_power_base(r)
    return v


def _int_ops():
    return {
        "unit": lambda v: abs(v) == 1,
        "normalize": abs,
        "gcd": math.gcd,
        "div": lambda a, b: a // b,
        "divides": lambda a, b: b % a == 0,
    }


def _poly_ops():
    return {
        "unit": lambda p: p.degree < 1,
        "normalize": lambda p: p.primitive_split()[1],
        "gcd": poly_gcd,
        "div": lambda a, b: a.exact_div(b),
        "divides": lambda a, b: b.exact_div(a) is not None,
    }


def factor_refinement(values: Sequence) -> CoprimeBasis:
    """Coprime basis of a list of nonzero integers or primitive IntPoly.

    No irreducible factorization is attempted: the basis comes from
    pairwise gcd splitting, plus perfect-power extraction for integers, and
    every input factors exactly over it.
    """
    values = list(values)
    if not values:
        return CoprimeBasis((), (), ())
    if all(isinstance(v, int) for v in values):
        ops = _int_ops()
        if any(v == 0 for v in values):
            raise ValueError("zero input to factor_refinement")
        norm = [abs(v) for v in values]
        units = tuple(1 if v > 0 else -1 for v in values)
        integer_mode = True
    elif all(isinstance(v, IntPoly) for v in values):
        ops = _poly_ops()
        if any(not v for v in values):
            raise ValueError("zero input to factor_refinement")
        if any(v.degree >= 1 and not v.is_primitive() for v in values):
            raise ValueError("polynomial inputs must be primitive")
        norm = list(values)
        units = tuple(1 for _ in values)
        integer_mode = False
    else:
        raise TypeError("factor_refinement expects all ints or all IntPoly")

    basis = []
    work = [ops["normalize"](v) for v in norm if not ops["unit"](v)]
    while work:
        w = work.pop()
        if ops["unit"](w):
            continue
        placed = True
        for i, b in enumerate(basis):
            g = ops["gcd"](w, b)
            if ops["unit"](g):
                continue
            del basis[i]
            for piece in (g, ops["div"](b, g), ops["div"](w, g)):
                if not ops["unit"](piece):
                    work.append(piece)
            placed = False
            break
        if placed:
            basis.append(w)

    if integer_mode:
        basis = sorted({_perfect_power_base(b) for b in basis})
    else:
        basis = sorted(set(basis), key=lambda p: (p.degree, p.coeffs))

    exps = []
    for v in norm:
        row = []
        for g in basis:
            e = 0
            cur = v
            while not ops["unit"](cur) and ops["divides"](g, cur):
                cur = ops["div"](cur, g)
                e += 1
            row.append(e)
        exps.append(tuple(row))
    return CoprimeBasis(tuple(basis), tuple(exps), units)
