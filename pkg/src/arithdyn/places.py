"""Places of the standard models of Q and Q(t), and heights on P^n.

The fixed polarizations are Spec Z for Q (transcendence degree e = 0) and
the projective t-line over Z carrying the tautological bundle with the
Fubini-Study metric for Q(t) (e = 1).  A height decomposes as

    h(x)  =  sum over finite places of  weight(place) * max_i(-ord(lambda_i))
           + archimedean term,

where the archimedean term is log max_i |lambda_i| evaluated at the single
complex point for e = 0, and the FS-measure integral of the same quantity
over the Riemann sphere for e = 1.

Place weights: a vertical place above the prime p weighs log p; a
horizontal place cut out by a primitive integer polynomial Q weighs
log|lead(Q)| + (1/2) sum_roots log(1 + |beta|^2), which is also the
FS-measure integral of log|Q|, so the product formula holds exactly; the
divisor at infinity weighs 0 but is tracked so valuation bookkeeping is
total.  Finite parts are assembled over a coprime basis (factor
refinement), never over irreducible factorizations: the max of negated
valuations is constant across the primes inside one basis element, and
every weight in sight is additive over products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .quadrature import (
    LogLinearCoord,
    LogLinearIntegrand,
    QuadConfig,
    QuadResult,
    integrate_loglinear,
    integrate_logmax,
    integrate_radial_affine,
)
from .ratfunc import (
    BigRat,
    CoprimeBasis,
    IntPoly,
    RatFunc,
    factor_refinement,
    poly_gcd,
    poly_lcm,
)
from .roots import complex_roots

__all__ = [
    "PolarizationSpec",
    "Place",
    "ProjPoint",
    "HeightBreakdown",
    "OrbitValueSummary",
    "ord_at",
    "horizontal_weight",
    "weil_height",
    "geometric_height",
    "moriwaki_height",
    "height_of_orbit_value",
    "geometric_height_of_orbit_value",
    "height_of_point",
]

_TRIAL_LIMIT = 1_000_000


@dataclass(frozen=True)
class PolarizationSpec:
    """Transcendence degree of the base field; the model itself is fixed."""

    e: int = 0

    def __post_init__(self):
        if self.e not in (0, 1):
            raise ValueError("only e = 0 (Q) and e = 1 (Q(t)) are supported")

    @property
    def field(self) -> str:
        return "q" if self.e == 0 else "qt"

    def describe(self) -> str:
        if self.e == 0:
            return "Spec Z"
        return "P^1_Z with O(1) carrying the Fubini-Study metric"


# --------------------------------------------------------------------------
# places
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Place:
    """A codimension-1 prime of the model, or the archimedean measure.

    kind 'vertical' carries a prime (or, for desk-scale leftovers of the
    coprime basis that resist trial division, a composite modulus flagged
    by is_prime=False; weights stay exact either way).
    """

    kind: str  # vertical | horizontal | infinity | archimedean
    prime: Optional[int] = None
    poly: Optional[IntPoly] = None
    weight: float = 0.0
    weight_error: float = 0.0
    is_prime: bool = True

    @staticmethod
    def vertical(p: int, is_prime: bool = True) -> "Place":
        return Place("vertical", prime=p, weight=math.log(p), is_prime=is_prime)

    @staticmethod
    def horizontal(q: IntPoly) -> "Place":
        w, err = _horizontal_weight_err(q.coeffs)
        return Place("horizontal", poly=q, weight=w, weight_error=err)

    @staticmethod
    def infinity() -> "Place":
        # closure of [1:0]; FS weight (1/2)log(1+0) = 0
        return Place("infinity", weight=0.0)

    @staticmethod
    def archimedean() -> "Place":
        # carries the FS probability measure (total mass 1)
        return Place("archimedean", weight=1.0)

    def label(self) -> str:
        if self.kind == "vertical":
            return f"p={self.prime}" if self.is_prime else f"m={self.prime} (composite)"
        if self.kind == "horizontal":
            return f"({self.poly})"
        return self.kind


@lru_cache(maxsize=4096)
def _horizontal_weight_err(coeffs: tuple):
    q = IntPoly(coeffs)
    pr = complex_roots(q)
    w = math.log(abs(q.lead))
    for c in pr.clusters:
        w += 0.5 * c.multiplicity * math.log(1.0 + abs(c.value) ** 2)
    return w, 0.5 * pr.total_error + 1e-15 * (abs(w) + 1.0)


def horizontal_weight(q: IntPoly) -> float:
    """Arakelov weight of the horizontal divisor cut out by primitive q.

    Equals the FS-measure integral of log|q(z)|; additive over products.
    """
    if not isinstance(q, IntPoly) or q.degree < 1:
        raise ValueError("horizontal places need a nonconstant polynomial")
    if not q.is_primitive():
        raise ValueError("horizontal places need a primitive polynomial")
    return _horizontal_weight_err(q.coeffs)[0]


def ord_at(v: Union[RatFunc, Fraction, int], place: Place) -> int:
    """Valuation of a nonzero field element at a finite place of the model."""
    if place.kind == "archimedean":
        raise ValueError("archimedean place has no discrete valuation")
    if isinstance(v, (int, Fraction)):
        v = Fraction(v)
        if v == 0:
            raise ValueError("valuation of zero")
        if place.kind == "vertical":
            return _padic(v.numerator, place.prime) - _padic(v.denominator, place.prime)
        if place.kind == "infinity":
            return 0
        raise ValueError("rational numbers have no horizontal valuations")
    if not isinstance(v, RatFunc):
        raise TypeError("expected RatFunc, Fraction, or int")
    if v.is_zero():
        raise ValueError("valuation of zero")
    if place.kind == "vertical":
        s = v.scale
        return _padic(s.numerator, place.prime) - _padic(s.denominator, place.prime)
    if place.kind == "horizontal":
        q = place.poly
        return v.num.multiplicity_of(q) - v.den.multiplicity_of(q)
    if place.kind == "infinity":
        return v.den.degree - v.num.degree
    raise ValueError(f"unknown place kind {place.kind}")


def _padic(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("valuation of zero")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _split_small_factors(m: int):
    """(prime, exponent) pairs plus a composite leftover (1 if none)."""
    out = []
    d = 2
    while d * d <= m and d <= _TRIAL_LIMIT:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        if m <= _TRIAL_LIMIT * _TRIAL_LIMIT:
            out.append((m, 1))
            m = 1
    return out, m


# --------------------------------------------------------------------------
# projective points
# --------------------------------------------------------------------------


def _canonical_q(coords):
    fracs = [Fraction(c) for c in coords]
    if all(c == 0 for c in fracs):
        raise ValueError("all coordinates are zero")
    lcm_den = 1
    for c in fracs:
        lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
    ints = [int(c * lcm_den) for c in fracs]
    g = 0
    for c in ints:
        g = math.gcd(g, abs(c))
    ints = [c // g for c in ints]
    first = next(c for c in ints if c != 0)
    if first < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def _canonical_qt(coords):
    rfs = []
    for c in coords:
        if isinstance(c, RatFunc):
            rfs.append(c)
        elif isinstance(c, IntPoly):
            rfs.append(RatFunc.from_intpoly(c))
        else:
            rfs.append(RatFunc.from_rational(c))
    if all(c.is_zero() for c in rfs):
        raise ValueError("all coordinates are zero")
    den_lcm = IntPoly.ONE
    scale_den_lcm = 1
    for c in rfs:
        if c.is_zero():
            continue
        den_lcm = poly_lcm(den_lcm, c.den)
        d = c.scale.denominator
        scale_den_lcm = scale_den_lcm * d // math.gcd(scale_den_lcm, d)
    polys = []
    for c in rfs:
        if c.is_zero():
            polys.append(IntPoly.ZERO)
            continue
        cof = den_lcm.exact_div(c.den)
        coeff = c.scale * scale_den_lcm  # integer by construction of the lcm
        polys.append(c.num * cof * coeff.numerator)
    g_int = 0
    for p in polys:
        g_int = math.gcd(g_int, p.content())
    g_poly = IntPoly.ZERO
    for p in polys:
        if p:
            g_poly = poly_gcd(g_poly, p) if g_poly else p.primitive_split()[1]
    out = []
    for p in polys:
        if not p:
            out.append(p)
            continue
        q = p.exact_div(g_poly) if g_poly.degree >= 1 else p
        out.append(IntPoly(c // g_int for c in q.coeffs))
    first = next(p for p in out if p)
    if first.lead < 0:
        out = [-p for p in out]
    return tuple(out)


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^n in canonical coprime coordinates.

    Over Q the coordinates are coprime integers; over Q(t) they are integer
    polynomials with unit content-gcd and unit polynomial gcd.  The first
    nonzero coordinate is sign-normalized positive, so representations are
    unique and equality is structural.
    """

    field: str  # q | qt
    coords: tuple

    @staticmethod
    def over_q(coords: Sequence) -> "ProjPoint":
        return ProjPoint("q", _canonical_q(coords))

    @staticmethod
    def over_qt(coords: Sequence) -> "ProjPoint":
        return ProjPoint("qt", _canonical_qt(coords))

    @staticmethod
    def make(field: str, coords: Sequence) -> "ProjPoint":
        return ProjPoint.over_q(coords) if field == "q" else ProjPoint.over_qt(coords)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def values(self):
        """Coordinates as field elements (Fraction or RatFunc)."""
        if self.field == "q":
            return tuple(Fraction(c) for c in self.coords)
        return tuple(RatFunc.from_intpoly(p) for p in self.coords)

    def is_torus_point(self) -> bool:
        if self.field == "q":
            return all(c != 0 for c in self.coords)
        return all(bool(p) for p in self.coords)

    def is_constant(self) -> bool:
        """Over Q(t): all coordinates degree <= 0."""
        if self.field == "q":
            return True
        return all(p.degree <= 0 for p in self.coords)

    def __str__(self):
        return "[" + " : ".join(str(c) for c in self.coords) + "]"


# --------------------------------------------------------------------------
# height breakdowns
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightBreakdown:
    """Per-place decomposition of a height value.

    finite_contributions holds (place, max_i(-ord), contribution) with the
    infinity divisor tracked at weight 0; total is the finite sum plus the
    archimedean term.
    """

    finite_contributions: tuple
    archimedean: float
    arch_error_bound: float
    total: float
    method: str = "exact"
    converged: bool = True

    @property
    def finite_total(self) -> float:
        return sum(c for _, _, c in self.finite_contributions)


def _coerce_coords(field: str, coords):
    if isinstance(coords, ProjPoint):
        return coords.values()
    out = []
    for c in coords:
        if field == "q":
            out.append(Fraction(c) if not isinstance(c, Fraction) else c)
        else:
            if isinstance(c, RatFunc):
                out.append(c)
            elif isinstance(c, IntPoly):
                out.append(RatFunc.from_intpoly(c))
            else:
                out.append(RatFunc.from_rational(c))
    return tuple(out)


def _mult_int(v: int, g: int) -> int:
    v = abs(v)
    e = 0
    while v > 1 and v % g == 0:
        v //= g
        e += 1
    return e


def _vertical_entries(scales):
    """Vertical-place contributions from the rational contents.

    Each coprime-basis element g contributes max_i(-ord_g) uniformly across
    the primes inside it; splitting g into primes (trial division, with a
    composite leftover kept honest) only relabels the same exact total.
    """
    ints = set()
    for s in scales:
        for part in (abs(s.numerator), s.denominator):
            if part > 1:
                ints.add(part)
    entries = []
    if not ints:
        return entries
    basis = factor_refinement(sorted(ints))
    for g in basis.elements:
        ords = [_mult_int(s.numerator, g) - _mult_int(s.denominator, g) for s in scales]
        m = max(-o for o in ords)
        primes, leftover = _split_small_factors(g)
        for p, e in primes:
            entries.append((Place.vertical(p), m * e, m * e * math.log(p)))
        if leftover > 1:
            entries.append((Place.vertical(leftover, is_prime=False), m, m * math.log(leftover)))
    return entries


def _finite_entries_qt(coords):
    """Finite-place contributions for Q(t) coordinates (RatFunc list)."""
    nz = [c for c in coords if not c.is_zero()]
    entries = list(_vertical_entries([c.scale for c in nz]))
    polys = set()
    for c in nz:
        for p in (c.num, c.den):
            if p.degree >= 1:
                polys.add(p)
    if polys:
        basis = factor_refinement(sorted(polys, key=lambda p: (p.degree, p.coeffs)))
        for k, g in enumerate(basis.elements):
            ords = [c.num.multiplicity_of(g) - c.den.multiplicity_of(g) for c in nz]
            m = max(-o for o in ords)
            place = Place.horizontal(g)
            entries.append((place, m, m * place.weight))
    inf = Place.infinity()
    m_inf = max(c.num.degree - c.den.degree for c in nz)  # -ord_infinity
    entries.append((inf, m_inf, 0.0))
    return entries


# --------------------------------------------------------------------------
# heights
# --------------------------------------------------------------------------


def weil_height(point_or_coords) -> HeightBreakdown:
    """Classical Weil height on P^n(Q), as the e = 0 model pipeline.

    The archimedean term is a point evaluation: log max_i |lambda_i|.  In
    canonical coprime-integer coordinates every finite contribution is 0.
    """
    coords = _coerce_coords("q", point_or_coords)
    nz = [c for c in coords if c != 0]
    if not nz:
        raise ValueError("all coordinates are zero")
    entries = tuple(_vertical_entries([c for c in nz]))
    arch = float(_log_abs_max_fraction(nz))
    total = sum(c for _, _, c in entries) + arch
    return HeightBreakdown(entries, arch, 0.0, total)


def _log_abs_max_fraction(fracs):
    best = None
    for f in fracs:
        v = math.log(abs(f.numerator)) - math.log(f.denominator)
        best = v if best is None else max(best, v)
    return best


def geometric_height(point_or_coords) -> int:
    """Function-field height over Q(t): places are the monic irreducibles
    (weight deg) and the infinite place (weight 1); constants are invisible.

    Exact integer output; for canonical polynomial coordinates this is the
    maximal coordinate degree.
    """
    coords = _coerce_coords("qt", point_or_coords)
    nz = [c for c in coords if not c.is_zero()]
    if not nz:
        raise ValueError("all coordinates are zero")
    total = 0
    polys = set()
    for c in nz:
        for p in (c.num, c.den):
            if p.degree >= 1:
                polys.add(p)
    if polys:
        basis = factor_refinement(sorted(polys, key=lambda p: (p.degree, p.coeffs)))
        for g in basis.elements:
            ords = [c.num.multiplicity_of(g) - c.den.multiplicity_of(g) for c in nz]
            total += g.degree * max(-o for o in ords)
    total += max(c.num.degree - c.den.degree for c in nz)  # infinite place, weight 1
    return total


def moriwaki_height(
    point_or_coords,
    cfg: Optional[QuadConfig] = None,
    force_adaptive: bool = False,
) -> HeightBreakdown:
    """Height over Q(t) for the standard FS-polarized model.

    Works on any projective representative: the finite part sums place
    weights against max_i(-ord) over a coprime basis, and the archimedean
    part integrates log max_i |lambda_i(z)| against the FS measure.  The
    product formula makes the value representation-independent up to twice
    the quadrature tolerance.
    """
    cfg = cfg or QuadConfig()
    coords = _coerce_coords("qt", point_or_coords)
    nz = [c for c in coords if not c.is_zero()]
    if not nz:
        raise ValueError("all coordinates are zero")
    entries = tuple(_finite_entries_qt(nz))
    quad = integrate_logmax(nz, cfg, force_adaptive=force_adaptive)
    finite = sum(c for _, _, c in entries)
    weight_err = sum(p.weight_error * abs(m) for p, m, _ in entries)
    return HeightBreakdown(
        entries,
        quad.value,
        quad.error_bound + weight_err,
        finite + quad.value,
        method=quad.method,
        converged=quad.converged,
    )


def height_of_point(
    point: ProjPoint,
    kind: str,
    cfg: Optional[QuadConfig] = None,
) -> float:
    """Dispatch on height kind: weil (Q), geom or moriwaki (Q(t))."""
    if kind == "weil":
        if point.field != "q":
            raise ValueError("weil height lives on P^n(Q)")
        return weil_height(point).total
    if kind == "geom":
        if point.field != "qt":
            raise ValueError("geometric height lives on P^n(Q(t))")
        return float(geometric_height(point))
    if kind == "moriwaki":
        if point.field == "q":
            return weil_height(point).total
        return moriwaki_height(point, cfg).total
    raise ValueError(f"unknown height kind {kind!r}")


# --------------------------------------------------------------------------
# monomial-orbit value summaries
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitValueSummary:
    """Valuation summary of a point whose coordinates are products of a
    fixed coprime basis: ints, nonconstant primitive polynomials, and t.

    coord_exps[i] is ((basis_key, exponent), ...) for homogeneous
    coordinate i, where basis_key indexes ints first, then polys, with -1
    reserved for the power of t.  Exponents are exact integers, so heights
    of points like [t**(2**n) : 2**(3**n) : 1] never materialize numbers.
    """

    basis_ints: tuple
    basis_polys: tuple
    coord_exps: tuple

    def __post_init__(self):
        n_keys = len(self.basis_ints) + len(self.basis_polys)
        for row in self.coord_exps:
            for k, e in row:
                if not (-1 <= k < n_keys):
                    raise ValueError("malformed summary: bad basis key")
        if not self.coord_exps:
            raise ValueError("malformed summary: no coordinates")

    def exponent(self, i: int, key: int) -> int:
        for k, e in self.coord_exps[i]:
            if k == key:
                return e
        return 0

    def log_magnitude(self, i: int) -> float:
        """log of the rational-content magnitude of coordinate i."""
        total = 0.0
        for k, e in self.coord_exps[i]:
            if 0 <= k < len(self.basis_ints):
                total += e * math.log(self.basis_ints[k])
        return total

    def t_exponent(self, i: int) -> int:
        return self.exponent(i, -1)

    def poly_terms(self, i: int):
        off = len(self.basis_ints)
        return [
            (k - off, e) for k, e in self.coord_exps[i] if k >= off
        ]

    def render(self) -> str:
        parts = []
        for i in range(len(self.coord_exps)):
            factors = []
            for k, e in self.coord_exps[i]:
                if e == 0:
                    continue
                if k == -1:
                    base = "t"
                elif k < len(self.basis_ints):
                    base = str(self.basis_ints[k])
                else:
                    base = f"({self.basis_polys[k - len(self.basis_ints)]})"
                factors.append(base if e == 1 else f"{base}^{e}")
            parts.append("*".join(factors) if factors else "1")
        return "[" + " : ".join(parts) + "]"


def height_of_orbit_value(
    summary: OrbitValueSummary, cfg: Optional[QuadConfig] = None
) -> HeightBreakdown:
    """Moriwaki height from a valuation summary, no coordinate blowup.

    The finite part is exact from the exponents; the archimedean part uses
    the radial closed form when the only nonconstant basis element is t,
    and the adaptive FS integral otherwise.
    """
    cfg = cfg or QuadConfig()
    n_ints = len(summary.basis_ints)
    entries = []
    for k, g in enumerate(summary.basis_ints):
        m = max(-summary.exponent(i, k) for i in range(len(summary.coord_exps)))
        primes, leftover = _split_small_factors(g)
        for p, e in primes:
            entries.append((Place.vertical(p), m * e, m * e * math.log(p)))
        if leftover > 1:
            entries.append((Place.vertical(leftover, is_prime=False), m, m * math.log(leftover)))
    t_used = any(summary.t_exponent(i) for i in range(len(summary.coord_exps)))
    if t_used:
        place_t = Place.horizontal(IntPoly.T)
        m = max(-summary.t_exponent(i) for i in range(len(summary.coord_exps)))
        entries.append((place_t, m, m * place_t.weight))
    for j, g in enumerate(summary.basis_polys):
        key = n_ints + j
        m = max(-summary.exponent(i, key) for i in range(len(summary.coord_exps)))
        place = Place.horizontal(g)
        entries.append((place, m, m * place.weight))
    # infinity divisor: -ord = deg of the coordinate
    degs = [
        summary.t_exponent(i) + sum(e * summary.basis_polys[j].degree for j, e in summary.poly_terms(i))
        for i in range(len(summary.coord_exps))
    ]
    entries.append((Place.infinity(), max(degs), 0.0))

    coords = []
    for i in range(len(summary.coord_exps)):
        coords.append(
            LogLinearCoord(
                summary.log_magnitude(i),
                float(summary.t_exponent(i)),
                tuple((j, float(e)) for j, e in summary.poly_terms(i)),
            )
        )
    from .quadrature import _prepare_basis_poly  # deferred: heavy root solve

    integrand = LogLinearIntegrand(
        [_prepare_basis_poly(p) for p in summary.basis_polys], coords
    )
    quad = integrate_loglinear(integrand, cfg)
    finite = sum(c for _, _, c in entries)
    weight_err = sum(p.weight_error * abs(m) for p, m, _ in entries)
    return HeightBreakdown(
        tuple(entries),
        quad.value,
        quad.error_bound + weight_err,
        finite + quad.value,
        method=quad.method,
        converged=quad.converged,
    )


def geometric_height_of_orbit_value(summary: OrbitValueSummary) -> int:
    """Geometric height from a valuation summary; exact integer."""
    n = len(summary.coord_exps)
    total = 0
    if any(summary.t_exponent(i) for i in range(n)):
        total += 1 * max(-summary.t_exponent(i) for i in range(n))
    for j, g in enumerate(summary.basis_polys):
        key = len(summary.basis_ints) + j
        total += g.degree * max(-summary.exponent(i, key) for i in range(n))
    degs = [
        summary.t_exponent(i)
        + sum(e * summary.basis_polys[j].degree for j, e in summary.poly_terms(i))
        for i in range(n)
    ]
    total += max(degs)
    return total
