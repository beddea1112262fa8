"""Dominant rational self-maps of P^n over Q or Q(t).

Maps are stored as reduced homogeneous coordinate tuples (sparse exact
polynomials); monomial maps additionally carry their torus exponent
matrix and coefficient vector, which gives exact degree sequences, exact
dynamical degrees (products of the largest eigenvalue moduli), and an
orbit fast path that tracks valuation data instead of coordinates, so
points like [t**(2**n) : 2**(3**n) : 1] iterate without any big-number
blowup.

Degree sequences of P^n self-maps are exactly submultiplicative, so the
first dynamical degree is bracketed by Fekete-style bounds; a growth-model
fit (lambda**n times a polynomial factor) accelerates the slowly
converging n-th roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .mpoly import (
    MPoly,
    field_one,
    field_zero,
    is_homogeneous,
    is_single_term,
    leading_key,
    madd,
    mcompose,
    mconst,
    meval,
    mmul,
    mpow,
    mscale,
    mvar,
    total_degree,
)
from .places import (
    OrbitValueSummary,
    Place,
    ProjPoint,
    QuadConfig,
    geometric_height_of_orbit_value,
    height_of_orbit_value,
    height_of_point,
    weil_height,
)
from .ratfunc import BigRat, IntPoly, RatFunc, factor_refinement, poly_gcd, poly_lcm

__all__ = [
    "RationalMap",
    "MonomialData",
    "OrbitEntry",
    "OrbitTrace",
    "DegreeReport",
    "FeketeInterval",
    "ArithDegree",
    "NonDominantError",
    "compose_reduce",
    "iterate_point",
    "degree_sequence",
    "monomial_dynamical_degrees",
    "arithmetic_dynamical_degree",
    "fekete_limit",
    "conjugated_power_map",
    "exact_int_det",
    "DEFAULT_BIT_BUDGET",
]

DEFAULT_BIT_BUDGET = 1 << 26


class NonDominantError(ValueError):
    pass


class DegenerateMapError(ValueError):
    pass


# --------------------------------------------------------------------------
# integer matrices
# --------------------------------------------------------------------------


def exact_int_det(a) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [list(map(int, row)) for row in a]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_pow(a, k: int):
    n = len(a)
    result = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    base = tuple(tuple(map(int, row)) for row in a)
    while k:
        if k & 1:
            result = _mat_mul(result, base)
        base = _mat_mul(base, base)
        k >>= 1
    return result


def _monomial_degree(a) -> int:
    """Algebraic degree of the reduced projective realization of the torus
    map with exponent matrix a."""
    n = len(a)
    rows = [tuple(row) + (-sum(row),) for row in a] + [(0,) * (n + 1)]
    return -sum(min(r[k] for r in rows) for k in range(n + 1))


# --------------------------------------------------------------------------
# rational maps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialData:
    matrix: tuple  # n x n integer rows, torus chart x_i / x_n
    coeffs: tuple  # n coefficients in K*


@dataclass(frozen=True)
class RationalMap:
    """Reduced homogeneous self-map of P^n.

    coords are sparse polynomials with integral primitive coefficients
    (common K*-unit content removed, leading sign normalized), so equal
    maps have identical representations.
    """

    field: str
    n: int
    coords: tuple
    degree: int
    monomial: Optional[MonomialData]
    morphism_hint: Optional[bool] = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_coords(field: str, coords: Sequence[MPoly], morphism_hint=None) -> "RationalMap":
        coords = [dict(c) for c in coords]
        n = len(coords) - 1
        if n < 0:
            raise ValueError("no coordinates")
        if any(not c for c in coords):
            raise NonDominantError("a coordinate is identically zero")
        degs = set()
        for c in coords:
            hom, d = is_homogeneous(c)
            if not hom:
                raise ValueError("coordinates must be homogeneous")
            degs.add(d)
        if len(degs) != 1:
            raise ValueError("coordinates must share a common degree")
        coords = _reduce_coords(field, coords)
        d = total_degree(coords[0])
        if d == 0:
            raise DegenerateMapError("map is constant after removing the common factor")
        mono = _detect_monomial(field, coords)
        hint = morphism_hint
        if hint is None and n == 1:
            hint = _p1_resultant_nonzero(field, coords)
        return RationalMap(field, n, tuple(coords), d, mono, hint)

    @staticmethod
    def identity(field: str, n: int) -> "RationalMap":
        one = field_one(field)
        coords = [mvar(n + 1, i, one) for i in range(n + 1)]
        return RationalMap.from_coords(field, coords, morphism_hint=True)

    @staticmethod
    def from_monomial(field: str, matrix, coeffs=None) -> "RationalMap":
        n = len(matrix)
        if exact_int_det(matrix) == 0:
            raise NonDominantError("exponent matrix is singular")
        if coeffs is None:
            coeffs = tuple(field_one(field) for _ in range(n))
        coeffs = tuple(_coerce_scalar(field, c) for c in coeffs)
        if any(not c for c in coeffs):
            raise ValueError("monomial coefficients must be nonzero")
        rows = [tuple(int(x) for x in row) + (-sum(int(x) for x in row),) for row in matrix]
        rows.append((0,) * (n + 1))
        shift = [-min(r[k] for r in rows) for k in range(n + 1)]
        one = field_one(field)
        coords = []
        for j, row in enumerate(rows):
            key = tuple(row[k] + shift[k] for k in range(n + 1))
            coef = coeffs[j] if j < n else one
            coords.append({key: coef})
        return RationalMap.from_coords(field, coords)

    # -- basic structure ------------------------------------------------------

    def coordinate_strings(self):
        return tuple(_mpoly_str(c, self.n) for c in self.coords)

    def __str__(self):
        return "[" + " : ".join(self.coordinate_strings()) + "]"

    def is_morphism(self) -> Optional[bool]:
        """True/False when decidable (P^1 resultant or constructor
        guarantee); None means unknown and orbit code must watch for
        indeterminacy."""
        return self.morphism_hint

    def evaluate(self, x: ProjPoint):
        """Image point, or None when x is in the indeterminacy locus."""
        if x.field != self.field or x.n != self.n:
            raise ValueError("point and map live on different spaces")
        vals = x.values()
        images = []
        for c in self.coords:
            v = meval(c, vals)
            images.append(v if v is not None else field_zero(self.field))
        if all(not v for v in images):
            return None
        return ProjPoint.make(self.field, images)


def _coerce_scalar(field, c):
    if field == "q":
        return Fraction(c) if not isinstance(c, Fraction) else c
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, IntPoly):
        return RatFunc.from_intpoly(c)
    return RatFunc.from_rational(c)


def _mpoly_str(c: MPoly, n: int) -> str:
    names = [f"x{i}" for i in range(n + 1)]
    parts = []
    for key in sorted(c, reverse=True):
        coef = c[key]
        mono = "*".join(
            f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(key) if e
        )
        cs = str(coef)
        if mono:
            parts.append(f"{cs}*{mono}" if cs != "1" else mono)
        else:
            parts.append(cs)
    return " + ".join(parts) if parts else "0"


# --------------------------------------------------------------------------
# reduction
# --------------------------------------------------------------------------


def _integralize(field, coords):
    """Scale all coordinates by one K* unit so coefficients are integral
    (Fraction with unit denominator over Q; integer polynomial over Q(t)),
    with overall content 1 and the leading sign positive."""
    if field == "q":
        den_lcm = 1
        for c in coords:
            for v in c.values():
                den_lcm = den_lcm * v.denominator // math.gcd(den_lcm, v.denominator)
        num_gcd = 0
        scaled = [{k: v * den_lcm for k, v in c.items()} for c in coords]
        for c in scaled:
            for v in c.values():
                num_gcd = math.gcd(num_gcd, abs(v.numerator))
        out = [{k: Fraction(v.numerator // num_gcd) for k, v in c.items()} for c in scaled]
        lead = out[_first_nonzero(out)][leading_key(out[_first_nonzero(out)])]
        if lead < 0:
            out = [{k: -v for k, v in c.items()} for c in out]
        return out
    den_poly = IntPoly.ONE
    den_int = 1
    for c in coords:
        for v in c.values():
            den_poly = poly_lcm(den_poly, v.den)
            d = v.scale.denominator
            den_int = den_int * d // math.gcd(den_int, d)
    polys = []
    for c in coords:
        out = {}
        for k, v in c.items():
            cof = den_poly.exact_div(v.den)
            coeff = v.scale * den_int
            out[k] = v.num * cof * coeff.numerator
        polys.append(out)
    g_int = 0
    g_poly = IntPoly.ZERO
    for c in polys:
        for v in c.values():
            g_int = math.gcd(g_int, v.content())
            g_poly = poly_gcd(g_poly, v) if g_poly else v.primitive_split()[1]
    out = []
    for c in polys:
        reduced = {}
        for k, v in c.items():
            q = v.exact_div(g_poly) if g_poly.degree >= 1 else v
            reduced[k] = IntPoly(x // g_int for x in q.coeffs)
        out.append(reduced)
    idx = _first_nonzero(out)
    if out[idx][leading_key(out[idx])].lead < 0:
        out = [{k: -v for k, v in c.items()} for c in out]
    return out


def _first_nonzero(coords):
    for i, c in enumerate(coords):
        if c:
            return i
    raise ValueError("all coordinates are zero")


def _reduce_coords(field, coords):
    """Remove the common polynomial factor and normalize the unit content."""
    nvars = len(next(iter(coords[_first_nonzero(coords)])))
    if all(is_single_term(c) for c in coords):
        keys = [next(iter(c)) for c in coords]
        shift = tuple(min(k[i] for k in keys) for i in range(nvars))
        new = []
        for c in coords:
            k, v = next(iter(c.items()))
            new.append({tuple(a - b for a, b in zip(k, shift)): v})
        ints = _integralize(field, new)
        return [_coeffs_to_field(field, c) for c in ints]
    ints = _integralize(field, coords)
    reduced = _sympy_reduce(field, ints, nvars)
    return [_coeffs_to_field(field, c) for c in reduced]


def _coeffs_to_field(field, c):
    if field == "q":
        return {k: Fraction(v) for k, v in c.items()}
    return {
        k: (v if isinstance(v, RatFunc) else RatFunc.from_intpoly(v)) for k, v in c.items()
    }


def _sympy_reduce(field, coords, nvars):
    """Divide out the full common factor using an exact multivariate gcd.

    Coefficients arrive integral (Fraction ints over Q, IntPoly over Q(t));
    over Q(t) the variable t rides along as an extra polynomial generator,
    which is legitimate by Gauss's lemma.
    """
    import sympy

    gens = sympy.symbols(f"v0:{nvars}")
    use_t = field == "qt"
    if use_t:
        gens = gens + (sympy.Symbol("tt"),)

    def to_sympy(c):
        data = {}
        for key, v in c.items():
            if use_t:
                for i, cf in enumerate(v.coeffs):
                    if cf:
                        data[key + (i,)] = cf
            else:
                data[key] = int(v)
        return sympy.Poly.from_dict(data, *gens, domain=sympy.ZZ)

    polys = [to_sympy(c) for c in coords]
    g = polys[0]
    for p in polys[1:]:
        if g.total_degree() == 0:
            break
        g = g.gcd(p)
    if g.total_degree() == 0:
        return coords
    out = []
    for p in polys:
        q = p.exquo(g)
        c: MPoly = {}
        for key, cf in q.terms():
            if use_t:
                xkey, te = tuple(key[:-1]), key[-1]
                cur = c.get(xkey)
                lift = IntPoly((0,) * te + (int(cf),))
                c[xkey] = lift if cur is None else cur + lift
            else:
                c[tuple(key)] = Fraction(int(cf))
        out.append(c)
    # unit content may reappear after division
    return _integralize(field, out)


def _detect_monomial(field, coords):
    if not all(is_single_term(c) for c in coords):
        return None
    n = len(coords) - 1
    if n == 0:
        return None
    keys = [next(iter(c)) for c in coords]
    vals = [next(iter(c.values())) for c in coords]
    matrix = tuple(
        tuple(keys[j][k] - keys[n][k] for k in range(n)) for j in range(n)
    )
    if exact_int_det(matrix) == 0:
        return None
    if field == "q":
        coeffs = tuple(Fraction(vals[j]) / Fraction(vals[n]) for j in range(n))
    else:
        coeffs = tuple(vals[j] / vals[n] for j in range(n))
    return MonomialData(matrix, coeffs)


def _p1_resultant_nonzero(field, coords) -> bool:
    """Decide morphism-ness on P^1 by the resultant of the two binary forms."""
    d = total_degree(coords[0])
    rows = []
    zero = field_zero(field)

    def coeff_list(c):
        # coefficients of x^i y^(d-i), i = 0..d
        return [c.get((i, d - i), zero) for i in range(d + 1)]

    a, b = coeff_list(coords[0]), coeff_list(coords[1])
    size = 2 * d
    for s in range(d):
        rows.append([zero] * s + a + [zero] * (d - 1 - s))
    for s in range(d):
        rows.append([zero] * s + b + [zero] * (d - 1 - s))
    return bool(_field_det_nonzero(rows))


def _field_det_nonzero(rows) -> bool:
    m = [list(r) for r in rows]
    n = len(m)
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if m[i][k]:
                pivot = i
                break
        if pivot is None:
            return False
        m[k], m[pivot] = m[pivot], m[k]
        inv_p = m[k][k]
        for i in range(k + 1, n):
            if m[i][k]:
                factor = m[i][k] / inv_p
                m[i] = [a - factor * b for a, b in zip(m[i], m[k])]
    return True


# --------------------------------------------------------------------------
# composition
# --------------------------------------------------------------------------


def compose_reduce(f: RationalMap, g: RationalMap) -> RationalMap:
    """Reduced coordinates of f after g (common factor removed)."""
    if f.field != g.field or f.n != g.n:
        raise ValueError("maps live on different spaces")
    if f.monomial is not None and g.monomial is not None:
        a = _mat_mul(f.monomial.matrix, g.monomial.matrix)
        coeffs = []
        for j in range(f.n):
            c = f.monomial.coeffs[j]
            for k in range(f.n):
                e = f.monomial.matrix[j][k]
                if e:
                    c = c * g.monomial.coeffs[k] ** e
            coeffs.append(c)
        return RationalMap.from_monomial(f.field, a, coeffs)
    coords = [mcompose(c, list(g.coords)) for c in f.coords]
    if any(not c for c in coords):
        raise NonDominantError("composition has an identically zero coordinate")
    hint = True if (f.morphism_hint is True and g.morphism_hint is True) else None
    return RationalMap.from_coords(f.field, coords, morphism_hint=hint)


def conjugated_power_map(field: str, lmat, d: int) -> RationalMap:
    """L^-1 o (coordinate d-th power) o L for an invertible integer matrix L.

    A morphism of degree d by construction (conjugation by an automorphism
    of P^n preserves base-point-freeness).
    """
    npts = len(lmat)
    if exact_int_det(lmat) == 0:
        raise ValueError("conjugating matrix is singular")
    lin = []
    for i in range(npts):
        c: MPoly = {}
        for j in range(npts):
            if lmat[i][j]:
                key = tuple(1 if k == j else 0 for k in range(npts))
                c[key] = _coerce_scalar(field, lmat[i][j])
        lin.append(c)
    powered = [mpow(l, d) for l in lin]
    adj = _adjugate(lmat)
    coords = []
    for i in range(npts):
        acc: MPoly = {}
        for j in range(npts):
            if adj[i][j]:
                acc = madd(acc, mscale(powered[j], _coerce_scalar(field, adj[i][j])))
        coords.append(acc)
    return RationalMap.from_coords(field, coords, morphism_hint=True)


def _adjugate(a):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [a[r][c] for c in range(n) if c != i] for r in range(n) if r != j
            ]
            s = -1 if (i + j) % 2 else 1
            row.append(s * (exact_int_det(minor) if minor else 1))
        out.append(row)
    return out


# --------------------------------------------------------------------------
# orbits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitEntry:
    n: int
    point: object  # ProjPoint | OrbitValueSummary
    h: Optional[float]
    h_plus: Optional[float]

    def render_point(self) -> str:
        if isinstance(self.point, OrbitValueSummary):
            return self.point.render()
        return str(self.point)


@dataclass(frozen=True)
class OrbitTrace:
    entries: tuple
    stop_reason: str  # completed | bit-budget | indeterminate

    def heights(self):
        return [e.h for e in self.entries]

    def h_plus_seq(self):
        return [e.h_plus for e in self.entries]


def _point_bits(p: ProjPoint) -> int:
    bits = 0
    if p.field == "q":
        for c in p.coords:
            bits += abs(c).bit_length()
    else:
        for poly in p.coords:
            for c in poly.coeffs:
                bits += abs(c).bit_length() + 1
    return bits


def _height_of(point, kind, cfg):
    if kind is None:
        return None
    if isinstance(point, OrbitValueSummary):
        if kind == "geom":
            return float(geometric_height_of_orbit_value(point))
        if kind == "moriwaki":
            return height_of_orbit_value(point, cfg).total
        if kind == "weil":
            return _weil_of_summary(point)
        raise ValueError(f"unknown height kind {kind!r}")
    return height_of_point(point, kind, cfg)


def _weil_of_summary(summary: OrbitValueSummary) -> float:
    total = 0.0
    for k, g in enumerate(summary.basis_ints):
        m = max(-summary.exponent(i, k) for i in range(len(summary.coord_exps)))
        total += m * math.log(g)
    total += max(summary.log_magnitude(i) for i in range(len(summary.coord_exps)))
    return total


def _summary_setup(f: RationalMap, x: ProjPoint):
    """Coprime basis and exponent vectors for a torus point under a
    monomial map; all later orbit work is linear algebra on exponents."""
    n = f.n
    vals = x.values()
    affine = [vals[k] / vals[n] for k in range(n)]
    scalars = list(affine) + list(f.monomial.coeffs)
    if f.field == "q":
        ints = set()
        for s in scalars:
            s = Fraction(s)
            for part in (abs(s.numerator), s.denominator):
                if part > 1:
                    ints.add(part)
        basis_ints = factor_refinement(sorted(ints)).elements if ints else ()
        basis_polys = ()

        def encode(s):
            s = Fraction(s)
            vec = {}
            for k, g in enumerate(basis_ints):
                e = _mult_int(abs(s.numerator), g) - _mult_int(s.denominator, g)
                if e:
                    vec[k] = e
            return vec

    else:
        ints = set()
        polys = set()
        for s in scalars:
            for part in (abs(s.scale.numerator), s.scale.denominator):
                if part > 1:
                    ints.add(part)
            for p in (s.num, s.den):
                if p.degree >= 1:
                    tz = p.trailing_zeros()
                    body = IntPoly(p.coeffs[tz:])
                    if body.degree >= 1:
                        polys.add(body)
        basis_ints = factor_refinement(sorted(ints)).elements if ints else ()
        basis_polys = (
            factor_refinement(sorted(polys, key=lambda p: (p.degree, p.coeffs))).elements
            if polys
            else ()
        )

        def encode(s):
            vec = {}
            for k, g in enumerate(basis_ints):
                e = _mult_int(abs(s.scale.numerator), g) - _mult_int(s.scale.denominator, g)
                if e:
                    vec[k] = e
            t_exp = (s.num.trailing_zeros() if s.num.degree >= 1 else 0) - (
                s.den.trailing_zeros() if s.den.degree >= 1 else 0
            )
            if t_exp:
                vec[-1] = t_exp
            off = len(basis_ints)
            for j, g in enumerate(basis_polys):
                e = s.num.multiplicity_of(g) - s.den.multiplicity_of(g)
                if e:
                    vec[off + j] = e
            return vec

    state = [encode(a) for a in affine]
    coeff_vecs = [encode(c) for c in f.monomial.coeffs]
    return basis_ints, basis_polys, state, coeff_vecs


def _mult_int(v: int, g: int) -> int:
    e = 0
    while v > 1 and v % g == 0:
        v //= g
        e += 1
    return e


def _vec_combine(coeff_vec, rows, state):
    out = dict(coeff_vec)
    for a, vec in zip(rows, state):
        if not a:
            continue
        for k, e in vec.items():
            s = out.get(k, 0) + a * e
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def iterate_point(
    f: RationalMap,
    x: ProjPoint,
    steps: int,
    height: Optional[str] = None,
    cfg: Optional[QuadConfig] = None,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    prefer_summary: bool = True,
) -> OrbitTrace:
    """Orbit x, f(x), ..., f^steps(x) with heights attached.

    Monomial maps on torus points use the valuation-summary fast path; the
    dense path stops early on indeterminacy (all coordinates vanish) or
    when total coordinate size exceeds the bit budget.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if x.field != f.field or x.n != f.n:
        raise ValueError("point and map live on different spaces")
    cfg = cfg or QuadConfig()
    use_summary = prefer_summary and f.monomial is not None and x.is_torus_point()
    entries = []
    if use_summary:
        basis_ints, basis_polys, state, coeff_vecs = _summary_setup(f, x)
        rows = f.monomial.matrix
        for n in range(steps + 1):
            summary = OrbitValueSummary(
                basis_ints,
                basis_polys,
                tuple(tuple(sorted(v.items())) for v in state) + ((),),
            )
            h = _height_of(summary, height, cfg)
            entries.append(
                OrbitEntry(n, summary, h, None if h is None else max(h, 1.0))
            )
            if n < steps:
                state = [
                    _vec_combine(coeff_vecs[j], rows[j], state) for j in range(f.n)
                ]
        return OrbitTrace(tuple(entries), "completed")

    current = x
    stop = "completed"
    for n in range(steps + 1):
        h = _height_of(current, height, cfg)
        entries.append(OrbitEntry(n, current, h, None if h is None else max(h, 1.0)))
        if n == steps:
            break
        nxt = f.evaluate(current)
        if nxt is None:
            stop = "indeterminate"
            break
        if _point_bits(nxt) > bit_budget:
            stop = "bit-budget"
            break
        current = nxt
    return OrbitTrace(tuple(entries), stop)


# --------------------------------------------------------------------------
# degree sequences and dynamical degrees
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FeketeInterval:
    lower: float
    upper: float
    c_required: float  # smallest inflation making the data submultiplicative
    violations: tuple  # sample of (m, n, ratio) with a_{m+n} > C a_m a_n

    def contains(self, x: float) -> bool:
        return self.lower - 1e-12 <= x <= self.upper + 1e-12


def fekete_limit(seq: Sequence, c: float = 1.0, window: int = 5, max_inflation: float = 1e6) -> FeketeInterval:
    """Bracket lim a_n^(1/n) for a (near-)submultiplicative positive sequence.

    seq is 1-indexed conceptually: seq[0] = a_1.  The upper bound is the
    Fekete bound inf_n (C a_n)^(1/n), with C inflated to the smallest
    constant the data actually satisfies (violations of the nominal C are
    reported, not fatal, since any constant leaves the limit unchanged).
    The lower proxy corrects the trailing n-th roots for a subexponential
    factor by regressing log a_n^(1/n) on (log n)/n.
    """
    a = [float(v) for v in seq]
    if not a or any(v <= 0 for v in a):
        raise ValueError("sequence must be positive")
    if c <= 0:
        raise ValueError("C must be positive")
    la = [math.log(v) for v in seq]
    nmax = len(a)
    violations = []
    c_req = 1.0
    for m in range(1, nmax + 1):
        for n in range(m, nmax + 1 - m):
            excess = la[m + n - 1] - (la[m - 1] + la[n - 1] + math.log(c))
            if excess > 1e-9:
                ratio = math.exp(excess)
                c_req = max(c_req, ratio)
                if len(violations) < 8:
                    violations.append((m, n, ratio))
    if c_req > max_inflation:
        raise ValueError(
            f"sequence is not submultiplicative within inflation {max_inflation}"
        )
    log_c_eff = math.log(c) + math.log(c_req)
    upper = min(math.exp((log_c_eff + la[n - 1]) / n) for n in range(1, nmax + 1))
    w = min(max(window, 3), nmax)
    tail = range(nmax - w + 1, nmax + 1)
    roots = [math.exp(la[n - 1] / n) for n in tail]
    lower = min(roots)
    if len(tail) >= 3 and nmax >= 2:
        xs = [math.log(n) / n for n in tail]
        ys = [la[n - 1] / n for n in tail]
        slope, intercept = _ls_fit(xs, ys)
        lower = min(lower, math.exp(intercept))
    lower = max(min(lower, upper), 0.0)
    return FeketeInterval(lower, upper, c_req, tuple(violations))


def _ls_fit(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return 0.0, my
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


@dataclass(frozen=True)
class DegreeReport:
    degree_sequence: tuple
    root: float  # d_N ** (1/N)
    ratio: Optional[float]  # d_N / d_{N-1}
    fitted: float  # growth-model estimate of lambda_1
    fit_residual: float
    fekete: FeketeInterval
    exact_lambda: Optional[tuple]  # monomial maps: (lambda_1 .. lambda_n)
    arithmetic_lambda_hat: Optional[tuple]
    truncated: bool
    submultiplicative_ok: bool

    @property
    def lambda1_estimate(self) -> float:
        """Composite first-dynamical-degree estimate.

        Degree sequences come in two awkward flavors: Jordan blocks give
        d_n ~ n^beta lambda^n (n-th roots converge slowly, but the
        growth-model fit nails lambda), while equal-modulus complex
        eigenvalue pairs make the log-ratios oscillate (the fit is garbage,
        but lagged ratios average the phase out).  The fit's own residual
        decides which regime we are in; everything is clamped by the
        rigorous Fekete upper bound.
        """
        fitted, resid = self.fitted, self.fit_residual
        upper = self.fekete.upper
        if resid <= 0.05:
            est = fitted
        else:
            degs = self.degree_sequence
            lag = max(2, len(degs) // 2)
            if len(degs) > lag:
                est = (degs[-1] / degs[-1 - lag]) ** (1.0 / lag)
            else:
                est = upper
        return min(max(est, 1.0), upper)


def _fit_growth(degs):
    """(lambda estimate, max residual) from d_n ~ const * n^beta * lambda^n.

    Successive log-ratios are affine in log(1 + 1/n), so a least-squares
    fit recovers log lambda at the intercept; exact for pure geometric
    growth.  The residual exposes oscillatory sequences where this model
    is wrong."""
    if len(degs) == 1:
        return float(degs[0]), 0.0
    diffs = [math.log(b) - math.log(a) for a, b in zip(degs, degs[1:])]
    if len(diffs) == 1:
        return math.exp(diffs[0]), 0.0
    xs = [math.log(1.0 + 1.0 / n) for n in range(1, len(degs))]
    slope, intercept = _ls_fit(xs, diffs)
    resid = max(abs(d - (slope * x + intercept)) for x, d in zip(xs, diffs))
    return math.exp(intercept), resid


def degree_sequence(
    f: RationalMap,
    steps: int,
    force_dense: bool = False,
    term_budget: int = 200_000,
) -> DegreeReport:
    """deg(f^n) for n = 1..steps, with growth estimates of lambda_1.

    Monomial maps get the exact exponent-matrix path (and exact dynamical
    degrees); the dense path composes and gcd-reduces, and truncates with a
    flag when the coordinate term budget is exhausted.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    truncated = False
    if f.monomial is not None and not force_dense:
        a = f.monomial.matrix
        degs = []
        power = a
        for n in range(1, steps + 1):
            degs.append(_monomial_degree(power))
            if n < steps:
                power = _mat_mul(power, a)
        exact = tuple(monomial_dynamical_degrees(a, k) for k in range(1, f.n + 1))
        hats = tuple(
            max(exact[k - 1], exact[k - 2] if k >= 2 else 1.0) for k in range(1, f.n + 1)
        )
    else:
        degs = []
        g = f
        exact = None
        hats = None
        for n in range(1, steps + 1):
            degs.append(g.degree)
            if n == steps:
                break
            if sum(len(c) for c in g.coords) > term_budget:
                truncated = True
                break
            g = compose_reduce(f, g)
    fek = fekete_limit(degs, 1.0)
    ok = fek.c_required <= 1.0 + 1e-9
    ratio = degs[-1] / degs[-2] if len(degs) >= 2 else None
    fitted, resid = _fit_growth(degs)
    return DegreeReport(
        tuple(degs),
        degs[-1] ** (1.0 / len(degs)),
        ratio,
        fitted,
        resid,
        fek,
        exact,
        hats,
        truncated,
        ok,
    )


def monomial_dynamical_degrees(matrix, k: int) -> float:
    """k-th dynamical degree of a monomial map: product of the k largest
    eigenvalue moduli of the exponent matrix."""
    n = len(matrix)
    if not (1 <= k <= n):
        raise ValueError("k out of range")
    if exact_int_det(matrix) == 0:
        raise NonDominantError("exponent matrix is singular")
    eigs = np.linalg.eigvals(np.array(matrix, dtype=float))
    mods = sorted((abs(complex(e)) for e in eigs), reverse=True)
    out = 1.0
    for m in mods[:k]:
        out *= m
    return out


@dataclass(frozen=True)
class ArithDegree:
    k: int
    value: Optional[float]
    lower: float
    upper: float
    exact: bool

    @property
    def is_interval(self) -> bool:
        return not self.exact


def arithmetic_dynamical_degree(
    f: RationalMap, k: int, steps: int = 8, max_width: float = 0.5
) -> ArithDegree:
    """Arithmetic dynamical degree via the relative degree formula
    max(lambda_k, lambda_{k-1}), with lambda_0 = 1.

    Exact for monomial maps; dense maps support k = 1 only, where the
    degree-sequence bracket feeds the formula and an interval is returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if f.monomial is not None:
        lam_k = monomial_dynamical_degrees(f.monomial.matrix, k)
        lam_km1 = 1.0 if k == 1 else monomial_dynamical_degrees(f.monomial.matrix, k - 1)
        v = max(lam_k, lam_km1)
        return ArithDegree(k, v, v, v, True)
    if k != 1:
        raise ValueError(
            "dense non-monomial maps only support k = 1 (higher k needs "
            "intersection theory on graphs, deliberately out of scope)"
        )
    rep = degree_sequence(f, steps)
    lo = max(rep.fekete.lower, 1.0)
    hi = max(rep.fekete.upper, 1.0)
    value = max(rep.lambda1_estimate, 1.0)
    if hi - lo > max_width:
        return ArithDegree(1, None, lo, hi, False)
    return ArithDegree(1, value, lo, hi, False)
