"""Integration of log-type functions against the Fubini-Study measure on P^1(C).

The FS probability measure, written in polar coordinates z = r e^{i theta}
and the radial variable u = log r, is

    d mu  =  (1/(2 pi)) * (1/2) sech(u)^2  du dtheta ,

a smooth rapidly-decaying weight on an infinite strip.  Three evaluation
routes share this parametrization:

* a closed form for integrands max_i(b_i + a_i u) that depend only on
  |z| and are piecewise affine in u (upper envelope of lines, integrated
  segment by segment against the exact radial primitive);
* an adaptive tensor-Gauss scheme on the (u, theta) strip with a
  refine-the-worst-cell loop, forced refinement near logarithmic
  singularities, and a truncation tail bound;
* a Monte Carlo fallback (exact inverse-CDF sampling of the radial law)
  that engages only when the subdivision budget is exhausted.

All integrand arithmetic is done in the log domain, so coordinates with
astronomically large coefficients never materialize.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .ratfunc import IntPoly, RatFunc

__all__ = [
    "QuadConfig",
    "QuadResult",
    "LogLinearCoord",
    "LogLinearIntegrand",
    "integrate_radial_affine",
    "integrate_logmax",
    "integrate_loglinear",
    "BudgetExhausted",
]

MIN_TOL = 1e-10


class BudgetExhausted(RuntimeError):
    """Raised only by callers that insist on convergence; the engine itself
    always returns its best value with an honest bound."""


@dataclass(frozen=True)
class QuadConfig:
    target_tol: float = 1e-7
    max_subdivisions: int = 40000
    mc_fallback_samples: int = 400000
    rng_seed: int = 0

    def __post_init__(self):
        if self.target_tol < MIN_TOL:
            raise ValueError(f"target_tol below supported floor {MIN_TOL}")
        if self.max_subdivisions <= 0 or self.mc_fallback_samples < 0:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_bound: float
    subdivisions_used: int
    method: str  # adaptive | radial-closed-form | monte-carlo
    converged: bool = True


# --------------------------------------------------------------------------
# radial closed form
# --------------------------------------------------------------------------

_EPS = 2.220446049250313e-16


def _radial_cdf(u: float) -> float:
    """F(u) = mu{ log|z| <= u } = e^{2u} / (1 + e^{2u})."""
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-2.0 * u))
    e = math.exp(2.0 * u)
    return e / (1.0 + e)


def _radial_primitive(b: float, a: float, u: float) -> float:
    """Antiderivative of (b + a v) dF(v), normalized to 0 at v -> -inf.

    Evaluates stably for |u| large; the limit at +inf is b.
    """
    if u == math.inf:
        return b
    if u == -math.inf:
        return 0.0
    if u >= 0:
        q = math.exp(-2.0 * u)
        fq = 1.0 / (1.0 + q)
        return b * fq - a * (u * q / (1.0 + q) + 0.5 * math.log1p(q))
    e = math.exp(2.0 * u)
    f = e / (1.0 + e)
    return (b + a * u) * f - 0.5 * a * math.log1p(e)


def _upper_envelope(lines):
    """Upper envelope of (b, a) lines: returns (hull lines, breakpoints)."""
    best = {}
    for b, a in lines:
        if a not in best or b > best[a]:
            best[a] = b
    ordered = sorted(((a, b) for a, b in best.items()))
    hull = []
    for a, b in ordered:
        while len(hull) >= 2:
            a1, b1 = hull[-2]
            a2, b2 = hull[-1]
            # hull[-1] is redundant if the new line overtakes it no later
            # than hull[-1] overtakes hull[-2]
            x_prev = (b1 - b2) / (a2 - a1)
            x_new = (b1 - b) / (a - a1)
            if x_new <= x_prev:
                hull.pop()
            else:
                break
        hull.append((a, b))
    breaks = []
    for (a1, b1), (a2, b2) in zip(hull, hull[1:]):
        breaks.append((b1 - b2) / (a2 - a1))
    return hull, breaks


def integrate_radial_affine(lines: Sequence, cfg: Optional[QuadConfig] = None) -> QuadResult:
    """Exact integral of max_i(b_i + a_i log|z|) against the FS measure.

    Breakpoints of the upper envelope are found exactly; each segment is
    integrated in closed form, so the only error is floating rounding.
    """
    lines = [(float(b), float(a)) for b, a in lines]
    if not lines:
        raise ValueError("empty line set")
    hull, breaks = _upper_envelope(lines)
    knots = [-math.inf] + breaks + [math.inf]
    total = 0.0
    magnitude = 0.0
    for (a, b), lo, hi in zip(hull, knots, knots[1:]):
        p_hi = _radial_primitive(b, a, hi)
        p_lo = _radial_primitive(b, a, lo)
        total += p_hi - p_lo
        magnitude += abs(p_hi) + abs(p_lo)
    err = 8.0 * _EPS * (magnitude + sum(abs(b) + abs(a) for a, b in hull) + abs(total)) + 1e-15
    return QuadResult(total, err, 0, "radial-closed-form", True)


# --------------------------------------------------------------------------
# log-linear integrands
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LogLinearCoord:
    """One coordinate's log-magnitude: b + a*log|z| + sum_k e_k*log|g_k(z)|."""

    b: float
    a: float
    terms: tuple = ()  # (basis index, float exponent)


@dataclass
class _PreparedPoly:
    coeffs_low: np.ndarray  # low-to-high floats of p / 2**shift
    offset_log: float  # shift * log 2
    deg: int
    roots: tuple  # complex roots (for singularity placement)


def _prepare_basis_poly(p: IntPoly) -> _PreparedPoly:
    if not p or p.degree < 1:
        raise ValueError("basis polynomials must be nonconstant")
    if p.coeffs[0] == 0:
        raise ValueError("basis polynomials must not vanish at 0 (strip t powers)")
    bits = max(abs(c).bit_length() for c in p.coeffs)
    shift = max(0, bits - 900)
    coeffs = np.array([float(c >> shift) if shift else float(c) for c in p.coeffs])
    from .roots import complex_roots

    rts = tuple(c.value for c in complex_roots(p).clusters for _ in range(c.multiplicity))
    return _PreparedPoly(coeffs, shift * math.log(2.0), p.degree, rts)


def _poly_logabs(prep: _PreparedPoly, u: np.ndarray, th: np.ndarray) -> np.ndarray:
    out = np.empty_like(u)
    neg = u <= 0.0
    if neg.any():
        z = np.exp(u[neg] + 1j * th[neg])
        out[neg] = np.log(np.maximum(np.abs(np.polyval(prep.coeffs_low[::-1], z)), 1e-300))
    pos = ~neg
    if pos.any():
        w = np.exp(-u[pos] - 1j * th[pos])
        out[pos] = prep.deg * u[pos] + np.log(
            np.maximum(np.abs(np.polyval(prep.coeffs_low, w)), 1e-300)
        )
    return out + prep.offset_log


@dataclass
class LogLinearIntegrand:
    """max over coordinates of affine combinations of log|z| and log|g_k(z)|."""

    basis: list
    coords: list

    @staticmethod
    def from_ratfunc_coords(coords: Sequence[RatFunc]) -> "LogLinearIntegrand":
        coords = [c for c in coords if not c.is_zero()]
        if not coords:
            raise ValueError("all coordinates are zero")
        basis_polys = []
        index = {}

        def basis_index(p: IntPoly) -> int:
            key = p.coeffs
            if key not in index:
                index[key] = len(basis_polys)
                basis_polys.append(p)
            return index[key]

        entries = []
        for c in coords:
            b = _logabs_fraction(c.scale)
            a = 0
            terms = []
            for poly, sign in ((c.num, 1), (c.den, -1)):
                if not poly or poly.degree < 1 and abs(poly.constant_value()) == 1:
                    continue
                k = poly.trailing_zeros() if poly.degree >= 1 else 0
                a += sign * k
                body = IntPoly(poly.coeffs[k:])
                if body.degree >= 1:
                    terms.append((basis_index(body), float(sign)))
                elif abs(body.constant_value()) != 1:
                    b += sign * math.log(abs(body.constant_value()))
            entries.append(LogLinearCoord(b, float(a), tuple(terms)))
        return LogLinearIntegrand([_prepare_basis_poly(p) for p in basis_polys], entries)

    def is_radial(self) -> bool:
        return not self.basis

    def lines(self):
        return [(c.b, c.a) for c in self.coords]

    def singular_points(self):
        pts = []
        for prep in self.basis:
            for beta in prep.roots:
                r = abs(beta)
                if r > 0:
                    pts.append((math.log(r), math.atan2(beta.imag, beta.real) % (2 * math.pi)))
        return pts

    def growth_slopes(self):
        """Max |d/du| of the envelope at u -> -inf and u -> +inf."""
        lo = hi = 0.0
        for c in self.coords:
            deg_sum = sum(
                e * self.basis[i].deg for i, e in c.terms
            )
            hi = max(hi, abs(c.a + deg_sum))
            lo = max(lo, abs(c.a))
        return max(lo, hi)

    def offset_scale(self) -> float:
        scale = 1.0
        for c in self.coords:
            scale = max(scale, abs(c.b))
        for prep in self.basis:
            scale = max(scale, prep.offset_log + math.log(1.0 + np.sum(np.abs(prep.coeffs_low))))
        return scale

    def __call__(self, u: np.ndarray, th: np.ndarray) -> np.ndarray:
        logs = [_poly_logabs(prep, u, th) for prep in self.basis]
        best = None
        for c in self.coords:
            v = c.b + c.a * u
            for i, e in c.terms:
                v = v + e * logs[i]
            best = v if best is None else np.maximum(best, v)
        return best


def _logabs_fraction(q: Fraction) -> float:
    if q == 0:
        raise ValueError("log of zero scale")
    return math.log(abs(q.numerator)) - math.log(q.denominator)


# --------------------------------------------------------------------------
# adaptive engine
# --------------------------------------------------------------------------

_GAUSS_ORDER = 7
_gauss_cache = {}


def _gauss(m: int):
    if m not in _gauss_cache:
        x, w = np.polynomial.legendre.leggauss(m)
        _gauss_cache[m] = (x, w)
    return _gauss_cache[m]


def _weight(u: np.ndarray) -> np.ndarray:
    e = np.exp(-2.0 * np.abs(u))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    return 0.5 * sech2 / (2.0 * math.pi)


def _batch_integrals(bounds: np.ndarray, f: Callable, order: int = _GAUSS_ORDER) -> np.ndarray:
    """Tensor Gauss integrals of f times the FS weight over k rectangles."""
    x, w = _gauss(order)
    u0, u1, t0, t1 = bounds.T
    um, ur = (u0 + u1) / 2, (u1 - u0) / 2
    tm, tr = (t0 + t1) / 2, (t1 - t0) / 2
    upts = um[:, None, None] + ur[:, None, None] * x[None, :, None]
    tpts = tm[:, None, None] + tr[:, None, None] * x[None, None, :]
    upts, tpts = np.broadcast_arrays(upts, tpts)
    vals = f(upts.ravel(), tpts.ravel()).reshape(upts.shape)
    vals = vals * _weight(upts)
    return ur * tr * np.einsum("i,j,kij->k", w, w, vals)


def _children(bounds):
    u0, u1, t0, t1 = bounds
    um, tm = (u0 + u1) / 2, (t0 + t1) / 2
    return [
        (u0, um, t0, tm),
        (u0, um, tm, t1),
        (um, u1, t0, tm),
        (um, u1, tm, t1),
    ]


@dataclass
class _Leaf:
    bounds: tuple
    refined: float
    err: float
    kids: list  # (bounds, integral) pairs
    forced: bool


def _contains(bounds, pt, pad=0.0):
    u0, u1, t0, t1 = bounds
    u, t = pt
    return (u0 - pad <= u <= u1 + pad) and (t0 - pad <= t <= t1 + pad)


# Richardson cell estimates share bias with their parents near log
# singularities; the reported bound inflates the raw cell sum by this factor.
_SAFETY = 2.5


_THETA_OFFSET = 0.5772156649015329  # keeps real-axis roots off the domain seam


def _adaptive(f, U: float, cfg: QuadConfig, singular_pts, floor_diag: float):
    n_u = max(9, int(math.ceil(2 * U / 1.5)))
    if n_u % 2 == 0:
        n_u += 1  # odd count keeps u = 0 (unit-circle roots) off cell edges
    u_edges = np.linspace(-U, U, n_u + 1)
    t_edges = np.linspace(_THETA_OFFSET, _THETA_OFFSET + 2 * math.pi, 7)
    # wrap singular angles into the shifted fundamental domain
    singular_pts = [
        (u, _THETA_OFFSET + (t - _THETA_OFFSET) % (2 * math.pi)) for u, t in singular_pts
    ]
    base = [
        (u_edges[i], u_edges[i + 1], t_edges[j], t_edges[j + 1])
        for i in range(n_u)
        for j in range(len(t_edges) - 1)
    ]

    def make_leaves(parent_bounds_list):
        """Children integrals plus an independent high-order parent estimate.

        The two error gauges use different node sets, so a feature hiding
        between the nodes of one rule is still seen by the other.
        """
        all_children = []
        for pb in parent_bounds_list:
            all_children.extend(_children(pb))
        child_i = _batch_integrals(np.array(all_children), f)
        hi_i = _batch_integrals(np.array(parent_bounds_list), f, order=13)
        leaves = []
        for idx, pb in enumerate(parent_bounds_list):
            kids = list(zip(all_children[idx * 4 : idx * 4 + 4], child_i[idx * 4 : idx * 4 + 4]))
            leaves.append((pb, kids, hi_i[idx]))
        return leaves

    base_i = _batch_integrals(np.array(base), f)
    heap = []
    leaves = {}
    counter = 0
    total = 0.0
    total_err = 0.0

    def push_leaf(bounds, self_i, self_hi, kids):
        nonlocal counter, total, total_err
        refined = float(sum(k[1] for k in kids))
        err = max(abs(self_i - refined), abs(self_hi - refined))
        diag = math.hypot(bounds[1] - bounds[0], bounds[3] - bounds[2])
        forced = diag > floor_diag and any(_contains(bounds, p, pad=0.6 * diag) for p in singular_pts)
        leaf = _Leaf(bounds, refined, err, kids, forced)
        leaves[counter] = leaf
        key = math.inf if forced else err
        heapq.heappush(heap, (-key, counter))
        counter += 1
        total += refined
        total_err += err

    for (pb, kids, hi), self_i in zip(make_leaves(base), base_i):
        push_leaf(pb, self_i, hi, kids)

    stop_at = 0.3 * cfg.target_tol
    while leaves and counter < cfg.max_subdivisions:
        worst_key = -heap[0][0]
        if worst_key != math.inf and total_err <= stop_at:
            break
        n_pop = max(1, min(16, len(leaves) // 8))
        popped = []
        for _ in range(n_pop):
            if not heap:
                break
            key, idx = heapq.heappop(heap)
            if idx not in leaves:
                continue
            if -key != math.inf and total_err <= stop_at:
                heapq.heappush(heap, (key, idx))
                break
            popped.append(leaves.pop(idx))
        if not popped:
            break
        parent_bounds = []
        parent_kid_i = []
        for leaf in popped:
            total -= leaf.refined
            total_err -= leaf.err
            for kb, ki in leaf.kids:
                parent_bounds.append(kb)
                parent_kid_i.append(ki)
        for (pb, kids, hi), self_i in zip(make_leaves(parent_bounds), parent_kid_i):
            push_leaf(pb, self_i, hi, kids)

    # allowance for singular cells that are still coarse, and for cells at
    # the floor (their Richardson estimate is trusted once below the floor)
    allowance = 0.0
    for pt in singular_pts:
        for leaf in leaves.values():
            u0, u1, t0, t1 = leaf.bounds
            diag = math.hypot(u1 - u0, t1 - t0)
            if _contains(leaf.bounds, pt, pad=0.3 * diag):
                area = (u1 - u0) * (t1 - t0)
                wloc = float(_weight(np.array([pt[0]]))[0])
                allowance += area * (abs(math.log(max(diag, 1e-12))) + 8.0) * wloc
    converged = total_err <= cfg.target_tol and counter < cfg.max_subdivisions
    return total, _SAFETY * total_err + allowance, len(leaves), converged


def _monte_carlo(f, cfg: QuadConfig):
    rng = np.random.default_rng(cfg.rng_seed)
    n = max(cfg.mc_fallback_samples, 1000)
    total = 0.0
    total_sq = 0.0
    chunk = 200000
    done = 0
    while done < n:
        m = min(chunk, n - done)
        s = rng.random(m)
        s = np.clip(s, 1e-16, 1 - 1e-16)
        u = 0.5 * np.log(s / (1.0 - s))
        th = rng.random(m) * 2 * math.pi
        vals = f(u, th)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) / n
    return mean, 3.0 * math.sqrt(var)


def _floor_diag_for(tol: float) -> float:
    d = 0.02
    while d > 1e-6 and (d * d) * (abs(math.log(d)) + 8.0) * 0.04 > tol / 50.0:
        d /= 2.0
    return d


def integrate_loglinear(
    integrand: LogLinearIntegrand,
    cfg: Optional[QuadConfig] = None,
    force_adaptive: bool = False,
) -> QuadResult:
    """Integrate a log-linear integrand against the FS measure."""
    cfg = cfg or QuadConfig()
    if integrand.is_radial() and not force_adaptive:
        return integrate_radial_affine(integrand.lines(), cfg)
    sing = integrand.singular_points()
    slope = integrand.growth_slopes()
    scale = integrand.offset_scale()
    U = 8.0
    while (slope * (U + 1.0) + scale + 2.0) * 2.0 * math.exp(-2.0 * U) > cfg.target_tol * 0.02:
        U += 2.0
        if U > 400.0:
            break
    U = max(U, max((abs(p[0]) for p in sing), default=0.0) + 4.0)
    tail = (slope * (U + 1.0) + scale + 2.0) * 2.0 * math.exp(-2.0 * U)
    value, err, n_cells, converged = _adaptive(
        integrand, U, cfg, sing, _floor_diag_for(cfg.target_tol)
    )
    err += tail + 1e-15 * n_cells * max(1.0, scale)
    if converged or err <= cfg.target_tol:
        return QuadResult(value, err, n_cells, "adaptive", True)
    if cfg.mc_fallback_samples:
        mc_val, mc_err = _monte_carlo(integrand, cfg)
        if mc_err < err:
            return QuadResult(mc_val, mc_err, n_cells, "monte-carlo", mc_err <= cfg.target_tol)
    return QuadResult(value, err, n_cells, "adaptive", False)


def integrate_logmax(
    coords: Sequence, cfg: Optional[QuadConfig] = None, force_adaptive: bool = False
) -> QuadResult:
    """Integral of log max_i |lambda_i(z)| over P^1(C) with the FS measure.

    Coordinates may be RatFunc, IntPoly, or rationals; they must not all be
    zero.  Monomial coordinate lists take the exact radial route; anything
    else runs the adaptive scheme (poles and root dips of individual
    coordinates are integrable log singularities and are refined to a
    depth floor before their cells are trusted).
    """
    cfg = cfg or QuadConfig()
    promoted = []
    for c in coords:
        if isinstance(c, RatFunc):
            promoted.append(c)
        elif isinstance(c, IntPoly):
            promoted.append(RatFunc.from_intpoly(c))
        else:
            promoted.append(RatFunc.from_rational(c))
    if all(c.is_zero() for c in promoted):
        raise ValueError("all coordinates are zero")
    integrand = LogLinearIntegrand.from_ratfunc_coords(promoted)
    return integrate_loglinear(integrand, cfg, force_adaptive=force_adaptive)
