"""Complex roots of integer polynomials with residual error bounds.

Horizontal place weights need all complex roots of a primitive integer
polynomial with multiplicity.  The pipeline is: strip the root at 0
exactly, split into exact squarefree factors (Yun over Q), then run
simultaneous Aberth iteration on each squarefree factor in double
precision.  Each approximate root carries the classical residual bound
deg * |p(z)| / |p'(z)|; if the certified total is worse than the target,
the factor is re-solved with mpmath at higher precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .ratfunc import IntPoly, squarefree_decomposition

__all__ = ["RootCluster", "PolyRoots", "complex_roots"]

DEFAULT_TARGET = 1e-12
_ABERTH_MAX_ITER = 400


@dataclass(frozen=True)
class RootCluster:
    value: complex
    multiplicity: int
    error: float


@dataclass(frozen=True)
class PolyRoots:
    clusters: tuple
    total_error: float  # sum of multiplicity-weighted root error bounds


def _scaled_float_coeffs(p: IntPoly):
    """Float coefficients of p / 2**shift, safe for huge integer inputs."""
    bits = max(abs(c).bit_length() for c in p.coeffs)
    shift = max(0, bits - 900)
    return [float(c >> shift) if shift else float(c) for c in p.coeffs]


def _aberth(coeffs):
    """Roots of a squarefree float polynomial, with residual bounds."""
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex), np.zeros(0)
    if n == 1:
        root = np.array([-c[0] / c[1]], dtype=complex)
        return root, np.array([abs(np.polyval(c[::-1], root[0])) / max(abs(c[1]), 1e-300)])
    # Cauchy bound initial circle with irrational twist so symmetric
    # configurations do not lock the iteration
    radius = 1.0 + max(abs(c[:-1] / c[-1]))
    angles = 2 * np.pi * np.arange(n) / n + 0.39996
    z = radius * 0.7 * np.exp(1j * angles)
    dc = c[1:] * np.arange(1, n + 1)
    rev = c[::-1]
    drev = dc[::-1]
    for _ in range(_ABERTH_MAX_ITER):
        p = np.polyval(rev, z)
        dp = np.polyval(drev, z)
        dp = np.where(np.abs(dp) < 1e-290, 1e-290, dp)
        newton = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * s
        denom = np.where(np.abs(denom) < 1e-290, 1e-290, denom)
        step = newton / denom
        z = z - step
        if np.max(np.abs(step)) < 1e-15 * (1.0 + np.max(np.abs(z))):
            break
    p = np.polyval(rev, z)
    dp = np.polyval(drev, z)
    bounds = n * np.abs(p) / np.maximum(np.abs(dp), 1e-290)
    return z, bounds


def _mpmath_roots(p: IntPoly):
    import mpmath as mp

    with mp.workdps(60):
        coeffs = [mp.mpf(c) for c in reversed(p.coeffs)]
        roots, err = mp.polyroots(coeffs, maxsteps=200, extraprec=200, error=True)
        return [complex(r) for r in roots], float(err)


def complex_roots(p: IntPoly, target: float = DEFAULT_TARGET) -> PolyRoots:
    """All complex roots of p with multiplicities and certified-style bounds."""
    if not p:
        raise ValueError("zero polynomial has no root set")
    clusters = []
    total = 0.0
    k = p.trailing_zeros()
    if k:
        clusters.append(RootCluster(0j, k, 0.0))
        p = IntPoly(p.coeffs[k:])
    if p.degree >= 1:
        for factor, mult in squarefree_decomposition(p):
            roots, bounds = _aberth(_scaled_float_coeffs(factor))
            if bounds.size and float(np.sum(bounds)) > max(target, 1e-13) * 10:
                vals, err = _mpmath_roots(factor)
                roots = np.asarray(vals)
                bounds = np.full(len(vals), err)
            for r, b in zip(roots, bounds):
                clusters.append(RootCluster(complex(r), mult, float(b)))
                total += mult * float(b)
    return PolyRoots(tuple(clusters), total)
