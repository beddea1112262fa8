"""Sparse multivariate polynomials over Q or Q(t).

A polynomial in the homogeneous variables x0..xn is a dict mapping
exponent tuples to nonzero coefficients (Fraction over Q, RatFunc over
Q(t)); the zero polynomial is the empty dict.  This exact representation
keeps monomial maps cheap at any degree and makes identity tests reliable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Sequence, Tuple

from .ratfunc import IntPoly, RatFunc

Exponent = Tuple[int, ...]
MPoly = Dict[Exponent, object]

__all__ = [
    "MPoly",
    "mzero",
    "mconst",
    "mvar",
    "madd",
    "mneg",
    "mmul",
    "mscale",
    "mpow",
    "meval",
    "mcompose",
    "total_degree",
    "is_homogeneous",
    "is_single_term",
    "leading_key",
    "field_zero",
    "field_one",
]


def field_zero(field: str):
    return Fraction(0) if field == "q" else RatFunc.zero()


def field_one(field: str):
    return Fraction(1) if field == "q" else RatFunc.one()


def mzero() -> MPoly:
    return {}


def mconst(nvars: int, c) -> MPoly:
    if not c:
        return {}
    return {(0,) * nvars: c}


def mvar(nvars: int, i: int, one) -> MPoly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): one}


def madd(a: MPoly, b: MPoly) -> MPoly:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k)
        s = v if s is None else s + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def mneg(a: MPoly) -> MPoly:
    return {k: -v for k, v in a.items()}


def mscale(a: MPoly, c) -> MPoly:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def mmul(a: MPoly, b: MPoly) -> MPoly:
    out: MPoly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            s = out.get(k)
            s = va * vb if s is None else s + va * vb
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def mpow(a: MPoly, k: int) -> MPoly:
    if k < 0:
        raise ValueError("negative polynomial power")
    if k == 0:
        if not a:
            raise ValueError("0**0 is undefined here")
        return mconst(len(next(iter(a))), _one_like(a))
    base = dict(a)
    result = None
    while k:
        if k & 1:
            result = dict(base) if result is None else mmul(result, base)
        k >>= 1
        if k:
            base = mmul(base, base)
    return result if result is not None else {}


def _one_like(a: MPoly):
    v = next(iter(a.values()))
    if isinstance(v, RatFunc):
        return RatFunc.one()
    return Fraction(1)


def meval(a: MPoly, values: Sequence):
    """Evaluate at field elements; exact."""
    total = None
    for k, v in a.items():
        term = v
        for x, e in zip(values, k):
            if e:
                term = term * x**e
        total = term if total is None else total + term
    if total is None:
        return None  # zero polynomial; caller supplies the right zero
    return total


def mcompose(a: MPoly, polys: Sequence[MPoly]) -> MPoly:
    """Substitute polynomials for the variables of a."""
    nvars = len(next(iter(polys[0]))) if polys and polys[0] else None
    out: MPoly = {}
    for k, v in a.items():
        term = None
        for p, e in zip(polys, k):
            if e == 0:
                continue
            q = mpow(p, e)
            term = q if term is None else mmul(term, q)
        if term is None:
            if nvars is None:
                raise ValueError("cannot infer variable count for constant term")
            term = mconst(nvars, _one_like(a))
        out = madd(out, mscale(term, v))
    return out


def total_degree(a: MPoly) -> int:
    if not a:
        return -1
    return max(sum(k) for k in a)


def is_homogeneous(a: MPoly):
    """(True, degree) when all terms share the same total degree."""
    if not a:
        return True, -1
    degs = {sum(k) for k in a}
    if len(degs) == 1:
        return True, degs.pop()
    return False, None


def is_single_term(a: MPoly) -> bool:
    return len(a) == 1


def leading_key(a: MPoly) -> Exponent:
    """Lexicographically largest exponent tuple (for sign normalization)."""
    return max(a)
