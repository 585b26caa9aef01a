"""
Riemann-Roch spaces L(D) by denominator clearing.

With h a product of factors whose zeros cover the positive affine part of D,
f -> h*f identifies L(D) with the polynomials g in L(M * inf),
M = D(inf) + pole order of h, that vanish to order v_P(h) - D(P) at every
affine P. Those vanishing conditions are linear in the monomial coefficients
of g and are read off truncated local expansions.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable

import numpy as np

from .. import linalg
from .curve import INFINITY, Curve, CurvePoint, Divisor
from .functions import Factor, FunctionRep, factor_valuation, factor_weight, factor_zeros, monomial_series


def clearing_factors(curve: Curve, D: Divisor) -> list[tuple[Factor, int]]:
    """Cheapest denominator (by pole order) killing the positive affine part of D.

    Per x-fibre, either (x - a)^e with e the largest multiplicity in the fibre,
    or (Hermitian only) one tangent-line power per positive point.
    """
    by_x: dict[int, list[tuple[CurvePoint, int]]] = defaultdict(list)
    for P, m in D.support:
        if m > 0 and not P.is_infinity:
            by_x[P.x].append((P, m))
    out: list[tuple[Factor, int]] = []
    for a in sorted(by_x):
        pts = by_x[a]
        e = max(m for _, m in pts)
        cost_x = curve.x_weight * e
        if curve.is_line:
            out.append((("x", a), e))
            continue
        w = curve.q0 + 1
        cost_t = sum(w * math.ceil(m / w) for _, m in pts)
        if cost_x <= cost_t:
            out.append((("x", a), e))
        else:
            out.extend(((("tan", (P.x, P.y)), math.ceil(m / w)) for P, m in pts))
    return out


def _setup(curve: Curve, D: Divisor, extra: Iterable[tuple[Factor, int]] = ()):
    if D.curve != curve:
        raise ValueError("divisor lives on another curve")
    factors = clearing_factors(curve, D) + list(extra)
    M = D[INFINITY] + sum(e * factor_weight(curve, f) for f, e in factors)
    monos = curve.monomials(M)
    if not monos:
        return factors, monos, np.zeros((0, 0), dtype=np.int64)
    required: dict[CurvePoint, int] = {}
    candidates = {P for P, _ in D.support if not P.is_infinity}
    for f, _ in factors:
        candidates.update(factor_zeros(curve, f))
    for P in candidates:
        r = sum(e * factor_valuation(curve, f, P) for f, e in factors) - D[P]
        if r > 0:
            required[P] = r
    blocks = [monomial_series(curve, P, monos, r).T
              for P, r in sorted(required.items(), key=lambda pr: pr[0].sort_key())]
    A = np.concatenate(blocks) if blocks else np.zeros((0, len(monos)), dtype=np.int64)
    return factors, monos, A


def riemann_roch_basis(curve: Curve, D: Divisor, extra_factors: Iterable[tuple[Factor, int]] = ()) -> list[FunctionRep]:
    """A basis of L(D); all elements share one denominator."""
    if D.degree < 0:
        return []
    factors, monos, A = _setup(curve, D, extra_factors)
    if not monos:
        return []
    K = linalg.nullspace(curve.field, A, ncols=len(monos))
    return [
        FunctionRep.make(curve, {m: int(c) for m, c in zip(monos, row) if c}, factors)
        for row in K
    ]


def l_dim(curve: Curve, D: Divisor, extra_factors: Iterable[tuple[Factor, int]] = ()) -> int:
    if D.degree < 0:
        return 0
    _, monos, A = _setup(curve, D, extra_factors)
    if not monos:
        return 0
    return len(monos) - linalg.rank(curve.field, A)


def basis_data(curve: Curve, D: Divisor):
    """(denominator factors, monomials, coefficient rows) of a basis of L(D)."""
    if D.degree < 0:
        return [], [], np.zeros((0, 0), dtype=np.int64)
    factors, monos, A = _setup(curve, D)
    if not monos:
        return factors, monos, np.zeros((0, 0), dtype=np.int64)
    return factors, monos, linalg.nullspace(curve.field, A, ncols=len(monos))
