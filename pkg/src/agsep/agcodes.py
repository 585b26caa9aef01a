"""
Generalized Goppa evaluation codes and the divisor searches that make them
intersecting.

C(G, D) is the image of L(D) under f -> ((t_i^v_i f)(P_i))_i with
v_i = v_{P_i}(D), so the supports of G and D may overlap. Local parameters
are the ones fixed in ``curves.functions``; at infinity on the Hermitian curve
the parameter is x/y, whose twisted value is the coefficient of the monomial
of exactly the allowed pole order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .codes import Code
from .curves import Curve, CurvePoint, Divisor, FunctionRep, l_dim, laurent, valuation
from .curves.functions import _den_series, monomial_series, poly_leading, ser_inv
from .curves.riemann_roch import basis_data

log = logging.getLogger(__name__)


class NotInSpaceError(ValueError):
    """The function has a pole exceeding what D allows at some P_i."""


class LemmaExhausted(RuntimeError):
    """No candidate point worked; the counting bound says this cannot happen."""


@dataclass(frozen=True)
class EvalCodeSpec:
    curve: Curve
    points: tuple[CurvePoint, ...]
    D: Divisor

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("G must be a sum of distinct points")
        for P in self.points:
            if not self.curve.contains(P):
                raise ValueError(f"{P!r} is not on {self.curve!r}")
        if self.D.curve != self.curve:
            raise ValueError("D lives on another curve")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def G(self) -> Divisor:
        return Divisor.sum_of(self.curve, self.points)

    def with_divisor(self, D: Divisor) -> "EvalCodeSpec":
        return EvalCodeSpec(self.curve, self.points, D)


def first_points(curve: Curve, n: int) -> tuple[CurvePoint, ...]:
    if not 0 < n <= len(curve.points):
        raise ValueError(f"n={n} outside 1..{len(curve.points)}")
    return curve.points[:n]


# -- evaluation ----------------------------------------------------------------

def evaluate_phi(spec: EvalCodeSpec, f: FunctionRep) -> np.ndarray:
    """The twisted evaluation word of f; raises NotInSpaceError if f is not in L(D) at G."""
    out = np.zeros(spec.n, dtype=np.int64)
    if f.is_zero():
        return out
    for idx, P in enumerate(spec.points):
        v = spec.D[P]
        if P.is_infinity:
            vf = valuation(f, P)
            if vf < -v:
                raise NotInSpaceError(f"valuation {vf} < {-v} at {P!r}")
            out[idx] = poly_leading(f.curve, f.numerator)[1] if vf == -v else 0
            continue
        start = laurent(f, P, 1)[0]
        target = -v
        if target < start:
            continue
        _, coeffs = laurent(f, P, target - start + 1)
        if any(coeffs[:-1]):
            raise NotInSpaceError(f"pole beyond order {v} at {P!r}")
        out[idx] = coeffs[-1]
    return out


def evaluation_matrix(spec: EvalCodeSpec, factors, monos) -> np.ndarray:
    """W with (coefficients of g) @ W = evaluate_phi(g / h) for h = prod(factors)."""
    curve = spec.curve
    F = curve.field
    probe = FunctionRep.make(curve, {(0, 0): 1}, factors)
    w_h = probe.den_weight()
    W = np.zeros((len(monos), spec.n), dtype=np.int64)
    for idx, P in enumerate(spec.points):
        v = spec.D[P]
        if P.is_infinity:
            target = v + w_h
            for r, m in enumerate(monos):
                if curve.weight(*m) == target:
                    W[r, idx] = 1
            continue
        e_h, u = _den_series(probe, P, 1)
        k = e_h - v
        if k < 0:
            continue
        e_h, u = _den_series(probe, P, k + 1)
        uinv = ser_inv(F, u, k + 1)
        S = monomial_series(curve, P, monos, k + 1)
        W[:, idx] = linalg.matmul(F, S, np.array(uinv[::-1], dtype=np.int64))
    return W


def build_code(spec: EvalCodeSpec) -> Code:
    """Generator matrix of C(G, D): images of a basis of L(D), kernel L(D - G) removed."""
    F = spec.curve.field
    factors, monos, K = basis_data(spec.curve, spec.D)
    if len(K) == 0:
        return Code.linear(F, np.zeros((0, spec.n), dtype=np.int64), n=spec.n)
    images = linalg.matmul(F, K, evaluation_matrix(spec, factors, monos))
    R, _ = linalg.rref(F, images)
    return Code.linear(F, R, n=spec.n)


def product_compat_check(spec: EvalCodeSpec, spec2: EvalCodeSpec, f: FunctionRep, f2: FunctionRep) -> bool:
    """phi_D(f) * phi_D'(f') == phi_{D+D'}(f f') coordinatewise."""
    if spec.curve != spec2.curve or spec.points != spec2.points:
        raise ValueError("specs must share the curve and G")
    F = spec.curve.field
    lhs = F.tables.mul[evaluate_phi(spec, f), evaluate_phi(spec2, f2)]
    rhs = evaluate_phi(spec.with_divisor(spec.D + spec2.D), f * f2)
    return bool(np.array_equal(lhs, rhs))


# -- certification ---------------------------------------------------------------

@dataclass
class XingCertificate:
    certified: bool
    l2DG: int
    degD: int
    deg2DG: int
    n: int

    def to_json(self) -> dict:
        return {"certified": self.certified, "l2DG": self.l2DG, "degD": self.degD,
                "deg2DG": self.deg2DG, "n": self.n}


def xing_check(spec: EvalCodeSpec) -> XingCertificate:
    """l(2D - G) == 0 with deg D < n certifies C(G, D) intersecting."""
    if spec.D.degree >= spec.n:
        raise ValueError(f"deg(D) = {spec.D.degree} must be below n = {spec.n}")
    A = 2 * spec.D - spec.G
    l = l_dim(spec.curve, A)
    return XingCertificate(l == 0, l, spec.D.degree, A.degree, spec.n)


# -- point searches --------------------------------------------------------------

def _scan(curve: Curve, A: Divisor, mult: int, candidates, workers: int, first_only: bool):
    pts = list(curve.points if candidates is None else candidates)

    def bad(P):
        return l_dim(curve, A + Divisor.point(curve, P, mult)) > 0

    if first_only and workers <= 1:
        for P in pts:
            if not bad(P):
                return [P]
        return []
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            flags = list(pool.map(bad, pts))
    else:
        flags = [bad(P) for P in pts]
    if first_only:
        return [P for P, b in zip(pts, flags) if not b][:1]
    return [P for P, b in zip(pts, flags) if b]


def _require_free(curve: Curve, A: Divisor, max_deg: int) -> None:
    if A.degree > max_deg:
        raise ValueError(f"deg(A) = {A.degree} exceeds {max_deg}")
    if l_dim(curve, A) != 0:
        raise ValueError("l(A) must be 0")


def find_point_simple(curve: Curve, A: Divisor, candidates: Sequence[CurvePoint] | None = None,
                      workers: int = 1) -> CurvePoint:
    """First point P (canonical order) with l(A + P) = 0; at most g points fail."""
    _require_free(curve, A, curve.genus - 2)
    hit = _scan(curve, A, 1, candidates, workers, True)
    if not hit:
        raise LemmaExhausted("no point P with l(A+P) = 0 among the candidates")
    return hit[0]


def find_point_double(curve: Curve, A: Divisor, candidates: Sequence[CurvePoint] | None = None,
                      workers: int = 1) -> CurvePoint:
    """First point P (canonical order) with l(A + 2P) = 0; at most 4g points fail."""
    _require_free(curve, A, curve.genus - 3)
    hit = _scan(curve, A, 2, candidates, workers, True)
    if not hit:
        raise LemmaExhausted("no point P with l(A+2P) = 0 among the candidates")
    return hit[0]


def bad_points(curve: Curve, A: Divisor, mode: str = "single", workers: int = 1) -> list[CurvePoint]:
    if mode == "single":
        _require_free(curve, A, curve.genus - 2)
        return _scan(curve, A, 1, None, workers, False)
    if mode == "double":
        _require_free(curve, A, curve.genus - 3)
        return _scan(curve, A, 2, None, workers, False)
    raise ValueError(f"unknown mode {mode!r}")


def count_bad_points(curve: Curve, A: Divisor, mode: str = "single", workers: int = 1) -> int:
    return len(bad_points(curve, A, mode, workers))


# -- constructions ---------------------------------------------------------------

@dataclass
class PairResult:
    C: Code
    C_prime: Code
    D: Divisor
    D_prime: Divisor
    spec: EvalCodeSpec
    spec_prime: EvalCodeSpec
    trail: list[CurvePoint] = field(default_factory=list)


def construct_pair(curve: Curve, points: Sequence[CurvePoint], m: int, D: Divisor | None = None) -> PairResult:
    """Mutually intersecting C(G, D), C(G, D') with deg D = m, deg D' = n + g - 1 - m."""
    points = tuple(points)
    n, g = len(points), curve.genus
    if not n > g:
        raise ValueError(f"need n > g (n={n}, g={g})")
    if not g <= m < n:
        raise ValueError(f"need g <= m < n (m={m})")
    P0 = curve.points[0]
    if D is None:
        D = Divisor.point(curve, P0, m)
    elif D.degree != m:
        raise ValueError("deg(D) must equal m")
    G = Divisor.sum_of(curve, points)
    Dp = Divisor.point(curve, P0, n - 1 - m)
    trail = []
    for _ in range(g):
        P = find_point_simple(curve, D + Dp - G)
        trail.append(P)
        Dp = Dp + Divisor.point(curve, P)
    assert l_dim(curve, D + Dp - G) == 0
    spec = EvalCodeSpec(curve, points, D)
    spec_p = EvalCodeSpec(curve, points, Dp)
    return PairResult(build_code(spec), build_code(spec_p), D, Dp, spec, spec_p, trail)


def main_divisor_search(curve: Curve, points: Sequence[CurvePoint], workers: int = 1) -> Divisor:
    """D with deg D = floor((n+g-1)/2) and l(2D - G) = 0, one double-point step at a time."""
    n, g = len(points), curve.genus
    if not len(curve.points) > 4 * g:
        raise ValueError(f"need more than 4g = {4 * g} rational points")
    G = Divisor.sum_of(curve, points)
    P0 = curve.points[0]
    D = Divisor.point(curve, P0, (n - 1) // 2)
    steps = (n + g - 1) // 2 - (n - 1) // 2
    for i in range(steps):
        P = find_point_double(curve, 2 * D - G, workers=workers)
        log.info("step %d/%d: adding %r", i + 1, steps, P)
        D = D + Divisor.point(curve, P)
    return D


@dataclass
class IntersectingResult:
    code: Code
    spec: EvalCodeSpec
    certificate: XingCertificate

    @property
    def D(self) -> Divisor:
        return self.spec.D


def build_intersecting(curve: Curve, n: int | None = None, workers: int = 1) -> IntersectingResult:
    """Length-n intersecting code of dimension >= floor((n+g-1)/2) + 1 - g.

    ``n=None`` takes every rational point.
    """
    g = curve.genus
    n = len(curve.points) if n is None else n
    if not len(curve.points) > 4 * g:
        raise ValueError(f"need more than 4g = {4 * g} rational points")
    if not g < n <= len(curve.points):
        raise ValueError(f"need g < n <= {len(curve.points)}")
    points = first_points(curve, n)
    D = main_divisor_search(curve, points, workers)
    spec = EvalCodeSpec(curve, points, D)
    cert = xing_check(spec)
    code = build_code(spec)
    return IntersectingResult(code, spec, cert)


def random_admissible(curve: Curve, rng, max_degree: int, min_degree: int = -4, tries: int = 1000) -> Divisor:
    """Random A with min_degree <= deg A <= max_degree and l(A) = 0 (rejection sampling)."""
    from .curves import random_divisor

    for _ in range(tries):
        A = random_divisor(curve, rng, rng.randint(min_degree, max_degree))
        if l_dim(curve, A) == 0:
            return A
    raise RuntimeError("could not sample an admissible divisor")
