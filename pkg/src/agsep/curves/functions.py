"""
Functions on the curves as cleared-denominator fractions, and their local
power-series expansions.

A numerator is a reduced polynomial {(i, j): coeff} in x, y (j < y_bound).
A denominator is a product of factors, each ``("x", a)`` for x - a or, on the
Hermitian curve, ``("tan", (a, b))`` for the tangent line at (a, b):

    y - b - a^q0 (x - a),

which meets the curve only at (a, b), with multiplicity q0 + 1.

Local parameters: t = x - a at every affine point (dF/dy = -1 on the
Hermitian curve, so x - a is a uniformizer everywhere affine), t = 1/x at
infinity on the line. At infinity on the Hermitian curve no series is taken;
valuations use the weight rule v(x^i y^j) = -(i*q0 + j*(q0+1)).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .. import linalg
from ..gf import FieldSpec
from .curve import INFINITY, Curve, CurvePoint

Monomial = tuple[int, int]
Poly = dict[Monomial, int]
Factor = tuple[str, object]


class PrecisionError(ArithmeticError):
    """Every computed coefficient vanished; retry with more terms."""


class ZeroFunctionError(ValueError):
    pass


@functools.lru_cache(maxsize=None)
def _ops(F: FieldSpec):
    t = F.tables
    return t.add.tolist(), t.mul.tolist(), t.neg.tolist(), t.inv.tolist()


# -- polynomials -------------------------------------------------------------

def poly_clean(g: Mapping[Monomial, int]) -> Poly:
    return {m: c for m, c in g.items() if c}


def poly_add(F: FieldSpec, a: Poly, b: Poly) -> Poly:
    add = _ops(F)[0]
    out = dict(a)
    for m, c in b.items():
        out[m] = add[out.get(m, 0)][c]
    return poly_clean(out)


def poly_scale(F: FieldSpec, a: Poly, c: int) -> Poly:
    mul = _ops(F)[1]
    return poly_clean({m: mul[c][v] for m, v in a.items()})


def poly_reduce(curve: Curve, g: Poly) -> Poly:
    """Rewrite y^q0 = x^(q0+1) - y until every monomial has j < q0."""
    if curve.is_line:
        return poly_clean(g)
    F = curve.field
    add, mul, neg, _ = _ops(F)
    q0 = curve.q0
    out = dict(g)
    while True:
        high = [m for m, c in out.items() if c and m[1] >= q0]
        if not high:
            return poly_clean(out)
        i, j = max(high, key=lambda m: m[1])
        c = out.pop((i, j))
        a = (i + q0 + 1, j - q0)
        b = (i, j - q0 + 1)
        out[a] = add[out.get(a, 0)][c]
        out[b] = add[out.get(b, 0)][neg[c]]


def poly_mul(curve: Curve, a: Poly, b: Poly) -> Poly:
    add, mul, _, _ = _ops(curve.field)
    out: dict[Monomial, int] = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            m = (i1 + i2, j1 + j2)
            out[m] = add[out.get(m, 0)][mul[c1][c2]]
    return poly_reduce(curve, out)


def poly_pow(curve: Curve, a: Poly, e: int) -> Poly:
    out: Poly = {(0, 0): 1}
    base = a
    while e:
        if e & 1:
            out = poly_mul(curve, out, base)
        e >>= 1
        if e:
            base = poly_mul(curve, base, base)
    return out


def poly_weight(curve: Curve, g: Poly) -> int:
    """Pole order at infinity of a nonzero reduced polynomial."""
    if not g:
        raise ZeroFunctionError("zero polynomial has no pole order")
    return max(curve.weight(*m) for m in g)


def poly_leading(curve: Curve, g: Poly) -> tuple[Monomial, int]:
    m = max(g, key=lambda mm: curve.weight(*mm))
    return m, g[m]


def poly_eval(curve: Curve, g: Poly, P: CurvePoint) -> int:
    F = curve.field
    add, mul, _, _ = _ops(F)
    acc = 0
    for (i, j), c in g.items():
        v = mul[c][F.pow(P.x, i)]
        if j:
            v = mul[v][F.pow(P.y, j)]
        acc = add[acc][v]
    return acc


# -- denominator factors -----------------------------------------------------

def factor_poly(curve: Curve, fac: Factor) -> Poly:
    F = curve.field
    kind, data = fac
    if kind == "x":
        return poly_clean({(1, 0): 1, (0, 0): F.neg(data)})
    if kind == "tan":
        if curve.is_line:
            raise ValueError("tangent factors exist on the Hermitian curve only")
        a, b = data
        aq = F.pow(a, curve.q0)
        const = F.sub(F.pow(a, curve.q0 + 1), b)
        return poly_clean({(0, 1): 1, (1, 0): F.neg(aq), (0, 0): const})
    raise ValueError(f"unknown factor {fac!r}")


def factor_weight(curve: Curve, fac: Factor) -> int:
    return curve.x_weight if fac[0] == "x" else curve.q0 + 1


def factor_valuation(curve: Curve, fac: Factor, P: CurvePoint) -> int:
    kind, data = fac
    if P.is_infinity:
        return -factor_weight(curve, fac)
    if kind == "x":
        return 1 if P.x == data else 0
    return curve.q0 + 1 if (P.x, P.y) == tuple(data) else 0


def factor_zeros(curve: Curve, fac: Factor) -> tuple[CurvePoint, ...]:
    kind, data = fac
    if kind == "x":
        return curve.fiber(data)
    return (CurvePoint(*data),)


# -- truncated power series (Python lists of encodings) ----------------------

def ser_mul(F: FieldSpec, a: list[int], b: list[int], N: int) -> list[int]:
    add, mul, _, _ = _ops(F)
    out = [0] * N
    for i, x in enumerate(a[:N]):
        if x:
            mx = mul[x]
            for j in range(min(len(b), N - i)):
                y = b[j]
                if y:
                    out[i + j] = add[out[i + j]][mx[y]]
    return out


def ser_inv(F: FieldSpec, a: list[int], N: int) -> list[int]:
    add, mul, neg, inv = _ops(F)
    if not a or a[0] == 0:
        raise ZeroDivisionError("series is not a unit")
    i0 = inv[a[0]]
    out = [0] * N
    out[0] = i0
    for k in range(1, N):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            if a[j] and out[k - j]:
                acc = add[acc][mul[a[j]][out[k - j]]]
        out[k] = mul[neg[acc]][i0]
    return out


def ser_pow(F: FieldSpec, a: list[int], e: int, N: int) -> list[int]:
    out = [1] + [0] * (N - 1)
    base = list(a[:N]) + [0] * max(0, N - len(a))
    while e:
        if e & 1:
            out = ser_mul(F, out, base, N)
        e >>= 1
        if e:
            base = ser_mul(F, base, base, N)
    return out


@functools.lru_cache(maxsize=4096)
def local_xy(curve: Curve, P: CurvePoint, N: int) -> tuple[tuple[int, ...], tuple[int, ...] | None]:
    """Series of x and y at affine P in t = x - a, to N terms.

    On the Hermitian curve y = b + s with s^q0 + s = R(t), where
    R = (a+t)^(q0+1) - a^(q0+1) = a^q0 t + a t^q0 + t^(q0+1). Newton's step has
    derivative 1 in characteristic p, i.e. s <- R - s^q0, and s^q0 is a
    coefficientwise Frobenius twist spread by q0.
    """
    if P.is_infinity:
        raise ValueError("no affine series at infinity")
    F = curve.field
    a = P.x
    xs = [a, 1] + [0] * max(0, N - 2)
    xs = tuple(xs[:N])
    if curve.is_line:
        return xs, None
    q0 = curve.q0
    R = [0] * N
    for k, c in ((1, F.pow(a, q0)), (q0, a), (q0 + 1, 1)):
        if k < N:
            R[k] = F.add(R[k], c)
    s = [0] * N
    while True:
        frob = [0] * N
        for k, c in enumerate(s):
            if c and k * q0 < N:
                frob[k * q0] = F.pow(c, q0)
        nxt = [F.sub(r, f) for r, f in zip(R, frob)]
        if nxt == s:
            break
        s = nxt
    ys = list(s)
    ys[0] = F.add(ys[0], P.y)
    return xs, tuple(ys)


def monomial_series(curve: Curve, P: CurvePoint, monos: list[Monomial], N: int) -> np.ndarray:
    """Matrix whose row r holds the first N coefficients of monos[r] at P."""
    F = curve.field
    t = F.tables
    out = np.zeros((len(monos), N), dtype=np.int64)
    if not monos or N == 0:
        return out
    xs, ys = local_xy(curve, P, N)
    imax = max(i for i, _ in monos)
    XP = np.zeros((imax + 1, N), dtype=np.int64)
    XP[0, 0] = 1
    a = P.x
    for i in range(1, imax + 1):
        XP[i] = t.mul[a, XP[i - 1]]
        XP[i, 1:] = t.add[XP[i, 1:], XP[i - 1, :-1]]
    YP = [[1] + [0] * (N - 1)]
    for _ in range(1, curve.y_bound):
        YP.append(ser_mul(F, YP[-1], list(ys), N))
    I = np.array([m[0] for m in monos])
    J = np.array([m[1] for m in monos])
    for j in range(curve.y_bound):
        sel = np.flatnonzero(J == j)
        if sel.size == 0:
            continue
        rows = XP[I[sel]]
        acc = np.zeros_like(rows)
        for w, c in enumerate(YP[j]):
            if c:
                acc[:, w:] = t.add[acc[:, w:], t.mul[c, rows[:, :N - w]]]
        out[sel] = acc
    return out


def poly_series(curve: Curve, g: Poly, P: CurvePoint, N: int) -> list[int]:
    if not g:
        return [0] * N
    monos = list(g)
    coeffs = np.array([g[m] for m in monos], dtype=np.int64)
    S = monomial_series(curve, P, monos, N)
    return linalg.matmul(curve.field, coeffs[None, :], S)[0].tolist()


def factor_series(curve: Curve, fac: Factor, P: CurvePoint, N: int) -> list[int]:
    return poly_series(curve, factor_poly(curve, fac), P, N)


# -- functions ---------------------------------------------------------------

def _freeze_poly(g: Mapping[Monomial, int]) -> tuple[tuple[Monomial, int], ...]:
    return tuple(sorted((m, int(c)) for m, c in g.items() if c))


def _merge_den(*dens: Iterable[tuple[Factor, int]]) -> tuple[tuple[Factor, int], ...]:
    acc: dict[Factor, int] = {}
    for den in dens:
        for fac, e in den:
            acc[fac] = acc.get(fac, 0) + e
    return tuple(sorted((f, e) for f, e in acc.items() if e))


@dataclass(frozen=True)
class FunctionRep:
    """numerator / prod(factor^e) on ``curve``."""

    curve: Curve
    num: tuple[tuple[Monomial, int], ...]
    den: tuple[tuple[Factor, int], ...] = ()

    @classmethod
    def make(cls, curve: Curve, num: Mapping[Monomial, int], den: Iterable[tuple[Factor, int]] = ()) -> "FunctionRep":
        den = _merge_den(den)
        if any(e < 0 for _, e in den):
            raise ValueError("denominator exponents must be positive")
        return cls(curve, _freeze_poly(poly_reduce(curve, dict(num))), den)

    @classmethod
    def constant(cls, curve: Curve, c: int) -> "FunctionRep":
        return cls.make(curve, {(0, 0): c})

    @classmethod
    def x(cls, curve: Curve) -> "FunctionRep":
        return cls.make(curve, {(1, 0): 1})

    @classmethod
    def y(cls, curve: Curve) -> "FunctionRep":
        if curve.is_line:
            raise ValueError("the line has no y")
        return cls.make(curve, {(0, 1): 1})

    @classmethod
    def from_factors(cls, curve: Curve, const: int, num: Iterable[tuple[Factor, int]] = (),
                     den: Iterable[tuple[Factor, int]] = ()) -> "FunctionRep":
        g: Poly = {(0, 0): const}
        for fac, e in num:
            g = poly_mul(curve, g, poly_pow(curve, factor_poly(curve, fac), e))
        return cls.make(curve, g, den)

    @property
    def numerator(self) -> Poly:
        return dict(self.num)

    def den_poly(self) -> Poly:
        h: Poly = {(0, 0): 1}
        for fac, e in self.den:
            h = poly_mul(self.curve, h, poly_pow(self.curve, factor_poly(self.curve, fac), e))
        return h

    def den_weight(self) -> int:
        return sum(e * factor_weight(self.curve, fac) for fac, e in self.den)

    def is_zero(self) -> bool:
        return not self.num

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return FunctionRep.make(self.curve, poly_scale(self.curve.field, self.numerator, int(other)), self.den)
        if other.curve != self.curve:
            raise ValueError("functions on different curves")
        g = poly_mul(self.curve, self.numerator, other.numerator)
        return FunctionRep.make(self.curve, g, _merge_den(self.den, other.den))

    __rmul__ = __mul__

    def _common(self, other: "FunctionRep") -> tuple[Poly, Poly, tuple]:
        a, b = dict(self.den), dict(other.den)
        common = {f: max(a.get(f, 0), b.get(f, 0)) for f in set(a) | set(b)}
        ga, gb = self.numerator, other.numerator
        for f, e in common.items():
            fp = factor_poly(self.curve, f)
            if e > a.get(f, 0):
                ga = poly_mul(self.curve, ga, poly_pow(self.curve, fp, e - a.get(f, 0)))
            if e > b.get(f, 0):
                gb = poly_mul(self.curve, gb, poly_pow(self.curve, fp, e - b.get(f, 0)))
        return ga, gb, tuple(common.items())

    def __add__(self, other: "FunctionRep") -> "FunctionRep":
        ga, gb, den = self._common(other)
        return FunctionRep.make(self.curve, poly_add(self.curve.field, ga, gb), den)

    def __neg__(self) -> "FunctionRep":
        return self * self.curve.field.neg(1)

    def __sub__(self, other: "FunctionRep") -> "FunctionRep":
        return self + (-other)

    def equals(self, other: "FunctionRep") -> bool:
        """Equality in the function field (cross-multiplied numerators)."""
        ga, gb, _ = self._common(other)
        return ga == gb

    def to_json(self) -> dict:
        """Numerator as [i, j, coeff] triples; factors as ["x", a] or ["tan", [a, b]]."""
        den = [[kind, list(arg) if kind == "tan" else arg, e] for (kind, arg), e in self.den]
        return {"numerator": [[i, j, c] for (i, j), c in self.num], "denominator": den}

    def __repr__(self) -> str:
        num = " + ".join(f"{c}*x^{i}y^{j}" for (i, j), c in self.num) or "0"
        den = "*".join(f"{f}^{e}" for f, e in self.den)
        return f"({num})" + (f"/({den})" if den else "")


@dataclass(frozen=True)
class SeriesExpansion:
    """f = sum coeffs[i] t^(valuation+i) + O(t^(valuation+precision))."""

    point: CurvePoint
    parameter: str
    valuation: int
    coeffs: tuple[int, ...]

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def coefficient(self, order: int) -> int:
        i = order - self.valuation
        if i < 0:
            return 0
        if i >= len(self.coeffs):
            raise PrecisionError(f"order {order} beyond computed precision")
        return self.coeffs[i]


def _den_series(f: FunctionRep, P: CurvePoint, N: int) -> tuple[int, list[int]]:
    """(order of the denominator at P, first N terms of its unit part)."""
    F = f.curve.field
    e_h = sum(e * factor_valuation(f.curve, fac, P) for fac, e in f.den)
    u = [1] + [0] * (N - 1)
    for fac, e in f.den:
        v = factor_valuation(f.curve, fac, P)
        s = factor_series(f.curve, fac, P, N + v)[v:]
        u = ser_mul(F, u, ser_pow(F, s, e, N), N)
    return e_h, u


def laurent(f: FunctionRep, P: CurvePoint, N: int) -> tuple[int, list[int]]:
    """Raw Laurent coefficients of f at P: (start order, N coefficients).

    The start order is minus the pole order of the denominator, so the list
    may begin with zeros.
    """
    curve = f.curve
    F = curve.field
    if P.is_infinity:
        if not curve.is_line:
            raise ValueError("no series at infinity on the Hermitian curve; use valuation()")
        g = f.numerator
        if not g:
            return 0, [0] * N
        dg = max(i for i, _ in g)
        rev = [0] * (dg + 1)
        for (i, _), c in g.items():
            rev[dg - i] = c
        u = [1] + [0] * (N - 1)
        E = 0
        for (_, a), e in f.den:
            E += e
            u = ser_mul(F, u, ser_pow(F, [1, F.neg(a)], e, N), N)
        return E - dg, ser_mul(F, rev, ser_inv(F, u, N), N)
    e_h, u = _den_series(f, P, N)
    g = poly_series(curve, f.numerator, P, N)
    return -e_h, ser_mul(F, g, ser_inv(F, u, N), N)


def _poly_valuation(curve: Curve, g: Poly, P: CurvePoint) -> int:
    cap = poly_weight(curve, g) + 1
    N = min(8, cap)
    while True:
        s = poly_series(curve, g, P, N)
        for k, c in enumerate(s):
            if c:
                return k
        if N >= cap:
            raise AssertionError("nonzero function vanishes beyond its zero count")
        N = min(2 * N, cap)


def valuation(f: FunctionRep, P: CurvePoint) -> int:
    if f.is_zero():
        raise ZeroFunctionError("the zero function has no valuation")
    curve = f.curve
    if P.is_infinity:
        return f.den_weight() - poly_weight(curve, f.numerator)
    e_h = sum(e * factor_valuation(curve, fac, P) for fac, e in f.den)
    return _poly_valuation(curve, f.numerator, P) - e_h


def local_expansion(f: FunctionRep, P: CurvePoint, precision: int, retry: bool = True) -> SeriesExpansion:
    """``precision`` significant terms of f at P, starting at its valuation.

    Terms are first computed from the denominator's pole order; if they all
    vanish, the window is doubled (``retry``) or PrecisionError is raised.
    """
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if f.is_zero():
        raise ZeroFunctionError("the zero function has no expansion")
    param = "1/x" if P.is_infinity else "x-a"
    N = precision + 4
    while True:
        start, coeffs = laurent(f, P, N)
        nz = next((k for k, c in enumerate(coeffs) if c), None)
        if nz is not None:
            if N - nz < precision:
                start, coeffs = laurent(f, P, nz + precision)
            return SeriesExpansion(P, param, start + nz, tuple(coeffs[nz:nz + precision]))
        if not retry:
            raise PrecisionError(f"all {N} coefficients vanish at {P!r}")
        N *= 2


def divisor_of(f: FunctionRep) -> dict[CurvePoint, int]:
    """Valuations of f at every rational point (nonzero entries only)."""
    out = {}
    for P in f.curve.points:
        v = valuation(f, P)
        if v:
            out[P] = v
    return out


def evaluate(f: FunctionRep, P: CurvePoint) -> int:
    """f(P) for f regular at P."""
    if P.is_infinity:
        v = valuation(f, P)
        if v < 0:
            raise ValueError("pole at infinity")
        if v > 0:
            return 0
        g = f.numerator
        return poly_leading(f.curve, g)[1]
    start, coeffs = laurent(f, P, 1 + sum(e * factor_valuation(f.curve, fac, P) for fac, e in f.den))
    if any(coeffs[: -start]):
        raise ValueError(f"pole at {P!r}")
    return coeffs[-start]


__all__ = [
    "FunctionRep", "SeriesExpansion", "PrecisionError", "ZeroFunctionError",
    "local_expansion", "valuation", "laurent", "divisor_of", "evaluate",
    "monomial_series", "local_xy", "poly_mul", "poly_add", "poly_reduce",
    "factor_poly", "factor_valuation", "factor_zeros", "INFINITY",
]
