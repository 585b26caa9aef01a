"""Explicit curves, their rational points, and divisors supported on them."""

from __future__ import annotations

import functools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ..gf import FieldError, FieldSpec, field_new, prime_power


@dataclass(frozen=True, order=False)
class CurvePoint:
    """A rational point. ``x is None`` marks the point at infinity; on the
    projective line ``y`` is always None."""

    x: int | None
    y: int | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def sort_key(self) -> tuple:
        if self.x is None:
            return (1, 0, 0)
        return (0, self.x, -1 if self.y is None else self.y)

    def to_json(self):
        if self.x is None:
            return "inf"
        return [self.x] if self.y is None else [self.x, self.y]

    @classmethod
    def from_json(cls, obj) -> "CurvePoint":
        if obj == "inf":
            return INFINITY
        if isinstance(obj, list) and len(obj) in (1, 2) and all(isinstance(v, int) for v in obj):
            return cls(*obj)
        raise ValueError(f"bad point {obj!r}")

    def __repr__(self) -> str:
        if self.x is None:
            return "P(inf)"
        return f"P({self.x})" if self.y is None else f"P({self.x},{self.y})"


INFINITY = CurvePoint(None)


@dataclass(frozen=True)
class Curve:
    """Either the projective line over ``field`` or the Hermitian curve
    y^q0 + y = x^(q0+1) over GF(q0^2)."""

    kind: str
    field: FieldSpec
    q0: int = 1

    def __post_init__(self):
        if self.kind == "line":
            if self.q0 != 1:
                raise ValueError("the projective line carries no q0")
        elif self.kind == "hermitian":
            if self.field.q != self.q0 ** 2:
                raise ValueError(f"Hermitian curve with q0={self.q0} needs GF({self.q0 ** 2})")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @property
    def is_line(self) -> bool:
        return self.kind == "line"

    @property
    def genus(self) -> int:
        return 0 if self.is_line else self.q0 * (self.q0 - 1) // 2

    @property
    def x_weight(self) -> int:
        """Pole order of x at infinity."""
        return 1 if self.is_line else self.q0

    @property
    def y_weight(self) -> int:
        return 0 if self.is_line else self.q0 + 1

    @property
    def y_bound(self) -> int:
        """Reduced monomials x^i y^j have j < y_bound."""
        return 1 if self.is_line else self.q0

    def weight(self, i: int, j: int) -> int:
        return i * self.x_weight + j * self.y_weight

    def monomials(self, M: int) -> list[tuple[int, int]]:
        """Basis monomials of L(M * inf), ordered by pole order at infinity."""
        if M < 0:
            return []
        out = [(i, j) for j in range(self.y_bound)
               for i in range((M - j * self.y_weight) // self.x_weight + 1)
               if j * self.y_weight <= M]
        return sorted(out, key=lambda m: self.weight(*m))

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        q = self.field.q
        if self.is_line:
            return P.y is None and 0 <= P.x < q
        if P.y is None or not (0 <= P.x < q and 0 <= P.y < q):
            return False
        F = self.field
        return F.add(F.pow(P.y, self.q0), P.y) == F.pow(P.x, self.q0 + 1)

    @functools.cached_property
    def points(self) -> tuple[CurvePoint, ...]:
        return _points(self)

    @functools.cached_property
    def point_index(self) -> dict[CurvePoint, int]:
        return {P: i for i, P in enumerate(self.points)}

    @property
    def affine_points(self) -> tuple[CurvePoint, ...]:
        return self.points[:-1]

    @functools.cached_property
    def _fibers(self) -> dict[int, tuple[CurvePoint, ...]]:
        out: dict[int, list[CurvePoint]] = defaultdict(list)
        for P in self.affine_points:
            out[P.x].append(P)
        return {a: tuple(v) for a, v in out.items()}

    def fiber(self, a: int) -> tuple[CurvePoint, ...]:
        """Affine points with x-coordinate a (the zeros of x - a)."""
        return self._fibers.get(a, ())

    def describe(self) -> dict:
        out = {"kind": "p1" if self.is_line else "hermitian", "p": self.field.p, "k": self.field.k}
        if not self.is_line:
            out["q0"] = self.q0
        return out

    def __repr__(self) -> str:
        if self.is_line:
            return f"P1/{self.field!r}"
        return f"Hermitian(q0={self.q0})/{self.field!r}"


def _points(curve: Curve) -> tuple[CurvePoint, ...]:
    F = curve.field
    q = F.q
    if curve.is_line:
        return tuple(CurvePoint(a) for a in range(q)) + (INFINITY,)
    t = F.tables
    vals = np.arange(q)
    lhs = t.add[np.array([F.pow(int(b), curve.q0) for b in vals]), vals]
    rhs = np.array([F.pow(int(a), curve.q0 + 1) for a in vals])
    pts = [CurvePoint(int(a), int(b)) for a in vals for b in vals if lhs[b] == rhs[a]]
    expected = curve.q0 ** 3
    if len(pts) != expected:
        raise AssertionError(f"{curve!r} has {len(pts)} affine points, expected {expected}")
    return tuple(pts) + (INFINITY,)


def projective_line(field: FieldSpec) -> Curve:
    return Curve("line", field)


def hermitian(q0: int) -> Curve:
    pk = prime_power(q0)
    if pk is None:
        raise FieldError(f"q0={q0} is not a prime power")
    p, e = pk
    return Curve("hermitian", field_new(p, 2 * e), q0)


def curve_from_json(obj: Mapping) -> Curve:
    kind = obj.get("kind")
    if kind in ("p1", "line"):
        return projective_line(field_new(int(obj["p"]), int(obj.get("k", 1))))
    if kind == "hermitian":
        F = field_new(int(obj["p"]), int(obj["k"]))
        q0 = int(obj.get("q0", round(F.q ** 0.5)))
        return Curve("hermitian", F, q0)
    raise ValueError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class Divisor:
    """A finite integer combination of rational points on ``curve``."""

    curve: Curve
    support: tuple[tuple[CurvePoint, int], ...] = ()

    @classmethod
    def of(cls, curve: Curve, terms: Mapping[CurvePoint, int] | Iterable[tuple[CurvePoint, int]] = ()) -> "Divisor":
        acc: dict[CurvePoint, int] = defaultdict(int)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for P, m in items:
            if not curve.contains(P):
                raise ValueError(f"{P!r} is not a rational point of {curve!r}")
            acc[P] += int(m)
        sup = tuple(sorted(((P, m) for P, m in acc.items() if m), key=lambda pm: pm[0].sort_key()))
        return cls(curve, sup)

    @classmethod
    def point(cls, curve: Curve, P: CurvePoint, m: int = 1) -> "Divisor":
        return cls.of(curve, {P: m})

    @classmethod
    def sum_of(cls, curve: Curve, points: Iterable[CurvePoint]) -> "Divisor":
        return cls.of(curve, [(P, 1) for P in points])

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.support)

    def __getitem__(self, P: CurvePoint) -> int:
        for Q, m in self.support:
            if Q == P:
                return m
        return 0

    def as_dict(self) -> dict[CurvePoint, int]:
        return dict(self.support)

    def _check(self, other: "Divisor") -> None:
        if other.curve != self.curve:
            raise ValueError("divisors live on different curves")

    def __add__(self, other: "Divisor") -> "Divisor":
        self._check(other)
        return Divisor.of(self.curve, list(self.support) + list(other.support))

    def __neg__(self) -> "Divisor":
        return Divisor(self.curve, tuple((P, -m) for P, m in self.support))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, c: int) -> "Divisor":
        return Divisor.of(self.curve, [(P, c * m) for P, m in self.support])

    __rmul__ = __mul__

    def __le__(self, other: "Divisor") -> bool:
        return all(m >= 0 for _, m in (other - self).support)

    def is_zero(self) -> bool:
        return not self.support

    def to_json(self) -> dict:
        return {
            "curve": self.curve.describe(),
            "support": [{"point": P.to_json(), "mult": m} for P, m in self.support],
        }

    @classmethod
    def from_json(cls, obj: Mapping, curve: Curve | None = None) -> "Divisor":
        curve = curve_from_json(obj["curve"]) if curve is None else curve
        return cls.of(curve, [(CurvePoint.from_json(t["point"]), int(t["mult"])) for t in obj["support"]])

    def __repr__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(f"{m}*{P!r}" for P, m in self.support)


def canonical_divisor(curve: Curve) -> Divisor:
    """Divisor of dx: (2g-2)*inf on the Hermitian curve, -2*inf on the line."""
    return Divisor.point(curve, INFINITY, 2 * curve.genus - 2)


def enumerate_points(curve: Curve) -> tuple[CurvePoint, ...]:
    return curve.points


def random_divisor(curve: Curve, rng, degree: int, terms: int = 4, spread: int = 3) -> Divisor:
    """A divisor of the given degree with a few random multiplicities.

    ``rng`` is a ``random.Random``; the last term absorbs the degree.
    """
    pts = curve.points
    acc: dict[CurvePoint, int] = defaultdict(int)
    for _ in range(rng.randint(1, terms)):
        acc[rng.choice(pts)] += rng.randint(-spread, spread)
    D = Divisor.of(curve, acc)
    return D + Divisor.point(curve, rng.choice(pts), degree - D.degree)
