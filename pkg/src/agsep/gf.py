"""
Small finite fields GF(p^k) with table-driven arithmetic.

Elements are encoded as integers in [0, q): the coefficient of t^i of the
polynomial representative is the i-th base-p digit. Arithmetic on encodings
goes through lookup tables (numpy arrays) so whole rows of a matrix can be
combined in one vectorized step. ``FieldElement`` wraps an encoding for the
scalar, value-semantic API.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# Moduli are monic, coefficients listed from t^0 upward. Each entry is
# re-validated (irreducibility by trial division) the first time it is used.
MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (7, 1): (0, 1),
    (11, 1): (0, 1),
    (13, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (5, 2): (1, 1, 1),
    (5, 3): (1, 1, 0, 1),
    (7, 2): (1, 0, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 0, 1),
}

MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, k) with q = p^k, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while q % p:
        p += 1
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


# -- polynomials over GF(p), coefficient lists low degree first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _monic_polys(p: int, deg: int) -> Iterator[list[int]]:
    for code in range(p ** deg):
        coeffs = []
        for _ in range(deg):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= k/2."""
    k = len(modulus) - 1
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for f in _monic_polys(p, d):
            if not _polymod(modulus, f, p):
                return False
    return True


def has_root(modulus: Sequence[int], p: int) -> bool:
    return any(sum(c * pow(a, i, p) for i, c in enumerate(modulus)) % p == 0 for a in range(p))


# -- tables -------------------------------------------------------------------

@dataclass(frozen=True)
class _Tables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    exp: np.ndarray
    log: np.ndarray
    digits: np.ndarray    # (q, k) base-p digits of each encoding
    weights: np.ndarray   # p^i, to re-encode digit vectors
    reduce: np.ndarray    # (2k-1, k) digits of t^e mod modulus


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    r = _polymod(prod, modulus, p)
    return r + [0] * (len(modulus) - 1 - len(r))


@functools.lru_cache(maxsize=None)
def _build_tables(p: int, k: int, modulus: tuple[int, ...]) -> _Tables:
    q = p ** k
    weights = np.array([p ** i for i in range(k)], dtype=np.int64)
    digits = np.array([[(v // p ** i) % p for i in range(k)] for v in range(q)], dtype=np.int64)

    def enc(coeffs: Sequence[int]) -> int:
        return int(sum(c * p ** i for i, c in enumerate(coeffs)))

    add = (digits[:, None, :] + digits[None, :, :]) % p @ weights
    neg = (-digits) % p @ weights

    # find a primitive element by brute force over encodings
    exp = log = None
    for g in range(1, q):
        g_coeffs = list(digits[g])
        powers = [1]
        cur = [1] + [0] * (k - 1)
        for _ in range(q - 2):
            cur = _poly_mulmod(cur, g_coeffs, modulus, p)
            e = enc(cur)
            if e == 1:
                break
            powers.append(e)
        if len(powers) == q - 1:
            exp = np.array(powers, dtype=np.int64)
            break
    if exp is None:
        raise FieldError(f"modulus {modulus} over GF({p}) does not define a field")
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1)

    la = log[1:]
    mul = np.zeros((q, q), dtype=np.int64)
    mul[1:, 1:] = exp[(la[:, None] + la[None, :]) % (q - 1)]
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = exp[(-la) % (q - 1)]

    reduce = np.zeros((max(2 * k - 1, 1), k), dtype=np.int64)
    for e in range(2 * k - 1):
        r = _polymod([0] * e + [1], modulus, p)
        reduce[e, : len(r)] = r
    return _Tables(add, mul, neg, inv, exp, log, digits, weights, reduce)


# -- public types -------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(p^k) defined by a monic irreducible ``modulus`` (low degree first)."""

    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def tables(self) -> _Tables:
        return _build_tables(self.p, self.k, self.modulus)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __call__(self, value: int | Sequence[int]) -> "FieldElement":
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if self.k == 1:
                v %= self.p
            elif not 0 <= v < self.q:
                raise FieldError(f"encoding {v} out of range for {self!r}")
            return FieldElement(self, v)
        coeffs = list(value)
        if len(coeffs) != self.k:
            raise FieldError(f"expected {self.k} coefficients, got {len(coeffs)}")
        return FieldElement(self, sum((c % self.p) * self.p ** i for i, c in enumerate(coeffs)))

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(self.q)]

    # encoding-level scalar ops, used by the algebra code
    def add(self, a: int, b: int) -> int:
        return int(self.tables.add[a, b])

    def sub(self, a: int, b: int) -> int:
        t = self.tables
        return int(t.add[a, t.neg[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.tables.mul[a, b])

    def neg(self, a: int) -> int:
        return int(self.tables.neg[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self!r}")
        return int(self.tables.inv[a])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError(f"negative power of zero in {self!r}")
            return 1 if e == 0 else 0
        t = self.tables
        return int(t.exp[(int(t.log[a]) * e) % (self.q - 1)])

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(p) -> GF(q)."""
        return n % self.p


def field_new(p: int, k: int = 1) -> FieldSpec:
    """Return GF(p^k) with the pinned modulus; validates the modulus on first use."""
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if k < 1 or p ** k > MAX_ORDER:
        raise FieldError(f"unsupported extension degree {k} for p={p}")
    try:
        modulus = MODULI[(p, k)]
    except KeyError:
        raise FieldError(f"no pinned modulus for GF({p}^{k})") from None
    return _validated(p, k, modulus)


@functools.lru_cache(maxsize=None)
def _validated(p: int, k: int, modulus: tuple[int, ...]) -> FieldSpec:
    if len(modulus) != k + 1 or modulus[-1] != 1:
        raise FieldError(f"modulus for GF({p}^{k}) must be monic of degree {k}")
    if k > 1 and k <= 3 and has_root(modulus, p):
        raise FieldError(f"modulus for GF({p}^{k}) has a root in GF({p})")
    if not is_irreducible(modulus, p):
        raise FieldError(f"modulus for GF({p}^{k}) is reducible")
    spec = FieldSpec(p, k, tuple(modulus))
    spec.tables  # noqa: B018 -- build eagerly so failures surface here
    return spec


def field_of_order(q: int) -> FieldSpec:
    pk = prime_power(q)
    if pk is None:
        raise FieldError(f"{q} is not a prime power")
    return field_new(*pk)


def enumerate_elements(F: FieldSpec) -> list["FieldElement"]:
    return F.elements()


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.tables.digits[self.value])

    def _check(self, other: object) -> "FieldElement":
        if isinstance(other, (int, np.integer)):
            return FieldElement(self.field, self.field.from_int(int(other)))
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldError(f"mixed fields {self.field!r} and {other.field!r}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.field, self.field.add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.field, self.field.sub(self.value, o.value))

    def __rsub__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else o - self

    def __mul__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.field, self.field.mul(self.value, o.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(o.value)))

    def __rtruediv__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else o / self

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.field!r}({self.value})"


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.field != b.field:
        raise FieldError("operands live in different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
