"""
Code containers, the Hamming metric, and exact verifiers.

A (2,1)-separating code has no codeword lying metrically between two others;
for linear codes this is the intersecting-support property. Checkers return a
``CheckResult`` whose ``witness`` (on failure) can be re-verified on its own.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from . import linalg
from .gf import FieldSpec, field_new, field_of_order

DEFAULT_TRIPLE_CAP = 1 << 24
DEFAULT_PAIR_CAP = 1 << 22
DEFAULT_WORD_CAP = 1 << 20
DEFAULT_SPLIT_NODE_CAP = 1 << 22


class CapExceeded(RuntimeError):
    """The exhaustive search space is larger than the configured cap."""


class CodeFormatError(ValueError):
    pass


def triple_cap() -> int:
    return int(os.environ.get("TRIPLE_CAP", DEFAULT_TRIPLE_CAP))


def pair_cap() -> int:
    return int(os.environ.get("PAIR_CAP", DEFAULT_PAIR_CAP))


@dataclass(frozen=True, eq=False)
class Code:
    """A code over ``field`` of length ``n``.

    ``kind == "list"``: ``body`` holds the codewords, one per row.
    ``kind == "linear"``: ``body`` is a generator matrix with independent rows.
    """

    field: FieldSpec
    n: int
    kind: str
    body: np.ndarray

    @classmethod
    def listed(cls, field: FieldSpec, words, n: int | None = None) -> "Code":
        W = np.array(words, dtype=np.int64)
        if W.size == 0:
            if n is None:
                raise ValueError("empty word list needs an explicit length")
            W = W.reshape(0, n)
        if W.ndim != 2:
            raise ValueError("codewords must have uniform length")
        if n is not None and W.shape[1] != n:
            raise ValueError(f"codeword length {W.shape[1]} != {n}")
        if W.shape[1] < 1:
            raise ValueError("length must be at least 1")
        if W.size and (W.min() < 0 or W.max() >= field.q):
            raise ValueError("symbol outside the field")
        if len({row.tobytes() for row in W}) != len(W):
            raise ValueError("codewords are not pairwise distinct")
        W.setflags(write=False)
        return cls(field, W.shape[1], "list", W)

    @classmethod
    def linear(cls, field: FieldSpec, generator, n: int | None = None) -> "Code":
        G = np.array(generator, dtype=np.int64)
        if G.size == 0:
            if n is None:
                raise ValueError("empty generator needs an explicit length")
            G = G.reshape(0, n)
        if G.ndim != 2:
            raise ValueError("generator must be a matrix")
        if G.size and (G.min() < 0 or G.max() >= field.q):
            raise ValueError("symbol outside the field")
        if linalg.rank(field, G) != G.shape[0]:
            raise ValueError("generator rows are linearly dependent")
        G.setflags(write=False)
        return cls(field, G.shape[1], "linear", G)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def k(self) -> int:
        if self.kind != "linear":
            raise TypeError("dimension is defined for linear codes only")
        return self.body.shape[0]

    @property
    def size(self) -> int:
        return self.q ** self.body.shape[0] if self.kind == "linear" else self.body.shape[0]

    def words(self, cap: int = DEFAULT_WORD_CAP) -> np.ndarray:
        """All codewords; for linear codes in message order (base-q counting)."""
        if self.kind == "list":
            return self.body
        if self.size > cap:
            raise CapExceeded(f"{self.size} codewords exceed the cap {cap}")
        return self.encode(messages(self.q, self.k))

    def encode(self, msgs) -> np.ndarray:
        msgs = np.asarray(msgs, dtype=np.int64).reshape(-1, self.k)
        if self.k == 0:
            return np.zeros((len(msgs), self.n), dtype=np.int64)
        return linalg.matmul(self.field, msgs, self.body)

    def projective_words(self) -> np.ndarray:
        """One representative per nonzero scalar class: first nonzero message symbol is 1."""
        return self.encode(projective_messages(self.q, self.k))

    def __len__(self) -> int:
        return self.size


def messages(q: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(q ** k, dtype=np.int64)
    return np.stack([(idx // q ** (k - 1 - i)) % q for i in range(k)], axis=1)


def projective_messages(q: int, k: int) -> np.ndarray:
    blocks = []
    for lead in range(k):
        tail = messages(q, k - 1 - lead)
        block = np.zeros((len(tail), k), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    return np.concatenate(blocks) if blocks else np.zeros((0, k), dtype=np.int64)


@dataclass
class CheckResult:
    property: str
    mode: str
    passed: bool
    witness: dict | None = None
    elapsed: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def result(self) -> str:
        if not self.passed:
            return "fail"
        return "pass-sampled" if "sampled" in self.mode else "pass"

    def to_json(self, timings: bool = True) -> dict:
        out = {"property": self.property, "mode": self.mode, "result": self.result}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        out["elapsed"] = round(self.elapsed, 6) if timings else 0
        return out


# -- metric ----------------------------------------------------------------

def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


def distance_matrix(words: np.ndarray) -> np.ndarray:
    W = np.asarray(words)
    N, n = W.shape
    if W.size and W.max() <= 1:
        B = W.astype(np.int32)
        ones = B.sum(axis=1)
        return (ones[:, None] + ones[None, :] - 2 * (B @ B.T)).astype(np.int32)
    d = np.zeros((N, N), dtype=np.int32)
    for i in range(n):
        col = W[:, i]
        d += col[:, None] != col[None, :]
    return d


def distance_set(code: Code) -> set[int]:
    W = code.words()
    if len(W) < 2:
        return set()
    d = distance_matrix(W)
    iu = np.triu_indices(len(W), k=1)
    return {int(v) for v in np.unique(d[iu])}


def rate_bits(code: Code) -> float:
    if code.size == 0:
        raise ValueError("empty code")
    return math.log2(code.size) / code.n


def rate_q(code: Code) -> Fraction | float:
    if code.kind == "linear":
        return Fraction(code.k, code.n)
    return math.log(code.size, code.q) / code.n


# -- (2,1)-separation ------------------------------------------------------

def _between(x, y, z) -> bool:
    """True when y lies on a geodesic from x to z: every y_i is x_i or z_i."""
    x, y, z = (np.asarray(v) for v in (x, y, z))
    return bool(np.all((y == x) | (y == z)))


def _witness(W, i, j, k) -> dict:
    return {
        "x": int(i), "y": int(j), "z": int(k),
        "words": [W[i].tolist(), W[j].tolist(), W[k].tolist()],
    }


def _first_violation(d: np.ndarray, xs: range) -> tuple[int, int, int] | None:
    N = d.shape[0]
    for x in xs:
        if x + 1 >= N:
            continue
        dz = d[x, x + 1:]
        S = (d[x, :, None] + d[:, x + 1:]) == dz[None, :]
        S[x, :] = False
        zi = np.arange(N - x - 1)
        S[x + 1 + zi, zi] = False
        hit = np.argwhere(S)
        if hit.size:
            y, zoff = hit[0]
            return x, int(y), x + 1 + int(zoff)
    return None


def check_sep21(code: Code, cap: int | None = None, workers: int = 1) -> CheckResult:
    """Exhaustive (2,1)-separation check.

    Triples are scanned as (x, y, z) with x < z and y distinct from both, in
    lexicographic order of codeword indices; the first violation is the witness.
    """
    t0 = time.perf_counter()
    cap = triple_cap() if cap is None else cap
    W = code.words()
    N = len(W)
    triples = N * max(N - 1, 0) * max(N - 2, 0) // 2
    if triples > cap:
        raise CapExceeded(f"{triples} triples exceed the cap {cap}; use the sampled check")
    d = distance_matrix(W)
    if workers <= 1 or N < 64:
        hit = _first_violation(d, range(N))
    else:
        step = -(-N // (4 * workers))
        chunks = [range(s, min(s + step, N)) for s in range(0, N, step)]
        with ThreadPoolExecutor(workers) as pool:
            hits = list(pool.map(lambda r: _first_violation(d, r), chunks))
        hit = next((h for h in hits if h is not None), None)
    witness = None if hit is None else _witness(W, *hit)
    return CheckResult("sep21", "exhaustive", hit is None, witness, time.perf_counter() - t0,
                       {"codewords": N, "triples": triples})


def check_sep21_sampled(code: Code, trials: int, seed: int = 0, batch: int = 1 << 16) -> CheckResult:
    """Test uniformly random triples of distinct codewords; a failure is conclusive."""
    if trials < 1:
        raise ValueError("trials must be positive")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    N = code.size
    if N < 3:
        return CheckResult("sep21", "sampled", True, None, time.perf_counter() - t0, {"trials": 0})
    W = code.words() if code.kind == "list" or code.size <= DEFAULT_WORD_CAP else None
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        if W is not None:
            idx = _distinct_triples(rng, N, m)
            X, Y, Z = W[idx[:, 0]], W[idx[:, 1]], W[idx[:, 2]]
        else:
            msgs = rng.integers(0, code.q, size=(3, m, code.k))
            X, Y, Z = (code.encode(mm) for mm in msgs)
            distinct = ~(np.all(X == Y, 1) | np.all(Y == Z, 1) | np.all(X == Z, 1))
            X, Y, Z = X[distinct], Y[distinct], Z[distinct]
        bad = np.all((Y == X) | (Y == Z), axis=1)
        if bad.any():
            b = int(np.flatnonzero(bad)[0])
            witness = {"words": [X[b].tolist(), Y[b].tolist(), Z[b].tolist()]}
            return CheckResult("sep21", "sampled", False, witness, time.perf_counter() - t0,
                               {"trials": done + b + 1, "seed": seed})
        done += m
    return CheckResult("sep21", "sampled", True, None, time.perf_counter() - t0,
                       {"trials": trials, "seed": seed})


def _distinct_triples(rng: np.random.Generator, N: int, m: int) -> np.ndarray:
    out = np.empty((0, 3), dtype=np.int64)
    while len(out) < m:
        idx = rng.integers(0, N, size=(m, 3))
        ok = (idx[:, 0] != idx[:, 1]) & (idx[:, 1] != idx[:, 2]) & (idx[:, 0] != idx[:, 2])
        out = np.concatenate([out, idx[ok]])
    return out[:m]


def check_set_system(code: Code) -> CheckResult:
    """Problem-A* form: no distinct supports A, B, C with A&B <= C <= A|B."""
    t0 = time.perf_counter()
    if code.q != 2:
        raise ValueError("set-system view needs a binary code")
    W = code.words()
    N = len(W)
    P = np.packbits(W.astype(np.uint8), axis=1)
    for i in range(N):
        js = np.arange(i + 1, N)
        if js.size == 0:
            break
        AND = P[i] & P[js]
        OR = P[i] | P[js]
        inside_lo = ~np.any(AND[:, None, :] & ~P[None, :, :], axis=2)
        inside_hi = ~np.any(P[None, :, :] & ~OR[:, None, :], axis=2)
        bad = inside_lo & inside_hi
        bad[:, i] = False
        bad[np.arange(js.size), js] = False
        hit = np.argwhere(bad)
        if hit.size:
            jj, c = hit[0]
            j = int(js[jj])
            witness = {"A": i, "B": j, "C": int(c),
                       "sets": [np.flatnonzero(W[v]).tolist() for v in (i, j, int(c))]}
            return CheckResult("set_system", "exhaustive", False, witness, time.perf_counter() - t0)
    return CheckResult("set_system", "exhaustive", True, None, time.perf_counter() - t0)


# -- intersecting supports -------------------------------------------------

def _first_disjoint(S1: np.ndarray, S2: np.ndarray, same: bool, chunk: int = 2048):
    S2T = S2.T.astype(np.int32)
    for start in range(0, len(S1), chunk):
        block = S1[start:start + chunk].astype(np.int32) @ S2T
        zero = block == 0
        if same:
            rows = np.arange(start, start + len(block))
            zero &= np.arange(len(S2))[None, :] > rows[:, None]
        hit = np.argwhere(zero)
        if hit.size:
            return start + int(hit[0][0]), int(hit[0][1])
    return None


def _pairs_check(C1: Code, C2: Code, same: bool, cap: int) -> tuple[bool, dict | None, dict]:
    R1 = C1.projective_words()
    R2 = R1 if same else C2.projective_words()
    pairs = len(R1) * (len(R1) - 1) // 2 if same else len(R1) * len(R2)
    if pairs > cap:
        raise CapExceeded(f"{pairs} representative pairs exceed the cap {cap}")
    hit = _first_disjoint(R1 != 0, R2 != 0, same)
    info = {"representatives": [len(R1)] if same else [len(R1), len(R2)], "pairs": pairs}
    if hit is None:
        return True, None, info
    a, b = hit
    return False, {"c": R1[a].tolist(), "c_prime": R2[b].tolist()}, info


def _split_search(F: FieldSpec, G1: np.ndarray, G2: np.ndarray, node_cap: int):
    """Look for a coordinate set S such that C1 has a nonzero word supported in S
    and C2 has a nonzero word supported in the complement.

    C1 has a nonzero word inside S iff the columns of G1 outside S have rank < k1,
    so each coordinate either feeds G1's column into rank1 (coordinate outside S)
    or G2's column into rank2 (coordinate in S). Ranks only grow, so a branch is
    dropped as soon as either reaches full rank.
    """
    k1, k2 = G1.shape[0], G2.shape[0]
    n = G1.shape[1]
    mul = F.tables.mul.tolist()
    add = F.tables.add.tolist()
    neg = F.tables.neg.tolist()
    inv = F.tables.inv.tolist()
    cols1 = [G1[:, j].tolist() for j in range(n)]
    cols2 = [G2[:, j].tolist() for j in range(n)]
    nodes = 0

    def extend(basis, v):
        v = list(v)
        for pc, row in basis:
            c = v[pc]
            if c:
                nc = neg[c]
                v = [add[a][mul[nc][b]] for a, b in zip(v, row)]
        for pc, c in enumerate(v):
            if c:
                ic = inv[c]
                return basis + ((pc, [mul[ic][a] for a in v]),)
        return basis

    in_s: list[bool] = [False] * n

    def dfs(j, b1, b2):
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise CapExceeded(f"split search exceeded {node_cap} nodes")
        if j == n:
            return True
        # coordinate j inside S first
        nb2 = extend(b2, cols2[j])
        if len(nb2) < k2:
            in_s[j] = True
            if dfs(j + 1, b1, nb2):
                return True
        nb1 = extend(b1, cols1[j])
        if len(nb1) < k1:
            in_s[j] = False
            if dfs(j + 1, nb1, b2):
                return True
        return False

    if k1 == 0 or k2 == 0:
        return None, nodes
    found = dfs(0, (), ())
    return (list(in_s) if found else None), nodes


def _split_check(C1: Code, C2: Code, node_cap: int) -> tuple[bool, dict | None, dict]:
    F = C1.field
    S, nodes = _split_search(F, np.asarray(C1.body), np.asarray(C2.body), node_cap)
    info = {"nodes": nodes}
    if S is None:
        return True, None, info
    inside = [j for j in range(C1.n) if S[j]]
    outside = [j for j in range(C1.n) if not S[j]]
    m1 = linalg.nullspace(F, np.asarray(C1.body)[:, outside].T, ncols=C1.k)[0]
    m2 = linalg.nullspace(F, np.asarray(C2.body)[:, inside].T, ncols=C2.k)[0]
    c1 = C1.encode(m1)[0]
    c2 = C2.encode(m2)[0]
    return False, {"c": c1.tolist(), "c_prime": c2.tolist()}, info


def check_mutually_intersecting(C1: Code, C2: Code, mode: str = "auto", cap: int | None = None,
                                node_cap: int = DEFAULT_SPLIT_NODE_CAP,
                                _name: str = "mutually_intersecting") -> CheckResult:
    """Every nonzero c in C1 and c' in C2 share a support coordinate.

    ``mode``: "pairs" compares supports of all projective representatives;
    "split" searches coordinate bipartitions with rank pruning (exact, no
    enumeration of codewords); "auto" uses pairs when within ``cap``.
    """
    t0 = time.perf_counter()
    if C1.kind != "linear" or C2.kind != "linear":
        raise TypeError("intersecting checks need linear codes")
    if C1.n != C2.n or C1.field != C2.field:
        raise ValueError("codes differ in length or field")
    cap = pair_cap() if cap is None else cap
    same = C1 is C2
    if mode == "auto":
        n1 = (C1.q ** C1.k - 1) // (C1.q - 1)
        n2 = (C2.q ** C2.k - 1) // (C2.q - 1)
        pairs = n1 * (n1 - 1) // 2 if same else n1 * n2
        mode = "pairs" if pairs <= cap else "split"
    if mode == "pairs":
        ok, witness, info = _pairs_check(C1, C2, same, cap)
    elif mode == "split":
        ok, witness, info = _split_check(C1, C2, node_cap)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return CheckResult(_name, mode, ok, witness, time.perf_counter() - t0, info)


def check_intersecting(code: Code, mode: str = "auto", cap: int | None = None,
                       node_cap: int = DEFAULT_SPLIT_NODE_CAP) -> CheckResult:
    return check_mutually_intersecting(code, code, mode, cap, node_cap, _name="intersecting")


def check_intersecting_sampled(C1: Code, C2: Code | None = None, trials: int = 10 ** 5,
                               seed: int = 0, batch: int = 1 << 15) -> CheckResult:
    """Random nonzero codeword pairs must share a support coordinate."""
    t0 = time.perf_counter()
    C2 = C1 if C2 is None else C2
    name = "intersecting" if C2 is C1 else "mutually_intersecting"
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        a = _nonzero_messages(rng, C1, m)
        b = _nonzero_messages(rng, C2, m)
        X, Y = C1.encode(a), C2.encode(b)
        bad = ~np.any((X != 0) & (Y != 0), axis=1)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            return CheckResult(name, "sampled", False, {"c": X[i].tolist(), "c_prime": Y[i].tolist()},
                               time.perf_counter() - t0, {"trials": done + i + 1, "seed": seed})
        done += m
    return CheckResult(name, "sampled", True, None, time.perf_counter() - t0,
                       {"trials": trials, "seed": seed})


def _nonzero_messages(rng, code: Code, m: int) -> np.ndarray:
    msgs = rng.integers(0, code.q, size=(m, code.k))
    zero = ~msgs.any(axis=1)
    while zero.any():
        msgs[zero] = rng.integers(0, code.q, size=(int(zero.sum()), code.k))
        zero = ~msgs.any(axis=1)
    return msgs


# -- file format -----------------------------------------------------------

def dumps_code(code: Code) -> str:
    kind = "list" if code.kind == "list" else "linear"
    lines = [f"{code.q} {code.n} {code.body.shape[0]} {kind}"]
    lines += [" ".join(str(int(v)) for v in row) for row in code.body]
    return "\n".join(lines) + "\n"


def write_code(code: Code, dest: str | os.PathLike | TextIO) -> None:
    text = dumps_code(code)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="ascii") as fh:
            fh.write(text)


def loads_code(text: str) -> Code:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CodeFormatError("empty code file")
    head = lines[0].split()
    if len(head) != 4 or head[3] not in ("list", "linear"):
        raise CodeFormatError(f"bad header line: {lines[0]!r}")
    try:
        q, n, count = (int(v) for v in head[:3])
        field = field_of_order(q)
    except ValueError as exc:
        raise CodeFormatError(f"bad header line: {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != count:
        raise CodeFormatError(f"header announces {count} rows, found {len(rows)}")
    try:
        body = [[int(v) for v in row.split()] for row in rows]
    except ValueError as exc:
        raise CodeFormatError("non-integer symbol") from exc
    if any(len(r) != n for r in body):
        raise CodeFormatError(f"row length differs from n={n}")
    try:
        if head[3] == "list":
            return Code.listed(field, body, n=n)
        return Code.linear(field, body, n=n)
    except ValueError as exc:
        raise CodeFormatError(str(exc)) from exc


def read_code(src: str | os.PathLike | TextIO) -> Code:
    if hasattr(src, "read"):
        return loads_code(src.read())
    with open(src, encoding="ascii") as fh:
        return loads_code(fh.read())


def binary_field() -> FieldSpec:
    return field_new(2, 1)
