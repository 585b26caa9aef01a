"""
The Nordstrom-Robinson code via the octacode.

The octacode is the extended cyclic code of length 8 over Z/4 generated by
x^3 + 2x^2 + x + 3 (the Hensel lift of x^3 + x + 1, a divisor of x^7 - 1
over Z/4), with an appended zero-sum coordinate. Its Gray image is the binary
(16, 256, 6) Nordstrom-Robinson code.
"""

from __future__ import annotations

import numpy as np

from .codes import Code, binary_field, messages

OCTACODE_GENERATOR = (3, 1, 2, 1)  # low degree first
GRAY = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.int64)


def octacode() -> np.ndarray:
    """All 256 codewords of the octacode, rows over Z/4."""
    G = np.zeros((4, 8), dtype=np.int64)
    for shift in range(4):
        for i, c in enumerate(OCTACODE_GENERATOR):
            G[shift, shift + i] = c
    G[:, 7] = (-G[:, :7].sum(axis=1)) % 4
    words = (messages(4, 4) @ G) % 4
    return np.unique(words, axis=0)


def gray_map(words: np.ndarray) -> np.ndarray:
    return GRAY[words].reshape(len(words), -1)


def build_nr16() -> Code:
    return Code.listed(binary_field(), _lex_sorted(gray_map(octacode())))


def one_shorten(code: Code, position: int = 0) -> Code:
    """Keep the words with 0 at ``position`` and delete that coordinate."""
    if code.kind != "list":
        raise TypeError("shortening works on listed codes")
    if not 0 <= position < code.n:
        raise ValueError(f"position {position} outside 0..{code.n - 1}")
    if code.n < 2:
        raise ValueError("cannot shorten a length-1 code")
    W = code.body
    kept = W[W[:, position] == 0]
    if len(kept) == 0:
        raise ValueError("no codeword has 0 at the shortening position")
    return Code.listed(code.field, np.delete(kept, position, axis=1))


def subcode_first(code: Code, m: int) -> Code:
    """The m lexicographically smallest codewords."""
    if m > code.size:
        raise ValueError(f"asked for {m} of {code.size} codewords")
    if m < 1:
        raise ValueError("subcode needs at least one word")
    return Code.listed(code.field, _lex_sorted(code.words())[:m])


def shortened_nr() -> Code:
    return one_shorten(build_nr16(), 0)


def inner_code(m: int) -> Code:
    """First m words of the one-shortened NR code (m <= 128)."""
    return subcode_first(shortened_nr(), m)


def _lex_sorted(W: np.ndarray) -> np.ndarray:
    order = np.lexsort(W.T[::-1])
    return W[order]
