"""Bit-exact words and matrices over GF(2).

Words are plain ints; coordinate 1 of a width-w word is the most
significant bit of its integer encoding. Matrices act on row vectors
from the right: the image of x is x*M, computed by XOR-ing the rows of
M selected by the set coordinates of x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, FormatError


def check_word(x: int, bits: int) -> int:
    if not 0 <= x < (1 << bits):
        raise DimensionError(f"value {x:#x} does not fit in {bits} bits")
    return x


def xor(a: int, b: int, bits: int) -> int:
    """Componentwise sum of two width-`bits` words."""
    check_word(a, bits)
    check_word(b, bits)
    return a ^ b


def word_bit(x: int, bits: int, i: int) -> int:
    """Coordinate i (1-based, MSB first) of a width-`bits` word."""
    if not 1 <= i <= bits:
        raise DimensionError(f"coordinate {i} out of range 1..{bits}")
    return (x >> (bits - i)) & 1


def word_from_bits(bits_seq: Sequence[int]) -> int:
    x = 0
    for b in bits_seq:
        x = (x << 1) | (b & 1)
    return x


def word_to_bits(x: int, bits: int) -> Tuple[int, ...]:
    check_word(x, bits)
    return tuple((x >> (bits - 1 - i)) & 1 for i in range(bits))


def split_blocks(x: int, m: int, nb: int) -> Tuple[int, ...]:
    """Split a width m*nb word into m blocks, block 1 first."""
    check_word(x, m * nb)
    mask = (1 << nb) - 1
    return tuple((x >> (nb * (m - 1 - i))) & mask for i in range(m))


def join_blocks(blocks: Sequence[int], nb: int) -> int:
    x = 0
    for b in blocks:
        check_word(b, nb)
        x = (x << nb) | b
    return x


def hex_width(bits: int) -> int:
    return (bits + 3) // 4


def word_to_hex(x: int, bits: int) -> str:
    """Fixed-width uppercase hex (4 digits for 16 bits, 1 for 4)."""
    check_word(x, bits)
    return format(x, "0{}X".format(hex_width(bits)))


def word_from_hex(s: str, bits: int) -> int:
    try:
        x = int(s, 16)
    except ValueError as exc:
        raise FormatError(f"not a hex word: {s!r}") from exc
    return check_word(x, bits)


@dataclass(frozen=True)
class BinMatrix:
    """Dense GF(2) matrix; each row packed into one int, column 1 = MSB."""

    nrows: int
    ncols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionError("row count mismatch")
        for r in self.rows:
            check_word(r, self.ncols)

    # -- constructors ------------------------------------------------

    @staticmethod
    def identity(n: int) -> "BinMatrix":
        return BinMatrix(n, n, tuple(1 << (n - 1 - i) for i in range(n)))

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "BinMatrix":
        return BinMatrix(nrows, ncols, (0,) * nrows)

    @staticmethod
    def from_bit_rows(bit_rows: Iterable[Sequence[int]]) -> "BinMatrix":
        rows = [list(r) for r in bit_rows]
        if not rows:
            raise DimensionError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return BinMatrix(len(rows), ncols, tuple(word_from_bits(r) for r in rows))

    @staticmethod
    def from_text(text: str) -> "BinMatrix":
        """Parse the row-per-line 0/1 serialization."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise FormatError("empty matrix text")
        ncols = len(lines[0])
        rows = []
        for ln in lines:
            if len(ln) != ncols:
                raise FormatError("ragged matrix text")
            if set(ln) - {"0", "1"}:
                raise FormatError(f"non-binary matrix row: {ln!r}")
            rows.append(int(ln, 2))
        return BinMatrix(len(lines), ncols, tuple(rows))

    def to_text(self) -> str:
        return "\n".join(format(r, "0{}b".format(self.ncols)) for r in self.rows)

    # -- arithmetic --------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        """Entry at row i, column j (0-based)."""
        return (self.rows[i] >> (self.ncols - 1 - j)) & 1

    def apply(self, x: int) -> int:
        """Row-vector right action: returns x*M."""
        check_word(x, self.nrows)
        out = 0
        v = x
        i = self.nrows - 1
        while v:
            if v & 1:
                out ^= self.rows[i]
            v >>= 1
            i -= 1
        return out

    def mul(self, other: "BinMatrix") -> "BinMatrix":
        """Matrix product self*other (so x.(self.mul(other)) = (x.self).other)."""
        if self.ncols != other.nrows:
            raise DimensionError("matrix product dimension mismatch")
        return BinMatrix(self.nrows, other.ncols,
                         tuple(other.apply(r) for r in self.rows))

    def transpose(self) -> "BinMatrix":
        rows = tuple(
            word_from_bits([self.entry(i, j) for i in range(self.nrows)])
            for j in range(self.ncols)
        )
        return BinMatrix(self.ncols, self.nrows, rows)

    def rank(self) -> int:
        work = list(self.rows)
        rank = 0
        for j in range(self.ncols):
            pivot_bit = 1 << (self.ncols - 1 - j)
            pivot = None
            for r in range(rank, len(work)):
                if work[r] & pivot_bit:
                    pivot = r
                    break
            if pivot is None:
                continue
            work[rank], work[pivot] = work[pivot], work[rank]
            for r in range(len(work)):
                if r != rank and (work[r] & pivot_bit):
                    work[r] ^= work[rank]
            rank += 1
            if rank == len(work):
                break
        return rank

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inv(self) -> Optional["BinMatrix"]:
        """Inverse matrix, or None when singular."""
        if self.nrows != self.ncols:
            raise DimensionError("inverse requires a square matrix")
        n = self.nrows
        # Augmented rows: [M | I] packed into 2n-bit ints.
        work = [(self.rows[i] << n) | (1 << (n - 1 - i)) for i in range(n)]
        rank = 0
        for j in range(n):
            pivot_bit = 1 << (2 * n - 1 - j)
            pivot = None
            for r in range(rank, n):
                if work[r] & pivot_bit:
                    pivot = r
                    break
            if pivot is None:
                return None
            work[rank], work[pivot] = work[pivot], work[rank]
            for r in range(n):
                if r != rank and (work[r] & pivot_bit):
                    work[r] ^= work[rank]
            rank += 1
        mask = (1 << n) - 1
        return BinMatrix(n, n, tuple(r & mask for r in work))

    def apply_all(self) -> np.ndarray:
        """Images x*M for every x in 0..2^nrows-1, as a uint32 array."""
        img = np.zeros(1 << self.nrows, dtype=np.uint32)
        for j in range(self.nrows):
            row = np.uint32(self.rows[self.nrows - 1 - j])
            size = 1 << j
            img[size:2 * size] = img[:size] ^ row
        return img

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "BinMatrix":
        """Rows r0..r1-1, columns c0..c1-1."""
        bit_rows = [[self.entry(i, j) for j in range(c0, c1)] for i in range(r0, r1)]
        return BinMatrix(r1 - r0, c1 - c0,
                         tuple(word_from_bits(r) for r in bit_rows))


def block_matrix(blocks: Sequence[Sequence[BinMatrix]]) -> BinMatrix:
    """Assemble a matrix from a 2-D grid of conforming blocks."""
    rows = []
    for block_row in blocks:
        height = block_row[0].nrows
        if any(b.nrows != height for b in block_row):
            raise DimensionError("block heights disagree")
        for i in range(height):
            packed = 0
            width = 0
            for b in block_row:
                packed = (packed << b.ncols) | b.rows[i]
                width += b.ncols
            rows.append((packed, width))
    total_width = rows[0][1]
    if any(w != total_width for _, w in rows):
        raise DimensionError("block widths disagree")
    return BinMatrix(len(rows), total_width, tuple(r for r, _ in rows))
