"""Alternative parallel group operations on binary vector spaces.

An operation `circ` on n-bit blocks is determined by a nonzero defining
vector b of length n-2. Its translation maps on the first two basis
vectors are affine with matrices

    M_e1 = I + (b placed in row 2 of the top-right 2 x (n-2) block)
    M_e2 = I + (b placed in row 1 of the top-right 2 x (n-2) block)

and M_ej = I for j >= 3; the full translation group is generated by
composing these affine maps. On the span of e3..en (the weak keys) the
operation agrees with XOR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import itertools

import numpy as np

from .errors import (DegenerateOperationError, DimensionError, FormatError,
                     VerificationError)
from .gf2 import BinMatrix, check_word, split_blocks, word_from_hex, word_to_hex

TABLE_MAX_BITS = 8  # precompute full Cayley/dot tables up to this block size


def _tau_basis_matrices(n: int, b: int) -> Tuple[BinMatrix, BinMatrix]:
    d = n - 2
    e1 = 1 << (n - 1)
    e2 = 1 << (n - 2)
    ident = BinMatrix.identity(n)
    rows1 = list(ident.rows)
    rows1[1] = e2 | b  # row 2: identity diagonal plus b in the tail columns
    rows2 = list(ident.rows)
    rows2[0] = e1 | b  # row 1 likewise
    del d
    return BinMatrix(n, n, tuple(rows1)), BinMatrix(n, n, tuple(rows2))


def _build_tables(n: int, m_e1: BinMatrix, m_e2: BinMatrix) -> np.ndarray:
    """Full Cayley table via closure of the translation maps.

    Each translation tau_y is affine, x -> x*M_y + y; composing a known
    tau_y with a basis translation tau_ei yields tau_{y circ ei} with
    matrix M_y*M_ei. Breadth-first closure reaches all 2^n labels.
    """
    size = 1 << n
    ident = BinMatrix.identity(n)
    gens = [(m_e1, 1 << (n - 1)), (m_e2, 1 << (n - 2))]
    gens += [(ident, 1 << (n - 1 - i)) for i in range(2, n)]
    mats: Dict[int, BinMatrix] = {0: ident}
    frontier = [0]
    while frontier:
        nxt = []
        for y in frontier:
            my = mats[y]
            for mg, e in gens:
                label = mg.apply(y) ^ e
                if label not in mats:
                    mats[label] = my.mul(mg)
                    nxt.append(label)
        frontier = nxt
    if len(mats) != size:
        raise VerificationError("translation closure did not reach the full space")
    table = np.zeros((size, size), dtype=np.uint16)
    for y, my in mats.items():
        table[:, y] = my.apply_all()[:size] ^ y
    return table


def _check_group_axioms(table: np.ndarray) -> None:
    size = table.shape[0]
    idx = np.arange(size)
    if not np.array_equal(table[:, 0], idx) or not np.array_equal(table[0, :], idx):
        raise VerificationError("0 is not the identity")
    if not np.array_equal(np.diag(table), np.zeros(size, dtype=table.dtype)):
        raise VerificationError("elements are not self-inverse")
    if not np.array_equal(table, table.T):
        raise VerificationError("operation is not commutative")
    lhs = table[table[:, :, None], idx[None, None, :]]   # (a.b).c
    rhs = table[idx[:, None, None], table[None, :, :]]   # a.(b.c)
    if not np.array_equal(lhs, rhs):
        raise VerificationError("operation is not associative")


@dataclass(eq=False)
class AltOperation:
    """A d = n-2 alternative operation on n-bit blocks, fixed by vector b."""

    n: int
    b: int
    m_e1: BinMatrix
    m_e2: BinMatrix
    sum_table: Optional[np.ndarray] = field(default=None, repr=False)
    dot_table: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def nbits(self) -> int:
        return self.n

    @property
    def weak_dim(self) -> int:
        return self.n - 2

    @property
    def tag(self) -> str:
        return "circ:{}:{}".format(self.n, word_to_hex(self.b, self.n - 2))

    def circ(self, a: int, y: int) -> int:
        """a circ y."""
        check_word(a, self.n)
        check_word(y, self.n)
        if self.sum_table is not None:
            return int(self.sum_table[a, y])
        return self.circ_by_tau(a, y)

    def circ_by_tau(self, a: int, y: int) -> int:
        """Table-free evaluation by composing translation maps."""
        check_word(a, self.n)
        check_word(y, self.n)
        n = self.n
        res, z = a, 0
        if (y >> (n - 1)) & 1:
            res = self.m_e1.apply(res) ^ (1 << (n - 1))
            z = self.m_e1.apply(z) ^ (1 << (n - 1))
        if (y >> (n - 2)) & 1:
            res = self.m_e2.apply(res) ^ (1 << (n - 2))
            z = self.m_e2.apply(z) ^ (1 << (n - 2))
        # The remainder y ^ z is a weak key, where circ agrees with XOR.
        return res ^ y ^ z

    def dot(self, a: int, y: int) -> int:
        """a + y + a circ y; always lands in the weak-key space."""
        if self.dot_table is not None:
            check_word(a, self.n)
            check_word(y, self.n)
            return int(self.dot_table[a, y])
        return a ^ y ^ self.circ(a, y)

    def key_diff_transition(self, delta: int, k: int) -> int:
        """circ-difference surviving an XOR key addition: delta + k.delta."""
        return delta ^ self.dot(k, delta)

    def weak_keys(self) -> frozenset:
        """All k with x + k = x circ k for every x."""
        if self.sum_table is not None:
            size = 1 << self.n
            xor = np.bitwise_xor.outer(np.arange(size), np.arange(size))
            cols = np.all(self.sum_table == xor, axis=0)
            return frozenset(int(k) for k in np.nonzero(cols)[0])
        return frozenset(_span(self.n, [1 << (self.n - 1 - i)
                                        for i in range(2, self.n)]))

    def error_set(self) -> frozenset:
        """All values of the dot product over V x V."""
        if self.dot_table is not None:
            return frozenset(int(v) for v in np.unique(self.dot_table))
        size = 1 << self.n
        return frozenset(self.dot(a, y) for a in range(size) for y in range(size))

    def circ_many(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        if self.sum_table is None:
            raise DimensionError("vectorized circ requires precomputed tables")
        return self.sum_table[xs, ys]


def _span(width: int, gens: Sequence[int]) -> List[int]:
    out = {0}
    for g in gens:
        out |= {x ^ g for x in out}
    return sorted(out)


def make_op(n: int, b: int) -> AltOperation:
    """Construct the alternative operation on n-bit blocks defined by b."""
    if n < 3:
        raise DimensionError(f"block size must be at least 3, got {n}")
    check_word(b, n - 2)
    if b == 0:
        raise DegenerateOperationError("b = 0 degenerates the operation to XOR")
    m_e1, m_e2 = _tau_basis_matrices(n, b)
    op = AltOperation(n=n, b=b, m_e1=m_e1, m_e2=m_e2)
    if n <= TABLE_MAX_BITS:
        table = _build_tables(n, m_e1, m_e2)
        size = 1 << n
        op.sum_table = table
        op.dot_table = np.bitwise_xor(
            np.bitwise_xor.outer(np.arange(size, dtype=np.uint16),
                                 np.arange(size, dtype=np.uint16)),
            table)
    if n <= 6:
        _check_group_axioms(op.sum_table)
    return op


@dataclass(eq=False)
class ParallelOperation:
    """Blockwise application of m alternative operations, block 1 first."""

    blocks: Tuple[AltOperation, ...]

    def __post_init__(self):
        if not self.blocks:
            raise DimensionError("at least one block operation required")
        sizes = {op.n for op in self.blocks}
        if len(sizes) != 1:
            raise DimensionError("block sizes must be uniform")

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def block_bits(self) -> int:
        return self.blocks[0].n

    @property
    def nbits(self) -> int:
        return self.m * self.block_bits

    @property
    def tag(self) -> str:
        bs = ",".join(word_to_hex(op.b, op.n - 2) for op in self.blocks)
        return "circ:{}:{}".format(self.block_bits, bs)

    def _blockwise(self, fn_name: str, x: int, y: int) -> int:
        nb = self.block_bits
        xb = split_blocks(x, self.m, nb)
        yb = split_blocks(y, self.m, nb)
        out = 0
        for op, a, b in zip(self.blocks, xb, yb):
            out = (out << nb) | getattr(op, fn_name)(a, b)
        return out

    def circ(self, x: int, y: int) -> int:
        return self._blockwise("circ", x, y)

    def circ_by_tau(self, x: int, y: int) -> int:
        return self._blockwise("circ_by_tau", x, y)

    def dot(self, x: int, y: int) -> int:
        return self._blockwise("dot", x, y)

    def key_diff_transition(self, delta: int, k: int) -> int:
        return delta ^ self.dot(k, delta)

    def weak_keys(self) -> frozenset:
        nb = self.block_bits
        out = set()
        for combo in itertools.product(*(sorted(op.weak_keys())
                                         for op in self.blocks)):
            x = 0
            for blk in combo:
                x = (x << nb) | blk
            out.add(x)
        return frozenset(out)

    def error_set(self) -> frozenset:
        nb = self.block_bits
        out = set()
        for combo in itertools.product(*(sorted(op.error_set())
                                         for op in self.blocks)):
            x = 0
            for blk in combo:
                x = (x << nb) | blk
            out.add(x)
        return frozenset(out)

    def circ_many(self, xs, ys) -> np.ndarray:
        """Vectorized blockwise circ on uint arrays."""
        nb = self.block_bits
        mask = (1 << nb) - 1
        xs = np.asarray(xs, dtype=np.uint32)
        ys = np.asarray(ys, dtype=np.uint32)
        out = np.zeros(np.broadcast(xs, ys).shape, dtype=np.uint32)
        for i, op in enumerate(self.blocks):
            shift = nb * (self.m - 1 - i)
            if op.sum_table is None:
                raise DimensionError("vectorized circ requires precomputed tables")
            blk = op.sum_table[(xs >> shift) & mask, (ys >> shift) & mask]
            out |= blk.astype(np.uint32) << np.uint32(shift)
        return out


class XorOp:
    """The ordinary XOR sum, packaged with the same evaluation surface."""

    def __init__(self, bits: int):
        if bits < 1:
            raise DimensionError("width must be positive")
        self.n = bits

    @property
    def nbits(self) -> int:
        return self.n

    @property
    def tag(self) -> str:
        return "xor"

    def circ(self, a: int, y: int) -> int:
        check_word(a, self.n)
        check_word(y, self.n)
        return a ^ y

    def dot(self, a: int, y: int) -> int:
        check_word(a, self.n)
        check_word(y, self.n)
        return 0

    def key_diff_transition(self, delta: int, k: int) -> int:
        check_word(k, self.n)
        return check_word(delta, self.n)

    def circ_many(self, xs, ys) -> np.ndarray:
        return np.bitwise_xor(np.asarray(xs, dtype=np.uint32),
                              np.asarray(ys, dtype=np.uint32))


Operation = Union[AltOperation, ParallelOperation, XorOp]


def parallel(ops: Sequence[AltOperation]) -> ParallelOperation:
    """Lift a list of block operations to a blockwise sum on N bits."""
    return ParallelOperation(blocks=tuple(ops))


def parse_op(descriptor: str, blocks: Optional[int] = None,
             width: Optional[int] = None) -> Operation:
    """Parse `xor` or `circ:<n>:<b-hex>[,<b-hex>...]`.

    A single b is repeated when `blocks` asks for more; `width` supplies
    the XOR word size.
    """
    descriptor = descriptor.strip()
    if descriptor == "xor":
        if width is None:
            raise FormatError("xor descriptor needs a word width from context")
        return XorOp(width)
    parts = descriptor.split(":")
    if len(parts) != 3 or parts[0] != "circ":
        raise FormatError(f"bad operation descriptor: {descriptor!r}")
    try:
        n = int(parts[1])
    except ValueError as exc:
        raise FormatError(f"bad block size in descriptor: {descriptor!r}") from exc
    if n < 3:
        raise FormatError(f"block size must be at least 3: {descriptor!r}")
    b_list = [word_from_hex(tok, n - 2) for tok in parts[2].split(",")]
    if blocks is not None:
        if len(b_list) == 1:
            b_list = b_list * blocks
        elif len(b_list) != blocks:
            raise FormatError(
                f"descriptor lists {len(b_list)} blocks, expected {blocks}")
    ops = [make_op(n, b) for b in b_list]
    if len(ops) == 1:
        return ops[0]
    return parallel(ops)


def op_to_text(op: Operation) -> str:
    """Operation descriptor file: block size, block count, b per block."""
    if isinstance(op, XorOp):
        return "op xor\nbits {}\n".format(op.n)
    if isinstance(op, AltOperation):
        blocks = [op]
    else:
        blocks = list(op.blocks)
    n = blocks[0].n
    bs = ",".join(word_to_hex(b.b, n - 2) for b in blocks)
    return "op circ\nn {}\nm {}\nb {}\n".format(n, len(blocks), bs)


def op_from_text(text: str) -> Operation:
    fields = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, _, value = ln.partition(" ")
        fields[key] = value.strip()
    kind = fields.get("op")
    if kind == "xor":
        return XorOp(int(fields["bits"]))
    if kind != "circ":
        raise FormatError("descriptor file must declare `op circ` or `op xor`")
    try:
        n = int(fields["n"])
        m = int(fields["m"])
        b_field = fields["b"]
    except KeyError as exc:
        raise FormatError(f"descriptor file missing field {exc}") from exc
    return parse_op(f"circ:{n}:{b_field}", blocks=m)
