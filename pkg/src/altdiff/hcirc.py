"""Membership, enumeration and counting for H = GL(V,+) ∩ GL(V,circ).

A diffusion layer inside this intersection propagates circ-differences
deterministically, which is the premise of the whole distinguishing
experiment. For a single block with weak-key dimension d = n-2 the group
has an exact (A, B, D) block parametrization; for parallel operations no
structural shortcut is known, so membership is decided by the direct
linearity check only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError, DimensionError
from .gf2 import BinMatrix, block_matrix
from .ops import AltOperation, Operation, ParallelOperation, XorOp

_NUMPY_PATH_MIN_BITS = 10  # below this the scalar table path is faster


@dataclass(frozen=True)
class HCircStructure:
    """Block decomposition (A, B, D) of a single-block H element."""

    a: BinMatrix      # 2 x 2, invertible
    b_block: BinMatrix  # 2 x d, arbitrary
    d: BinMatrix      # d x d, invertible, fixes the defining vector

    def assemble(self) -> BinMatrix:
        zeros = BinMatrix.zeros(self.d.nrows, 2)
        return block_matrix([[self.a, self.b_block], [zeros, self.d]])


def is_circ_linear(mat: BinMatrix, op: Operation) -> bool:
    """True iff mat is invertible and additive for op.

    Additivity is checked against the basis vectors only; this suffices
    because (V, circ) is a vector space, and is cross-validated by the
    exhaustive pairwise check in the test suite.
    """
    width = op.nbits
    if mat.nrows != mat.ncols or mat.nrows != width:
        raise DimensionError("matrix size does not match the operation")
    if not mat.is_invertible():
        return False
    if isinstance(op, XorOp):
        return True
    if width >= _NUMPY_PATH_MIN_BITS:
        return _is_circ_linear_vec(mat, op)
    img = [mat.apply(x) for x in range(1 << width)]
    for i in range(width):
        e = 1 << (width - 1 - i)
        img_e = img[e]
        for x in range(1 << width):
            if img[op.circ(x, e)] != op.circ(img[x], img_e):
                return False
    return True


def _is_circ_linear_vec(mat: BinMatrix, op: Operation) -> bool:
    width = op.nbits
    img = mat.apply_all()
    xs = np.arange(1 << width, dtype=np.uint32)
    for i in range(width):
        e = 1 << (width - 1 - i)
        lhs = img[op.circ_many(xs, np.uint32(e))]
        rhs = op.circ_many(img, np.uint32(img[e]))
        if not np.array_equal(lhs, rhs):
            return False
    return True


def structure_check(mat: BinMatrix, op: AltOperation) -> Optional[HCircStructure]:
    """Decompose mat into the theorem's (A, B, D) blocks, or reject."""
    n = op.n
    if mat.nrows != n or mat.ncols != n:
        raise DimensionError("matrix size does not match the operation")
    d = n - 2
    a = mat.submatrix(0, 2, 0, 2)
    b_block = mat.submatrix(0, 2, 2, n)
    lower_left = mat.submatrix(2, n, 0, 2)
    dd = mat.submatrix(2, n, 2, n)
    if any(lower_left.rows):
        return None
    if not a.is_invertible() or not dd.is_invertible():
        return None
    if dd.apply(op.b) != op.b:
        return None
    return HCircStructure(a=a, b_block=b_block, d=dd)


def enumerate_gl(n: int) -> List[BinMatrix]:
    """All invertible n x n matrices over GF(2); desk scale, n <= 4."""
    if n > 4:
        raise CapacityError("GL enumeration limited to n <= 4")
    out = []
    for rows in itertools.product(range(1 << n), repeat=n):
        m = BinMatrix(n, n, rows)
        if m.is_invertible():
            out.append(m)
    return out


def enumerate_hcirc(op: AltOperation) -> List[BinMatrix]:
    """All of H for a single block, from the (A, B, D) parametrization."""
    n = op.n
    if n > 5:
        raise CapacityError("H enumeration limited to block size n <= 5")
    d = n - 2
    a_choices = enumerate_gl(2)
    d_choices = [m for m in enumerate_gl(d)
                 if m.apply(op.b) == op.b]
    out = []
    for a in a_choices:
        for dd in d_choices:
            for b_rows in itertools.product(range(1 << d), repeat=2):
                b_block = BinMatrix(2, d, b_rows)
                zeros = BinMatrix.zeros(d, 2)
                out.append(block_matrix([[a, b_block], [zeros, dd]]))
    return out


def hcirc_order(op: AltOperation) -> int:
    """Predicted |H|: |GL(2,2)| * #{D in GL(d,2): bD = b} * 2^(2d)."""
    d = op.n - 2
    gl2 = 6
    d_count = sum(1 for m in enumerate_gl(d) if m.apply(op.b) == op.b)
    return gl2 * d_count * (1 << (2 * d))


def conjecture_bound(n: int, m: int) -> int:
    """Conjectured lower bound on |H| for m parallel n-bit blocks.

    Evaluated literally in exact integer arithmetic. For m = 1 the last
    bracket is negative; the bound is meaningful for m >= 2 only.
    """
    if n < 3 or m < 1:
        raise DimensionError("need n >= 3 and m >= 1")
    prod = 1
    for h in range(0, n - 3):
        prod *= (1 << (n - 3)) - (1 << h)
    bracket = (m * m - m) * (1 << (n * n - 5 * n + 6)) - 1
    return (m ** 3) * _factorial(m) * 3 * (1 << (3 * n - 6)) * prod * bracket


def _factorial(m: int) -> int:
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def block_diagonal(mats: Sequence[BinMatrix]) -> BinMatrix:
    """N x N matrix with the given blocks on the diagonal."""
    grid = []
    for i, mi in enumerate(mats):
        row = []
        for j, mj in enumerate(mats):
            row.append(mi if i == j else BinMatrix.zeros(mi.nrows, mj.ncols))
        grid.append(row)
    return block_matrix(grid)


def block_permutation(perm: Sequence[int], nb: int) -> BinMatrix:
    """Permutation matrix moving block i to position perm[i]."""
    m = len(perm)
    n = m * nb
    rows = [0] * n
    for i, p in enumerate(perm):
        for r in range(nb):
            rows[i * nb + r] = 1 << (n - 1 - (p * nb + r))
    return BinMatrix(n, n, tuple(rows))


def parallel_hcirc_witnesses(op: ParallelOperation, budget: int,
                             seed: int = 0) -> List[BinMatrix]:
    """Distinct verified H elements for a parallel operation.

    Candidates come from three families: blockwise-diagonal assemblies
    of per-block H elements, block-permutation matrices, and random
    products of already-verified elements. Every candidate is certified
    with the direct linearity check; the result is a lower-bound sample
    of the full group.
    """
    rng = random.Random(seed)
    per_block = [enumerate_hcirc(b) for b in op.blocks]
    nb = op.block_bits
    seen = {}

    def consider(mat: BinMatrix) -> None:
        if mat.rows not in seen and is_circ_linear(mat, op):
            seen[mat.rows] = mat

    consider(block_diagonal([BinMatrix.identity(nb)] * op.m))
    quota = max(budget // 3, 1)
    for _ in range(quota):
        consider(block_diagonal([rng.choice(ch) for ch in per_block]))
    perms = list(itertools.permutations(range(op.m)))
    rng.shuffle(perms)
    for perm in perms[:quota]:
        consider(block_permutation(perm, nb))
    verified = list(seen.values())
    for _ in range(quota):
        if len(verified) < 2:
            break
        a = rng.choice(verified)
        b = rng.choice(verified)
        consider(a.mul(b))
        verified = list(seen.values())
    return list(seen.values())
