"""The 16-bit toy SPN and difference distribution tables.

Each round applies the same 4-bit s-box to every block, multiplies the
state by the diffusion matrix, then XORs an independent round key; there
is no whitening key before the first round and the final round keeps the
diffusion step.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, FormatError, VerificationError
from .gf2 import (BinMatrix, check_word, hex_width, join_blocks, split_blocks,
                  word_from_hex, word_to_hex)
from .ops import AltOperation, Operation, XorOp

PAPER_SBOX = (0x0, 0xE, 0xB, 0x1, 0x7, 0xC, 0x9, 0x6,
              0xD, 0x3, 0x4, 0xF, 0x2, 0x8, 0xA, 0x5)

PAPER_DIFFUSION_TEXT = """\
0000000000001000
0010001000100111
0010001000100000
0000000000000001
1000000000000000
0111001000100010
0000001000100010
0001000000000000
0000100000000000
0010011100100010
0010000000100010
0000000100000000
0000000010000000
0010001001110010
0010001000000010
0000000000010000
"""


@dataclass(frozen=True)
class SboxSpec:
    """A bijective nb-bit substitution, input read MSB first."""

    table: Tuple[int, ...]

    def __post_init__(self):
        size = len(self.table)
        if size & (size - 1) or size < 2:
            raise DimensionError("s-box size must be a power of two")
        if sorted(self.table) != list(range(size)):
            raise FormatError("s-box table is not a permutation")

    @property
    def bits(self) -> int:
        return (len(self.table) - 1).bit_length()

    @property
    def inverse_table(self) -> Tuple[int, ...]:
        inv = [0] * len(self.table)
        for x, y in enumerate(self.table):
            inv[y] = x
        return tuple(inv)

    def apply(self, x: int) -> int:
        return self.table[x]

    def to_hex(self) -> str:
        w = hex_width(self.bits)
        return "".join(format(v, "0{}X".format(w)) for v in self.table)

    @staticmethod
    def from_hex(s: str, bits: int = 4) -> "SboxSpec":
        w = hex_width(bits)
        if len(s) != w * (1 << bits):
            raise FormatError("s-box hex string has the wrong length")
        vals = tuple(int(s[i * w:(i + 1) * w], 16) for i in range(1 << bits))
        return SboxSpec(table=vals)


@dataclass(frozen=True)
class CipherSpec:
    """Geometry, s-box, diffusion matrix and round count of the SPN."""

    m: int
    nb: int
    sbox: SboxSpec
    diffusion: BinMatrix
    rounds: int

    def __post_init__(self):
        n = self.m * self.nb
        if self.sbox.bits != self.nb:
            raise DimensionError("s-box width disagrees with block size")
        if self.diffusion.nrows != n or self.diffusion.ncols != n:
            raise DimensionError("diffusion matrix size disagrees with geometry")
        if not self.diffusion.is_invertible():
            raise VerificationError("diffusion matrix is singular")
        if self.rounds < 0:
            raise DimensionError("negative round count")

    @property
    def nbits(self) -> int:
        return self.m * self.nb


@dataclass(frozen=True)
class LongKey:
    """Independent uniform round keys; reproducible from the seed."""

    round_keys: Tuple[int, ...]
    seed: Optional[str] = None


def keygen(spec: CipherSpec, seed) -> LongKey:
    """Counter-mode SHA-256 expansion of the seed into round keys."""
    n = spec.nbits
    nbytes = (n + 7) // 8
    keys = []
    for i in range(spec.rounds):
        digest = hashlib.sha256(f"{seed}:{i}".encode()).digest()
        keys.append(int.from_bytes(digest[:nbytes], "big") & ((1 << n) - 1))
    return LongKey(round_keys=tuple(keys), seed=str(seed))


def sub_layer(spec: CipherSpec, x: int, inverse: bool = False) -> int:
    table = spec.sbox.inverse_table if inverse else spec.sbox.table
    return join_blocks([table[b] for b in split_blocks(x, spec.m, spec.nb)],
                       spec.nb)


def encrypt(spec: CipherSpec, key: LongKey, x: int) -> int:
    if len(key.round_keys) != spec.rounds:
        raise DimensionError("key length disagrees with round count")
    check_word(x, spec.nbits)
    for k in key.round_keys:
        x = spec.diffusion.apply(sub_layer(spec, x)) ^ k
    return x


def decrypt(spec: CipherSpec, key: LongKey, y: int) -> int:
    if len(key.round_keys) != spec.rounds:
        raise DimensionError("key length disagrees with round count")
    check_word(y, spec.nbits)
    lam_inv = _layer_tables(spec).diffusion_inv
    for k in reversed(key.round_keys):
        y = sub_layer(spec, lam_inv.apply(y ^ k), inverse=True)
    return y


@dataclass(frozen=True)
class _LayerTables:
    sub: np.ndarray
    diffusion_img: np.ndarray
    diffusion_inv: BinMatrix


@lru_cache(maxsize=16)
def _layer_tables(spec: CipherSpec) -> _LayerTables:
    n = spec.nbits
    xs = np.arange(1 << n, dtype=np.uint32)
    sub = np.zeros(1 << n, dtype=np.uint32)
    table = np.array(spec.sbox.table, dtype=np.uint32)
    mask = (1 << spec.nb) - 1
    for i in range(spec.m):
        shift = spec.nb * (spec.m - 1 - i)
        sub |= table[(xs >> shift) & mask] << np.uint32(shift)
    inv = spec.diffusion.inv()
    if inv is None:
        raise VerificationError("diffusion matrix is singular")
    return _LayerTables(sub=sub, diffusion_img=spec.diffusion.apply_all(),
                        diffusion_inv=inv)


def round_states(spec: CipherSpec, key: LongKey) -> np.ndarray:
    """States after each round for every plaintext; shape (rounds+1, 2^N)."""
    tables = _layer_tables(spec)
    n = spec.nbits
    out = np.empty((spec.rounds + 1, 1 << n), dtype=np.uint32)
    out[0] = np.arange(1 << n, dtype=np.uint32)
    for r, k in enumerate(key.round_keys):
        out[r + 1] = tables.diffusion_img[tables.sub[out[r]]] ^ np.uint32(k)
    return out


def encrypt_all(spec: CipherSpec, key: LongKey) -> np.ndarray:
    """Ciphertexts of every plaintext as one table lookup array."""
    return round_states(spec, key)[spec.rounds]


@dataclass(frozen=True)
class DDTable:
    """Difference distribution counts of an s-box under a chosen sum."""

    counts: Tuple[Tuple[int, ...], ...]
    op_tag: str

    @property
    def size(self) -> int:
        return len(self.counts)

    def uniformity(self) -> int:
        return max(max(row) for row in self.counts[1:])

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def to_csv(self) -> str:
        w = hex_width((self.size - 1).bit_length())
        head = [self.op_tag] + [format(j, "0{}X".format(w)) for j in range(self.size)]
        lines = [",".join(head)]
        for i, row in enumerate(self.counts):
            lines.append(",".join([format(i, "0{}X".format(w))] +
                                  [str(v) for v in row]))
        return "\n".join(lines) + "\n"

    def to_pretty(self) -> str:
        w = hex_width((self.size - 1).bit_length())
        width = max(2, len(str(self.size)))
        head = " " * w + " |" + "".join(
            format(format(j, "X"), ">{}".format(width + 1)) for j in range(self.size))
        sep = "-" * len(head)
        lines = [head, sep]
        for i, row in enumerate(self.counts):
            cells = "".join(
                format(str(v) if v else ".", ">{}".format(width + 1)) for v in row)
            lines.append(format(i, "X").rjust(w) + " |" + cells)
        return "\n".join(lines) + "\n"


def ddt(sbox: SboxSpec, op: Operation) -> DDTable:
    """Counts of input/output difference pairs through the s-box.

    Pairs are (x, x circ din); the output difference is taken with the
    same operation.
    """
    if op.nbits != sbox.bits:
        raise DimensionError("operation width disagrees with the s-box")
    size = 1 << sbox.bits
    counts = [[0] * size for _ in range(size)]
    for din in range(size):
        for x in range(size):
            dout = op.circ(sbox.table[x], sbox.table[op.circ(x, din)])
            counts[din][dout] += 1
    return DDTable(counts=tuple(tuple(r) for r in counts), op_tag=op.tag)


def paper16(rounds: int = 17) -> CipherSpec:
    """The built-in 16-bit cipher: four 4-bit s-boxes and the fixed layer."""
    return CipherSpec(m=4, nb=4, sbox=SboxSpec(table=PAPER_SBOX),
                      diffusion=BinMatrix.from_text(PAPER_DIFFUSION_TEXT),
                      rounds=rounds)


BUILTIN_CIPHERS = {"paper16": paper16}


def cipher_to_text(spec: CipherSpec) -> str:
    lines = [
        f"m {spec.m}",
        f"nb {spec.nb}",
        f"rounds {spec.rounds}",
        f"sbox {spec.sbox.to_hex()}",
        "diffusion",
        spec.diffusion.to_text(),
    ]
    return "\n".join(lines) + "\n"


def cipher_from_text(text: str) -> CipherSpec:
    fields = {}
    matrix_lines = []
    in_matrix = False
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if in_matrix:
            matrix_lines.append(ln)
            continue
        if ln == "diffusion":
            in_matrix = True
            continue
        key, _, value = ln.partition(" ")
        fields[key] = value.strip()
    try:
        m = int(fields["m"])
        nb = int(fields["nb"])
        rounds = int(fields["rounds"])
        sbox_hex = fields["sbox"]
    except KeyError as exc:
        raise FormatError(f"cipher file missing field {exc}") from exc
    if not matrix_lines:
        raise FormatError("cipher file missing the diffusion matrix")
    diffusion = BinMatrix.from_text("\n".join(matrix_lines))
    if diffusion.nrows != diffusion.ncols:
        raise FormatError("diffusion matrix must be square")
    return CipherSpec(m=m, nb=nb, sbox=SboxSpec.from_hex(sbox_hex, nb),
                      diffusion=diffusion, rounds=rounds)


def load_cipher(name_or_path: str, rounds: Optional[int] = None) -> CipherSpec:
    """Resolve a builtin cipher name or a cipher spec file path."""
    if name_or_path in BUILTIN_CIPHERS:
        spec = BUILTIN_CIPHERS[name_or_path]()
    else:
        try:
            with open(name_or_path) as fh:
                spec = cipher_from_text(fh.read())
        except OSError as exc:
            raise FormatError(f"cannot read cipher spec: {exc}") from exc
    if rounds is not None:
        spec = CipherSpec(m=spec.m, nb=spec.nb, sbox=spec.sbox,
                          diffusion=spec.diffusion, rounds=rounds)
    return spec
