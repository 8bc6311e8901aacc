"""Differential-probability engines and the best-differential search.

Two routes to the same quantity: an exact expected-probability
propagation (per-round transition matrices over the full difference
space, valid because every round ends with an independent uniform XOR
key) and a seeded Monte-Carlo simulation over random long keys. The
search reports, per round count, the most likely (din, dout) pair for a
chosen difference operation.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .cipher import CipherSpec, ddt, keygen, round_states
from .errors import CapacityError, DimensionError, VerificationError
from .hcirc import is_circ_linear
from .ops import AltOperation, Operation, ParallelOperation, XorOp

NORMALIZATION_TOL = 1e-9
ALL_RESTRICT_LIMIT_BITS = 16


@dataclass
class DiffDistribution:
    """Probability vector over all differences for one operation."""

    probs: np.ndarray
    op_tag: str

    def validate(self) -> None:
        if np.any(self.probs < 0):
            raise VerificationError("negative probability mass")
        if abs(float(self.probs.sum()) - 1.0) > NORMALIZATION_TOL:
            raise VerificationError("distribution not normalized")

    @staticmethod
    def point(width: int, delta: int, op_tag: str) -> "DiffDistribution":
        probs = np.zeros(1 << width, dtype=np.float64)
        probs[delta] = 1.0
        return DiffDistribution(probs=probs, op_tag=op_tag)


@dataclass(frozen=True)
class BestDifferential:
    rounds: int
    din: int
    dout: int
    prob: float

    @property
    def log2_prob(self) -> float:
        return math.log2(self.prob) if self.prob > 0 else float("-inf")


@dataclass
class SearchReport:
    """Per-round best differentials for the XOR and the alternative sum."""

    engine: str
    rounds: int
    restrict: str
    plus: List[BestDifferential]
    circ: List[BestDifferential]
    keys: Optional[int] = None
    pairs: Optional[int] = None
    seed: Optional[str] = None

    def to_jsonable(self) -> dict:
        def dump(entries):
            return [{"round": e.rounds, "din": f"{e.din:04X}",
                     "dout": f"{e.dout:04X}", "prob": e.prob,
                     "log2_prob": e.log2_prob} for e in entries]
        out = {"engine": self.engine, "rounds": self.rounds,
               "restrict": self.restrict,
               "plus": dump(self.plus), "circ": dump(self.circ)}
        if self.engine == "montecarlo":
            out.update({"keys": self.keys, "pairs": self.pairs,
                        "seed": self.seed})
        return out


class RoundEngine:
    """Exact per-round transition of a difference distribution."""

    def __init__(self, spec: CipherSpec, op: Operation):
        if op.nbits != spec.nbits:
            raise DimensionError("operation width disagrees with the cipher")
        self.spec = spec
        self.op = op
        self.shape = (1 << spec.nb,) * spec.m
        block_ops = self._block_ops(spec, op)
        self.sbox_mats = [self._sbox_matrix(spec, bop) for bop in block_ops]
        self.key_mats = [self._key_error_matrix(bop) for bop in block_ops]
        if not isinstance(op, XorOp) and not is_circ_linear(spec.diffusion, op):
            raise VerificationError(
                "diffusion layer is not linear for the requested operation")
        self.perm = spec.diffusion.apply_all()

    @staticmethod
    def _block_ops(spec: CipherSpec, op: Operation) -> List[Operation]:
        if isinstance(op, XorOp):
            return [XorOp(spec.nb)] * spec.m
        if isinstance(op, ParallelOperation):
            if op.m != spec.m or op.block_bits != spec.nb:
                raise DimensionError("operation blocks disagree with the cipher")
            return list(op.blocks)
        raise DimensionError("a parallel or XOR operation is required")

    @staticmethod
    def _sbox_matrix(spec: CipherSpec, bop: Operation) -> np.ndarray:
        counts = ddt(spec.sbox, bop).as_array()
        return counts.astype(np.float64) / float(1 << spec.nb)

    @staticmethod
    def _key_error_matrix(bop: Operation) -> Optional[np.ndarray]:
        if isinstance(bop, XorOp):
            return None  # XOR differences survive key addition unchanged
        size = 1 << bop.n
        mat = np.zeros((size, size), dtype=np.float64)
        for din in range(size):
            for k in range(size):
                mat[din, din ^ bop.dot(k, din)] += 1.0 / size
        return mat

    def _apply_blockwise(self, flat: np.ndarray,
                         mats: Sequence[Optional[np.ndarray]]) -> np.ndarray:
        dist = flat.reshape(self.shape)
        for axis, mat in enumerate(mats):
            if mat is None:
                continue
            dist = np.moveaxis(np.tensordot(dist, mat, axes=([axis], [0])),
                               -1, axis)
        return dist.reshape(-1)

    def step(self, flat: np.ndarray) -> np.ndarray:
        """One round: s-box layer, diffusion permutation, key-error stage."""
        out = self._apply_blockwise(flat, self.sbox_mats)
        permuted = np.empty_like(out)
        permuted[self.perm] = out
        return self._apply_blockwise(permuted, self.key_mats)

    def propagate(self, din: int, rounds: int) -> Iterable[np.ndarray]:
        """Yields the distribution after each of `rounds` rounds."""
        flat = np.zeros(1 << self.spec.nbits, dtype=np.float64)
        flat[din] = 1.0
        for _ in range(rounds):
            flat = self.step(flat)
            yield flat


def candidate_inputs(spec: CipherSpec, restrict: str,
                     explicit: Optional[Sequence[int]] = None,
                     allow_big: bool = False) -> List[int]:
    if explicit is not None:
        return sorted(set(explicit))
    if restrict == "single-block":
        out = []
        for i in range(spec.m):
            shift = spec.nb * (spec.m - 1 - i)
            out.extend(v << shift for v in range(1, 1 << spec.nb))
        return sorted(out)
    if restrict == "all":
        if not allow_big and spec.nbits >= ALL_RESTRICT_LIMIT_BITS:
            raise CapacityError(
                "restrict=all sweeps every input difference; rerun with the "
                "big-run flag to accept the multi-hour budget")
        return list(range(1, 1 << spec.nbits))
    raise DimensionError(f"unknown restriction {restrict!r}")


def _fold_best(best: Optional[BestDifferential], din: int,
               flat: np.ndarray, rounds: int) -> BestDifferential:
    body = flat[1:]
    dout = int(np.argmax(body)) + 1  # argmax takes the smallest dout on ties
    prob = float(body[dout - 1])
    cand = BestDifferential(rounds=rounds, din=din, dout=dout, prob=prob)
    if best is None or cand.prob > best.prob:
        return cand
    return best


def markov_best(spec: CipherSpec, op: Operation, rounds: int,
                restrict: str = "single-block",
                candidates: Optional[Sequence[int]] = None,
                allow_big: bool = False) -> List[BestDifferential]:
    """Best expected differential per round count 1..rounds."""
    if rounds < 1:
        raise DimensionError("need at least one round")
    engine = RoundEngine(spec, op)
    cands = candidate_inputs(spec, restrict, candidates, allow_big)
    best: List[Optional[BestDifferential]] = [None] * rounds
    for din in cands:
        for r, flat in enumerate(engine.propagate(din, rounds)):
            best[r] = _fold_best(best[r], din, flat, r + 1)
    return [b for b in best if b is not None]


def _key_seed(seed, index: int) -> str:
    return hashlib.sha256(f"{seed}/key{index}".encode()).hexdigest()


def _sample_plaintexts(spec: CipherSpec, pairs: int, seed) -> np.ndarray:
    total = 1 << spec.nbits
    if not 1 <= pairs <= total:
        raise DimensionError("pair count must be between 1 and 2^N")
    if pairs == total:
        return np.arange(total, dtype=np.uint32)
    digest = hashlib.sha256(f"{seed}/plaintexts".encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
    return rng.choice(total, size=pairs, replace=False).astype(np.uint32)


def montecarlo_best(spec: CipherSpec, op: Operation, rounds: int,
                    keys: int, pairs: int, restrict: str = "single-block",
                    seed=0, candidates: Optional[Sequence[int]] = None,
                    report_rounds: Optional[Sequence[int]] = None,
                    threads: int = 1) -> List[BestDifferential]:
    """Key-averaged simulated best differentials.

    Tallies exact fixed-key counts for each sampled key and averages
    them. `report_rounds` limits tallying (and memory) to the round
    counts of interest; default is every round count.
    """
    if rounds < 1 or keys < 1:
        raise DimensionError("need at least one round and one key")
    if op.nbits != spec.nbits:
        raise DimensionError("operation width disagrees with the cipher")
    spec = CipherSpec(m=spec.m, nb=spec.nb, sbox=spec.sbox,
                      diffusion=spec.diffusion, rounds=rounds)
    cands = candidate_inputs(spec, restrict, candidates)
    report = sorted(set(report_rounds)) if report_rounds else list(
        range(1, rounds + 1))
    if any(r < 1 or r > rounds for r in report):
        raise DimensionError("report rounds out of range")
    xs = _sample_plaintexts(spec, pairs, seed)
    size = 1 << spec.nbits

    def run_chunk(key_indices):
        sums = np.zeros((len(cands), len(report), size), dtype=np.float64)
        for j in key_indices:
            key = keygen(spec, _key_seed(seed, j))
            states = round_states(spec, key)
            for ci, din in enumerate(cands):
                ys = op.circ_many(xs, np.uint32(din))
                for ri, r in enumerate(report):
                    diffs = op.circ_many(states[r][xs], states[r][ys])
                    sums[ci, ri] += np.bincount(diffs, minlength=size)
        return sums

    chunks = _split_indices(keys, threads)
    if len(chunks) == 1:
        totals = run_chunk(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(run_chunk, chunks))
        totals = sum(parts[1:], parts[0])
    totals /= float(keys * pairs)
    out = []
    for ri, r in enumerate(report):
        best = None
        for ci, din in enumerate(cands):
            best = _fold_best(best, din, totals[ci, ri], r)
        out.append(best)
    return out


def _split_indices(total: int, threads: int) -> List[List[int]]:
    threads = max(1, min(threads, total))
    chunks: List[List[int]] = [[] for _ in range(threads)]
    for i in range(total):
        chunks[i % threads].append(i)
    return [c for c in chunks if c]


@dataclass(frozen=True)
class TripleEstimate:
    din: int
    dout: int
    rounds: int
    mean: float
    stderr: float


def montecarlo_triples(spec: CipherSpec, op: Operation,
                       triples: Sequence[Tuple[int, int, int]],
                       keys: int, pairs: int, seed=0) -> List[TripleEstimate]:
    """Mean and standard error of specific differentials over random keys."""
    r_max = max(r for _, _, r in triples)
    spec = CipherSpec(m=spec.m, nb=spec.nb, sbox=spec.sbox,
                      diffusion=spec.diffusion, rounds=r_max)
    xs = _sample_plaintexts(spec, pairs, seed)
    per_key = np.zeros((len(triples), keys), dtype=np.float64)
    for j in range(keys):
        key = keygen(spec, _key_seed(seed, j))
        states = round_states(spec, key)
        for ti, (din, dout, r) in enumerate(triples):
            ys = op.circ_many(xs, np.uint32(din))
            diffs = op.circ_many(states[r][xs], states[r][ys])
            per_key[ti, j] = float(np.count_nonzero(diffs == dout)) / pairs
    out = []
    for ti, (din, dout, r) in enumerate(triples):
        mean = float(per_key[ti].mean())
        std = float(per_key[ti].std(ddof=1)) if keys > 1 else 0.0
        out.append(TripleEstimate(din=din, dout=dout, rounds=r, mean=mean,
                                  stderr=std / math.sqrt(keys)))
    return out


def markov_prob(spec: CipherSpec, op: Operation, din: int, dout: int,
                rounds: int) -> float:
    """Exact expected probability of one differential."""
    engine = RoundEngine(spec, op)
    flat = None
    for flat in engine.propagate(din, rounds):
        pass
    return float(flat[dout])


def search(spec: CipherSpec, circ_op: Operation, rounds: int,
           engine: str = "markov", restrict: str = "single-block",
           keys: int = 1024, pairs: Optional[int] = None, seed=0,
           allow_big: bool = False, threads: int = 1,
           report_rounds: Optional[Sequence[int]] = None) -> SearchReport:
    """Run both the XOR and the alternative-sum searches side by side."""
    xor_op = XorOp(spec.nbits)
    if pairs is None:
        pairs = 1 << spec.nbits
    if engine == "markov":
        plus = markov_best(spec, xor_op, rounds, restrict, allow_big=allow_big)
        circ = markov_best(spec, circ_op, rounds, restrict, allow_big=allow_big)
        return SearchReport(engine="markov", rounds=rounds, restrict=restrict,
                            plus=plus, circ=circ)
    if engine == "montecarlo":
        plus = montecarlo_best(spec, xor_op, rounds, keys, pairs, restrict,
                               seed=seed, report_rounds=report_rounds,
                               threads=threads)
        circ = montecarlo_best(spec, circ_op, rounds, keys, pairs, restrict,
                               seed=seed, report_rounds=report_rounds,
                               threads=threads)
        return SearchReport(engine="montecarlo", rounds=rounds,
                            restrict=restrict, plus=plus, circ=circ,
                            keys=keys, pairs=pairs, seed=str(seed))
    raise DimensionError(f"unknown engine {engine!r}")


CURVE_HEADER = ("round,log2_best_plus,din_plus,dout_plus,"
                "log2_best_circ,din_circ,dout_circ")


def curve_rows(report: SearchReport) -> List[str]:
    """CSV rows, one per round count, pairing the two operations."""
    rows = []
    for p, c in zip(report.plus, report.circ):
        rows.append("{},{:.6f},{:04X},{:04X},{:.6f},{:04X},{:04X}".format(
            p.rounds, p.log2_prob, p.din, p.dout,
            c.log2_prob, c.din, c.dout))
    return rows


def curve_csv(report: SearchReport) -> str:
    return "\n".join([CURVE_HEADER] + curve_rows(report)) + "\n"
