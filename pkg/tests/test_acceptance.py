"""Acceptance gate: one criterion per test, one verdict line each.

Each test prints `ACCEPTANCE <k> <name>: PASS|FAIL` before asserting, so
the verdict survives in the captured output either way. Run with `-s`
(or read the captured stdout of failures) to see the lines.
"""

import math
import random

import numpy as np
import pytest

from altdiff.analysis import (NORMALIZATION_TOL, RoundEngine, markov_best,
                              markov_prob, montecarlo_best,
                              montecarlo_triples)
from altdiff.cipher import ddt, keygen, paper16, round_states
from altdiff.gf2 import BinMatrix
from altdiff.hcirc import (conjecture_bound, enumerate_gl, enumerate_hcirc,
                           is_circ_linear, parallel_hcirc_witnesses,
                           structure_check)
from altdiff.ops import XorOp, make_op, parallel

from test_cipher import DDT_CIRC, DDT_XOR
from test_ops import CAYLEY_4_1

SPEC = paper16()
OP4 = make_op(4, 1)
PAR4 = parallel([OP4] * 4)
XOR16 = XorOp(16)

MC_KEYS = 1 << 10
MC_PAIRS = 1 << 16
LOG2_TOL = 0.15
CURVE_GAP_MIN = 0.4


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {num} {name}: {verdict}{suffix}")
    assert ok, f"criterion {num} {name}{suffix}"


def test_criterion_1_table_fidelity():
    cayley_ok = all(OP4.circ(a, y) == CAYLEY_4_1[a][y]
                    for a in range(16) for y in range(16))
    plus_table = ddt(SPEC.sbox, XorOp(4))
    circ_table = ddt(SPEC.sbox, OP4)
    plus_ok = [list(r) for r in plus_table.counts] == DDT_XOR
    circ_ok = [list(r) for r in circ_table.counts] == DDT_CIRC
    unif_ok = (plus_table.uniformity() == 4 and circ_table.uniformity() == 16
               and circ_table.counts[7][6] == 16)
    report(1, "table fidelity",
           cayley_ok and plus_ok and circ_ok and unif_ok,
           f"cayley={cayley_ok} ddt+={plus_ok} ddt_circ={circ_ok} "
           f"uniformity={unif_ok}")


def test_criterion_2_algebra_suite():
    axioms_ok = all(
        OP4.circ(a, 0) == a and OP4.circ(a, a) == 0 for a in range(16))
    for a in range(16):
        for y in range(16):
            if OP4.circ(a, y) != OP4.circ(y, a):
                axioms_ok = False
            ay = OP4.circ(a, y)
            for c in range(16):
                if OP4.circ(ay, c) != OP4.circ(a, OP4.circ(y, c)):
                    axioms_ok = False
    dot_ok = all(
        OP4.dot(a, y) == OP4.dot(y, a)
        and OP4.dot(a, OP4.circ(y, c)) == (OP4.dot(a, y) ^ OP4.dot(a, c))
        and OP4.dot(a, y ^ c) == (OP4.dot(a, y) ^ OP4.dot(a, c))
        for a in range(16) for y in range(16) for c in range(16))
    sets_ok = (OP4.weak_keys() == frozenset({0, 1, 2, 3})
               and OP4.error_set() == frozenset({0, 1}))
    key_ok = all(
        OP4.circ(x ^ k, y ^ k) == OP4.key_diff_transition(OP4.circ(x, y), k)
        for x in range(16) for y in range(16) for k in range(16))
    rng = random.Random(1)
    for _ in range(10_000):
        x, y, k = (rng.getrandbits(16) for _ in range(3))
        if PAR4.circ(x ^ k, y ^ k) != \
                PAR4.key_diff_transition(PAR4.circ(x, y), k):
            key_ok = False
            break
    report(2, "algebra suite", axioms_ok and dot_ok and sets_ok and key_ok,
           f"axioms={axioms_ok} dot={dot_ok} sets={sets_ok} keyid={key_ok}")


def test_criterion_3_doubly_linear_group_equivalence():
    gl4 = enumerate_gl(4)
    brute4 = set()
    agree = True
    for m in gl4:
        member = is_circ_linear(m, OP4)
        if member:
            brute4.add(m.rows)
        if (structure_check(m, OP4) is not None) != member:
            agree = False
    enum4 = {m.rows for m in enumerate_hcirc(OP4)}
    op3 = make_op(3, 1)
    brute3 = {m.rows for m in enumerate_gl(3) if is_circ_linear(m, op3)}
    enum3 = {m.rows for m in enumerate_hcirc(op3)}
    ok = (len(gl4) == 20160 and len(brute4) == 192 and brute4 == enum4
          and agree and len(brute3) == 24 and brute3 == enum3)
    report(3, "doubly linear group equivalence", ok,
           f"|GL(4,2)|={len(gl4)} brute4={len(brute4)} "
           f"structure_agrees={agree} brute3={len(brute3)}")


def test_criterion_4_diffusion_premise():
    inv_ok = SPEC.diffusion.is_invertible()
    lin_ok = is_circ_linear(SPEC.diffusion, PAR4)
    report(4, "diffusion layer premise", inv_ok and lin_ok,
           f"invertible={inv_ok} circ_linear={lin_ok}")


def test_criterion_5_reference_endpoint_reproduction():
    circ_best = markov_best(SPEC, PAR4, rounds=17)[-1]
    plus_best = markov_best(SPEC, XOR16, rounds=17)[-1]
    circ_ok = (circ_best.din == 0x0070 and circ_best.dout == 0x0600
               and abs(circ_best.log2_prob - (-14.411)) <= LOG2_TOL)
    plus_ok = (plus_best.din == 0x0060 and plus_best.dout == 0x0700
               and abs(plus_best.log2_prob - (-14.993)) <= LOG2_TOL)
    report(5, "reference endpoint reproduction", circ_ok and plus_ok,
           f"circ {circ_best.din:04X}->{circ_best.dout:04X} "
           f"2^{circ_best.log2_prob:.3f} (want 0070->0600 2^-14.411), "
           f"plus {plus_best.din:04X}->{plus_best.dout:04X} "
           f"2^{plus_best.log2_prob:.3f} (want 0060->0700 2^-14.993)")


def test_criterion_6_curve_dominance():
    circ = markov_best(SPEC, PAR4, rounds=17)
    plus = markov_best(SPEC, XOR16, rounds=17)
    dominance = all(c.prob >= p.prob for c, p in zip(circ, plus))
    gap = circ[-1].log2_prob - plus[-1].log2_prob
    ok = dominance and gap >= CURVE_GAP_MIN
    report(6, "round-by-round dominance", ok,
           f"dominance={dominance} final_gap={gap:.3f} (need >= "
           f"{CURVE_GAP_MIN})")


def test_criterion_7_engine_cross_validation():
    rng = np.random.default_rng(20260823)
    cands = [v << s for s in (12, 8, 4, 0) for v in range(1, 16)]
    cases = []
    for op in (XOR16, PAR4):
        engine = RoundEngine(SPEC, op)
        triples = []
        while len(triples) < 10:
            din = int(rng.choice(cands))
            r = int(rng.integers(1, 6))
            flat = None
            for flat in engine.propagate(din, r):
                pass
            dout = int(rng.choice(1 << 16, p=flat))
            if dout == 0:
                continue
            triples.append((din, dout, r))
        cases.append((op, triples))
    triples_ok = True
    worst = 0.0
    for op, triples in cases:
        ests = montecarlo_triples(SPEC, op, triples, keys=MC_KEYS,
                                  pairs=MC_PAIRS, seed=20260823)
        for est in ests:
            exact = markov_prob(SPEC, op, est.din, est.dout, est.rounds)
            gap = abs(est.mean - exact)
            limit = max(3 * est.stderr, 1e-12)
            worst = max(worst, gap / limit if limit else 0.0)
            if gap > limit:
                triples_ok = False
    argmax_ok = True
    argmax_note = []
    for op in (XOR16, PAR4):
        mc = montecarlo_best(SPEC, op, rounds=17, keys=MC_KEYS,
                             pairs=MC_PAIRS, seed=20260823,
                             report_rounds=[17], threads=4)[0]
        mk = markov_best(SPEC, op, rounds=17)[-1]
        same = (mc.din, mc.dout) == (mk.din, mk.dout)
        argmax_ok = argmax_ok and same
        argmax_note.append(
            f"{op.tag}: mc {mc.din:04X}->{mc.dout:04X} vs "
            f"markov {mk.din:04X}->{mk.dout:04X}")
    report(7, "engine cross-validation", triples_ok and argmax_ok,
           f"triples_within_3se={triples_ok} (worst ratio {worst:.2f}), "
           f"argmax_match={argmax_ok} [{'; '.join(argmax_note)}]")


def test_criterion_8_cipher_soundness():
    size = 1 << 16
    idx = np.arange(size, dtype=np.uint32)
    inv_sub = np.zeros(size, dtype=np.uint32)
    table = np.array(SPEC.sbox.inverse_table, dtype=np.uint32)
    for i in range(4):
        shift = 4 * (3 - i)
        inv_sub |= table[(idx >> shift) & 0xF] << np.uint32(shift)
    lam_inv = SPEC.diffusion.inv().apply_all()
    roundtrip_ok = True
    for j in range(100):
        key = keygen(SPEC, f"soundness/{j}")
        y = round_states(SPEC, key)[SPEC.rounds]
        for k in reversed(key.round_keys):
            y = inv_sub[lam_inv[y ^ np.uint32(k)]]
        if not np.array_equal(y, idx):
            roundtrip_ok = False
            break
    norm_ok = True
    for op in (XOR16, PAR4):
        engine = RoundEngine(SPEC, op)
        flat = None
        for flat in engine.propagate(0x0070, 17):
            pass
        if abs(float(flat.sum()) - 1.0) > NORMALIZATION_TOL:
            norm_ok = False
    report(8, "cipher soundness", roundtrip_ok and norm_ok,
           f"roundtrip_100_keys={roundtrip_ok} normalization={norm_ok}")


def test_criterion_9_conjecture_tooling():
    bound_ok = conjecture_bound(4, 4) == 13_860_864
    witnesses = parallel_hcirc_witnesses(PAR4, budget=120, seed=2)
    verify_ok = (len(witnesses) >= 20
                 and all(is_circ_linear(m, PAR4) for m in witnesses))
    report(9, "conjecture tooling", bound_ok and verify_ok,
           f"bound={bound_ok} witnesses={len(witnesses)} "
           f"all_reverify={verify_ok}")
