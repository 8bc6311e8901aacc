"""Toy SPN internals and difference distribution tables."""

import numpy as np
import pytest

from altdiff.cipher import (BUILTIN_CIPHERS, CipherSpec, LongKey, SboxSpec,
                            cipher_from_text, cipher_to_text, ddt, decrypt,
                            encrypt, encrypt_all, keygen, load_cipher,
                            paper16, round_states, sub_layer)
from altdiff.errors import DimensionError, FormatError, VerificationError
from altdiff.gf2 import BinMatrix
from altdiff.ops import XorOp, make_op

# Frozen reference DDTs of the builtin 4-bit s-box; rows are input
# differences, columns output differences.
DDT_XOR = [
    [16, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4, 4, 0, 0, 4, 4],
    [0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2, 2, 2, 2, 2, 2],
    [0, 4, 4, 0, 0, 4, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 4, 0, 0, 0, 0, 4, 0, 0, 2, 2, 0, 0, 2, 2],
    [0, 4, 0, 0, 0, 4, 0, 0, 2, 2, 0, 0, 2, 2, 0, 0],
    [0, 0, 0, 0, 0, 0, 4, 4, 2, 2, 0, 0, 2, 2, 0, 0],
    [0, 0, 0, 0, 0, 0, 4, 4, 2, 2, 0, 0, 2, 2, 0, 0],
    [0, 0, 0, 4, 2, 2, 0, 0, 0, 0, 0, 0, 0, 4, 2, 2],
    [0, 0, 0, 4, 2, 2, 0, 0, 0, 0, 0, 0, 4, 0, 2, 2],
    [0, 2, 2, 0, 2, 0, 2, 0, 0, 2, 0, 2, 0, 2, 2, 0],
    [0, 2, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 0, 2],
    [0, 2, 2, 0, 2, 0, 2, 0, 0, 2, 2, 0, 0, 2, 0, 2],
    [0, 2, 2, 0, 2, 0, 2, 0, 2, 0, 0, 2, 2, 0, 2, 0],
    [0, 0, 0, 4, 2, 2, 0, 0, 0, 4, 2, 2, 0, 0, 0, 0],
    [0, 0, 0, 4, 2, 2, 0, 0, 4, 0, 2, 2, 0, 0, 0, 0],
]

DDT_CIRC = [
    [16, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 0, 0, 0, 8, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 4, 4, 0, 0, 4],
    [0, 4, 4, 0, 4, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 4, 4, 0, 4, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 4, 4, 0, 0, 4],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 0, 0, 0, 8, 0, 0],
    [0, 0, 0, 0, 0, 0, 16, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 8, 0],
    [0, 0, 0, 8, 0, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 4, 4, 0, 4, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 4, 4, 0, 0, 4],
    [0, 4, 4, 0, 4, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 4, 4, 0, 0, 4],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 8, 0, 0, 0, 0, 0],
    [0, 0, 0, 8, 0, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
]


@pytest.fixture(scope="module")
def spec():
    return paper16()


def test_sbox_validation():
    with pytest.raises(FormatError):
        SboxSpec(table=(0, 1, 1, 3))
    with pytest.raises(DimensionError):
        SboxSpec(table=(0, 1, 2))
    sbox = paper16().sbox
    inv = sbox.inverse_table
    assert all(inv[sbox.table[x]] == x for x in range(16))
    assert SboxSpec.from_hex(sbox.to_hex()).table == sbox.table


def test_ddt_xor_matches_frozen_reference(spec):
    table = ddt(spec.sbox, XorOp(4))
    assert [list(r) for r in table.counts] == DDT_XOR
    assert table.uniformity() == 4


def test_ddt_circ_matches_frozen_reference(spec):
    table = ddt(spec.sbox, make_op(4, 1))
    assert [list(r) for r in table.counts] == DDT_CIRC
    assert table.uniformity() == 16
    assert table.counts[7][6] == 16  # difference 7 propagates deterministically


def test_ddt_rows_sum_to_input_count(spec):
    for op in (XorOp(4), make_op(4, 1), make_op(4, 2)):
        arr = ddt(spec.sbox, op).as_array()
        assert np.all(arr.sum(axis=1) == 16)


def test_ddt_output_formats(spec):
    table = ddt(spec.sbox, XorOp(4))
    csv = table.to_csv()
    assert csv.splitlines()[0].startswith("xor,0,1,2")
    assert len(csv.splitlines()) == 17
    pretty = table.to_pretty()
    assert "16" in pretty and "." in pretty


def test_keygen_is_deterministic(spec):
    k1 = keygen(spec, "seed-a")
    k2 = keygen(spec, "seed-a")
    k3 = keygen(spec, "seed-b")
    assert k1.round_keys == k2.round_keys
    assert k1.round_keys != k3.round_keys
    assert len(k1.round_keys) == spec.rounds
    assert all(0 <= k < 1 << 16 for k in k1.round_keys)


def test_keygen_bits_look_uniform(spec):
    big = CipherSpec(m=spec.m, nb=spec.nb, sbox=spec.sbox,
                     diffusion=spec.diffusion, rounds=2000)
    keys = np.array(keygen(big, 0).round_keys, dtype=np.uint32)
    for bit in range(16):
        frac = float(((keys >> bit) & 1).mean())
        assert abs(frac - 0.5) < 0.05


def test_encrypt_decrypt_round_trip(spec):
    key = keygen(spec, 1)
    rng = np.random.default_rng(2)
    for x in rng.integers(0, 1 << 16, size=300):
        x = int(x)
        assert decrypt(spec, key, encrypt(spec, key, x)) == x


def test_round_states_agree_with_encrypt(spec):
    key = keygen(spec, 3)
    states = round_states(spec, key)
    assert states.shape == (18, 1 << 16)
    for x in (0, 0x1234, 0xFFFF, 0x0070):
        assert int(states[spec.rounds][x]) == encrypt(spec, key, x)
    assert np.array_equal(encrypt_all(spec, key), states[spec.rounds])


def test_sub_layer_blockwise(spec):
    assert sub_layer(spec, 0x0000) == 0x0000
    assert sub_layer(spec, 0x1234) == int(
        "".join(format(spec.sbox.table[v], "X") for v in (1, 2, 3, 4)), 16)
    assert sub_layer(spec, sub_layer(spec, 0xBEEF), inverse=True) == 0xBEEF


def test_spec_validation(spec):
    with pytest.raises(VerificationError):
        CipherSpec(m=4, nb=4, sbox=spec.sbox,
                   diffusion=BinMatrix.zeros(16, 16), rounds=17)
    with pytest.raises(DimensionError):
        CipherSpec(m=2, nb=4, sbox=spec.sbox,
                   diffusion=spec.diffusion, rounds=17)
    with pytest.raises(DimensionError):
        encrypt(spec, LongKey(round_keys=(1, 2, 3)), 0)


def test_cipher_file_round_trip(spec, tmp_path):
    text = cipher_to_text(spec)
    back = cipher_from_text(text)
    assert back == spec
    path = tmp_path / "toy.cipher"
    path.write_text(text)
    assert load_cipher(str(path)) == spec
    assert load_cipher(str(path), rounds=5).rounds == 5
    with pytest.raises(FormatError):
        cipher_from_text("m 4\nnb 4\n")
    with pytest.raises(FormatError):
        load_cipher(str(tmp_path / "missing.cipher"))


def test_builtin_registry(spec):
    assert "paper16" in BUILTIN_CIPHERS
    assert load_cipher("paper16") == spec
    assert load_cipher("paper16", rounds=3).rounds == 3
