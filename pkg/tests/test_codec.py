import random
import struct
from dataclasses import replace

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import toy_oracle as oracle
from corpus import KINDS, Corpus
from vectors import PINNED, oracle_records
from ibms import Signcryptext, codec
from ibms.codec import MAGIC, Sealed, decode, encode, from_text, hash_input_bytes, pad_message, peek_kind, unpad_message
from ibms.errors import DecodeError


@pytest.fixture(scope="module")
def toy_corpus():
    return Corpus("toy", 1)


@pytest.fixture(scope="module")
def bls_corpus():
    return Corpus("bls12-381", 2)


@pytest.fixture(scope="module")
def valid_records(toy_corpus, bls_corpus):
    return [encode(c.make(k)) for c in (toy_corpus, bls_corpus) for k in KINDS for _ in range(3)]


class TestRoundTrip:
    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: codec.KIND_NAMES[k])
    def test_toy(self, toy_corpus, kind):
        for value in toy_corpus.records(kind, 200):
            data = encode(value)
            assert peek_kind(data) == kind
            assert decode(kind, data) == value
            assert decode(None, data) == value

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: codec.KIND_NAMES[k])
    def test_bls(self, bls_corpus, kind):
        for value in bls_corpus.records(kind, 15):
            assert decode(kind, encode(value)) == value

    def test_hex_text(self, toy_corpus):
        value = toy_corpus.make(codec.SIGMA)
        text = codec.to_hex(encode(value))
        assert text == text.lower()
        assert decode(None, from_text(text + "\n")) == value
        assert decode(None, from_text(encode(value))) == value
        with pytest.raises(DecodeError):
            from_text("not hex")


class TestInjectivity:
    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: codec.KIND_NAMES[k])
    def test_distinct_values_distinct_bytes(self, toy_corpus, kind):
        seen = {}
        for value in toy_corpus.records(kind, 200):
            data = encode(value)
            assert seen.setdefault(data, value) == value
        assert len(seen) == len(set(seen.values()))

    def test_one_identity_changed(self, toy_corpus):
        sigma = toy_corpus.make(codec.SIGMA)
        other = replace(sigma, L=tuple(sorted(set(sigma.L[1:]) | {b"\xff" * 12})))
        assert encode(other) != encode(sigma)

    def test_field_boundaries_do_not_collide(self, toy_corpus):
        s = toy_corpus.make(codec.SIGMA)
        a = replace(s, L=(b"ab", b"c"))
        b = replace(s, L=(b"a", b"bc"))
        assert encode(a) != encode(b)


class TestErrors:
    def test_bad_magic(self, valid_records):
        with pytest.raises(DecodeError) as exc:
            decode(None, b"IBMS2" + valid_records[0][5:])
        assert exc.value.field == "magic"

    def test_bad_kind(self, valid_records):
        data = bytearray(valid_records[0])
        data[5] = 99
        with pytest.raises(DecodeError) as exc:
            decode(None, bytes(data))
        assert exc.value.field == "kind"

    def test_kind_mismatch(self, toy_corpus):
        with pytest.raises(DecodeError) as exc:
            decode(codec.SIGMA, encode(toy_corpus.make(codec.ROUND2)))
        assert exc.value.field == "kind"

    def test_every_truncation(self, valid_records):
        for data in valid_records:
            for cut in range(len(data)):
                with pytest.raises(DecodeError):
                    decode(None, data[:cut])

    def test_trailing_bytes(self, valid_records):
        for data in valid_records:
            with pytest.raises(DecodeError):
                decode(None, data + b"\x00")

    def test_unknown_backend(self, toy_corpus):
        data = bytearray(encode(toy_corpus.make(codec.ROUND2)))
        assert data[10] == 2
        data[10] = 7
        with pytest.raises(DecodeError) as exc:
            decode(None, bytes(data))
        assert exc.value.field == "round2.backend"

    def test_unsorted_and_duplicate_lists(self, toy_corpus):
        s = toy_corpus.make(codec.SIGMA)
        for L in [(b"b", b"a"), (b"a", b"a")]:
            with pytest.raises(DecodeError) as exc:
                decode(None, encode(replace(s, L=L)))
            assert exc.value.field.startswith("sigma-single.L")
        with pytest.raises(DecodeError):
            decode(None, encode(replace(s, L=())))
        with pytest.raises(DecodeError):
            decode(None, encode(replace(s, L=(b"",))))

    def test_slot_count_must_match(self, toy_corpus):
        s = toy_corpus.make(codec.SIGMA_MULTI)
        bad = replace(s, U_slots=s.U_slots + s.U_slots[:1])
        with pytest.raises(DecodeError) as exc:
            decode(None, encode(bad))
        assert "U_slots" in exc.value.field

    def test_empty_ciphertext(self, toy_corpus):
        s = toy_corpus.make(codec.SIGMA)
        with pytest.raises(DecodeError):
            decode(None, encode(replace(s, c=b"")))

    def test_non_canonical_point(self, bls):
        # x + p encodes the same field element as x; only x itself is accepted
        z = -0xD201000000010000
        p = (z - 1) ** 2 * (z**4 - z**2 + 1) // 3 + z
        g = bytearray(bls.left_generator().to_bytes())
        sign = g[47] & 0x80
        g[47] &= 0x7F
        alias = bytearray((int.from_bytes(g, "little") + p).to_bytes(48, "little"))
        alias[47] |= sign
        with pytest.raises(DecodeError):
            bls.decode_element("left", bytes(alias))

    def test_identity_with_payload_rejected(self, toy):
        with pytest.raises(DecodeError):
            toy.decode_element("left", b"\x00\x00\x01")

    def test_off_curve_and_out_of_range(self, toy):
        bad = [b"\x02" + struct.pack(">H", 487), b"\x05\x00\x01", b"\x02" + struct.pack(">H", 3)]
        for data in bad:
            with pytest.raises(DecodeError):
                toy.decode_element("right", data)

    def test_decoder_accepts_exactly_the_subgroup(self, toy):
        """Every one of the 488 curve points: decode succeeds iff q * point = O."""
        accepted = 0
        for pt in oracle.all_points():
            data = oracle.enc_point(pt)
            in_subgroup = oracle.mul(oracle.Q_ORDER, pt) is None
            try:
                e = toy.decode_element("right", data)
            except DecodeError:
                assert not in_subgroup
                continue
            assert in_subgroup and e.raw == pt
            accepted += 1
        assert accepted == oracle.Q_ORDER

    def test_target_outside_subgroup(self, toy):
        with pytest.raises(DecodeError):
            toy.decode_element("target", struct.pack(">HH", 2, 0))
        with pytest.raises(DecodeError):
            toy.decode_element("target", struct.pack(">HH", 487, 0))

    def test_params_checks(self, toy_system):
        params, _ = toy_system
        for bad, field in [
            (replace(params, theta=params.theta * params.theta), "params.theta"),
            (replace(params, R=params.backend.right_generator()), "params.R"),
            (replace(params, R=params.backend.right_identity()), "params.R"),
            (replace(params, l=0), "params.l"),
        ]:
            with pytest.raises(DecodeError) as exc:
                decode(None, encode(bad))
            assert exc.value.field == field

    def test_params_wrong_q(self, toy_system):
        data = encode(toy_system[0])
        bad = data.replace(b"\x00\x00\x00\x01\x3d", b"\x00\x00\x00\x01\x3b", 1)
        with pytest.raises(DecodeError) as exc:
            decode(None, bad)
        assert exc.value.field == "params.q"

    def test_master_secret_range(self, toy_system):
        _, msk = toy_system
        for s in (0, 61):
            data = MAGIC + bytes([codec.MASTER_SECRET]) + codec.lp(b"\x02") + codec.lp(bytes([s]))
            with pytest.raises(DecodeError):
                decode(None, data)
        assert decode(None, encode(msk)) == msk

    def test_identity_key_must_match_hash(self, toy_system, keys):
        (alice,) = keys(toy_system, ["alice"])
        with pytest.raises(DecodeError) as exc:
            decode(None, encode(replace(alice, Q=alice.Q + alice.Q)))
        assert exc.value.field == "identity-key.Q"

    def test_sealed_length(self, toy_corpus):
        sigma = toy_corpus.make(codec.SIGMA)
        with pytest.raises(DecodeError):
            decode(None, encode(Sealed(len(sigma.c) + 1, sigma)))
        inner = encode(toy_corpus.make(codec.ROUND2))
        bad = MAGIC + bytes([codec.SEALED]) + codec.lp(struct.pack(">I", 0)) + codec.lp(inner)
        with pytest.raises(DecodeError):
            decode(None, bad)

    def test_encode_unknown_type(self):
        with pytest.raises(TypeError):
            encode(object())


class TestFuzz:
    @settings(max_examples=400, deadline=None)
    @given(st.binary(max_size=200))
    def test_arbitrary_bytes(self, data):
        _decode_or_error(data)

    @settings(max_examples=400, deadline=None)
    @given(st.sampled_from(KINDS), st.binary(max_size=300))
    def test_valid_header_random_body(self, kind, body):
        _decode_or_error(MAGIC + bytes([kind]) + body)

    @settings(max_examples=600, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(st.data())
    def test_mutated_records(self, valid_records, data):
        record = bytearray(data.draw(st.sampled_from(valid_records)))
        for _ in range(data.draw(st.integers(1, 4))):
            op = data.draw(st.sampled_from(["flip", "set", "insert", "delete"]))
            pos = data.draw(st.integers(0, len(record) - 1))
            if op == "flip":
                record[pos] ^= 1 << data.draw(st.integers(0, 7))
            elif op == "set":
                record[pos] = data.draw(st.integers(0, 255))
            elif op == "insert":
                record.insert(pos, data.draw(st.integers(0, 255)))
            elif len(record) > 1:
                del record[pos]
        _decode_or_error(bytes(record))


def _decode_or_error(data: bytes) -> None:
    try:
        value = decode(None, data)
    except DecodeError:
        return
    # anything accepted must be canonical
    assert encode(value) == data


class TestPinnedVectors:
    def test_match_oracle(self):
        records = oracle_records()
        assert set(records) == set(PINNED)
        for name, (expected, value) in records.items():
            assert expected.hex() == PINNED[name], name
            assert encode(value).hex() == PINNED[name], name
            assert decode(None, bytes.fromhex(PINNED[name])) == value, name

    def test_all_kinds_pinned(self):
        kinds = {peek_kind(bytes.fromhex(h)) for h in PINNED.values()}
        assert kinds == set(KINDS)


class TestHashInput:
    def test_layout(self, toy_corpus):
        s = toy_corpus.make(codec.SIGMA)
        stream = hash_input_bytes(s.c, s.X, (s.U,))
        expected = b"IBMS-H2" + codec.lp(s.c) + codec.lp(s.X.to_bytes()) + codec.lp(s.U.to_bytes())
        assert stream == expected

    def test_injective_in_U(self, toy_system):
        params, _ = toy_system
        a = hash_input_bytes(b"c", params.P, (params.R,))
        b = hash_input_bytes(b"c", params.P, (params.R + params.R,))
        assert a != b

    def test_signer_and_verifier_streams_match(self, system, keys):
        from helpers import names, run

        params, _ = system
        signers = keys(system, names(3))
        (bob,) = keys(system, ["bob"])
        t = run(params, signers, bob.public(), bytes(params.l), random.Random(1))
        d = t.digests[0]
        assert hash_input_bytes(d.c, d.X, d.U_slots) == hash_input_bytes(t.sigma.c, t.sigma.X, (t.sigma.U,))
        # decoded copy hashes identically
        back = decode(codec.SIGMA, encode(t.sigma))
        assert hash_input_bytes(back.c, back.X, (back.U,)) == hash_input_bytes(d.c, d.X, d.U_slots)


class TestPadding:
    @pytest.mark.parametrize("n", [0, 1, 15, 16])
    def test_round_trip(self, n):
        m = bytes(range(n))
        padded = pad_message(m, 16)
        assert len(padded) == 16
        assert unpad_message(padded, n) == m

    def test_too_long(self):
        with pytest.raises(ValueError):
            pad_message(bytes(17), 16)

    def test_malformed(self):
        with pytest.raises(DecodeError):
            unpad_message(b"abc\x81" + bytes(12), 3)
        with pytest.raises(DecodeError):
            unpad_message(bytes(4), 5)


def test_signcryptext_to_bytes(toy_corpus):
    s = toy_corpus.make(codec.SIGMA)
    assert isinstance(s, Signcryptext)
    assert s.to_bytes() == encode(s)
