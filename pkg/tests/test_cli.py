import subprocess
import sys

import pytest

from ibms import codec
from ibms.cli import EXIT_DECODE, EXIT_OK, EXIT_PROTOCOL, EXIT_USAGE, EXIT_VERIFY, expected_counts, main, run_bench


def make_pkg(tmp_path, backend):
    def path(name):
        return str(tmp_path / name)

    assert main(["--test-mode", "--seed", "5", "setup", "--backend", backend, "--length", "24",
                 "--params-out", path("params"), "--msk-out", path("msk")]) == EXIT_OK
    for who in ("alice", "bob", "carol", "dave"):
        assert main(["extract", "--params", path("params"), "--msk", path("msk"), "--identity", who,
                     "--out", path(f"{who}.key")]) == EXIT_OK
    (tmp_path / "msg").write_bytes(b"attack at dawn")
    return path


@pytest.fixture
def pkg(tmp_path):
    """A toy PKG with keys for alice, bob, carol and dave."""
    return make_pkg(tmp_path, "toy")


@pytest.fixture
def bls_pkg(tmp_path):
    return make_pkg(tmp_path, "bls12-381")


def signcrypt(pkg, *extra, seed="7", out="sigma", signers=("alice",)):
    argv = ["--test-mode", "--seed", seed, "signcrypt", "--params", pkg("params")]
    for s in signers:
        argv += ["--signer-key", pkg(f"{s}.key")]
    return main(argv + ["--in", pkg("msg"), "--out", pkg(out), *extra])


class TestPipeline:
    def test_single_signer_round_trip(self, pkg, capsysbinary):
        assert signcrypt(pkg, "--receiver", "bob") == EXIT_OK
        assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("bob.key"), "--in", pkg("sigma")]) == 0
        assert capsysbinary.readouterr().out == b"attack at dawn"

    def test_files_are_lowercase_hex(self, pkg):
        signcrypt(pkg, "--receiver", "bob")
        for name in ("params", "msk", "alice.key", "sigma"):
            text = open(pkg(name)).read()
            assert text.endswith("\n") and text.strip() == text.strip().lower()
            bytes.fromhex(text.strip())

    def test_output_file(self, pkg):
        signcrypt(pkg, "--receiver", "bob", signers=("alice", "carol"))
        assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("bob.key"), "--in", pkg("sigma"),
                     "--out", pkg("plain")]) == 0
        assert open(pkg("plain"), "rb").read() == b"attack at dawn"

    def test_multi_receiver(self, pkg, capsysbinary):
        assert signcrypt(pkg, "--receivers", "bob,dave", signers=("alice", "carol")) == EXIT_OK
        for who in ("bob", "dave"):
            capsysbinary.readouterr()
            assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg(f"{who}.key"), "--in", pkg("sigma")]) == 0
            assert capsysbinary.readouterr().out == b"attack at dawn"
        assert main(["verify", "--params", pkg("params"), "--in", pkg("sigma")]) == EXIT_OK
        assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("carol.key"), "--in", pkg("sigma")]) == EXIT_USAGE

    def test_verify(self, pkg, capsys):
        signcrypt(pkg, "--receiver", "bob")
        assert main(["verify", "--params", pkg("params"), "--in", pkg("sigma")]) == EXIT_OK
        assert "valid" in capsys.readouterr().err

    def test_deterministic_under_seed(self, pkg):
        signcrypt(pkg, "--receiver", "bob", out="s1")
        signcrypt(pkg, "--receiver", "bob", out="s2")
        signcrypt(pkg, "--receiver", "bob", out="s3", seed="8")
        s1, s2, s3 = (open(pkg(n)).read() for n in ("s1", "s2", "s3"))
        assert s1 == s2 != s3

    def test_wrong_receiver_gets_garbage_or_padding_error(self, pkg, capsysbinary):
        signcrypt(pkg, "--receiver", "bob")
        rc = main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("dave.key"), "--in", pkg("sigma")])
        out = capsysbinary.readouterr().out
        assert rc == EXIT_DECODE or out != b"attack at dawn"


class TestFailures:
    def test_flipped_hex_digit_fails_with_signature(self, bls_pkg, capsys):
        """Flip each hex digit of c in turn; every copy must fail with reason 'signature'.

        Runs on BLS: the toy h space has only 60 values, so some flips would collide.
        """
        pkg = bls_pkg
        signcrypt(pkg, "--receiver", "bob", signers=("alice", "carol"))
        text = open(pkg("sigma")).read().strip()
        raw = bytes.fromhex(text)
        sealed = codec.decode(None, raw)
        inner = codec.encode(sealed.sigma)
        c_at = raw.index(inner) + len(codec.MAGIC) + 1 + 4 + 1 + 4  # inner header, backend field, c length
        failures = 0
        for pos in range(c_at * 2, (c_at + len(sealed.sigma.c)) * 2):
            digit = "0" if text[pos] != "0" else "1"
            bad = text[:pos] + digit + text[pos + 1 :]
            with open(pkg("bad"), "w") as fh:
                fh.write(bad)
            capsys.readouterr()
            rc = main(["verify", "--params", pkg("params"), "--in", pkg("bad")])
            err = capsys.readouterr().err
            assert rc == EXIT_VERIFY and "reason: signature" in err
            failures += 1
        assert failures == 2 * 24

    def test_decode_error_exit_code(self, pkg, capsys):
        signcrypt(pkg, "--receiver", "bob")
        text = open(pkg("sigma")).read().strip()
        with open(pkg("bad"), "w") as fh:
            fh.write(text[:-2])
        assert main(["verify", "--params", pkg("params"), "--in", pkg("bad")]) == EXIT_DECODE
        assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("bob.key"), "--in", pkg("bad")]) == EXIT_DECODE
        with open(pkg("bad"), "w") as fh:
            fh.write("zz")
        assert main(["verify", "--params", pkg("params"), "--in", pkg("bad")]) == EXIT_DECODE

    def test_verify_refuses_private_material(self, pkg, capsys):
        for name in ("bob.key", "msk"):
            assert main(["verify", "--params", pkg("params"), "--in", pkg(name)]) == EXIT_USAGE
        assert "no key material" in capsys.readouterr().err

    def test_verify_has_no_key_option(self, pkg):
        signcrypt(pkg, "--receiver", "bob")
        assert main(["verify", "--params", pkg("params"), "--in", pkg("sigma"), "--key", pkg("bob.key")]) == EXIT_USAGE

    def test_seed_needs_test_mode(self, pkg, capsys):
        assert main(["--seed", "1", "setup", "--backend", "toy", "--params-out", pkg("p2"), "--msk-out", pkg("m2")]) == EXIT_USAGE
        assert "--test-mode" in capsys.readouterr().err

    def test_message_too_long(self, pkg, tmp_path):
        (tmp_path / "msg").write_bytes(bytes(25))
        assert signcrypt(pkg, "--receiver", "bob") == EXIT_USAGE

    def test_receiver_flags_exclusive(self, pkg):
        assert signcrypt(pkg, "--receiver", "bob", "--receivers", "dave") == EXIT_USAGE
        assert signcrypt(pkg) == EXIT_USAGE

    def test_public_key_cannot_sign_or_decrypt(self, pkg, tmp_path):
        signcrypt(pkg, "--receiver", "bob")
        from ibms.codec import decode, encode, from_text

        key = decode(None, from_text(open(pkg("bob.key"), "rb").read()))
        (tmp_path / "bob.pub").write_text(encode(key.public()).hex())
        assert main(["unsigncrypt", "--params", pkg("params"), "--key", pkg("bob.pub"), "--in", pkg("sigma")]) == EXIT_USAGE
        argv = ["signcrypt", "--params", pkg("params"), "--signer-key", pkg("bob.pub"), "--receiver", "x",
                "--in", pkg("msg")]
        assert main(argv) == EXIT_USAGE

    def test_wrong_file_kind(self, pkg):
        assert main(["extract", "--params", pkg("msk"), "--msk", pkg("msk"), "--identity", "x", "--out", pkg("x")]) == EXIT_DECODE

    def test_missing_file(self, pkg):
        assert main(["verify", "--params", pkg("params"), "--in", pkg("nope")]) == EXIT_USAGE

    def test_unknown_subcommand(self):
        assert main(["dance"]) == EXIT_USAGE
        assert main([]) == EXIT_USAGE


class TestSimulate:
    def test_outcomes(self, tmp_path, capsys):
        plan = tmp_path / "plan"
        plan.write_text("backend toy\nsigners alice bob carol\nreceiver dave\nmessage text:hi\n")
        assert main(["simulate", "--plan", str(plan)]) == EXIT_OK
        assert capsys.readouterr().out.startswith("status ok\n")
        plan.write_text(plan.read_text() + "fault bob corrupt-Z\n")
        assert main(["simulate", "--plan", str(plan)]) == EXIT_PROTOCOL
        out = capsys.readouterr().out
        assert "status blamed" in out and "culprits bob" in out

    def test_with_existing_pkg(self, pkg, tmp_path, capsys):
        plan = tmp_path / "plan2"
        plan.write_text("signers alice bob\nreceivers carol dave\nmessage text:hi\n")
        assert main(["simulate", "--plan", str(plan), "--params", pkg("params"), "--msk", pkg("msk")]) == EXIT_OK
        assert main(["simulate", "--plan", str(plan), "--params", pkg("params")]) == EXIT_USAGE

    def test_bad_plan(self, tmp_path):
        plan = tmp_path / "plan"
        plan.write_text("signer a\n")
        assert main(["simulate", "--plan", str(plan)]) == EXIT_USAGE


class TestBench:
    def test_five_signers(self, capsys):
        assert main(["bench", "--signers", "5"]) == EXIT_OK
        out = capsys.readouterr().out
        sign = next(line for line in out.splitlines() if line.startswith("signcrypt"))
        unsign = next(line for line in out.splitlines() if line.startswith("unsigncrypt"))
        assert sign.split()[1:4] == ["20", "5", "0"] and sign.endswith("ok")
        assert unsign.split()[1:4] == ["1", "0", "4"] and unsign.endswith("ok")

    def test_multi_receiver(self, capsys):
        assert main(["bench", "--signers", "3", "--receivers", "4", "--backend", "toy"]) == EXIT_OK
        sign = next(line for line in capsys.readouterr().out.splitlines() if line.startswith("signcrypt"))
        assert sign.split()[1:4] == ["21", "3", "0"]

    def test_formulas(self):
        assert expected_counts(5, 1) == {"signcrypt": (20, 5, 0), "unsigncrypt": (1, 0, 4)}
        assert expected_counts(2, 3) == {"signcrypt": (12, 2, 0), "unsigncrypt": (1, 0, 4)}

    def test_run_bench(self):
        _, results = run_bench(2, 1, "toy", 8, None)
        assert results["signcrypt"][0] == (8, 2, 0)

    def test_invalid(self):
        assert main(["bench", "--signers", "0"]) == EXIT_USAGE


def test_module_and_console_entry_points(tmp_path):
    r = subprocess.run([sys.executable, "-m", "ibms", "bench", "--signers", "2", "--backend", "toy"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "signcrypt" in r.stdout
    r = subprocess.run([sys.executable, "-m", "ibms", "--seed", "1", "bench", "--signers", "1"],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_USAGE and r.stdout == "" and "test-mode" in r.stderr
