import json

import pytest

import sklsim


def test_bb84_state_shape():
    st = sklsim.prepare_bb84("10", "01")
    assert st.term_count == 2
    assert st.total_bits == 2
    names = [name for name, _ in st.layout()]
    assert names == ["Q1", "Q2"]
    dump = json.loads(st.dump_json())
    assert [t["bits"] for t in dump["terms"]] == ["10", "11"]


def test_measurement_parity_identity():
    # (|0>|s0> + |1>|s1>)/sqrt2 measured in the Hadamard basis satisfies
    # c ^ d.(s0^s1) = 0
    rng = sklsim.Rng(7)
    s0, s1 = "000", "101"
    sxor = "101"
    for _ in range(50):
        st = sklsim.prepare_bb84("0", "1")
        sklsim.append_segment(st, "S", 3)
        sklsim.apply_xor_oracle(st, ["Q1"], "S", lambda u: s1 if u == "1" else s0)
        assert st.term_count == 2
        c = sklsim.measure_hadamard(st, "Q1", rng)
        d = sklsim.measure_hadamard(st, "S", rng)
        parity = int(c) ^ (sum(int(a) & int(b) for a, b in zip(d, sxor)) % 2)
        assert parity == 0


def test_honest_verification():
    ske = sklsim.SkeCrSkl(lam=16, n=8, h=4, seed=3)
    key = ske.kg()
    assert ske.vrfy(key)
    assert key.spent


def test_ske_roundtrip():
    ske = sklsim.SkeCrSkl(lam=16, n=8, h=4, seed=5)
    key = ske.kg()
    m = "1" * ske.msg_bits
    ct = ske.enc(m)
    assert ske.dec(key, ct) == m
    # decryption is gentle: key still verifies afterwards
    assert ske.vrfy(key)
    with pytest.raises(ValueError):
        ske.dec(key, ct)  # consumed by verification


def test_keytest_on_measured_key():
    ske = sklsim.SkeCrSkl(lam=16, n=8, h=4, seed=9)
    key = ske.kg()
    rng = sklsim.Rng(1)
    st = key.state
    bits = "".join(
        sklsim.measure_computational(st, name, rng) for name, _ in st.layout()
    )
    assert ske.keytest(key, bits)
    flipped = ("1" if bits[0] == "0" else "0") + bits[1:]
    assert not ske.keytest(key, flipped)


def test_runner_determinism_and_separation():
    a = sklsim.run("strawman", "collusion-demo", keys=4, trials=50, seed=7)
    b = sklsim.run("strawman", "collusion-demo", keys=4, trials=50, seed=7)
    assert a[0] == b[0]
    tr = json.loads(a[0])
    assert set(tr) == {"game", "scheme", "params", "seed", "trials", "wins", "pass_rates", "ci95"}
    assert tr["pass_rates"]["verification_all"] >= 0.99
    assert a[1]  # thresholds ok

    leased = sklsim.run(
        "skecrskl", "collusion-demo", lam=16, n=8, hadamard=4, keys=2, trials=50, seed=7
    )
    assert json.loads(leased[0])["pass_rates"]["verification_all"] <= 0.2


def test_roundtrip_all_schemes():
    for scheme in ["skecd", "skecrskl", "pkecrskl", "skfecrskl", "abecrskl", "abecr2skl"]:
        out, ok, _ = sklsim.run(scheme, "roundtrip", lam=16, n=8, hadamard=4, trials=5, seed=2)
        assert ok, scheme
        tr = json.loads(out)
        assert tr["wins"] == 5


def test_dump_key():
    dump = json.loads(sklsim.dump_key("skecrskl", lam=16, n=8, hadamard=2, seed=1))
    assert len(dump["terms"]) == 4  # h=2
    assert dump["layout"][0]["name"] == "SKECD.CT_1"


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        sklsim.run("skecrskl", "roundtrip", lam=16, n=8, hadamard=99)
