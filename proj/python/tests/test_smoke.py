import json

import numpy as np
import pytest

import prusim


def test_augment_example():
    assert prusim.augment([(1, 2)], "L1", (4, 0, 1)) == [(5, 3)]
    assert sorted(prusim.augment([(1, 3)], "L2", (0, 4, 0), [2])) == [(1, 2), (6, 3)]


def test_dec_enc_roundtrip():
    d = prusim.dec([(1, 2), (6, 3)], [], (0, 4, 0))
    assert d["L_pair"] == [(1, 3)]
    assert d["mL"] == [2]
    L, R = prusim.enc(d)
    assert L == [(1, 2), (6, 3)] and R == []
    assert prusim.dec([(1, 2)], [], (0, 3, 0)) is None


def test_good_tuple_and_census():
    assert prusim.is_good([], [], [], [], (0, 0, 0))
    assert not prusim.is_good([(0, 0)], [(0, 1)], [], [], (0, 1, 2), [3])
    r = prusim.census([(1, 2)], [], [(3, 5)], [], N=8, t=1)
    assert r["universe"] == 512 and r["good"] == 384
    s = prusim.census([(1, 2)], [(0, 9)], [(3, 5)], [(7, 7)], N=64, t=1, samples=20000, seed=0)
    assert s["pass"] and s["fraction"] >= 1 - 22 / 64


def test_haar_is_unitary():
    U = prusim.sample_haar(8, seed=3)
    assert U.shape == (8, 8)
    assert np.allclose(U.conj().T @ U, np.eye(8), atol=1e-12)


def test_attack_and_bounds():
    assert prusim.attack(8, 200)["insecure_success"] == 1.0
    assert prusim.stated_bound("VL_FL", 16, 1) == pytest.approx((3 / 16) ** 0.5)
    assert prusim.tilde_gap(4, 1) == pytest.approx(0.646447, abs=1e-6)
    assert prusim.partial_isometry_deviation("V", 4, 1) <= 1e-9
    assert prusim.s_equivalence(2) < 1e-10


def test_cli_roundtrip(tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = prusim.run_cli(
        ["verify-bounds", "--suite", "appendix-a", "--N-grid", "4", "--t", "1", "--json", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema"] == "prusim.report/1"
    assert report["status"] == "pass"
    assert prusim.run_cli(["verify-bounds", "--bogus"])[0] == 2
