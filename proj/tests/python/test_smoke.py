import json
import math
import os
import pathlib

import numpy as np
import pytest

import ergodix

CONFIGS = pathlib.Path(os.environ.get("ERGODIX_CONFIG_DIR", pathlib.Path(__file__).resolve().parents[2] / "configs"))


def test_folner_laws():
    for n in range(1, 20):
        assert ergodix.folner_defect(1, n, [1]) == 2.0 / (2 * n + 1)
        assert ergodix.tempelman_ratio(1, n) == (4 * n + 1) / (2 * n + 1)
    assert ergodix.box_size(2, 1) == 9
    with pytest.raises(ValueError):
        ergodix.box_size(1, 0)


def test_rotation_matrices():
    zeta = np.exp(2j * math.pi / 5)
    u, v = ergodix.clock_matrix(1, 5), ergodix.shift_matrix(5)
    assert np.allclose(u @ v, zeta * v @ u)
    rot = ergodix.System.rotation(1, 5)
    assert np.allclose(rot.act(rot.named("V"), [1]), np.conj(zeta) * v)


def test_weak_mixing_shift_law():
    lat = ergodix.System.shift(1, 2)
    z = lat.observable('{"pauli": "Z", "sites": [0]}')
    stat = ergodix.weak_mixing_defect(lat, z, z, 1, 50)
    for n, size, value in stat["values"]:
        assert abs(value - 1.0 / (2 * n + 1)) < 1e-12
    assert stat["verdict"] == "decaying"


def test_higher_order_k3():
    lat = ergodix.System.shift(1, 2)
    z = lat.observable('{"pauli": "Z", "sites": [0]}')
    stat = ergodix.higher_order_defect(lat, [z, z, z, z], [1, 2, 3], 1, 10)
    assert all(abs(v - 1.0 / (2 * n + 1)) < 1e-12 for n, _, v in stat["values"])


def test_split_and_dichotomy():
    verdict = ergodix.dichotomy(ergodix.System.clock_shift(1, 3))
    assert verdict["dim_H1"] == 1
    assert verdict["dim_H0"] == 9
    assert verdict["verdict"] == "has-nontrivial-compact-factor"
    assert ergodix.dichotomy(ergodix.System.rotation(1, 3))["dim_H1"] == 3


def test_finite_system_from_numpy():
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    sys = ergodix.System.finite([ergodix.clock_matrix(1, 3)], rho)
    assert not sys.tracial
    a = sys.matrix(np.diag([1.0, 2.0, 3.0]).astype(complex))
    assert abs(sys.state(a) - (0.5 + 0.6 + 0.6)) < 1e-14
    with pytest.raises(ValueError):
        ergodix.System.finite([2 * np.eye(2, dtype=complex)], np.eye(2, dtype=complex) / 2)


def test_szemeredi_lattice():
    lat = ergodix.System.shift(1, 2)
    p = lat.observable('{"sum": [{"coef": 0.5, "obs": {"identity": true}}, {"coef": 0.5, "obs": {"pauli": "Z", "sites": [0]}}]}')
    rep = ergodix.szemeredi(lat, p, [1, 2], 1, 20)
    assert rep["branch"] == "weakly-mixing"
    assert rep["szemeredi_tail_min"] > 0.0


def test_vdc_report():
    rep = ergodix.vdc_report("linear_phase", math.sqrt(2) - 1, [100, 200])
    assert rep["verdict"]["label"] == "hypothesis not satisfied; conclusion not implied"


def test_invariants_small():
    results = ergodix.invariants(3, {name: 3 for name in ["norm_square", "product_system"]})
    assert all(r["failures"] == 0 for r in results)


def test_run_matches_across_threads(tmp_path):
    cfg = json.loads((CONFIGS / "compact_z3.json").read_text())
    outs = []
    for threads in (1, 8):
        out = tmp_path / f"t{threads}"
        res = ergodix.run("compact", cfg, out, threads=threads)
        assert res["exit_code"] == 0
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    ergodix.set_thread_count(1)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0]["compact_szemeredi.json"])
    assert abs(rep["tail_min"] - 1.0 / 9.0) < 1e-9


def test_run_rejects_unknown_keys(tmp_path):
    with pytest.raises(ValueError):
        ergodix.run("split", {"system": {"kind": "clock_shift", "p": 1, "Q": 2}, "nope": 1}, tmp_path)
