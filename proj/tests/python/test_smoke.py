import math

import numpy as np
import pytest

import hehom

PI = math.pi


def free(k0):
    return {
        "lattice": [[1.0]],
        "coefficients": {"metric": "identity"},
        "threshold": {"k": [k0], "band": 1},
        "packet": {"kind": "gaussian", "radius": 2.0, "nodes": 32, "width": 1.0},
        "epsilons": [0.1, 0.05, 0.025],
        "taus": [1.0],
    }


def test_free_bands_are_parabolas():
    m = hehom.Model(free(0.0))
    ks = np.linspace(-PI, PI, 7)
    e = m.bands(ks.reshape(-1, 1), 3)
    for k, row in zip(ks, e):
        expect = sorted((k + 2 * PI * j) ** 2 for j in range(-3, 4))[:3]
        assert np.allclose(row, expect, atol=1e-10)


def test_dirac_point_symbol():
    m = hehom.Model(free(PI))
    tp = m.threshold()
    assert tp["n"] == 2
    assert abs(tp["lambda0"] - PI**2) < 1e-10
    ev = np.linalg.eigvalsh(m.symbol([0.1]))
    assert np.allclose(ev, [PI**2 - 0.2 * PI + 0.01, PI**2 + 0.2 * PI + 0.01], atol=1e-10)


def test_free_evolution_is_exact():
    r = hehom.Model(free(0.0)).evolve(0.1, 1.0)
    assert r["error"] < 1e-12
    assert r["certified"]
    assert abs(r["norm_exact"] - r["norm_effective"]) < 1e-12


def test_mathieu_bound_sample_and_ledger():
    cfg = free(0.0)
    cfg["cutoff_modes"] = 16
    cfg["coefficients"]["potential"] = [[[1], 1.0], [[-1], 1.0]]
    m = hehom.Model(cfg)
    kappa = m.threshold()["kappa"]
    s = m.bound_sample([0.1 * kappa], 1.0)
    assert s["lhs"] <= s["rhs"]
    assert m.ledger()["C1"] > 0


def test_errors_are_typed():
    cfg = free(0.0)
    cfg["epsilons"] = [0.05, 0.1]
    with pytest.raises(hehom.InvalidInput):
        hehom.Model(cfg)
    assert issubclass(hehom.InvalidInput, hehom.HehomError)
