import itertools
import math

import numpy as np
import pytest
from scipy.special import expi

import mixlab


def primitive_necklaces(n):
    reps = set()
    for w in itertools.product("01", repeat=n):
        s = "".join(w)
        rots = {s[k:] + s[:k] for k in range(n)}
        if len(rots) == n:
            reps.add(min(rots))
    return len(reps)


@pytest.fixture(scope="module")
def sin_gibbs():
    return mixlab.gibbs(mixlab.Model(roof_const=2, roof_sin=0.5, grid_size=1024))


def test_model_properties():
    m = mixlab.Model(roof_const=2, roof_sin=0.5, grid_size=1024)
    assert m.grid_size == 1024
    assert m.nodes == 1025
    assert m.alphabet == 2
    assert m.tau0 == pytest.approx(1.5)
    assert m.tau_star == pytest.approx(2.5)
    assert m.tau(0.25) == pytest.approx(2.5)
    assert mixlab.Model.parse(m.config).hash == m.hash
    assert mixlab.Model(grid_size=1024).hash != m.hash


def test_errors():
    with pytest.raises(mixlab.ConfigError):
        mixlab.Model(no_such_key=1)
    with pytest.raises(mixlab.Error):
        mixlab.Model(roof_const=-1)


def test_pressure_and_entropy():
    m = mixlab.Model(grid_size=1024)
    assert mixlab.pressure(m, lambda x: 0.0) == pytest.approx(math.log(2), abs=1e-10)
    assert mixlab.entropy(m) == pytest.approx(math.log(2), abs=1e-10)
    assert mixlab.entropy(mixlab.Model(roof_const=2.5, grid_size=1024)) == pytest.approx(math.log(2) / 2.5)


def test_gibbs(sin_gibbs):
    w = sin_gibbs.weights
    assert w.shape == (1025,)
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert sin_gibbs.fiber_defect < 1e-10


def test_resonant_roof_does_not_decay():
    g = mixlab.gibbs(mixlab.Model(grid_size=1024))
    sup = mixlab.transfer_sup(g, 0.0, 2 * math.pi, 20)
    assert np.max(np.abs(sup - 1.0)) < 1e-10


def test_decay_and_engine(sin_gibbs):
    d = mixlab.decay_profile(sin_gibbs, bs=[64, 128, 256, 512])
    l2 = [r["l2"] for r in d["rows"]]
    assert all(x > y for x, y in zip(l2, l2[1:]))
    assert d["fitted"]
    assert d["kappa"] > 0
    assert d["csv"].startswith("b,n,")
    # bumps need atoms wider than the grid resolution allows at 1024 cells
    c = mixlab.dolgopyat(mixlab.gibbs(mixlab.Model(roof_const=2, roof_sin=0.5)), b=256)
    assert c["violations"] == 0
    assert not c["refused"]
    assert c["kappa"] > 0
    assert all(x > y for x, y in zip(c["H_l2"], c["H_l2"][1:]))


def test_uni_scan():
    s = mixlab.Model(roof_const=2, roof_sin=0.5)
    assert mixlab.uni_scan(s, 1 / 64)["kappa"] > 0
    assert mixlab.uni_scan(mixlab.Model(), 1 / 64)["kappa"] == 0


def test_orbit_counts():
    m = mixlab.Model(grid_size=1024)
    for n in range(1, 11):
        assert mixlab.necklace_count(m, n) == primitive_necklaces(n)
        assert mixlab.fixed_point_count(m, n) == 2**n
    r = mixlab.orbit_counting(m, 10, [4.5, 10.0])
    assert r["rows"][0]["pi"] == 2 + 1 + 2 + 3
    assert mixlab.li(1e6) == pytest.approx(expi(math.log(1e6)) - expi(math.log(2)), rel=1e-10)


def test_moments():
    g = mixlab.gibbs(mixlab.Model(mu_const=1 / 3, grid_size=1024))
    for n in (4, 8):
        assert mixlab.fractional_moment(g, 1 / (2 * n), n) == pytest.approx((2 / 3) ** 0.5, abs=1e-10)


def test_correlation_determinism(sin_gibbs):
    t = [0.0, 0.25, 0.5]
    a = mixlab.correlation(sin_gibbs, "sin-one", "sin-one", t, samples=20000, seed=5)
    b = mixlab.correlation(sin_gibbs, "sin-one", "sin-one", t, samples=20000, seed=5)
    assert a["csv"] == b["csv"]
    assert a["corr"][0] > 0
