import math

import numpy as np
import pytest

import sitnikov as sk


def test_circular_pair_constants():
    ens = sk.circular_polygon(2)
    assert ens.size == 2
    assert ens.beta == pytest.approx(32.0, rel=1e-12)
    assert ens.certificate["passed"]


def test_period_function_limit():
    sys = sk.ConservativeSystem(sk.circular_polygon(2))
    e = sys.min_energy * (1 - 1e-8)
    assert sys.period_function(e) == pytest.approx(2 * math.pi / math.sqrt(32), rel=1e-6)


def test_seed_and_branch():
    ens = sk.kepler_pair(0.2)
    seed = sk.solve_seed(ens, 1)
    assert seed["zero_count"] == 2
    assert isinstance(seed["profile"]["z"], np.ndarray)
    br = sk.continue_branch(ens, 1)
    assert br["status"] == "ReachedLambdaOne"
    assert br["lambda"][-1] == 1.0
    assert all(c == 2 for c in br["zero_count"])
    rep = sk.verify_orbit(ens, br["zeta"][-1], 1.0, 1)
    assert rep["passed"]
    assert rep["ode_residual"] <= 1e-6


def test_no_seed_raises_with_code():
    with pytest.raises(sk.SitnikovError) as info:
        sk.solve_seed(sk.circular_polygon(2), 7)
    assert info.value.args[0] == "NoSeed"
    assert "p > sqrt(beta)*q" in info.value.args[1]


def test_constant_weight_spectrum():
    rep = sk.sturm_eigenvalues_weight(lambda t: 33.0, 4)
    expected = (1 + np.arange(5) ** 2) / 33.0
    np.testing.assert_allclose(rep["etas"], expected, rtol=1e-9)
    assert rep["interior_zeros"] == [0, 1, 2, 3, 4]


def test_field_is_minus_gradient():
    f = sk.HomotopyField(sk.kepler_pair(0.3))
    u, du, ddu = f.potential(0.4, 0.2, 0.7)
    acc, stiff, _ = f.evaluate(0.4, 0.2, 0.7)
    assert acc == pytest.approx(-du, rel=1e-12)
    assert stiff == pytest.approx(-ddu, rel=1e-12)
    h = 1e-4
    fd = (f.potential(0.4, 0.2 + h, 0.7)[0] - f.potential(0.4, 0.2 - h, 0.7)[0]) / (2 * h)
    assert du == pytest.approx(fd, rel=1e-6)


def test_run_command(tmp_path):
    code = sk.run("pipeline", "circular:2", p=[1, 3], out=tmp_path)
    assert code == 0
    assert (tmp_path / "summary.json").exists()
    assert sk.run("certify", "nonsense:1", out=tmp_path) == 2
