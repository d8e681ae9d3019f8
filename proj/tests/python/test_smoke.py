"""Python smoke tests for the compiled sqf module and the CLI binary."""

import math
import os
import subprocess

import pytest

sqf = pytest.importorskip("sqf")


@pytest.fixture(scope="module")
def p18():
    return sqf.validate_symmetric(1.8, 2.0)


def test_params_and_regime(p18):
    assert p18.rho == pytest.approx(0.9)
    assert p18.sigma0 == pytest.approx(-0.2)
    assert p18.regime == sqf.Regime.Supercritical
    with pytest.raises(ValueError):
        sqf.validate_symmetric(2.2, 2.0)


def test_cubic_and_xi(p18):
    r = sqf.cubic_roots(1.0 + 0.5j, p18)
    assert r.max_residual < 1e-10
    s = 0.7 + 0.0j
    xi = sqf.xi_pair(s, p18)
    prod = xi.xi_plus * xi.xi_minus * (s + 2.0)
    assert abs(prod + 1.8 * s) < 1e-10


def test_series_and_transforms(p18):
    g0, p_empty = sqf.empty_queue_probability(p18)
    assert g0 == pytest.approx(0.27007428642851825, rel=1e-9)
    assert 1 - p18.rho <= p_empty <= 1 - p18.rho / 2
    m = sqf.M_series((p18.lambda_ - 2 * p18.mu) / 4, p18)
    assert m.converged
    assert m.value.real == pytest.approx(g0, rel=1e-12)
    f = sqf.F_marginal(0.0, p18)
    assert f.real == pytest.approx(1.0, abs=1e-9)
    g = sqf.G_of_s(1.0, p18)
    assert g.discrepancy < 1e-10


def test_tail_law_and_inversion(p18):
    law = sqf.sqf_tail_law(p18)
    assert law.rate == pytest.approx(-0.2)
    assert law.prefactor == pytest.approx(0.4)
    sing = sqf.g_singularity(p18)
    assert sing.kind == sqf.SingularityKind.SimplePole
    assert sing.leading_coeff == pytest.approx(0.04)
    inv = sqf.invert_ccdf(5.0, "sqf", p18)
    assert 0 < inv < 1
    upper = sqf.invert_ccdf(5.0, "hol_upper", p18)
    assert inv <= upper + 1e-6


def test_simulation_determinism_and_identities():
    kwargs = dict(lambda1=0.9, lambda2=0.9, mu1=2.0, mu2=2.0,
                  cycles=5000, seed=7, ccdf_grid=[1.0, 5.0])
    a = sqf.simulate(**kwargs)
    b = sqf.simulate(**kwargs)
    assert a.p_empty_both.point == b.p_empty_both.point
    assert a.ccdf_1[0].point == b.ccdf_1[0].point
    assert abs(a.p_empty_both.point - 0.1) <= a.p_empty_both.half_width_99
    assert abs(a.p_le.point - 0.55) <= a.p_le.half_width_99
    want = 0.9 * math.exp(-0.2 * 5.0)
    assert abs(a.ccdf_total[1].point - want) <= a.ccdf_total[1].half_width_99


def test_cli_binary_roundtrip(tmp_path):
    cli = os.environ.get("SQF_CLI")
    if not cli or not os.path.exists(cli):
        pytest.skip("SQF_CLI not set")
    out = subprocess.run([cli, "--json", "analyze", "--lambda", "1.2",
                          "--mu", "2"], capture_output=True, text=True)
    assert out.returncode == 0
    import json
    doc = json.loads(out.stdout)
    assert doc["outputs"]["regime"] == "Supercritical"
    assert doc["outputs"]["eta1"] == pytest.approx(-0.935861539822980071)
    cfg = tmp_path / "frag.json"
    cfg.write_text(out.stdout)
    sim = subprocess.run([cli, "--seed", "3", "simulate", "--config",
                          str(cfg), "--cycles", "300"],
                         capture_output=True, text=True)
    assert sim.returncode == 0
    assert sim.stdout.splitlines()[0] == "metric,u,point,half_width_99,cycles"
