import math

import numpy as np
import pytest

import spme


def short_signal():
    s = spme.SignalSpec()
    s.sample_rate = 100.0
    s.duration = 1.0
    s.frequencies = [1.0, 10.0]
    s.amplitudes = [0.25, 0.25]
    return s


def test_voltage_components():
    p = spme.ParameterSet()
    j0 = spme.exchange_current_density(2e-5, 1.24915e4, 2.4983e4, 1000.0)
    assert j0 == pytest.approx(7.90, rel=1e-3)
    eta = spme.reaction_overpotential(24.0, 1.8e5, 1e-4, 7.90, p.thermal_voltage())
    assert eta == pytest.approx(-8.63e-3, rel=1e-3)
    electrolyte, solid = spme.ohmic_losses(24.0, p)
    assert electrolyte == pytest.approx(-9.40e-3, rel=1e-3)
    assert solid == pytest.approx(-8.8e-5, rel=1e-3)


def test_theta_scaling_round_trip():
    t = spme.default_true_theta()
    s = t.scaled()
    assert s[0] == pytest.approx(3.9)
    assert spme.PhysicalTheta.from_scaled(s).negative_diffusivity == pytest.approx(t.negative_diffusivity)
    assert list(spme.parameter_labels) == ["D_n", "D_p", "D_e", "t_plus", "sigma2"]


def test_simulate_at_rest_and_under_load():
    soc = spme.soc_point(5)
    theta = spme.default_true_theta()
    rest = spme.simulate(theta, [0.0] * 10, soc, 1.0)
    ocv = spme.positive_ocp(soc.positive) - spme.negative_ocp(soc.negative)
    assert np.allclose(rest, ocv, atol=1e-12)
    load = spme.simulate(theta, [24.0] * 100, soc, 1.0)
    assert load[-1] < load[0]
    with pytest.raises(ValueError):
        bad = spme.default_true_theta()
        bad.transference = 1.5
        spme.simulate(bad, [0.0], soc, 1.0)


def test_dataset_generation_is_seeded():
    theta = spme.default_true_theta()
    a = spme.generate_dataset("x", short_signal(), spme.soc_point(5), theta, seed=3)
    b = spme.generate_dataset("x", short_signal(), spme.soc_point(5), theta, seed=3)
    c = spme.generate_dataset("x", short_signal(), spme.soc_point(5), theta, seed=4)
    assert len(a) == 100
    assert np.array_equal(a.noisy, b.noisy)
    assert not np.array_equal(a.noisy, c.noisy)
    assert np.std(a.noisy - a.clean) == pytest.approx(math.sqrt(a.noise_variance), rel=0.3)


def test_priors():
    g = spme.fit_gamma_prior(3.9)
    assert (g.shape - 1.0) * g.scale == pytest.approx(3.9, abs=1e-6)
    priors = spme.default_priors(spme.default_true_theta())
    assert priors.beta_alpha == 4.0
    assert math.isfinite(spme.log_prior(spme.default_true_theta().scaled(), priors))
    assert spme.log_prior([-1.0, 1.0, 1.0, 0.4, 0.0], priors) == -math.inf


def test_ramh_on_a_gaussian():
    run = spme.run_ramh(lambda x: -0.5 * float(x @ x), np.zeros(2), 0.03 * np.eye(2), 20000, 5)
    x = run["samples"][5000:]
    assert np.abs(x.mean(axis=0)).max() < 0.1
    assert np.mean(run["accepted"][5000:]) == pytest.approx(0.234, abs=0.05)


def test_chain_and_mle_on_a_short_dataset():
    theta = spme.default_true_theta()
    data = spme.generate_dataset("short", short_signal(), spme.soc_point(5), theta, seed=3)
    cfg = spme.ChainConfig()
    cfg.iterations = 300
    cfg.burn_in = 100
    cfg.start_candidates = 20
    cfg.start_refinements = 1
    chain = spme.run_chain(cfg, data, spme.ParameterSet(), spme.default_priors(theta))
    assert chain.samples.shape == (300, 5)
    summary = spme.summarize(chain, chain.burn_in)
    assert summary.mmse.shape == (5,)
    assert np.all(summary.std >= 0.0)

    fit = spme.mle(data, theta.scaled())
    assert len(fit.theta) == 5
    assert fit.sigma.shape == (5,)


def test_config_errors_and_pipeline(tmp_path):
    with pytest.raises(spme.ConfigError):
        spme.parse_experiment_config("[experiment]\ncolour = red\n")
    cfg = spme.parse_experiment_config(
        "[experiment]\nkind = local\npoints = 9\n"
        "[local_signal]\nsample_rate = 400\nduration = 1\nfrequencies = 1, 10, 100\namplitudes = 1, 1, 1\n"
        "[mcmc]\niterations = 200\nburn_in = 50\nstart_candidates = 10\nstart_refinements = 1\n"
    )
    cfg.output_dir = str(tmp_path)
    paths = spme.run_generate(cfg)
    assert [p.name for p in paths] == ["point_09.csv"]
    spme.run_fit(cfg, "mcmc")
    table = spme.run_summarize(cfg)
    assert "point_09" in table
    assert (tmp_path / "summary" / "table.csv").exists()
    data = spme.read_dataset(paths[0])
    assert len(data) == 400
