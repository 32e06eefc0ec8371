import math

import numpy as np
import pytest

import copulaboost as cb


@pytest.fixture(scope="module")
def toy():
    spec = cb.ScenarioSpec(
        tag=cb.Scenario.toy, copula=cb.Copula.gaussian,
        n_train=120, n_val=80, n_test=60, p=6, seed=11,
    )
    data = cb.gen_scenario(spec)
    model = cb.scenario_model(spec, 0.1, 120)
    fit = cb.fit_boost(data.train, model)
    return data, model, fit


def test_version_and_names():
    assert isinstance(cb.__version__, str) and cb.__version__
    assert cb.PARAM_NAMES == ["mu1", "sigma1", "mu2", "sigma2", "rho"]


def test_fit_shapes_and_risk_path(toy):
    data, model, fit = toy
    assert fit.iterations == 120
    assert not fit.aborted
    assert len(fit.risk_path) == 120
    assert fit.risk_at(0) == fit.risk_start
    assert fit.risk_at(120) < fit.risk_at(0)
    eta = cb.predict_eta(fit, data.test.X, 120)
    params = cb.predict_params(fit, data.test.X, 120)
    assert eta.shape == (60, 5)
    assert params.shape == (60, 5)
    assert np.all(params[:, 1] > 0)          # scale parameters on the natural scale
    assert np.all(np.abs(params[:, 4]) < 1)  # gaussian copula association


def test_replay_matches_training_risk(toy):
    data, model, fit = toy
    for m in (0, 37, 120):
        eta = cb.predict_eta(fit, data.train.X, m)
        assert cb.empirical_risk(data.train, model, eta) == fit.risk_at(m)
        assert cb.neg_log_lik(fit, data.train, m) == fit.risk_at(m)


def test_fit_roundtrip(tmp_path, toy):
    _, _, fit = toy
    path = str(tmp_path / "fit.json")
    cb.save_fit(fit, path)
    back = cb.load_fit(path)
    assert back.iterations == fit.iterations
    assert list(back.risk_path) == list(fit.risk_path)
    assert list(back.offsets) == list(fit.offsets)


def test_validation_tuning(toy):
    data, model, fit = toy
    ms = cb.select_mstop_validation(fit, data.train, data.val)
    assert 0 <= ms.m_stop <= 120
    assert len(ms.risk) == 121
    assert ms.risk[ms.m_stop] == min(ms.risk)


def test_selection_pipeline(toy):
    data, model, fit = toy
    pr = cb.probing_fit(data.train, model, seed=5)
    probe_cols = [
        (k, j)
        for k in range(5)
        for j, d in enumerate(pr.fit.menu[k])
        if d.is_probe
    ]
    assert probe_cols  # shadow covariates entered the menus
    for k, j in probe_cols:
        assert np.all(np.asarray(pr.fit.coef[k][j]) == 0.0)

    attribution = cb.risk_attribution(fit, 120)
    total = sum(sum(a) for a in attribution)
    assert math.isclose(total, fit.risk_at(0) - fit.risk_at(120), rel_tol=1e-10)

    des = cb.deselect_refit(fit, data.train, 0.01, 120)
    assert des.fit.iterations == 120
    assert des.total_reduction == fit.risk_at(0) - fit.risk_at(120)
    kept_any = [j for k in range(5) for j, keep in enumerate(des.kept[k]) if keep]
    assert kept_any


def test_pfer_arithmetic():
    assert cb.pfer_solve(20, 100, pfer=5.0).pi_thr == 0.9
    assert cb.pfer_solve(20, 100, pi_thr=0.9).pfer == 5.0
    with pytest.raises(ValueError):
        cb.pfer_solve(20, 100)
    with pytest.raises(ValueError):
        cb.pfer_solve(20, 100, pi_thr=0.9, pfer=5.0)


def test_energy_score_reference(toy):
    # draws {(0,0),(2,0)} against observation (1,0):
    # mean distance to obs = 1, half mean pairwise distance = 1 -> score 0.5
    draws = cb.PredictiveDraws(y1=np.array([[0.0, 2.0]]), y2=np.zeros((1, 2)))
    assert cb.energy_score(draws, np.array([1.0]), np.array([0.0])) == 0.5
    degenerate = cb.PredictiveDraws(y1=np.full((1, 3), 4.0), y2=np.full((1, 3), -2.0))
    assert cb.energy_score(degenerate, np.array([4.0]), np.array([-2.0])) == 0.0

    data, model, fit = toy
    draws = cb.sample_predictive(fit, data.test.X[:3], 120, 64, seed=3)
    assert draws.y1.shape == (3, 64)
    assert np.all(draws.y1 > 0) and np.all(draws.y2 > 0)
    again = cb.sample_predictive(fit, data.test.X[:3], 120, 64, seed=3)
    assert np.array_equal(draws.y1, again.y1)
    other = cb.sample_predictive(fit, data.test.X[:3], 120, 64, seed=4)
    assert not np.array_equal(draws.y1, other.y1)
    assert cb.energy_score(draws, data.test.y1[:3], data.test.y2[:3]) > 0.0


def test_dataset_numpy_interop(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, size=(30, 3))
    y1 = np.exp(rng.normal(size=30))
    y2 = np.exp(rng.normal(size=30))
    d = cb.Dataset(y1=y1, y2=y2, X=X)
    assert d.n == 30
    assert d.p == 3
    assert d.names == ["x1", "x2", "x3"]
    path = str(tmp_path / "d.csv")
    cb.save_dataset(d, path)
    back = cb.load_dataset(path)
    assert np.array_equal(back.X, X)
    assert np.array_equal(back.y1, y1)
