import math
import os

import numpy as np
import pytest

import diffcps


def test_noisy_circle_is_near_the_unit_circle():
    a = diffcps.noisy_circle_actions(2000, 0.05, 3)
    assert a.shape == (2000, 2)
    r = np.linalg.norm(a, axis=1)
    assert 0.99 <= r.mean() <= 1.01
    assert np.abs(a).max() <= 1.0
    np.testing.assert_array_equal(a, diffcps.noisy_circle_actions(2000, 0.05, 3))


def test_schedule_and_posterior_round_trip():
    s = diffcps.vp_schedule(5)
    assert len(s["betas"]) == 5
    assert all(0.0 < b < 1.0 for b in s["betas"])
    assert np.all(np.diff(s["alpha_bars"]) < 0)
    assert np.allclose(np.cumprod(s["alphas"]), s["alpha_bars"], rtol=1e-12)
    rng = np.random.default_rng(0)
    a0 = rng.uniform(-1, 1, size=(10, 2))
    eps = rng.standard_normal((10, 2))
    a1 = diffcps.q_sample(a0, 1, eps, 5)
    np.testing.assert_allclose(diffcps.posterior_mean(a1, eps, 1, 5), a0, atol=1e-10)


def test_dual_step():
    assert diffcps.dual_step(1.0, 0.04, 0.0, 3e-4, 0.10) == pytest.approx(1.000018, rel=1e-12)
    assert diffcps.dual_step(0.01, 0.04, 0.3, 3e-4, 0.04) == 0.3


def test_jaccard_and_radial_stats():
    ref = np.array([[0.0, 0.0], [1.0, 0.0]])
    samples = np.array([[0.01, 0.0], [0.5, 0.5], [1.0, 0.04], [3.0, 3.0]])
    assert diffcps.jaccard_score(samples, ref, 0.05) == 0.5
    stats = diffcps.radial_stats(np.array([[1.0, 0.0], [0.0, 0.5]]))
    assert stats["mean"] == pytest.approx(0.75)
    assert stats["annulus_fraction"] == 0.5


def test_train_sample_score(tmp_path):
    data = diffcps.gen_data(str(tmp_path / "ring.ds"), n=300, seed=1)
    np.testing.assert_array_equal(diffcps.load_actions(data), diffcps.noisy_circle_actions(300, 0.05, 1))
    out = str(tmp_path / "run")
    small = dict(steps=30, batch_size=32, hidden_dim=16, hidden_layers=2, time_embed_dim=4, metrics_every=10)
    rows = diffcps.train(data, out, algo="diffcps", **small)
    assert [r["step"] for r in rows] == [10, 20, 30]
    assert all(math.isfinite(r["lambda"]) for r in rows)
    assert os.path.exists(os.path.join(out, "checkpoint.ckpt"))
    assert diffcps.train(data, str(tmp_path / "again"), algo="diffcps", **small) == rows

    samples = diffcps.sample_policy(os.path.join(out, "checkpoint.ckpt"), 500, 7)
    assert samples.shape == (500, 2)
    assert np.abs(samples).max() <= 1.0
    report = diffcps.score_samples(samples, data)
    assert report["sample_count"] == 500
    assert 0.0 <= report["score"] <= 1.0


def test_cli_errors_surface_as_exceptions(tmp_path):
    data = diffcps.gen_data(str(tmp_path / "ring.ds"), n=50)
    with pytest.raises(diffcps.CliError) as e:
        diffcps.train(data, str(tmp_path / "x"), algo="nope")
    assert e.value.code == 2
    with pytest.raises(diffcps.CliError) as e:
        diffcps.train(str(tmp_path / "absent.ds"), str(tmp_path / "y"), steps=5)
    assert e.value.code == 1
    with pytest.raises(RuntimeError):
        diffcps.sample_policy(str(tmp_path / "none.ckpt"))
