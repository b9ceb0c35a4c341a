"""Game loop protocol, regret accounting, exponent fits, persistence."""

import numpy as np
import pytest

from kaarbench.harness import (
    ExperimentConfig,
    GameFailure,
    _OrderGuard,
    default_checkpoints,
    estimate_exponent,
    kahan_cumsum,
    point_layout,
    run_experiment,
    run_game,
    run_horizon_family,
    write_gram_csv,
    write_plot_data,
    write_stream_csv,
    write_summary_csv,
    write_trace_csv,
)


def small_config(**kw):
    base = dict(
        name="t", horizon=128, seeds=(0,), d=1, regime="smooth", beta=1.0,
        forecaster="kaar_clipped", clip_m=1.0, adversary="iid", noise_sd=0.1,
        comparator="representer", comparator_norm=0.65,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_zero_forecaster_vs_zero_comparator_zero_regret():
    cfg = small_config(forecaster="zero", comparator="zero", noise_sd=0.3)
    trace = run_game(cfg, 0)
    assert np.allclose(trace.regret("zero"), 0.0, atol=1e-12)


def test_oracle_forecaster_zero_regret(monkeypatch):
    # a forecaster that predicts f(x_t) has regret exactly 0 against f
    from kaarbench import harness

    cfg = small_config(noise_sd=0.2, forecaster="zero")

    class Oracle:
        def __init__(self):
            self.f = None

        def predict(self, x):
            return float(self.f.evaluate(np.atleast_2d(x))[0])

        def update(self, x, y):
            pass

    oracle = Oracle()
    orig_stream = harness.make_stream

    def capture_stream(config, params, seed):
        stream = orig_stream(config, params, seed)
        oracle.f = stream.comparator
        return stream

    monkeypatch.setattr(harness, "make_stream", capture_stream)
    monkeypatch.setattr(harness, "make_forecaster", lambda *a, **k: oracle)
    trace = run_game(cfg, 0)
    assert np.allclose(trace.regret("representer"), 0.0, atol=1e-12)


def test_losses_are_squared_errors():
    trace = run_game(small_config(), 0)
    assert np.allclose(trace.losses, (trace.ys - trace.yhats) ** 2, atol=0)


def test_regret_additivity_vs_plain_sums():
    trace = run_game(small_config(horizon=512), 0)
    plain = np.cumsum(trace.losses) - np.cumsum(trace.ys**2)
    assert np.abs(trace.regret("zero") - plain).max() <= 1e-9


def test_replay_determinism():
    cfg = small_config(horizon=200, noise_sd=0.2)
    a = run_game(cfg, 3)
    b = run_game(cfg, 3)
    assert np.array_equal(a.xs, b.xs)
    assert np.array_equal(a.yhats, b.yhats)
    assert np.array_equal(a.cum_losses, b.cum_losses)


def test_clipped_trace_records_raw_predictions():
    trace = run_game(small_config(forecaster="kaar_clipped"), 0)
    assert trace.raw_yhats is not None
    assert np.all(np.abs(trace.yhats) <= 1.0)
    assert np.allclose(trace.yhats, np.clip(trace.raw_yhats, -1.0, 1.0))


def test_shattering_game_runs_to_cube_count():
    cfg = small_config(adversary="shattering", horizon=128, n_grid=64)
    trace = run_game(cfg, 0)
    assert trace.n == 128
    assert "bump" in trace.comparator_cum


def test_checkpoints_default_powers_of_two():
    assert default_checkpoints(8) == (1, 2, 4, 8)
    assert default_checkpoints(10) == (1, 2, 4, 8, 10)
    trace = run_game(small_config(horizon=100), 0)
    assert trace.checkpoints == (1, 2, 4, 8, 16, 32, 64, 100)


def test_explicit_checkpoints_validated():
    with pytest.raises(ValueError):
        small_config(checkpoints=(1, 500)).validate()


def test_config_validation_catches_unknown_ids():
    with pytest.raises(ValueError):
        small_config(forecaster="oracle").validate()
    with pytest.raises(ValueError):
        small_config(adversary="martian").validate()
    with pytest.raises(ValueError):
        small_config(forecaster="ewa", d=2).validate()


def test_game_failure_carries_round_index():
    # a nan comparator scale poisons the labels; the forecaster rejects the
    # first non-finite one and the harness wraps it with the round index
    cfg = small_config(comparator_norm=float("nan"))
    with pytest.raises(GameFailure) as exc_info:
        run_game(cfg, 0)
    assert exc_info.value.round_index >= 1


def test_order_guard_blocks_label_leakage_patterns():
    class Dummy:
        def predict(self, x):
            return 0.0

        def update(self, x, y):
            pass

    guard = _OrderGuard(Dummy())
    with pytest.raises(RuntimeError):
        guard.update([0.0], 1.0)  # update before any prediction
    guard.predict([0.0])
    guard.update([0.0], 1.0)
    guard.predict([0.1])
    with pytest.raises(RuntimeError):
        guard.predict([0.2])  # second prediction without an update


def test_run_experiment_serial_and_parallel_agree():
    cfg = small_config(horizon=64, seeds=(0, 1, 2))
    serial = run_experiment(cfg)
    parallel = run_experiment(ExperimentConfig(**{**cfg.__dict__, "threads": 2}))
    for seed in cfg.seeds:
        assert np.array_equal(serial[seed].yhats, parallel[seed].yhats)


def test_run_horizon_family_reschedules_tau():
    cfg = small_config(horizon=64)
    regs = run_horizon_family(cfg, (8, 16, 32), 0)
    assert regs.shape == (3,)
    t8 = run_game(ExperimentConfig(**{**cfg.__dict__, "horizon": 8}), 0)
    assert t8.tau == pytest.approx(8.0 ** (1.0 / 3.0))


def test_domain_warning_for_out_of_box_inputs():
    # representer centers inside the box, but a stream wider than the box warns
    from kaarbench.adversary import Stream, ZeroComparator
    from kaarbench import harness

    cfg = small_config()
    stream = Stream(xs=np.array([[1.5]]), ys=np.array([0.0]), comparator=ZeroComparator(dim=1))
    orig = harness.make_stream
    harness.make_stream = lambda *a, **k: stream
    try:
        with pytest.warns(UserWarning):
            run_game(ExperimentConfig(**{**cfg.__dict__, "horizon": 1}), 0)
    finally:
        harness.make_stream = orig


# -- kahan / exponent fits ------------------------------------------------


def test_kahan_cumsum_matches_fsum():
    import math

    rng = np.random.default_rng(0)
    vals = rng.uniform(0, 1, 10_000) * 1e-3
    ks = kahan_cumsum(vals)
    assert ks[-1] == pytest.approx(math.fsum(vals), abs=1e-12)


def test_estimate_exponent_exact_power_law():
    ns = np.array([16, 32, 64, 128, 256])
    fit = estimate_exponent(ns, ns**0.4)
    assert fit.slope == pytest.approx(0.4, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert not fit.flagged


def test_estimate_exponent_constant():
    fit = estimate_exponent([16, 32, 64, 128], [7.0, 7.0, 7.0, 7.0])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_estimate_exponent_floors_nonpositive():
    fit = estimate_exponent([16, 32, 64, 128], [1.0, -2.0, 3.0, 4.0])
    assert fit.flagged and not fit.all_nonpositive
    all_bad = estimate_exponent([16, 32, 64, 128], [-1.0, -1.0, -1.0, -1.0])
    assert all_bad.all_nonpositive


def test_estimate_exponent_needs_four_checkpoints():
    with pytest.raises(ValueError):
        estimate_exponent([16, 32, 64], [1.0, 2.0, 3.0])


# -- layouts / persistence -------------------------------------------------


def test_point_layouts():
    eq = point_layout("equispaced", 16, 1)
    assert eq.shape == (16, 1) and eq[0, 0] == -1.0 and eq[-1, 0] == 1.0
    un = point_layout("uniform", 20, 2, rng=0)
    assert un.shape == (20, 2) and np.all(np.abs(un) <= 1)
    cl = point_layout("clustered", 30, 1, rng=0)
    assert cl.shape == (30, 1) and np.all(np.abs(cl) <= 1)
    with pytest.raises(ValueError):
        point_layout("spiral", 10, 1)


def test_trace_csv_format(tmp_path):
    trace = run_game(small_config(horizon=16), 0)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,y,yhat,loss,cum_loss,regret_representer,regret_zero"
    assert len(lines) == 17
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[3]) == pytest.approx((float(first[1]) - float(first[2])) ** 2)


def test_summary_and_plot_files(tmp_path):
    rows = [{"seed": 0, "n": 16, "regret": 1.5, "slope": 0.3}, {"seed": 1, "n": 16, "regret": 2.0, "slope": None}]
    p = tmp_path / "summary.csv"
    write_summary_csv(rows, p)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "seed,n,regret,slope"
    assert lines[2].endswith(",")  # missing slope stays empty
    dat = tmp_path / "curve.dat"
    write_plot_data(dat, [1, 2], [0.5, 0.25])
    assert dat.read_text().splitlines()[0] == "1 0.5"


def test_gram_and_stream_csv(tmp_path):
    from kaarbench.adversary import ZeroComparator, iid_stream

    K = np.array([[1.0, 0.5], [0.5, 1.0]])
    gpath = tmp_path / "gram.csv"
    write_gram_csv(K, gpath)
    lines = gpath.read_text().strip().splitlines()
    assert lines[0] == "i,j,value"
    assert lines[1] == "0,0,1"
    assert len(lines) == 5

    stream = iid_stream(ZeroComparator(dim=2), 0.1, 3, np.random.default_rng(0))
    spath = tmp_path / "stream.csv"
    write_stream_csv(stream, spath)
    lines = spath.read_text().strip().splitlines()
    assert lines[0] == "t,x_1,x_2,y"
    assert len(lines) == 4
