"""Online regression game loop, regret accounting and result persistence.

The protocol per round t is strict: the environment reveals x_t, the
forecaster predicts yhat_t from the history and x_t alone, the label y_t is
revealed, the squared loss (y_t - yhat_t)^2 is suffered, and only then may
the forecaster update.  An order guard enforces predict-before-update so no
code path can leak the label.  Streams are materialized up front (the
adversary is oblivious) and every game is a deterministic function of its
config and seed.

Cumulative sums are compensated (Kahan) so that the regret identity

    regret_t(f) = cum_loss_t - cum_comparator_loss_t(f)

holds to 1e-9 against independently accumulated totals over 1e4+ rounds.
Regret against every registered comparator is recorded at geometric
checkpoints (powers of two by default) and the growth exponent of R_n is
estimated by least squares on log-log axes.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .adversary import (
    RepresenterComparator,
    Stream,
    ZeroComparator,
    iid_stream,
    shattering_stream,
)
from .ewa import EwaForecaster, balanced_epsilon, build_net
from .kaar import KaarForecaster, NumericalBreakdownError, Schedule, schedule_tau
from .kernel import KernelParams

__all__ = [
    "ExperimentConfig",
    "GameTrace",
    "GameFailure",
    "ExponentFit",
    "run_game",
    "run_experiment",
    "run_horizon_family",
    "run_family",
    "estimate_exponent",
    "kahan_cumsum",
    "point_layout",
    "default_checkpoints",
    "write_trace_csv",
    "write_summary_csv",
    "write_plot_data",
    "write_gram_csv",
    "write_stream_csv",
    "write_effdim_csv",
]

FORECASTER_IDS = ("kaar", "kaar_clipped", "ewa", "zero")
ADVERSARY_IDS = ("iid", "shattering")
COMPARATOR_IDS = ("representer", "bump", "zero")


class GameFailure(RuntimeError):
    """A numerical failure inside a game, carrying the failing round index."""

    def __init__(self, message: str, round_index: int):
        super().__init__(message)
        self.round_index = round_index


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one game family (kernel, forecaster, adversary)."""

    name: str = "game"
    horizon: int = 256
    seeds: tuple[int, ...] = (0,)
    checkpoints: tuple[int, ...] | None = None  # None -> powers of two up to n
    threads: int = 1
    # kernel / schedule
    d: int = 1
    regime: str = "smooth"  # smooth | hard | manual
    beta: float = 1.0
    p: float = math.inf
    epsilon: float = 0.05
    s: float | None = None
    tau: float | None = None
    # forecaster
    forecaster: str = "kaar_clipped"
    clip_m: float = 1.0
    ewa_epsilon: float | None = None
    ewa_beta: float | None = None
    # adversary
    adversary: str = "iid"
    noise_sd: float = 0.1
    comparator: str = "representer"
    comparator_centers: int = 5
    comparator_norm: float = 0.65
    comparator_seed: int = 0
    n_grid: int | None = None
    # output
    out_dir: str | None = None

    def validate(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.forecaster not in FORECASTER_IDS:
            raise ValueError(f"unknown forecaster id {self.forecaster!r} (known: {FORECASTER_IDS})")
        if self.adversary not in ADVERSARY_IDS:
            raise ValueError(f"unknown adversary id {self.adversary!r} (known: {ADVERSARY_IDS})")
        if self.comparator not in COMPARATOR_IDS:
            raise ValueError(f"unknown comparator id {self.comparator!r} (known: {COMPARATOR_IDS})")
        if self.checkpoints is not None:
            bad = [c for c in self.checkpoints if not 1 <= c <= self.horizon]
            if bad:
                raise ValueError(f"checkpoints outside [1, horizon]: {bad}")
        if self.forecaster == "ewa" and self.d != 1:
            raise ValueError("the EWA expert-net forecaster only supports d = 1")
        if self.adversary == "iid" and self.comparator == "bump":
            raise ValueError("bump comparators pair with shattering streams; iid streams take representer or zero")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        # resolving the schedule performs its own invariant checks
        self.schedule()

    def schedule(self) -> tuple[float, float]:
        sched = Schedule(
            regime=self.regime, beta=self.beta, p=self.p, epsilon=self.epsilon,
            n=self.horizon, s=self.s, tau=self.tau,
        )
        return schedule_tau(sched, self.d)


@dataclass
class GameTrace:
    """Per-round records of one game plus cumulative losses and regrets."""

    seed: int
    n: int
    s: float
    tau: float
    xs: np.ndarray
    ys: np.ndarray
    yhats: np.ndarray
    losses: np.ndarray
    cum_losses: np.ndarray
    comparator_cum: dict[str, np.ndarray]
    checkpoints: tuple[int, ...]
    raw_yhats: np.ndarray | None = None
    flags: tuple[str, ...] = ()

    def regret(self, comparator_id: str) -> np.ndarray:
        """Cumulative regret after each round against one comparator."""
        return self.cum_losses - self.comparator_cum[comparator_id]

    def regret_at(self, comparator_id: str, t: int) -> float:
        return float(self.regret(comparator_id)[t - 1])

    def final_regret(self, comparator_id: str) -> float:
        return self.regret_at(comparator_id, self.n)

    def checkpoint_regrets(self, comparator_id: str) -> np.ndarray:
        reg = self.regret(comparator_id)
        return np.array([reg[t - 1] for t in self.checkpoints])


def kahan_cumsum(values: np.ndarray) -> np.ndarray:
    """Compensated running sum of a 1-d array."""
    out = np.empty(len(values))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


def default_checkpoints(n: int) -> tuple[int, ...]:
    """Powers of two up to n, always including n itself."""
    cps = [2**k for k in range(0, n.bit_length()) if 2**k <= n]
    if cps[-1] != n:
        cps.append(n)
    return tuple(cps)


class _OrderGuard:
    """Enforces the reveal-predict-reveal-suffer order round by round."""

    def __init__(self, forecaster):
        self._f = forecaster
        self._predicted = False

    def predict(self, x) -> float:
        if self._predicted:
            raise RuntimeError("protocol violation: two predictions without an update")
        self._predicted = True
        return self._f.predict(x)

    def update(self, x, y) -> None:
        if not self._predicted:
            raise RuntimeError("protocol violation: update before the round's prediction")
        self._f.update(x, y)
        self._predicted = False


def _zero_forecaster():
    class _Zero:
        def predict(self, x):
            return 0.0

        def update(self, x, y):
            pass

    return _Zero()


def make_comparator(config: ExperimentConfig, params: KernelParams):
    """Build the configured comparator for iid streams (fixed across seeds)."""
    if config.comparator == "zero":
        return ZeroComparator(dim=config.d)
    if config.comparator == "representer":
        rng = np.random.default_rng(config.comparator_seed)
        centers = rng.uniform(-0.8, 0.8, size=(config.comparator_centers, config.d))
        raw = np.where(np.arange(config.comparator_centers) % 2 == 0, 1.0, -1.0)
        comp = RepresenterComparator(params=params, centers=centers, coeffs=raw)
        if comp.norm_sq > 0:
            scale = config.comparator_norm / math.sqrt(comp.norm_sq)
            comp = RepresenterComparator(params=params, centers=centers, coeffs=raw * scale)
        return comp
    raise ValueError(f"comparator {config.comparator!r} is only available on shattering streams")


def make_stream(config: ExperimentConfig, params: KernelParams, seed: int) -> Stream:
    rng = np.random.default_rng(seed)
    if config.adversary == "shattering":
        n_grid = config.n_grid
        if n_grid is None:
            n_grid = max(1, math.ceil(config.horizon / 2**config.d))
        return shattering_stream(n_grid, config.d, config.clip_m, config.beta, rng)
    comp = make_comparator(config, params)
    return iid_stream(comp, config.noise_sd, config.horizon, rng, clip_m=config.clip_m)


def make_forecaster(config: ExperimentConfig, params: KernelParams, tau: float):
    if config.forecaster in ("kaar", "kaar_clipped"):
        return KaarForecaster(params, tau, clip_m=config.clip_m)
    if config.forecaster == "ewa":
        eps = config.ewa_epsilon
        if eps is None:
            eps = balanced_epsilon(config.horizon, config.ewa_beta or min(config.beta, 1.0))
        net = build_net(config.ewa_beta or min(config.beta, 1.0), config.clip_m, eps)
        return EwaForecaster(net)
    if config.forecaster == "zero":
        return _zero_forecaster()
    raise ValueError(f"unknown forecaster id {config.forecaster!r}")


def run_game(config: ExperimentConfig, seed: int | None = None) -> GameTrace:
    """Play one seeded game and return its trace.

    The comparator registered under the stream's id plus the constant-zero
    comparator are tracked for regret.  The game length is the configured
    horizon, shortened to the stream length for shattering streams whose
    cube count does not reach the horizon.
    """
    config.validate()
    if seed is None:
        seed = config.seeds[0]
    s, tau = config.schedule()
    params = KernelParams(config.d, s)
    stream = make_stream(config, params, seed)
    n = min(config.horizon, len(stream))
    xs, ys = stream.xs[:n], stream.ys[:n]
    flags: tuple[str, ...] = ()
    if np.any(np.abs(xs) > 1.0 + 1e-12):
        warnings.warn("stream inputs leave [-1, 1]^d; the kernel formula remains valid", stacklevel=2)
        flags = ("inputs-outside-domain",)

    comp_id = "bump" if config.adversary == "shattering" else config.comparator
    comparators: dict[str, object] = {comp_id: stream.comparator}
    if comp_id != "zero":
        comparators["zero"] = ZeroComparator(dim=config.d)

    forecaster = make_forecaster(config, params, tau)
    guard = _OrderGuard(forecaster)
    clipped = config.forecaster == "kaar_clipped"
    clip_m = config.clip_m

    yhats = np.empty(n)
    raw_yhats = np.empty(n) if clipped else None
    try:
        for t in range(n):
            x = xs[t]
            raw = guard.predict(x)
            if clipped:
                raw_yhats[t] = raw
                yhats[t] = min(max(-clip_m, raw), clip_m)
            else:
                yhats[t] = raw
            guard.update(x, ys[t])
    except (NumericalBreakdownError, ValueError, FloatingPointError) as exc:
        raise GameFailure(f"game {config.name!r} seed {seed} failed at round {t + 1}: {exc}", t + 1) from exc

    losses = (ys - yhats) ** 2
    cum_losses = kahan_cumsum(losses)
    comparator_cum = {}
    for name, comp in comparators.items():
        comp_losses = (ys - comp.evaluate(xs)) ** 2
        comparator_cum[name] = kahan_cumsum(comp_losses)

    checkpoints = config.checkpoints or default_checkpoints(n)
    checkpoints = tuple(c for c in checkpoints if c <= n)
    return GameTrace(
        seed=seed, n=n, s=s, tau=tau, xs=xs, ys=ys, yhats=yhats,
        losses=losses, cum_losses=cum_losses, comparator_cum=comparator_cum,
        checkpoints=checkpoints, raw_yhats=raw_yhats, flags=flags,
    )


def _run_one(args: tuple[ExperimentConfig, int]) -> GameTrace:
    config, seed = args
    return run_game(config, seed)


def run_experiment(config: ExperimentConfig) -> dict[int, GameTrace]:
    """Run all configured seeds, optionally across a process pool."""
    config.validate()
    if config.threads > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            traces = list(pool.map(_run_one, [(config, s) for s in config.seeds]))
    else:
        traces = [run_game(config, s) for s in config.seeds]
    return {t.seed: t for t in traces}


def run_horizon_family(config: ExperimentConfig, ns, seed: int) -> np.ndarray:
    """Final regrets of fresh games at each horizon in ns (one seed).

    The schedule is re-resolved per horizon, so tau follows its n-dependent
    law across the family; this is the curve whose growth exponent the
    regret theory bounds.  Regret is against the stream's own comparator.
    """
    finals = []
    for n in ns:
        cfg = replace(config, horizon=n, checkpoints=None)
        trace = run_game(cfg, seed)
        comp_id = "bump" if config.adversary == "shattering" else config.comparator
        finals.append(trace.final_regret(comp_id))
    return np.asarray(finals)


def _run_family_one(args: tuple[ExperimentConfig, tuple, int]) -> tuple[int, np.ndarray]:
    config, ns, seed = args
    return seed, run_horizon_family(config, ns, seed)


def run_family(config: ExperimentConfig, ns) -> dict[int, np.ndarray]:
    """run_horizon_family for every configured seed, pooled per config.threads."""
    config.validate()
    ns = tuple(ns)
    if config.threads > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            out = dict(pool.map(_run_family_one, [(config, ns, s) for s in config.seeds]))
    else:
        out = dict(_run_family_one((config, ns, s)) for s in config.seeds)
    return out


def bench_seed(config: ExperimentConfig, fit_ns: tuple[int, ...], seed: int):
    """One bench unit: the full-horizon trace plus the regret family at fit_ns.

    The full-horizon game doubles as the last family member when fit_ns ends
    at the horizon, so it is not replayed.
    """
    trace = run_game(config, seed)
    comp_id = "bump" if config.adversary == "shattering" else config.comparator
    shorter = tuple(n for n in fit_ns if n < trace.n)
    finals = list(run_horizon_family(config, shorter, seed)) if shorter else []
    if fit_ns and fit_ns[-1] == trace.n:
        finals.append(trace.final_regret(comp_id))
    return trace, np.asarray(finals)


def _bench_one(args):
    config, fit_ns, seed = args
    return seed, bench_seed(config, fit_ns, seed)


def run_bench(config: ExperimentConfig, fit_ns) -> dict[int, tuple[GameTrace, np.ndarray]]:
    """bench_seed across all seeds, pooled per config.threads."""
    config.validate()
    fit_ns = tuple(fit_ns)
    if config.threads > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            return dict(pool.map(_bench_one, [(config, fit_ns, s) for s in config.seeds]))
    return dict(_bench_one((config, fit_ns, s)) for s in config.seeds)


@dataclass
class ExponentFit:
    """OLS fit of log regret against log n at geometric checkpoints."""

    slope: float
    intercept: float
    r_squared: float
    flagged: bool = False          # some checkpoints were nonpositive and floored
    all_nonpositive: bool = False  # regret never accumulated; slope meaningless


def estimate_exponent(ns, regrets, floor: float = 1e-8) -> ExponentFit:
    """Estimate rho in R_n ~ n^rho from checkpointed regrets.

    Nonpositive regrets (the forecaster beating the comparator is
    legitimate) are floored to `floor` and flagged rather than rejected.
    """
    ns = np.asarray(ns, dtype=float)
    regrets = np.asarray(regrets, dtype=float)
    if len(ns) < 4:
        raise ValueError(f"need >= 4 checkpoints for an exponent fit, got {len(ns)}")
    nonpos = regrets <= 0
    flagged = bool(nonpos.any())
    all_nonpos = bool(nonpos.all())
    y = np.log(np.maximum(regrets, floor))
    x = np.log(ns)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(float(slope), float(intercept), float(r_squared), flagged, all_nonpos)


def point_layout(kind: str, n: int, d: int, rng=None) -> np.ndarray:
    """Point sets used by the effective-dimension studies.

    equispaced: regular grid on [-1, 1] (d = 1) or product grid (d > 1,
    n rounded down to a grid size); uniform: i.i.d. uniform on the cube;
    clustered: equal-weight gaussian blobs around a few anchors, clipped to
    the cube.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if kind == "equispaced":
        if d == 1:
            return np.linspace(-1.0, 1.0, n)[:, None]
        per_axis = max(2, int(round(n ** (1.0 / d))))
        axis = np.linspace(-1.0, 1.0, per_axis)
        grids = np.meshgrid(*([axis] * d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)
    if kind == "uniform":
        return rng.uniform(-1.0, 1.0, size=(n, d))
    if kind == "clustered":
        anchors = rng.uniform(-0.7, 0.7, size=(4, d))
        which = rng.integers(0, len(anchors), size=n)
        pts = anchors[which] + 0.05 * rng.standard_normal((n, d))
        return np.clip(pts, -1.0, 1.0)
    raise ValueError(f"unknown point layout {kind!r}")


# ---------------------------------------------------------------------------
# persistence: CSV and plot-data writers
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_trace_csv(trace: GameTrace, path) -> None:
    """Per-game CSV: t,y,yhat,loss,cum_loss,regret_<comparator-id>..."""
    names = sorted(trace.comparator_cum)
    regs = {name: trace.regret(name) for name in names}
    with open(path, "w") as fh:
        fh.write("t,y,yhat,loss,cum_loss," + ",".join(f"regret_{n}" for n in names) + "\n")
        for i in range(trace.n):
            row = [
                str(i + 1), _fmt(trace.ys[i]), _fmt(trace.yhats[i]),
                _fmt(trace.losses[i]), _fmt(trace.cum_losses[i]),
            ] + [_fmt(regs[n][i]) for n in names]
            fh.write(",".join(row) + "\n")


def write_summary_csv(rows: list[dict], path) -> None:
    """Experiment summary CSV: seed,n,regret,slope."""
    with open(path, "w") as fh:
        fh.write("seed,n,regret,slope\n")
        for row in rows:
            slope = row.get("slope")
            fh.write(
                f"{row['seed']},{row['n']},{_fmt(row['regret'])},"
                f"{'' if slope is None else _fmt(slope)}\n"
            )


def write_plot_data(path, xs, ys) -> None:
    """Two-column whitespace 'x y' file consumable by standard plotting tools."""
    with open(path, "w") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{_fmt(float(x))} {_fmt(float(y))}\n")


def write_gram_csv(K: np.ndarray, path) -> None:
    """Row-major Gram-matrix dump with header i,j,value (debugging aid)."""
    with open(path, "w") as fh:
        fh.write("i,j,value\n")
        for i in range(K.shape[0]):
            for j in range(K.shape[1]):
                fh.write(f"{i},{j},{_fmt(K[i, j])}\n")


def write_stream_csv(stream: Stream, path) -> None:
    """Stream dump t,x_1..x_d,y for replay and cross-implementation checks."""
    d = stream.xs.shape[1]
    with open(path, "w") as fh:
        fh.write("t," + ",".join(f"x_{k + 1}" for k in range(d)) + ",y\n")
        for i in range(len(stream)):
            coords = ",".join(_fmt(c) for c in stream.xs[i])
            fh.write(f"{i + 1},{coords},{_fmt(stream.ys[i])}\n")


def write_effdim_csv(reports, path) -> None:
    """Effective-dimension report CSV: n,tau,d_eff,lambda_max,lambda_min."""
    with open(path, "w") as fh:
        fh.write("n,tau,d_eff,lambda_max,lambda_min\n")
        for rep in reports:
            fh.write(
                f"{rep.n},{_fmt(rep.tau)},{_fmt(rep.value)},"
                f"{_fmt(rep.lambda_max)},{_fmt(rep.lambda_min)}\n"
            )
