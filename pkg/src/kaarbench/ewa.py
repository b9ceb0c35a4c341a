"""Exponentially weighted average forecaster over a sup-norm net of experts.

The baseline discretizes a Holder ball (one-dimensional, exponent
beta in (0, 1], radius M in both sup norm and Holder seminorm) by an
epsilon-net of piecewise-constant functions, then aggregates the finite
expert set with exponential weights:

    w_i  <-  w_i * exp(-eta (y - f_i(x))^2),  renormalized,

predicting the weighted average sum_i w_i f_i(x).  Squared loss with
predictions and labels in [-M, M] is 1/(8 M^2)-exp-concave, so with
eta = 1/(8 M^2) the weighted-average prediction satisfies the classical
aggregation bound

    sum_t (y_t - yhat_t)^2 - min_i sum_t (y_t - f_i(x_t))^2 <= ln(N) / eta.

Net construction: partition [-1, 1] into m = ceil((2 M / epsilon)^(1/beta))
cells so that a Holder(beta, M) function moves by at most epsilon/2 within a
half-cell; expert values live on the grid of multiples of epsilon inside
[-M, M] (augmented with the endpoints +-M so quantization error stays below
epsilon/2 even when epsilon does not divide M), with adjacent-cell jumps
bounded by 2 epsilon, which is all a quantized Holder function can do.
Every ball member is then within epsilon in sup norm of some expert, and the
count N satisfies log N = O(epsilon^{-1/beta}) as the metric entropy of the
ball dictates.  The construction is exponential in the horizon once epsilon
is balanced (that is the point of the comparison), so it is deliberately
restricted to d = 1.

The entropy-balancing scale is epsilon* ~ n^{-beta/(beta+d)}; it is exposed
as `balanced_epsilon` but never hard-coded, since the interesting regimes
are often run off-balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ExpertNet",
    "build_net",
    "net_cardinality",
    "ewa_predict",
    "ewa_update",
    "EwaForecaster",
    "balanced_epsilon",
]

# enumeration guard: nets beyond this size are a configuration mistake
MAX_EXPERTS = 200_000


@dataclass
class ExpertNet:
    """A finite expert set (piecewise-constant on a shared partition) plus weights."""

    values: np.ndarray       # (N, m): expert i's value on cell j
    edges: np.ndarray        # (m + 1,) cell boundaries spanning [-1, 1]
    epsilon: float
    beta: float
    clip_m: float
    eta: float
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.weights is None:
            n = self.values.shape[0]
            self.weights = np.full(n, 1.0 / n)

    @property
    def n_experts(self) -> int:
        return int(self.values.shape[0])

    def cell_of(self, x) -> np.ndarray:
        """Index of the partition cell containing each query point."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        m = self.values.shape[1]
        idx = np.floor((xs + 1.0) / 2.0 * m).astype(int)
        return np.clip(idx, 0, m - 1)

    def expert_values_at(self, x: float) -> np.ndarray:
        return self.values[:, int(self.cell_of(x)[0])]


def _value_grid(clip_m: float, epsilon: float) -> np.ndarray:
    k = math.floor(clip_m / epsilon)
    grid = np.arange(-k, k + 1) * epsilon
    grid = np.union1d(grid, [-clip_m, clip_m])
    return grid


def _jump_graph(beta: float, clip_m: float, epsilon: float):
    """Value grid, cell count and adjacency of the jump-constrained experts."""
    if not (0 < beta <= 1):
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if not (epsilon > 0 and clip_m > 0):
        raise ValueError(f"need epsilon > 0 and M > 0, got epsilon={epsilon}, M={clip_m}")
    m_cells = max(1, math.ceil((2.0 * clip_m / epsilon) ** (1.0 / beta)))
    grid = _value_grid(clip_m, epsilon)
    allowed = np.abs(grid[:, None] - grid[None, :]) <= 2.0 * epsilon * (1.0 + 1e-12)
    return grid, m_cells, allowed


def net_cardinality(beta: float, clip_m: float, epsilon: float) -> float:
    """Number of experts the net would contain, by dynamic programming."""
    grid, m_cells, allowed = _jump_graph(beta, clip_m, epsilon)
    counts = np.ones(len(grid), dtype=float)
    for _ in range(m_cells - 1):
        counts = allowed @ counts
    return float(counts.sum())


def build_net(beta: float, clip_m: float, epsilon: float, d: int = 1) -> ExpertNet:
    """Enumerate the epsilon-net of the Holder(beta, M) ball on [-1, 1].

    Only d = 1 is supported; the net size is exponential in (1/epsilon)^(1/beta)
    and enumeration is refused beyond MAX_EXPERTS.
    """
    if d != 1:
        raise ValueError(f"expert net construction is implemented for d=1 only, got d={d}")
    grid, m_cells, allowed = _jump_graph(beta, clip_m, epsilon)
    total = net_cardinality(beta, clip_m, epsilon)
    if total > MAX_EXPERTS:
        raise ValueError(
            f"net would contain ~{total:.3g} experts (> {MAX_EXPERTS}); increase epsilon"
        )

    paths: list[list[int]] = [[i] for i in range(len(grid))]
    for _ in range(m_cells - 1):
        paths = [p + [j] for p in paths for j in np.nonzero(allowed[p[-1]])[0]]
    values = grid[np.asarray(paths)]
    edges = np.linspace(-1.0, 1.0, m_cells + 1)
    eta = 1.0 / (8.0 * clip_m**2)
    return ExpertNet(values=values, edges=edges, epsilon=float(epsilon), beta=float(beta), clip_m=float(clip_m), eta=eta)


def ewa_predict(net: ExpertNet, x) -> float:
    """Weighted-average prediction sum_i w_i f_i(x)."""
    return float(net.weights @ net.expert_values_at(float(np.atleast_1d(x)[0])))


def ewa_update(net: ExpertNet, x, y: float) -> ExpertNet:
    """Exponential-weights update on the squared loss at (x, y); mutates and returns net."""
    if not math.isfinite(y):
        raise ValueError(f"label must be finite, got {y}")
    preds = net.expert_values_at(float(np.atleast_1d(x)[0]))
    losses = (y - preds) ** 2
    with np.errstate(divide="ignore"):  # zero weights stay zero
        logw = np.log(net.weights) - net.eta * losses
    logw -= logw.max()
    w = np.exp(logw)
    net.weights = w / w.sum()
    return net


def balanced_epsilon(n: int, beta: float, d: int = 1) -> float:
    """Entropy-balancing net scale, epsilon* = n^{-beta/(beta+d)}."""
    return float(n) ** (-beta / (beta + d))


class EwaForecaster:
    """Game-protocol adapter around an ExpertNet (predict then update)."""

    def __init__(self, net: ExpertNet):
        self.net = net

    @property
    def clip_m(self) -> float:
        return self.net.clip_m

    def predict(self, x) -> float:
        return ewa_predict(self.net, x)

    def update(self, x, y: float) -> None:
        ewa_update(self.net, x, y)
