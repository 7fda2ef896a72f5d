"""Monte Carlo harness: coverage table, contraction and dimension checks.

Every replication is a pure function of (config, cell index, replication
index): its RNG stream is derived from ``(seed, cell, rep)``, so results are
identical no matter how replications are scheduled across threads, and
aggregation folds in index order. That makes whole runs reproducible
bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import NoiseSpec, Observation, complexity_term, derive_rng, signal_array
from .oracle import tau_oracle, tau_rate
from .posterior import _sample_arrays, build
from .selector import select

__all__ = [
    "ExperimentConfig",
    "ExperimentRow",
    "SelectorQuality",
    "spike_signal",
    "table1",
    "contraction_curve",
    "dimension_check",
    "selector_quality",
]


def spike_signal(n: int, p: int, amplitude: float) -> np.ndarray:
    """Signal with the p last coordinates equal to ``amplitude``, rest zero."""
    if not 0 <= p <= n:
        raise ValueError(f"p must lie in [0, {n}], got {p}")
    theta = np.zeros(n)
    if p:
        theta[n - p :] = amplitude
    return theta


@dataclass(frozen=True)
class ExperimentConfig:
    """Design of the coverage study: grid of (p, A) cells with one M each."""

    n: int
    sigma: float
    kappa: float
    replications: int
    grid: tuple[tuple[int, float], ...]
    m_values: Mapping[tuple[int, float], float]
    noise: NoiseSpec
    seed: int

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        for p, _ in self.grid:
            if not 0 <= p <= self.n:
                raise ValueError(f"p must lie in [0, {self.n}], got {p}")
        missing = [cell for cell in self.grid if cell not in self.m_values]
        if missing:
            raise ValueError(f"missing M for cells: {missing}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        cells = d["cells"]
        grid = tuple((int(c["p"]), float(c["A"])) for c in cells)
        m_values = {(int(c["p"]), float(c["A"])): float(c["M"]) for c in cells}
        return cls(
            n=int(d["n"]),
            sigma=float(d["sigma"]),
            kappa=float(d["kappa"]),
            replications=int(d["replications"]),
            grid=grid,
            m_values=m_values,
            noise=NoiseSpec.from_dict(d.get("noise", {"family": "gaussian-iid"})),
            seed=int(d["seed"]),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sigma": self.sigma,
            "kappa": self.kappa,
            "replications": self.replications,
            "cells": [
                {"p": p, "A": a, "M": self.m_values[(p, a)]} for p, a in self.grid
            ],
            "noise": self.noise.to_dict(),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ExperimentRow:
    """One cell of the coverage table."""

    p: int
    A: float
    M: float
    ratio: float
    coverage: float
    mean_k_hat: float
    se_coverage: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "A": self.A,
            "M": self.M,
            "ratio": self.ratio,
            "coverage": self.coverage,
            "mean_k_hat": self.mean_k_hat,
            "se_coverage": self.se_coverage,
        }


def _map_ordered(func, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(func, items))


def _coverage_replicate(
    config: ExperimentConfig, theta: np.ndarray, cell_idx: int, rep: int
) -> tuple[float, float, int]:
    """One replication: (squared radius, squared distance, selected size)."""
    rng = derive_rng(config.seed, cell_idx, rep)
    xi = config.noise.draw(rng, config.n)
    x = Observation(theta + config.sigma * xi, config.sigma)
    sel = select(x, config.kappa)
    est = np.zeros(config.n)
    est[sel.selected] = x.x[sel.selected]
    dist_sq = float(np.sum((est - theta) ** 2))
    return sel.radius_sq, dist_sq, sel.cardinality


def table1(
    config: ExperimentConfig,
    threads: int = 1,
    calibrate_coverage: float | None = None,
    calibration_step: float = 0.01,
) -> list[ExperimentRow]:
    """Run the coverage study over the configured grid.

    Per cell: simulate ``replications`` data vectors, select, and form the
    ball with the cell's M. Reports the ratio ``M * mean(r_hat^2) / r2`` with
    ``r2 = sigma^2 p log(e n / p)`` (the benchmark rate of the spike signal),
    the coverage frequency, its binomial standard error, and the mean
    selected size. With ``calibrate_coverage`` set, the cell's M is replaced
    by the smallest multiple of ``calibration_step`` whose empirical coverage
    reaches the target.
    """
    rows = []
    for cell_idx, (p, amp) in enumerate(config.grid):
        if p == 0:
            raise ValueError("p = 0 leaves the benchmark rate undefined")
        theta = spike_signal(config.n, p, amp)
        r2 = config.sigma**2 * complexity_term(p, config.n)
        reps = list(range(config.replications))
        out = _map_ordered(
            lambda rep, _c=config, _t=theta, _i=cell_idx: _coverage_replicate(_c, _t, _i, rep),
            reps,
            threads,
        )
        r_hat_sq = np.array([o[0] for o in out])
        dist_sq = np.array([o[1] for o in out])
        k_hat = np.array([o[2] for o in out])

        m = config.m_values[(p, amp)]
        if calibrate_coverage is not None:
            required = np.sort(dist_sq / r_hat_sq)
            idx = math.ceil(calibrate_coverage * config.replications) - 1
            idx = min(max(idx, 0), config.replications - 1)
            m = math.ceil(required[idx] / calibration_step - 1e-9) * calibration_step

        coverage = float(np.mean(dist_sq <= m * r_hat_sq))
        rows.append(
            ExperimentRow(
                p=p,
                A=amp,
                M=m,
                ratio=m * float(np.mean(r_hat_sq)) / r2,
                coverage=coverage,
                mean_k_hat=float(np.mean(k_hat)),
                se_coverage=math.sqrt(coverage * (1.0 - coverage) / config.replications),
            )
        )
    return rows


def contraction_curve(
    theta,
    sigma: float,
    kappa: float,
    noise: NoiseSpec,
    seed: int,
    m_grid: Sequence[float],
    m0: float = 1.0,
    replications: int = 20,
    draws: int = 2000,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Mean posterior mass outside ``m0 * r2(theta) + M * sigma^2`` per M.

    Estimated by exact posterior sampling: per replication the posterior is
    built and ``draws`` samples taken; masses average over replications.
    """
    arr = signal_array(theta)
    m_grid = [float(m) for m in m_grid]
    if not m_grid:
        raise ValueError("m_grid must be nonempty")
    r2 = tau_oracle(arr, sigma, 1.0).rate_sq
    thresholds = np.array([m0 * r2 + m * sigma**2 for m in m_grid])

    def one(rep: int) -> np.ndarray:
        rng = derive_rng(seed, rep)
        x = Observation(arr + sigma * noise.draw(rng, arr.size), sigma)
        post = build(x, kappa)
        masses = np.zeros(len(m_grid))
        remaining = draws
        while remaining > 0:
            batch = min(remaining, 2000)
            _, _, values = _sample_arrays(post, x, rng, batch)
            dist_sq = np.sum((values - arr[None, :]) ** 2, axis=1)
            masses += (dist_sq[:, None] >= thresholds[None, :]).sum(axis=0)
            remaining -= batch
        return masses / draws

    per_rep = _map_ordered(one, list(range(replications)), threads)
    mean_mass = np.mean(np.stack(per_rep), axis=0)
    return list(zip(m_grid, mean_mass.tolist()))


def dimension_check(
    theta,
    sigma: float,
    kappa: float,
    noise: NoiseSpec,
    seed: int,
    m_grid: Sequence[float],
    replications: int = 100,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Mean posterior mass on sets larger than ``M * s(theta)`` per M.

    Uses the exact cardinality posterior (no sampling), averaged over
    replications.
    """
    arr = signal_array(theta)
    s = int(np.count_nonzero(arr))
    if s == 0:
        raise ValueError("theta has no nonzero coordinates; the bound is degenerate")
    m_grid = [float(m) for m in m_grid]
    if not m_grid:
        raise ValueError("m_grid must be nonempty")
    ks = np.arange(arr.size + 1)

    def one(rep: int) -> np.ndarray:
        rng = derive_rng(seed, rep)
        x = Observation(arr + sigma * noise.draw(rng, arr.size), sigma)
        q = build(x, kappa).cardinality_posterior
        return np.array([q[ks > m * s].sum() for m in m_grid])

    per_rep = _map_ordered(one, list(range(replications)), threads)
    mean_mass = np.mean(np.stack(per_rep), axis=0)
    return list(zip(m_grid, mean_mass.tolist()))


@dataclass(frozen=True)
class SelectorQuality:
    """Per-replication selected-set rates against the oracle rate."""

    rates_sq: np.ndarray
    oracle_rate_sq: float

    @property
    def ratios(self) -> np.ndarray:
        if self.oracle_rate_sq == 0.0:
            raise ValueError("oracle rate is zero; ratios are undefined (inspect rates_sq)")
        return self.rates_sq / self.oracle_rate_sq


def selector_quality(
    theta,
    sigma: float,
    kappa: float,
    tau: float,
    noise: NoiseSpec,
    seed: int,
    reps: int,
    threads: int = 1,
) -> SelectorQuality:
    """Empirical distribution of the selected set's rate relative to the oracle."""
    arr = signal_array(theta)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    oracle_rate = tau_oracle(arr, sigma, tau).rate_sq

    def one(rep: int) -> float:
        rng = derive_rng(seed, rep)
        x = Observation(arr + sigma * noise.draw(rng, arr.size), sigma)
        sel = select(x, kappa)
        return tau_rate(sel.selected, arr, sigma, tau)

    rates = np.array(_map_ordered(one, list(range(reps)), threads))
    return SelectorQuality(rates_sq=rates, oracle_rate_sq=oracle_rate)
