"""Market-share statistics over realizations and the three parameter sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analytic
from .model import APPROXIMATION, EXACT_M1, MarketState, ModelParams
from .simulator import run


class NonIntegerCapacity(ValueError):
    pass


class DivisionByZeroShare(ZeroDivisionError):
    def __init__(self, point: dict):
        super().__init__(f"reference advertised share is 0 at {point}")
        self.point = point


@dataclass(frozen=True)
class ShareStats:
    f_a: float
    f_top: float
    f_min: float
    std_f_a: float
    n_realizations: int
    f_a_values: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExperimentRecord:
    params: ModelParams
    rho: float
    stats: ShareStats
    analytic_f_a: float | None
    seed_base: int


@dataclass(frozen=True)
class RelativeShare:
    """One point of the item-count or run-length comparison."""

    rho: float
    capacity: int
    pressure: float
    n_items: int
    nu: float
    f_a: float
    f_a_ref: float
    ratio: float
    stationary: bool | None = None


def top_percentile_share(state: MarketState, fraction: float = 0.05,
                         include_advertised: bool = False) -> float:
    """Share of the K-th most popular item, K = ceil(fraction * #items)."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    counts = state.owner_counts if include_advertised else state.owner_counts[:-1]
    k = math.ceil(Fraction(repr(float(fraction))) * len(counts))
    kth = np.partition(counts, len(counts) - k)[len(counts) - k]
    return float(kth) / state.n_agents


def min_share(state: MarketState) -> float:
    return float(state.owner_counts.min()) / state.n_agents


def _map(fn: Callable, tasks: Sequence, jobs: int) -> list:
    """Ordered map, in-process for jobs <= 1."""
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _realization(task) -> tuple[float, float, float]:
    params, seed, fraction, include_advertised = task
    state = run(params, seed).final_state
    return (
        state.advertised_owners() / state.n_agents,
        top_percentile_share(state, fraction, include_advertised),
        min_share(state),
    )


def _stats(rows: list[tuple[float, float, float]]) -> ShareStats:
    arr = np.asarray(rows, dtype=float)
    return ShareStats(
        f_a=float(arr[:, 0].mean()),
        f_top=float(arr[:, 1].mean()),
        f_min=float(arr[:, 2].mean()),
        std_f_a=float(arr[:, 0].std()),
        n_realizations=len(rows),
        f_a_values=tuple(float(x) for x in arr[:, 0]),
    )


def _ensembles(points: list[ModelParams], seed_bases: list[int], n_realizations: int,
               jobs: int, fraction: float = 0.05,
               include_advertised: bool = False) -> list[ShareStats]:
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    tasks = [
        (params, base + j, fraction, include_advertised)
        for params, base in zip(points, seed_bases)
        for j in range(n_realizations)
    ]
    rows = _map(_realization, tasks, jobs)
    return [_stats(rows[k * n_realizations:(k + 1) * n_realizations]) for k in range(len(points))]


def run_ensemble(params: ModelParams, n_realizations: int, seed_base: int, jobs: int = 1,
                 fraction: float = 0.05, include_advertised: bool = False) -> ShareStats:
    """Seeds ``seed_base .. seed_base + n - 1``; metrics taken on final states."""
    return _ensembles([params], [seed_base], n_realizations, jobs, fraction,
                      include_advertised)[0]


def capacity_for(rho: float, n_items: int) -> int:
    m = rho * n_items
    capacity = round(m)
    if abs(m - capacity) > 1e-9:
        raise NonIntegerCapacity(f"rho={rho} gives non-integer capacity {m} for I={n_items}")
    if not 1 <= capacity <= n_items:
        raise NonIntegerCapacity(f"rho={rho} gives capacity {capacity} outside 1..{n_items}")
    return capacity


def analytic_policy(params: ModelParams) -> ModelParams:
    """Exact gamma at capacity 1, the max(0.5, rho) estimate otherwise; fixed kept."""
    if params.gamma_policy.kind == "fixed":
        return params
    return params.replace(gamma_policy=EXACT_M1 if params.capacity == 1 else APPROXIMATION)


def sweep_capacities(base: ModelParams, capacities: Iterable[int], pressures: Iterable[float],
                     n_realizations: int, seed_base: int, jobs: int = 1) -> list[ExperimentRecord]:
    """One record per (pressure, capacity), pressure-major."""
    points = [base.replace(capacity=int(m), pressure=float(p))
              for p in pressures for m in capacities]
    stats = _ensembles(points, [seed_base] * len(points), n_realizations, jobs)
    records = []
    for params, st in zip(points, stats):
        expected = analytic.expected_advertised_share(analytic_policy(params))
        records.append(ExperimentRecord(params, params.rho, st, float(expected), seed_base))
    return records


def sweep_rho(base: ModelParams, rho_grid: Iterable[float], pressures: Iterable[float],
              n_realizations: int, seed_base: int, jobs: int = 1) -> list[ExperimentRecord]:
    capacities = [capacity_for(r, base.n_items) for r in rho_grid]
    return sweep_capacities(base, capacities, pressures, n_realizations, seed_base, jobs)


def item_size_experiment(k_values: Sequence[int], rho_grid: Sequence[float], pressure: float,
                         n_realizations: int, seed_base: int, n_agents: int = 100,
                         nu: float = 1000.0, reference_items: int = 100,
                         jobs: int = 1) -> list[RelativeShare]:
    """``F_a(I=k) / F_a(I=reference)`` per (k, rho) with M = round(rho * k).

    Each item count gets its own block of seeds; ``k == reference_items``
    reuses the reference ensemble, so its ratio is exactly 1.
    """
    counts = [reference_items] + [k for k in k_values if k != reference_items]
    points, bases = [], []
    for block, k in enumerate(counts):
        for r in rho_grid:
            points.append(ModelParams(n_agents, k, max(1, round(r * k)), pressure, nu))
            bases.append(seed_base + block * n_realizations)
    stats = _ensembles(points, bases, n_realizations, jobs)
    by_point = {(p.n_items, r): s for p, s, r in
                zip(points, stats, [r for _ in counts for r in rho_grid])}

    rows = []
    for k in k_values:
        for r in rho_grid:
            ref = by_point[(reference_items, r)].f_a
            f_a = by_point[(k, r)].f_a
            if ref == 0:
                raise DivisionByZeroShare({"rho": r, "n_items": reference_items,
                                           "pressure": pressure})
            rows.append(RelativeShare(r, max(1, round(r * k)), pressure, k, nu, f_a, ref,
                                      f_a / ref))
    return rows


def stationarity_experiment(nu_values: Sequence[float], reference_nu: float,
                            rho_grid: Sequence[float], pressures: Sequence[float],
                            n_realizations: int, seed_base: int, n_agents: int = 100,
                            n_items: int = 100, band: float = 0.02,
                            jobs: int = 1) -> list[RelativeShare]:
    """``F_a(nu=k) / F_a(nu=reference)`` per (pressure, rho).

    All run lengths share seeds, so a shorter run is a prefix of a longer one.
    A point counts as stationary when the ratio is within ``band`` of 1.
    """
    nus = [reference_nu] + [v for v in nu_values if v != reference_nu]
    capacities = [capacity_for(r, n_items) for r in rho_grid]
    points = [ModelParams(n_agents, n_items, m, p, v)
              for v in nus for p in pressures for m in capacities]
    stats = _ensembles(points, [seed_base] * len(points), n_realizations, jobs)
    by_point = {(pt.interactions_per_pair, pt.pressure, pt.capacity): s
                for pt, s in zip(points, stats)}

    rows = []
    for v in nu_values:
        for p in pressures:
            for r, m in zip(rho_grid, capacities):
                ref = by_point[(reference_nu, p, m)].f_a
                f_a = by_point[(v, p, m)].f_a
                if ref == 0:
                    raise DivisionByZeroShare({"rho": r, "pressure": p, "nu": reference_nu})
                ratio = f_a / ref
                rows.append(RelativeShare(r, m, p, n_items, v, f_a, ref, ratio,
                                          abs(ratio - 1) <= band))
    return rows
