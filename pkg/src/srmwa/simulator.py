"""Agent-based recommendation dynamics with advertisement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .model import MarketState, ModelParams, TransitionKind, ItemRef
from .rng import RandomSource


@dataclass
class SimulationOutcome:
    final_state: MarketState
    trajectory: list[tuple[int, float]] | None
    seed: int


def init_state(params: ModelParams, rng: RandomSource | None = None) -> MarketState:
    """Symmetric start: agent k owns regular items (k*M + j) mod I, j < M.

    Nobody owns the advertised item. ``rng`` is accepted for interface
    symmetry; the layout is deterministic and draws nothing.
    """
    n, m, i = params.n_agents, params.capacity, params.n_items
    stocks = (np.arange(n)[:, None] * m + np.arange(m)[None, :]) % i
    return MarketState.from_stocks(i, stocks)


def advance(
    state: MarketState,
    params: ModelParams,
    rng: RandomSource,
    n_steps: int,
    occupancy: np.ndarray | None = None,
    backend: str | None = None,
) -> TransitionKind:
    """Run ``n_steps`` recommendations in place and return the last one's kind.

    If ``occupancy`` (int64, length N + 1) is given, the advertised owner
    count after each step is tallied into it.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if occupancy is not None and occupancy.shape != (state.n_agents + 1,):
        raise ValueError("occupancy must have length n_agents + 1")
    kernel = _backend.get_kernel(backend)
    kind = kernel(
        state.stocks, state.owns, state.owner_counts, rng.bitgen,
        int(n_steps), float(params.pressure), occupancy,
    )
    state.recommendations_done += int(n_steps)
    return TransitionKind(kind)


def recommendation_step(state: MarketState, params: ModelParams, rng: RandomSource,
                        backend: str | None = None) -> TransitionKind:
    """One recommendation: giver, taker != giver, recommended item, purchase
    coin, and a uniform discard when the purchased item is new to the taker."""
    return advance(state, params, rng, 1, backend=backend)


def run(
    params: ModelParams,
    seed: int,
    sample_every: int | None = None,
    trajectory: bool = False,
    backend: str | None = None,
) -> SimulationOutcome:
    """Simulate ``ceil(nu * N^2)`` recommendations from the symmetric start.

    With ``trajectory=True`` (implied by ``sample_every``) the advertised
    share is recorded at step 0, every ``sample_every`` steps (default N^2)
    and at the end.
    """
    rng = RandomSource(seed)
    state = init_state(params, rng)
    total = params.n_recommendations
    n = params.n_agents
    if sample_every is None and not trajectory:
        advance(state, params, rng, total, backend=backend)
        return SimulationOutcome(state, None, rng.seed)

    every = sample_every or n * n
    if every < 1:
        raise ValueError("sample_every must be positive")
    traj = [(0, state.advertised_owners() / n)]
    while state.recommendations_done < total:
        step = min(every, total - state.recommendations_done)
        advance(state, params, rng, step, backend=backend)
        traj.append((state.recommendations_done, state.advertised_owners() / n))
    return SimulationOutcome(state, traj, rng.seed)


def market_share(state: MarketState, item: ItemRef) -> float:
    return state.owner_count(item) / state.n_agents


def shares(state: MarketState) -> np.ndarray:
    """Shares indexed by item code: regular items first, advertised last."""
    return state.owner_counts / state.n_agents
