"""Birth-death chain for the number of agents owning the advertised item.

State ``i`` is the advertised item's owner count. One recommendation moves
the chain up by one with probability ``up[i]``, down by one with ``down[i]``
and leaves it in place otherwise. Passing ``exact=True`` to the rate builders
evaluates everything in :class:`fractions.Fraction`; the float paths are
checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .model import ModelParams, PolicyMismatch


class DegenerateRates(ValueError):
    pass


class ReducibleChain(ValueError):
    pass


@dataclass(frozen=True)
class TransitionRates:
    up: np.ndarray
    down: np.ndarray
    stay: np.ndarray
    gamma_used: float

    @property
    def n_agents(self) -> int:
        return len(self.up) - 1

    @property
    def exact(self) -> bool:
        return self.up.dtype == object


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray

    def mean(self):
        return sum(i * x for i, x in enumerate(self.pi)) if self.pi.dtype == object \
            else float(np.arange(len(self.pi)) @ self.pi)


def gamma_value(params: ModelParams) -> float:
    policy = params.gamma_policy
    if policy.kind == "exact-m1":
        if params.capacity != 1:
            raise PolicyMismatch(f"exact-m1 gamma needs capacity 1, got {params.capacity}")
        return 0.0
    if policy.kind == "approx":
        return max(0.5, params.capacity / params.n_items)
    return policy.value


def _num(x, exact):
    return Fraction(x) if exact else float(x)


def transition_up(i: int, params: ModelParams, exact: bool = False):
    n, m = params.n_agents, params.capacity
    if not 0 <= i <= n:
        raise ValueError(f"state {i} outside 0..{n}")
    p = _num(params.pressure, exact)
    i_m = Fraction(i, m) if exact else i / m
    return (n - i) * ((n - 1 - i_m) * p + i_m) / (n * (n - 1))


def transition_down(i: int, params: ModelParams, gamma, exact: bool = False):
    n, m = params.n_agents, params.capacity
    if not 0 <= i <= n:
        raise ValueError(f"state {i} outside 0..{n}")
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    p = _num(params.pressure, exact)
    gamma = _num(gamma, exact)
    overlap = Fraction((i - 1) * (m - 1), m) if exact else (i - 1) * (m - 1) / m
    return i * (1 - p) * (1 - gamma) * (n - i + overlap) / (n * (n - 1) * m)


def build_rates(params: ModelParams, exact: bool = False) -> TransitionRates:
    gamma = gamma_value(params)
    n = params.n_agents
    if exact:
        up = np.array([transition_up(i, params, True) for i in range(n + 1)], dtype=object)
        down = np.array([transition_down(i, params, gamma, True) for i in range(n + 1)],
                        dtype=object)
    else:
        m, p = params.capacity, float(params.pressure)
        i = np.arange(n + 1, dtype=float)
        up = (n - i) * ((n - 1 - i / m) * p + i / m) / (n * (n - 1))
        down = i * (1 - p) * (1 - gamma) * (n - i + (i - 1) * (m - 1) / m) / (n * (n - 1) * m)
        # exact zeros at the boundaries; the float expression can leave -0.0 or dust
        down[0] = 0.0
        up[n] = 0.0
        down = np.maximum(down, 0.0)
    stay = 1 - up - down
    if any(s < 0 for s in stay):
        if exact or stay.min() < -1e-12:
            raise DegenerateRates(f"negative stay probability {min(stay)}")
        stay = np.maximum(stay, 0.0)
    return TransitionRates(up, down, stay, gamma)


def build_transition_matrix(rates: TransitionRates) -> np.ndarray:
    """Dense tridiagonal row-stochastic matrix, row i -> (down, stay, up)."""
    n = rates.n_agents
    dtype = object if rates.exact else float
    mat = np.zeros((n + 1, n + 1), dtype=dtype)
    if rates.exact:
        mat[:] = Fraction(0)
    idx = np.arange(n + 1)
    mat[idx, idx] = rates.stay
    mat[idx[:-1], idx[1:]] = rates.up[:-1]
    mat[idx[1:], idx[:-1]] = rates.down[1:]
    return mat


def _closed_segment(up, down):
    """Bounds [lo, hi] of the recurrent class reached from S_0."""
    n = len(up) - 1
    for j in range(1, n):
        if up[j] == 0:
            raise ReducibleChain(f"up[{j}] = 0 disconnects the states above {j}")
    hi = 0 if up[0] == 0 else n
    lo = 0
    for k in range(hi, 0, -1):
        if down[k] == 0:
            lo = k
            break
    return lo, hi


def stationary(rates: TransitionRates) -> StationaryDistribution:
    """Long-run distribution of the chain started at S_0.

    Inside the recurrent segment detailed balance gives
    ``pi[k] / pi[k-1] = up[k-1] / down[k]``; the products are accumulated in
    log space. A zero ``down[k]`` below a fully reachable range means drift:
    mass piles up above ``k`` (``k = N`` gives pi = delta_N). ``up[0] = 0``
    means S_0 never empties (pi = delta_0). Any other interior zero ``up``
    is rejected as :class:`ReducibleChain`.
    """
    up, down = rates.up, rates.down
    n = len(up) - 1
    if any(u < 0 for u in up) or any(d < 0 for d in down):
        raise DegenerateRates("negative transition probability")
    if down[0] != 0 or up[n] != 0:
        raise DegenerateRates("boundary conditions down[0] = 0, up[N] = 0 violated")
    lo, hi = _closed_segment(up, down)

    if rates.exact:
        pi = np.array([Fraction(0)] * (n + 1), dtype=object)
        weights = [Fraction(1)]
        for k in range(lo + 1, hi + 1):
            weights.append(weights[-1] * up[k - 1] / down[k])
        total = sum(weights)
        pi[lo:hi + 1] = [w / total for w in weights]
        return StationaryDistribution(pi)

    pi = np.zeros(n + 1)
    if lo == hi:
        pi[lo] = 1.0
        return StationaryDistribution(pi)
    k = np.arange(lo + 1, hi + 1)
    log_w = np.concatenate(([0.0], np.cumsum(np.log(up[k - 1]) - np.log(down[k]))))
    pi[lo:hi + 1] = np.exp(log_w - logsumexp(log_w))
    pi /= pi.sum()
    return StationaryDistribution(pi)


def expected_advertised_share(params: ModelParams, exact: bool = False):
    """Mean of the stationary owner count divided by N."""
    dist = stationary(build_rates(params, exact=exact))
    return dist.mean() / params.n_agents


def m1_up_down_ratio(i: int, params: ModelParams, exact: bool = False):
    """Closed form of up[i] / down[i] at capacity 1 with gamma = 0."""
    if params.capacity != 1:
        raise PolicyMismatch(f"closed form needs capacity 1, got {params.capacity}")
    n = params.n_agents
    if not 1 <= i <= n - 1:
        raise ValueError(f"state {i} outside 1..{n - 1}")
    p = _num(params.pressure, exact)
    if p <= 0 or p >= 1:
        raise ValueError("closed form is defined only for 0 < pressure < 1")
    if exact:
        return 1 + Fraction(n - 1, i) * p / (1 - p)
    return 1 + (n - 1) / i * p / (1 - p)
