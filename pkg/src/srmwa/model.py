"""Parameters, item references and the mutable market state."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

import numpy as np


class InvalidParams(ValueError):
    """Base class for parameter validation failures.

    ``field`` names the offending parameter so front ends can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class CapacityExceedsItems(InvalidParams):
    pass


class TooFewAgents(InvalidParams):
    pass


class PressureOutOfRange(InvalidParams):
    pass


class NonPositiveCount(InvalidParams):
    pass


class PolicyMismatch(ValueError):
    pass


class Advertised(enum.Enum):
    """The single promoted item. Never equal to any :class:`Regular`."""

    ITEM = "a"

    def __repr__(self) -> str:
        return "ADVERTISED"


ADVERTISED = Advertised.ITEM


@dataclass(frozen=True, order=True)
class Regular:
    """A non-advertised item, 1-based like the model's item set."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"regular item index must be >= 1, got {self.index}")


ItemRef = Union[Regular, Advertised]


class TransitionKind(enum.IntEnum):
    """Effect of one recommendation on the advertised item's owner count."""

    DOWN = -1
    STAY = 0
    UP = 1


@dataclass(frozen=True)
class GammaPolicy:
    """How the already-owned probability is chosen for the analytic chain.

    ``kind`` is one of ``"exact-m1"``, ``"approx"`` or ``"fixed"``.
    """

    kind: str
    value: float | None = None

    def __post_init__(self):
        if self.kind not in ("exact-m1", "approx", "fixed"):
            raise ValueError(f"unknown gamma policy {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None or not 0.0 <= self.value <= 1.0:
                raise ValueError(f"fixed gamma must lie in [0, 1], got {self.value!r}")
        elif self.value is not None:
            raise ValueError(f"gamma policy {self.kind!r} takes no value")

    @classmethod
    def fixed(cls, value: float) -> GammaPolicy:
        return cls("fixed", float(value))

    @classmethod
    def parse(cls, text: str) -> GammaPolicy:
        """Parse ``exact-m1``, ``approx`` or ``fixed:<v>``."""
        text = text.strip()
        if text.startswith("fixed:"):
            try:
                value = float(text[len("fixed:"):])
            except ValueError:
                raise ValueError(f"bad fixed gamma value in {text!r}") from None
            return cls.fixed(value)
        return cls(text)

    def __str__(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.value!r}"
        return self.kind


EXACT_M1 = GammaPolicy("exact-m1")
APPROXIMATION = GammaPolicy("approx")


@dataclass(frozen=True)
class ModelParams:
    n_agents: int
    n_items: int
    capacity: int
    pressure: float
    interactions_per_pair: float = 1000.0
    gamma_policy: GammaPolicy = APPROXIMATION

    def __post_init__(self):
        validate(self)

    @property
    def rho(self) -> float:
        return rho(self)

    @property
    def n_recommendations(self) -> int:
        """Total recommendations for one run, ceil(nu * N^2)."""
        nu = Fraction(repr(float(self.interactions_per_pair)))
        return math.ceil(nu * self.n_agents * self.n_agents)

    def replace(self, **changes) -> ModelParams:
        return replace(self, **changes)


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate(params: ModelParams) -> None:
    """Raise an :class:`InvalidParams` subclass naming the first violated constraint."""
    for name in ("n_agents", "n_items", "capacity"):
        value = getattr(params, name)
        if not _is_int(value):
            raise NonPositiveCount(name, f"must be an integer, got {value!r}")
        if value < 1:
            raise NonPositiveCount(name, f"must be positive, got {value}")
    if params.n_agents < 2:
        raise TooFewAgents("n_agents", f"need at least 2 agents, got {params.n_agents}")
    if params.capacity > params.n_items:
        raise CapacityExceedsItems(
            "capacity", f"capacity {params.capacity} exceeds n_items {params.n_items}"
        )
    p = params.pressure
    if not isinstance(p, (int, float, np.floating)) or not 0.0 <= p <= 1.0:
        raise PressureOutOfRange("pressure", f"must lie in [0, 1], got {p!r}")
    nu = params.interactions_per_pair
    if not isinstance(nu, (int, float, np.floating)) or not math.isfinite(nu) or nu <= 0:
        raise NonPositiveCount("interactions_per_pair", f"must be positive, got {nu!r}")
    if not isinstance(params.gamma_policy, GammaPolicy):
        raise InvalidParams("gamma_policy", f"expected GammaPolicy, got {params.gamma_policy!r}")


def rho(params: ModelParams) -> float:
    """Attention capacity ratio M / I."""
    return params.capacity / params.n_items


@dataclass
class MarketState:
    """Per-agent attention stocks plus the owner-count index.

    Items are stored as integer codes: regular item ``j`` (1-based) is code
    ``j - 1`` and the advertised item is code ``n_items``. ``owns`` is a dense
    membership matrix so the kernels can test ``beta in m(t)`` in O(1).
    """

    n_items: int
    stocks: np.ndarray  # (N, M) int32 item codes
    owns: np.ndarray  # (N, I + 1) uint8
    owner_counts: np.ndarray  # (I + 1,) int64
    recommendations_done: int = 0

    @classmethod
    def from_stocks(cls, n_items: int, stocks) -> MarketState:
        stocks = np.ascontiguousarray(stocks, dtype=np.int32)
        n_agents = stocks.shape[0]
        owns = np.zeros((n_agents, n_items + 1), dtype=np.uint8)
        rows = np.repeat(np.arange(n_agents), stocks.shape[1])
        owns[rows, stocks.ravel()] = 1
        state = cls(n_items, stocks, owns, owns.sum(axis=0, dtype=np.int64))
        state.check()
        return state

    @property
    def n_agents(self) -> int:
        return self.stocks.shape[0]

    @property
    def capacity(self) -> int:
        return self.stocks.shape[1]

    @property
    def advertised_code(self) -> int:
        return self.n_items

    def code(self, item: ItemRef) -> int:
        if item is ADVERTISED:
            return self.n_items
        if isinstance(item, Regular) and item.index <= self.n_items:
            return item.index - 1
        raise KeyError(item)

    def item(self, code: int) -> ItemRef:
        return ADVERTISED if code == self.n_items else Regular(int(code) + 1)

    def stock(self, agent: int) -> frozenset:
        """The set of items agent ``agent`` (0-based) currently owns."""
        return frozenset(self.item(c) for c in self.stocks[agent])

    def owner_count(self, item: ItemRef) -> int:
        return int(self.owner_counts[self.code(item)])

    def advertised_owners(self) -> int:
        return int(self.owner_counts[self.n_items])

    def recount(self) -> np.ndarray:
        """Owner counts recomputed from the stocks alone."""
        return np.bincount(self.stocks.ravel(), minlength=self.n_items + 1).astype(np.int64)

    def check(self) -> None:
        """Assert every structural invariant; raises AssertionError on violation."""
        n, m = self.stocks.shape
        codes = self.stocks
        assert codes.min() >= 0 and codes.max() <= self.n_items, "item code out of range"
        srt = np.sort(codes, axis=1)
        assert not np.any(srt[:, 1:] == srt[:, :-1]), "duplicate item in a stock"
        assert np.array_equal(self.owns.sum(axis=1), np.full(n, m)), "owns rows != capacity"
        rows = np.repeat(np.arange(n), m)
        assert np.all(self.owns[rows, codes.ravel()] == 1), "owns disagrees with stocks"
        assert np.array_equal(self.owner_counts, self.recount()), "owner_counts out of sync"
        assert int(self.owner_counts.sum()) == n * m

    def copy(self) -> MarketState:
        return MarketState(
            self.n_items,
            self.stocks.copy(),
            self.owns.copy(),
            self.owner_counts.copy(),
            self.recommendations_done,
        )

    def __eq__(self, other):
        if not isinstance(other, MarketState):
            return NotImplemented
        return (
            self.n_items == other.n_items
            and self.recommendations_done == other.recommendations_done
            and np.array_equal(self.stocks, other.stocks)
            and np.array_equal(self.owns, other.owns)
            and np.array_equal(self.owner_counts, other.owner_counts)
        )
