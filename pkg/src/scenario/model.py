"""
Problem instances: agents, finite type spaces, peer-influenced valuation
tables, factored Markov type transitions and the discount factor.

All math works on integer indices. Joint profiles are indexed row-major
over agents (agent 0 most significant); allocations are bitmasks over
agents and their canonical order is ascending mask value.
"""

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import TYPE_CHECKING, Iterable, List, Optional, Sequence, Tuple

import numpy as np

if TYPE_CHECKING:
    from ..mechanism.penalty import PenaltySpec


@dataclass(frozen=True, order=True)
class Allocation:
    """A subset of agents, stored as a bitmask."""

    mask: int

    @classmethod
    def from_members(cls, members: Iterable[int]) -> 'Allocation':
        mask = 0
        for agent in members:
            mask |= 1 << agent
        return cls(mask)

    @property
    def members(self) -> Tuple[int, ...]:
        agents = []
        mask, agent = self.mask, 0
        while mask:
            if mask & 1:
                agents.append(agent)
            mask >>= 1
            agent += 1
        return tuple(agents)

    def __contains__(self, agent: int) -> bool:
        return bool(self.mask >> agent & 1)

    @property
    def size(self) -> int:
        return bin(self.mask).count('1')

    def __str__(self) -> str:
        return '{' + ','.join(str(agent) for agent in self.members) + '}'


def enumerate_allocations(n: int, excluded_agent: Optional[int] = None) -> List[Allocation]:
    """All subsets of n agents in canonical order, optionally omitting one agent."""
    if excluded_agent is None:
        return [Allocation(mask) for mask in range(1 << n)]
    return [Allocation(mask) for mask in range(1 << n) if not mask >> excluded_agent & 1]


def profile_index(profile: Sequence[int], sizes: Sequence[int]) -> int:
    """Row-major index of a profile; the empty profile maps to 0."""
    index = 0
    for value, size in zip(profile, sizes):
        index = index * size + int(value)
    return index


def factored_expectation(values: np.ndarray, sizes: Sequence[int],
                         kernels: Sequence[np.ndarray]) -> np.ndarray:
    """
    E[values(next)] for every current profile when each axis moves
    independently with its own row-stochastic matrix.
    """
    tensor = np.asarray(values, dtype=float).reshape(tuple(sizes))
    for axis, kernel in enumerate(kernels):
        tensor = np.moveaxis(np.tensordot(kernel, tensor, axes=([1], [axis])), 0, axis)
    return tensor.reshape(-1)


def product_distribution(rows: Sequence[np.ndarray]) -> np.ndarray:
    """Row-major joint distribution of independent per-axis rows."""
    return reduce(np.multiply.outer, rows, np.ones(())).reshape(-1)


@dataclass(frozen=True)
class TypeSpace:
    """Per-agent type labels with numeric codes (codes are for file I/O only)."""

    labels: Tuple[Tuple[str, ...], ...]
    codes: Tuple[Tuple[float, ...], ...]

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(agent_labels) for agent_labels in self.labels)

    @property
    def n_profiles(self) -> int:
        count = 1
        for size in self.sizes:
            count *= size
        return count

    def label_index(self, agent: int, label: str) -> int:
        return self.labels[agent].index(label)

    def profile_labels(self, profile: Sequence[int],
                       agents: Optional[Sequence[int]] = None) -> Tuple[str, ...]:
        agents = range(len(profile)) if agents is None else agents
        return tuple(self.labels[agent][t] for agent, t in zip(agents, profile))


class Scenario:
    """
    A validated problem instance. Immutable after construction: every
    array is flagged read-only.

    values[i, mask, s] is v_i(a, theta_a) at joint profile s; it is zero
    whenever agent i is not in the allocation. kernels[i][mask] is agent i's
    own-type transition matrix under that allocation.
    """

    def __init__(self, name: str, agent_names: Sequence[str], owner: int,
                 types: TypeSpace, values: np.ndarray, kernels: Sequence[np.ndarray],
                 delta: float, penalty: 'PenaltySpec', fixed_price: float,
                 declared_bound: Optional[float] = None) -> None:
        self.name = name
        self.agent_names = tuple(agent_names)
        self.owner = owner
        self.types = types
        self.delta = float(delta)
        self.penalty = penalty
        self.fixed_price = float(fixed_price)
        self.declared_bound = declared_bound

        self.values = _frozen(values)
        self.kernels = tuple(_frozen(kernel) for kernel in kernels)
        self.bound = float(np.max(np.abs(self.values))) if self.values.size else 0.0

        self.profiles = _frozen(np.array(list(product(*(range(s) for s in self.sizes))),
                                         dtype=np.int64).reshape(self.n_states, self.n))
        self.stage_welfare = _frozen(self.values.sum(axis=0))
        self._reduced_index = tuple(_frozen(self._build_reduced_index(i)) for i in range(self.n))

    @property
    def n(self) -> int:
        return len(self.agent_names)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return self.types.sizes

    @property
    def n_states(self) -> int:
        return self.types.n_profiles

    @property
    def n_allocations(self) -> int:
        return 1 << self.n

    @property
    def workers(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if i != self.owner)

    def state_index(self, profile: Sequence[int]) -> int:
        return profile_index(profile, self.sizes)

    def profile(self, index: int) -> Tuple[int, ...]:
        return tuple(int(t) for t in self.profiles[index])

    def enumerate_states(self) -> List[Tuple[int, ...]]:
        """Joint type profiles in row-major order of agent indices."""
        return [self.profile(s) for s in range(self.n_states)]

    def enumerate_allocations(self, excluded_agent: Optional[int] = None) -> List[Allocation]:
        return enumerate_allocations(self.n, excluded_agent)

    def stage_values(self, allocation: Allocation, profile: Sequence[int]) -> np.ndarray:
        """Per-agent valuations v_i(a, theta_a); exactly 0 for agents outside a."""
        return self.values[:, allocation.mask, self.state_index(profile)].copy()

    def value(self, agent: int, allocation: Allocation, profile: Sequence[int]) -> float:
        return float(self.values[agent, allocation.mask, self.state_index(profile)])

    def joint_transition(self, profile: Sequence[int], allocation: Allocation) -> np.ndarray:
        """P(next | a, profile) over all joint profiles, as a product of agent rows."""
        rows = [self.kernels[i][allocation.mask, profile[i]] for i in range(self.n)]
        return product_distribution(rows)

    def expectation(self, values: np.ndarray, allocation: Allocation) -> np.ndarray:
        """E[values(next) | a, profile] for every current profile."""
        kernels = [kernel[allocation.mask] for kernel in self.kernels]
        return factored_expectation(values, self.sizes, kernels)

    def reduced_sizes(self, agent: int) -> Tuple[int, ...]:
        return tuple(s for j, s in enumerate(self.sizes) if j != agent)

    def reduced_state_index(self, agent: int) -> np.ndarray:
        """Maps each joint profile index to the index of its theta_{-i} profile."""
        return self._reduced_index[agent]

    def reduced_profile(self, agent: int, profile: Sequence[int]) -> Tuple[int, ...]:
        return tuple(t for j, t in enumerate(profile) if j != agent)

    def replace_type(self, profile: Sequence[int], agent: int, new_type: int) -> Tuple[int, ...]:
        return tuple(new_type if j == agent else t for j, t in enumerate(profile))

    def profile_labels(self, profile: Sequence[int]) -> Tuple[str, ...]:
        return self.types.profile_labels(profile)

    def format_profile(self, profile: Sequence[int]) -> str:
        return '(' + ' '.join(self.profile_labels(profile)) + ')'

    def with_penalty(self, penalty: 'PenaltySpec') -> 'Scenario':
        """Same instance with a different consistency penalty."""
        return Scenario(self.name, self.agent_names, self.owner, self.types, self.values,
                        self.kernels, self.delta, penalty, self.fixed_price, self.declared_bound)

    def _build_reduced_index(self, agent: int) -> np.ndarray:
        sizes = self.reduced_sizes(agent)
        index = np.zeros(self.n_states, dtype=np.int64)
        for column, j in enumerate(k for k in range(self.n) if k != agent):
            index = index * sizes[column] + self.profiles[:, j]
        return index

    def __repr__(self) -> str:
        return (f"Scenario(name={self.name!r}, n={self.n}, sizes={self.sizes}, "
                f"delta={self.delta}, M={self.bound})")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=array.dtype if isinstance(array, np.ndarray) else float)
    array.setflags(write=False)
    return array
