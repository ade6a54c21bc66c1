"""
Seeded scenario generators: random suites for property checks and the
task-outsourcing worked example.

Generators build the same raw description the file parser produces and
run it through ScenarioValidator, so generated and hand-written scenarios
go through identical checks.
"""

from itertools import product
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .model import Allocation, Scenario
from .validator import validate_scenario
from ..utils.constants import (
    DEFAULT_SEED, OUTSOURCING_TYPES, RANDOM_DELTA_RANGE, RANDOM_VALUE_DECIMALS,
    RANDOM_VALUE_RANGE, ROLE_OWNER, ROLE_WORKER,
)


def _empty_raw(name: str, delta: float) -> Dict[str, Any]:
    return {
        'agents': [],
        'types': [],
        'valuations': [],
        'transitions': [],
        'params': {'name': name, 'delta': repr(float(delta))},
    }


class ScenarioGenerator:
    """Reproducible scenario factory driven by one numpy Generator."""

    def __init__(self, seed: Optional[int] = DEFAULT_SEED) -> None:
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def random_scenario(self, n: int, type_sizes: Sequence[int], private_values: bool = False,
                        name: str = 'random', delta: Optional[float] = None) -> Scenario:
        """
        Random SA + PIV scenario.

        Valuations are uniform on RANDOM_VALUE_RANGE rounded to
        RANDOM_VALUE_DECIMALS; transition rows are normalized uniform draws,
        one selected and one unselected row per own type. With
        private_values each v_i depends only on the allocation and theta_i.
        """

        if len(type_sizes) != n:
            raise ValueError(f"need {n} type sizes, got {len(type_sizes)}")

        if delta is None:
            delta = round(float(self.rng.uniform(*RANDOM_DELTA_RANGE)), 2)
        raw = _empty_raw(name, delta)
        names = [f"a{i}" for i in range(n)]
        labels = [[f"t{k}" for k in range(size)] for size in type_sizes]

        for i, agent in enumerate(names):
            raw['agents'].append({'name': agent, 'role': ROLE_OWNER if i == 0 else ROLE_WORKER})
            for label in labels[i]:
                raw['types'].append({'agent': agent, 'label': label, 'code': None})

        low, high = RANDOM_VALUE_RANGE
        for i, agent in enumerate(names):
            for allocation in (Allocation(mask) for mask in range(1 << n)):
                if i not in allocation:
                    continue
                members = allocation.members
                own_draws = self._values(type_sizes[i], low, high) if private_values else None
                for restricted in product(*(range(type_sizes[m]) for m in members)):
                    if private_values:
                        value = own_draws[restricted[members.index(i)]]
                    else:
                        value = self._values(1, low, high)[0]
                    raw['valuations'].append({
                        'agent': agent,
                        'members': [names[m] for m in members],
                        'types': [labels[m][t] for m, t in zip(members, restricted)],
                        'value': value,
                    })

        for i, agent in enumerate(names):
            for scope in ('selected', 'unselected'):
                for source in range(type_sizes[i]):
                    row = self.rng.uniform(0.0, 1.0, type_sizes[i])
                    row = row / row.sum()
                    for target, prob in enumerate(row):
                        raw['transitions'].append({'agent': agent, 'scope': scope,
                                                   'from': labels[i][source], 'to': labels[i][target],
                                                   'prob': float(prob)})

        return validate_scenario(raw)

    def random_suite(self, count: int, max_agents: int = 3, max_types: int = 3,
                     private_values: bool = False, prefix: str = 'random') -> List[Scenario]:
        """count scenarios with 1..max_agents agents and 1..max_types types each."""
        suite = []
        for k in range(count):
            n = int(self.rng.integers(1, max_agents + 1))
            sizes = [int(s) for s in self.rng.integers(1, max_types + 1, size=n)]
            suite.append(self.random_scenario(n, sizes, private_values, name=f"{prefix}_{k:03d}"))
        return suite

    def _values(self, count: int, low: float, high: float) -> List[float]:
        draws = np.round(self.rng.uniform(low, high, count), RANDOM_VALUE_DECIMALS)
        return [float(v) + 0.0 for v in draws]  # no negative zeros


def outsourcing_scenario(k1: float = 1.0, k2: float = 1.0, k3: float = 0.5, delta: float = 0.8,
                         teams: int = 2, fatigue: float = 0.5, recovery: float = 0.5,
                         name: str = 'outsourcing') -> Scenario:
    """
    Task owner (agent 0) outsourcing to production teams.

    The owner's type is the difficulty of the current task and a fresh task
    arrives each round uniformly at random. A team's type is its efficiency:
    after a selected round it drops one level with probability `fatigue`,
    after an idle round it climbs one level with probability `recovery`.

        v_0 = (k1 / theta_0) * sum of selected team efficiencies - k2   (owner selected)
        v_j = -k3 * theta_j ** 2                                        (team j selected)
    """

    labels = [label for label, _ in OUTSOURCING_TYPES]
    codes = [code for _, code in OUTSOURCING_TYPES]
    levels = len(labels)
    names = ['owner'] + [f"team{j}" for j in range(1, teams + 1)]
    n = len(names)

    raw = _empty_raw(name, delta)
    for i, agent in enumerate(names):
        raw['agents'].append({'name': agent, 'role': ROLE_OWNER if i == 0 else ROLE_WORKER})
        for label, code in OUTSOURCING_TYPES:
            raw['types'].append({'agent': agent, 'label': label, 'code': code})

    for i, agent in enumerate(names):
        for allocation in (Allocation(mask) for mask in range(1 << n)):
            if i not in allocation:
                continue
            members = allocation.members
            for restricted in product(range(levels), repeat=len(members)):
                theta = dict(zip(members, (codes[t] for t in restricted)))
                if i == 0:
                    value = (k1 / theta[0]) * sum(theta[j] for j in members if j != 0) - k2
                else:
                    value = -k3 * theta[i] ** 2
                raw['valuations'].append({
                    'agent': agent,
                    'members': [names[m] for m in members],
                    'types': [labels[t] for t in restricted],
                    'value': value,
                })

    # Owner: a fresh task every round, whatever is allocated.
    for scope in ('selected', 'unselected'):
        for source in labels:
            for target in labels:
                raw['transitions'].append({'agent': names[0], 'scope': scope, 'from': source,
                                           'to': target, 'prob': 1.0 / levels})

    # Teams: levels are ordered from most to least efficient.
    for agent in names[1:]:
        for level, source in enumerate(labels):
            worse, better = min(level + 1, levels - 1), max(level - 1, 0)
            for scope, step, prob in (('selected', worse, fatigue), ('unselected', better, recovery)):
                row = np.zeros(levels)
                row[step] += prob
                row[level] += 1.0 - prob
                for target, p in enumerate(row):
                    if p > 0.0:
                        raw['transitions'].append({'agent': agent, 'scope': scope, 'from': source,
                                                   'to': labels[target], 'prob': float(p)})

    return validate_scenario(raw)
