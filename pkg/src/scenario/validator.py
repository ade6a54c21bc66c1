"""
Turn a raw parsed scenario description into a validated Scenario.

Every table is checked for completeness over its declared index set;
transition rows must be stochastic and the discount must lie in (0, 1).
"""

import logging
import math
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import Allocation, Scenario, TypeSpace
from .parser import ScenarioParser
from ..utils.constants import (
    DEFAULT_FIXED_PRICE, DEFAULT_PENALTY, MAX_AGENTS, MAX_JOINT_PROFILES,
    ROLE_OWNER, ROLE_WORKER, ROW_SUM_REJECT_TOLERANCE, ROW_SUM_STORE_TOLERANCE,
)
from ..utils.error_handling import (
    BoundViolation, DiscountOutOfRange, MissingTableEntry, NonZeroOutsideAllocation,
    RowNotStochastic, ScenarioError, UnsupportedScenario, validate_input_path,
)

logger = logging.getLogger(__name__)


def _where(entry: Dict[str, Any]) -> str:
    line = entry.get('line')
    return f"line {line}: " if line is not None else ''


class ScenarioValidator:
    """Validate raw scenario descriptions produced by ScenarioParser or the generator."""

    def __init__(self) -> None:
        self.agent_lookup: Dict[str, int] = {}
        self.n = 0

    def validate(self, raw: Dict[str, Any]) -> Scenario:
        """
        Build a Scenario from a raw description.

        Raises:
            ScenarioError (or one of its coded subclasses) on the first problem found
        """

        from ..mechanism.penalty import PenaltySpec

        params = raw.get('params', {})
        agent_names, owner = self._validate_agents(raw.get('agents', []))
        types = self._validate_types(raw.get('types', []))
        delta = self._validate_delta(params)

        values = self._build_values(raw.get('valuations', []), types)
        kernels = [self._build_kernel(agent, raw.get('transitions', []), types)
                   for agent in range(self.n)]

        penalty = PenaltySpec.parse(params.get('penalty', DEFAULT_PENALTY))
        fixed_price = self._non_negative(params, 'fixed_price', DEFAULT_FIXED_PRICE)
        declared_bound = self._non_negative(params, 'bound', None)

        scenario = Scenario(
            name=params.get('name', 'scenario'),
            agent_names=agent_names,
            owner=owner,
            types=types,
            values=values,
            kernels=kernels,
            delta=delta,
            penalty=penalty,
            fixed_price=fixed_price,
            declared_bound=declared_bound,
        )

        if declared_bound is not None and scenario.bound > declared_bound:
            raise BoundViolation(
                f"bound = {declared_bound!r} but a valuation of magnitude {scenario.bound!r} is declared",
                context={'key': 'bound', 'bound': declared_bound, 'max_abs_value': scenario.bound},
            )

        logger.debug(f"Validated {scenario!r}")
        return scenario

    # agents and types

    def _validate_agents(self, agents: List[Dict[str, Any]]) -> Tuple[List[str], int]:
        if not agents:
            raise MissingTableEntry("[agents] declares no agents", context={'section': 'agents'})
        if len(agents) > MAX_AGENTS:
            raise UnsupportedScenario(f"{len(agents)} agents exceed the limit of {MAX_AGENTS}",
                                      context={'agents': len(agents)})

        names, owners = [], []
        self.agent_lookup = {}
        for index, entry in enumerate(agents):
            name = entry['name']
            if name in self.agent_lookup:
                raise ScenarioError(f"{_where(entry)}duplicate agent '{name}'",
                                    error_code='DUPLICATE_ENTRY', context={'agent': name})
            role = entry.get('role')
            if role not in (None, ROLE_OWNER, ROLE_WORKER):
                raise ScenarioError(f"{_where(entry)}unknown role '{role}' for agent '{name}'",
                                    error_code='INVALID_ROLE', context={'agent': name, 'role': role})
            if role == ROLE_OWNER:
                owners.append(index)
            self.agent_lookup[name] = index
            names.append(name)

        if len(owners) > 1:
            raise ScenarioError(f"at most one owner allowed, got {len(owners)}",
                                error_code='INVALID_ROLE', context={'owners': owners})

        self.n = len(names)
        return names, owners[0] if owners else 0

    def _resolve_agent(self, token: str, entry: Dict[str, Any]) -> int:
        if token in self.agent_lookup:
            return self.agent_lookup[token]
        if token.isdigit() and int(token) < self.n:
            return int(token)
        raise ScenarioError(f"{_where(entry)}unknown agent '{token}'",
                            error_code='UNKNOWN_AGENT', context={'agent': token})

    def _validate_types(self, entries: List[Dict[str, Any]]) -> TypeSpace:
        labels: List[List[str]] = [[] for _ in range(self.n)]
        codes: List[List[float]] = [[] for _ in range(self.n)]

        for entry in entries:
            agent = self._resolve_agent(str(entry['agent']), entry)
            label = entry['label']
            if label in labels[agent]:
                raise ScenarioError(f"{_where(entry)}duplicate type '{label}' for agent {agent}",
                                    error_code='DUPLICATE_ENTRY', context={'agent': agent, 'label': label})
            code = entry.get('code')
            labels[agent].append(label)
            codes[agent].append(float(len(codes[agent]) if code is None else code))

        for agent, agent_labels in enumerate(labels):
            if not agent_labels:
                raise MissingTableEntry(f"agent {agent} declares no types",
                                        context={'section': 'types', 'agent': agent})

        types = TypeSpace(tuple(tuple(l) for l in labels), tuple(tuple(c) for c in codes))
        if types.n_profiles > MAX_JOINT_PROFILES:
            raise UnsupportedScenario(
                f"{types.n_profiles} joint profiles exceed the limit of {MAX_JOINT_PROFILES}",
                context={'profiles': types.n_profiles})
        return types

    # params

    def _validate_delta(self, params: Dict[str, str]) -> float:
        if 'delta' not in params:
            raise DiscountOutOfRange("[params] is missing the required key 'delta'", context={'key': 'delta'})
        text = str(params['delta'])
        try:
            delta = float(text)
        except ValueError:
            raise DiscountOutOfRange(f"delta is not a number: '{text}'", context={'key': 'delta'})
        if not 0.0 < delta < 1.0:
            raise DiscountOutOfRange(f"delta must lie strictly between 0 and 1, got {text}",
                                     context={'key': 'delta', 'delta': delta})
        return delta

    def _non_negative(self, params: Dict[str, str], key: str, default: Optional[float]) -> Optional[float]:
        if key not in params:
            return default
        text = str(params[key])
        try:
            value = float(text)
        except ValueError:
            raise ScenarioError(f"{key} is not a number: '{text}'", error_code='INVALID_PARAM',
                                context={'key': key})
        if not math.isfinite(value) or value < 0:
            raise ScenarioError(f"{key} must be a finite non-negative number, got {text}",
                                error_code='INVALID_PARAM', context={'key': key})
        return value

    # valuations

    def _members(self, tokens: Sequence[str], entry: Dict[str, Any]) -> Allocation:
        return Allocation.from_members(self._resolve_agent(str(token), entry) for token in tokens)

    def _build_values(self, entries: List[Dict[str, Any]], types: TypeSpace) -> np.ndarray:
        table: Dict[Tuple[int, int, Tuple[int, ...]], float] = {}

        for entry in entries:
            agent = self._resolve_agent(str(entry['agent']), entry)
            allocation = self._members(entry['members'], entry)
            if agent not in allocation:
                raise NonZeroOutsideAllocation(
                    f"{_where(entry)}valuation for agent {agent} declared under allocation {allocation}",
                    context={'agent': agent, 'allocation': str(allocation)})

            members = allocation.members
            if len(entry['types']) != len(members):
                raise ScenarioError(
                    f"{_where(entry)}allocation {allocation} needs {len(members)} type labels, "
                    f"got {len(entry['types'])}", error_code='PARSE_ERROR')
            restricted = tuple(self._type_index(types, member, label, entry)
                               for member, label in zip(members, entry['types']))

            key = (agent, allocation.mask, restricted)
            if key in table:
                raise ScenarioError(f"{_where(entry)}duplicate valuation entry",
                                    error_code='DUPLICATE_ENTRY', context={'agent': agent})
            table[key] = float(entry['value'])

        values = np.zeros((self.n, 1 << self.n, types.n_profiles))
        profiles = np.array(list(product(*(range(s) for s in types.sizes))), dtype=np.int64)
        profiles = profiles.reshape(types.n_profiles, self.n)

        for agent in range(self.n):
            for allocation in (a for a in map(Allocation, range(1 << self.n)) if agent in a):
                members = allocation.members
                restricted_sizes = tuple(types.sizes[m] for m in members)
                block = np.empty(restricted_sizes)
                for restricted in product(*(range(s) for s in restricted_sizes)):
                    key = (agent, allocation.mask, restricted)
                    if key not in table:
                        raise MissingTableEntry(
                            f"missing valuation for agent {agent} under {allocation} at types "
                            f"({' '.join(types.profile_labels(restricted, members))})",
                            context={'agent': agent, 'allocation': str(allocation)})
                    block[restricted] = table[key]
                values[agent, allocation.mask] = block[tuple(profiles[:, m] for m in members)]

        return values

    def _type_index(self, types: TypeSpace, agent: int, label: str, entry: Dict[str, Any]) -> int:
        try:
            return types.label_index(agent, label)
        except ValueError:
            raise ScenarioError(f"{_where(entry)}agent {agent} has no type '{label}'",
                                error_code='UNKNOWN_TYPE', context={'agent': agent, 'label': label})

    # transitions

    def _build_kernel(self, agent: int, entries: List[Dict[str, Any]], types: TypeSpace) -> np.ndarray:
        """kernel[mask, from, to]; explicit {members} rows override the shorthand rows."""

        size = types.sizes[agent]
        rows: Dict[Tuple[Any, int], Dict[int, float]] = {}

        for entry in entries:
            if self._resolve_agent(str(entry['agent']), entry) != agent:
                continue
            scope = entry['scope']
            if not isinstance(scope, str):
                scope = self._members(scope, entry).mask
            source = self._type_index(types, agent, entry['from'], entry)
            target = self._type_index(types, agent, entry['to'], entry)
            row = rows.setdefault((scope, source), {})
            if target in row:
                raise ScenarioError(f"{_where(entry)}duplicate transition entry",
                                    error_code='DUPLICATE_ENTRY', context={'agent': agent})
            row[target] = float(entry['prob'])

        kernel = np.zeros((1 << self.n, size, size))
        for mask in range(1 << self.n):
            shorthand = 'selected' if mask >> agent & 1 else 'unselected'
            for source in range(size):
                row = rows.get((mask, source), rows.get((shorthand, source)))
                if not row:
                    raise MissingTableEntry(
                        f"missing transition row for agent {agent} from type "
                        f"'{types.labels[agent][source]}' under {Allocation(mask)} ({shorthand})",
                        context={'agent': agent, 'allocation': str(Allocation(mask))})
                for target, prob in row.items():
                    kernel[mask, source, target] = prob
                kernel[mask, source] = self._stochastic_row(kernel[mask, source], agent, mask, source)

        return kernel

    def _stochastic_row(self, row: np.ndarray, agent: int, mask: int, source: int) -> np.ndarray:
        context = {'agent': agent, 'allocation': str(Allocation(mask)), 'from': source}
        if np.any(row < 0.0) or np.any(row > 1.0):
            raise RowNotStochastic(f"transition row for agent {agent} has entries outside [0, 1]: "
                                   f"{row.tolist()}", context=context)
        total = float(row.sum())
        if abs(total - 1.0) > ROW_SUM_REJECT_TOLERANCE:
            raise RowNotStochastic(f"transition row for agent {agent} sums to {total!r}: {row.tolist()}",
                                   context=context)
        if abs(total - 1.0) > ROW_SUM_STORE_TOLERANCE:
            return row / total
        return row


def validate_scenario(raw: Dict[str, Any]) -> Scenario:
    return ScenarioValidator().validate(raw)


def load_scenario(path: str) -> Scenario:
    """Read, parse and validate a scenario file."""
    validate_input_path(str(path))
    return validate_scenario(ScenarioParser().parse_file(str(path)))
