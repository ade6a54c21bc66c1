"""
Serialize a Scenario back to the scenario file grammar.
"""

from itertools import product
from pathlib import Path
from typing import List, Union

import numpy as np

from .model import Allocation, Scenario
from ..utils.constants import FLOAT_FORMAT, ROLE_OWNER, ROLE_WORKER


def _num(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


class ScenarioWriter:
    """Emit scenario text that parses back to identical tables."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario

    def to_text(self) -> str:
        lines: List[str] = [f"# scenario {self.scenario.name}"]
        lines += self._agents()
        lines += self._types()
        lines += self._valuations()
        lines += self._transitions()
        lines += self._params()
        return '\n'.join(lines) + '\n'

    def _members(self, allocation: Allocation) -> str:
        return '{' + ' '.join(self.scenario.agent_names[m] for m in allocation.members) + '}'

    def _agents(self) -> List[str]:
        lines = ['', '[agents]']
        for index, name in enumerate(self.scenario.agent_names):
            role = ROLE_OWNER if index == self.scenario.owner else ROLE_WORKER
            lines.append(f"{name}, {role}")
        return lines

    def _types(self) -> List[str]:
        lines = ['', '[types]']
        types = self.scenario.types
        for agent, name in enumerate(self.scenario.agent_names):
            for label, code in zip(types.labels[agent], types.codes[agent]):
                lines.append(f"{name}, {label}, {_num(code)}")
        return lines

    def _valuations(self) -> List[str]:
        scenario = self.scenario
        lines = ['', '[valuations]']
        for agent, name in enumerate(scenario.agent_names):
            for allocation in scenario.enumerate_allocations():
                if agent not in allocation:
                    continue
                members = allocation.members
                for restricted in product(*(range(scenario.sizes[m]) for m in members)):
                    profile = [0] * scenario.n
                    for member, t in zip(members, restricted):
                        profile[member] = t
                    labels = ' '.join(scenario.types.profile_labels(restricted, members))
                    value = scenario.value(agent, allocation, profile)
                    lines.append(f"{name}, {self._members(allocation)}, ({labels}), {_num(value)}")
        return lines

    def _transitions(self) -> List[str]:
        scenario = self.scenario
        lines = ['', '[transitions]']
        for agent, name in enumerate(scenario.agent_names):
            kernel = scenario.kernels[agent]
            selected, unselected = kernel[1 << agent], kernel[0]
            lines += self._rows(name, 'selected', agent, selected)
            lines += self._rows(name, 'unselected', agent, unselected)
            for allocation in scenario.enumerate_allocations():
                shorthand = selected if agent in allocation else unselected
                for source in range(scenario.sizes[agent]):
                    if not np.array_equal(kernel[allocation.mask, source], shorthand[source]):
                        lines += self._rows(name, self._members(allocation), agent,
                                            kernel[allocation.mask], only=source)
        return lines

    def _rows(self, name: str, scope: str, agent: int, matrix: np.ndarray, only: int = None) -> List[str]:
        labels = self.scenario.types.labels[agent]
        sources = range(len(labels)) if only is None else [only]
        return [f"{name}, {scope}, {labels[source]}, {labels[target]}, {_num(matrix[source, target])}"
                for source in sources for target in range(len(labels))
                if matrix[source, target] != 0.0]

    def _params(self) -> List[str]:
        scenario = self.scenario
        lines = ['', '[params]',
                 f"name = {scenario.name}",
                 f"delta = {_num(scenario.delta)}",
                 f"penalty = {scenario.penalty}",
                 f"fixed_price = {_num(scenario.fixed_price)}"]
        if scenario.declared_bound is not None:
            lines.append(f"bound = {_num(scenario.declared_bound)}")
        return lines


def write_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    """Write a scenario file; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(ScenarioWriter(scenario).to_text(), encoding='utf-8')
    return path
