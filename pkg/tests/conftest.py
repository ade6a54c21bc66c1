"""
Shared pytest fixtures for all test modules.
"""

from pathlib import Path

import numpy as np
import pytest

from src.scenario import Scenario, ScenarioGenerator, ScenarioParser, validate_scenario
from src.solver import solve_tables

FIXTURES = Path(__file__).parent / 'fixtures'

S1_TEXT = (FIXTURES / 's1.scenario').read_text(encoding='utf-8')

SINGLE_AGENT_TEXT = """
[agents]
solo

[types]
solo, only

[valuations]
solo, {solo}, (only), 1

[transitions]
solo, selected, only, only, 1
solo, unselected, only, only, 1

[params]
name = single
delta = 0.9
"""


def scenario_from_text(text: str):
    return validate_scenario(ScenarioParser().parse_text(text))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def s1_text():
    return S1_TEXT


@pytest.fixture
def s1_scenario():
    """Two agents, singleton types, delta 0.5: W = 3, W_-0 = 0, W_-1 = 2."""
    return scenario_from_text(S1_TEXT)


@pytest.fixture
def s1_tables(s1_scenario):
    return solve_tables(s1_scenario)


@pytest.fixture
def single_agent_scenario():
    """One agent valuing selection at 1 with delta 0.9: W = 10."""
    return scenario_from_text(SINGLE_AGENT_TEXT)


@pytest.fixture
def two_type_scenario():
    return scenario_from_text((FIXTURES / 'two_type.scenario').read_text(encoding='utf-8'))


@pytest.fixture
def two_type_tables(two_type_scenario):
    return solve_tables(two_type_scenario)


@pytest.fixture
def large_values_scenario():
    """two_type scaled to valuations around 1e5 with delta 0.73."""
    return scenario_from_text((FIXTURES / 'large_values.scenario').read_text(encoding='utf-8'))


@pytest.fixture
def large_values_tables(large_values_scenario):
    return solve_tables(large_values_scenario)


@pytest.fixture
def zero_scenario():
    """Two agents with two types each and every valuation zero."""
    base = ScenarioGenerator(seed=3).random_scenario(2, [2, 2], name='zero')
    return Scenario(base.name, base.agent_names, base.owner, base.types, np.zeros_like(base.values),
                    base.kernels, base.delta, base.penalty, base.fixed_price)


@pytest.fixture(scope='session')
def random_suite():
    """100 random interdependent scenarios with at most 3 agents and 3 types each."""
    return ScenarioGenerator(seed=2024).random_suite(100, max_agents=3, max_types=3)


@pytest.fixture(scope='session')
def random_suite_tables(random_suite):
    return [(scenario, solve_tables(scenario)) for scenario in random_suite]


@pytest.fixture(scope='session')
def private_suite():
    return ScenarioGenerator(seed=11).random_suite(20, max_agents=3, max_types=3, private_values=True,
                                                   prefix='private')


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / 'results'
    path.mkdir()
    return path
