from .model import Allocation, Scenario, TypeSpace, enumerate_allocations, profile_index
from .parser import ScenarioParser
from .validator import ScenarioValidator, load_scenario, validate_scenario
from .writer import ScenarioWriter, write_scenario
from .generator import ScenarioGenerator, outsourcing_scenario

__all__ = [
    'Allocation', 'Scenario', 'TypeSpace', 'enumerate_allocations', 'profile_index',
    'ScenarioParser', 'ScenarioValidator', 'load_scenario', 'validate_scenario',
    'ScenarioWriter', 'write_scenario', 'ScenarioGenerator', 'outsourcing_scenario',
]
