from .tables import MarginalWelfareTable, MechanismTables, PolicyTable, PolicyValue, WelfareTable
from .welfare_solver import WelfareSolver, solve_tables

__all__ = [
    'WelfareTable', 'MarginalWelfareTable', 'PolicyTable', 'PolicyValue', 'MechanismTables',
    'WelfareSolver', 'solve_tables',
]
