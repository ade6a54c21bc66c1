from .incentive_verifier import IncentiveVerifier, ViolationReport, Witness, efficiency_horizon
from .dpm_search import DPMCounterexampleSearch, DPMWitness, SearchConfig
from .budget import BudgetSummary, budget_metrics, payment_consistency

__all__ = [
    'IncentiveVerifier', 'ViolationReport', 'Witness', 'efficiency_horizon',
    'DPMCounterexampleSearch', 'DPMWitness', 'SearchConfig',
    'BudgetSummary', 'budget_metrics', 'payment_consistency',
]
