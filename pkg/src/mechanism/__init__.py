from .penalty import PenaltySpec
from .strategies import AgentStrategy, DeviationStrategy, StrategyProfile, TRUTHFUL
from .mechanisms import (
    ConstantPaymentMechanism, DynamicPivotMechanism, MatrixMechanism, Mechanism, RoundOutcome,
    const_payment, make_mechanism,
)

__all__ = [
    'PenaltySpec', 'AgentStrategy', 'DeviationStrategy', 'StrategyProfile', 'TRUTHFUL',
    'Mechanism', 'MatrixMechanism', 'DynamicPivotMechanism', 'ConstantPaymentMechanism',
    'RoundOutcome', 'const_payment', 'make_mechanism',
]
