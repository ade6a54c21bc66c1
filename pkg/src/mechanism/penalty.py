"""
Consistency penalties g(x, l): non-negative, zero exactly when x == l.
"""

import re
from dataclasses import dataclass

from ..utils.constants import DEFAULT_PENALTY, PENALTY_KINDS
from ..utils.error_handling import ScenarioError

_SCALED_PATTERN = re.compile(r'^scaled:\s*([^\s]+)$')


@dataclass(frozen=True)
class PenaltySpec:
    """Built-in penalty: quadratic, absolute, or scaled quadratic c*(x-l)^2."""

    kind: str = DEFAULT_PENALTY
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in PENALTY_KINDS:
            raise ScenarioError(f"Unknown penalty '{self.kind}'", error_code='INVALID_PENALTY',
                                context={'penalty': self.kind})
        if not self.scale > 0 or self.scale == float('inf'):
            raise ScenarioError(f"Penalty scale must be a positive finite number, got {self.scale}",
                                error_code='INVALID_PENALTY', context={'scale': self.scale})

    def __call__(self, reported: float, consistent: float) -> float:
        gap = reported - consistent
        if self.kind == 'absolute':
            return abs(gap)
        if self.kind == 'scaled':
            return self.scale * gap * gap
        return gap * gap

    @classmethod
    def parse(cls, text: str) -> 'PenaltySpec':
        """Parse 'quadratic', 'absolute' or 'scaled:C'."""
        text = text.strip()
        match = _SCALED_PATTERN.match(text)
        if match:
            try:
                scale = float(match.group(1))
            except ValueError:
                raise ScenarioError(f"Invalid penalty scale in '{text}'", error_code='INVALID_PENALTY',
                                    context={'penalty': text})
            return cls('scaled', scale)
        if text in ('quadratic', 'absolute'):
            return cls(text)
        raise ScenarioError(f"Unknown penalty '{text}' (expected quadratic, absolute or scaled:C)",
                            error_code='INVALID_PENALTY', context={'penalty': text})

    def __str__(self) -> str:
        if self.kind == 'scaled':
            return f"scaled:{self.scale!r}"
        return self.kind
