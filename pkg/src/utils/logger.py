"""
Logging setup for matrix-mech. Library modules log through
logging.getLogger(__name__); the CLI attaches handlers to the package logger.
"""

import logging
import sys
from pathlib import Path
from typing import Dict, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def setup_logger(name: str = "matrix_mech", level: str = "INFO",
                 log_file: Optional[str] = None) -> logging.Logger:
    """
    Replace the handlers of `name` with a stdout handler at `level` and,
    when `log_file` is given, a file handler that records everything from
    DEBUG up regardless of the console level.
    """

    console_level = getattr(logging, level.upper())
    logger = logging.getLogger(name)
    logger.handlers = []
    logger.setLevel(logging.DEBUG if log_file else console_level)
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(console_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


class RunLogger:
    """Logger wrapper that keeps statistics for one CLI run."""

    def __init__(self, logger: logging.Logger) -> None:
        self.logger = logger
        self.run_stats: Dict[str, int] = {
            'solves': 0,
            'checks_passed': 0,
            'checks_failed': 0,
            'episodes': 0,
        }

    def log_scenario(self, name: str, n_agents: int, n_states: int, delta: float) -> None:
        self.logger.info(f"Scenario {name}: {n_agents} agents, {n_states} joint profiles, delta={delta}")

    def log_solve(self, table: str, iterations: int, residual: float, seconds: float) -> None:
        """Log one MDP solve."""
        self.run_stats['solves'] += 1
        self.logger.info(f"Solved {table}: {iterations} sweeps, residual {residual:.3e}, {seconds:.3f}s")

    def log_check(self, scenario: str, prop: str, passed: bool, worst_value: float) -> None:
        """Log one property verdict."""
        if passed:
            self.run_stats['checks_passed'] += 1
            self.logger.info(f"{scenario}: {prop} PASS (worst {worst_value:.3e})")
        else:
            self.run_stats['checks_failed'] += 1
            self.logger.warning(f"{scenario}: {prop} FAIL (worst {worst_value:.3e})")

    def log_simulation(self, mechanism: str, episodes: int, horizon: int) -> None:
        self.run_stats['episodes'] += episodes
        self.logger.info(f"Simulated {episodes} episodes of {mechanism} over horizon {horizon}")

    def get_run_summary(self) -> Dict[str, int]:
        return self.run_stats.copy()

    def log_summary(self) -> None:
        stats = self.run_stats
        self.logger.info(
            f"Run summary: {stats['solves']} solves, {stats['checks_passed']} checks passed, "
            f"{stats['checks_failed']} checks failed, {stats['episodes']} episodes"
        )
