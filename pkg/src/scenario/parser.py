"""
Line-oriented parser for scenario files.

Grammar (one entry per line, '#' starts a comment):

    [agents]        name | name, owner|worker
    [types]         agent, label | agent, label, code
    [valuations]    agent, {members}, (labels of members in index order), value
    [transitions]   agent, selected|unselected|{members}, from-label, to-label, prob
    [params]        key = value      (name, delta, penalty, bound, fixed_price)

Agents are referenced by name or index. Inside braces and parentheses items
are separated by commas or whitespace. Parsing only checks syntax; table
completeness and ranges are checked by ScenarioValidator.
"""

import math
import re
from pathlib import Path
from typing import Any, Dict, List, Sequence

from ..utils.constants import SCENARIO_PARAM_KEYS, SCENARIO_SECTIONS, TRANSITION_SHORTHANDS
from ..utils.error_handling import ScenarioParseError

_SECTION_PATTERN = re.compile(r'^\[\s*([A-Za-z_]+)\s*\]$')
_PARAM_PATTERN = re.compile(r'^([A-Za-z_]+)\s*=\s*(.+)$')
_GROUP_ITEM_PATTERN = re.compile(r'[,\s]+')


def split_fields(line: str) -> List[str]:
    """Split on commas that are not inside braces or parentheses."""
    fields, depth, current = [], 0, []
    for char in line:
        if char in '{(':
            depth += 1
        elif char in '})':
            depth -= 1
        if char == ',' and depth == 0:
            fields.append(''.join(current).strip())
            current = []
        else:
            current.append(char)
    fields.append(''.join(current).strip())
    return fields


def parse_group(token: str, opening: str, closing: str, line_number: int) -> List[str]:
    """'{0, 1}' -> ['0', '1']; '{}' -> []."""
    token = token.strip()
    if not (token.startswith(opening) and token.endswith(closing)):
        raise ScenarioParseError(f"expected {opening}...{closing}, got '{token}'", line_number)
    inner = token[1:-1].strip()
    return [item for item in _GROUP_ITEM_PATTERN.split(inner) if item] if inner else []


def parse_number(token: str, what: str, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ScenarioParseError(f"{what} is not a number: '{token}'", line_number)
    if not math.isfinite(value):
        raise ScenarioParseError(f"{what} must be finite, got '{token}'", line_number)
    return value


class ScenarioParser:
    """Parse scenario text into a raw description for the validator."""

    def __init__(self) -> None:
        self.section = None
        self.raw: Dict[str, Any] = {}

    def parse_file(self, path: str) -> Dict[str, Any]:
        text = Path(path).read_text(encoding='utf-8')
        raw = self.parse_text(text)
        raw.setdefault('source', str(path))
        if 'name' not in raw['params']:
            raw['params']['name'] = Path(path).stem
        return raw

    def parse_text(self, text: str) -> Dict[str, Any]:
        """
        Parse scenario text.

        Returns a dict with keys agents, types, valuations, transitions,
        params; each entry keeps its line number for later diagnostics.
        """

        self.section = None
        self.raw = {
            'agents': [],
            'types': [],
            'valuations': [],
            'transitions': [],
            'params': {},
            'param_lines': {},
        }

        for line_number, line in enumerate(text.splitlines(), 1):
            content = line.split('#', 1)[0].strip()
            if not content:
                continue

            header = _SECTION_PATTERN.match(content)
            if header:
                self._enter_section(header.group(1).lower(), line_number)
                continue

            if self.section is None:
                raise ScenarioParseError(f"entry outside any section: '{content}'", line_number)

            getattr(self, f'_parse_{self.section}')(content, line_number)

        return self.raw

    def _enter_section(self, name: str, line_number: int) -> None:
        if name not in SCENARIO_SECTIONS:
            raise ScenarioParseError(f"unknown section [{name}]", line_number,
                                     context={'section': name})
        self.section = name

    def _expect_fields(self, content: str, counts: Sequence[int], line_number: int) -> List[str]:
        fields = split_fields(content)
        if len(fields) not in counts or any(not field for field in fields):
            expected = ' or '.join(str(c) for c in counts)
            raise ScenarioParseError(f"[{self.section}] expects {expected} fields, got '{content}'",
                                     line_number)
        return fields

    def _parse_agents(self, content: str, line_number: int) -> None:
        fields = self._expect_fields(content, (1, 2), line_number)
        self.raw['agents'].append({
            'name': fields[0],
            'role': fields[1].lower() if len(fields) == 2 else None,
            'line': line_number,
        })

    def _parse_types(self, content: str, line_number: int) -> None:
        fields = self._expect_fields(content, (2, 3), line_number)
        self.raw['types'].append({
            'agent': fields[0],
            'label': fields[1],
            'code': parse_number(fields[2], 'type code', line_number) if len(fields) == 3 else None,
            'line': line_number,
        })

    def _parse_valuations(self, content: str, line_number: int) -> None:
        fields = self._expect_fields(content, (4,), line_number)
        self.raw['valuations'].append({
            'agent': fields[0],
            'members': parse_group(fields[1], '{', '}', line_number),
            'types': parse_group(fields[2], '(', ')', line_number),
            'value': parse_number(fields[3], 'valuation', line_number),
            'line': line_number,
        })

    def _parse_transitions(self, content: str, line_number: int) -> None:
        fields = self._expect_fields(content, (5,), line_number)
        scope_token = fields[1]
        if scope_token.lower() in TRANSITION_SHORTHANDS:
            scope = scope_token.lower()
        else:
            scope = parse_group(scope_token, '{', '}', line_number)
        self.raw['transitions'].append({
            'agent': fields[0],
            'scope': scope,
            'from': fields[2],
            'to': fields[3],
            'prob': parse_number(fields[4], 'probability', line_number),
            'line': line_number,
        })

    def _parse_params(self, content: str, line_number: int) -> None:
        match = _PARAM_PATTERN.match(content)
        if not match:
            raise ScenarioParseError(f"expected 'key = value', got '{content}'", line_number)
        key, value = match.group(1).lower(), match.group(2).strip()
        if key not in SCENARIO_PARAM_KEYS:
            raise ScenarioParseError(f"unknown key '{key}' in [params]", line_number,
                                     context={'key': key})
        if key in self.raw['params']:
            raise ScenarioParseError(f"duplicate key '{key}' in [params]", line_number,
                                     context={'key': key})
        self.raw['params'][key] = value
        self.raw['param_lines'][key] = line_number
