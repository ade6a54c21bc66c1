from .csv_reports import (
    ReportWriter, allocation_text, parse_allocation, read_policy_csv, read_table_csv, read_verdicts_csv,
)

__all__ = [
    'ReportWriter', 'allocation_text', 'parse_allocation',
    'read_policy_csv', 'read_table_csv', 'read_verdicts_csv',
]
