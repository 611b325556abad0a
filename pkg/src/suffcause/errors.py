"""Exception hierarchy.

Library code raises these; the CLI maps them onto exit codes
(``UsageError`` -> 1, ``DataError`` -> 2, anything else -> 3).
"""


class SuffCauseError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(SuffCauseError, ValueError):
    """An operation was called with arguments outside its precondition."""


class UnsupportedSize(ContractViolation):
    """Exhaustive enumeration requested beyond the supported size guard."""


class MonotonicityViolation(SuffCauseError):
    """A declared positive-monotone literal is not monotone on a table."""


class ModeError(ContractViolation):
    """Population weight mode does not fit the requested quantity."""


class Unsupported(SuffCauseError):
    """A combination of options the estimators deliberately do not cover."""


class UsageError(SuffCauseError):
    """Bad command-line configuration."""


class DataError(SuffCauseError):
    """Problem with input data (files, counts)."""


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DesignError(DataError):
    """Estimator does not apply to the study design of the data."""


class MissingCell(DataError):
    def __init__(self, stratum, assignment, reason="cell absent"):
        super().__init__(
            f"missing cell: stratum={_fmt_stratum(stratum)} "
            f"assignment={''.join(map(str, assignment))} ({reason})"
        )
        self.stratum = stratum
        self.assignment = tuple(assignment)


class ZeroCell(DataError):
    def __init__(self, stratum, assignment, which):
        super().__init__(
            f"zero {which} count: stratum={_fmt_stratum(stratum)} "
            f"assignment={''.join(map(str, assignment))}; "
            "consider --continuity 0.5"
        )
        self.stratum = stratum
        self.assignment = tuple(assignment)


def _fmt_stratum(stratum):
    if not stratum:
        return "<all>"
    return ",".join(str(s) for s in stratum)
