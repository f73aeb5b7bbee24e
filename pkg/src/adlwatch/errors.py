"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class AdlwatchError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(AdlwatchError):
    """Bad configuration: unknown sensor, missing threshold, bad parameter."""

    exit_code = 2


class VocabularyError(AdlwatchError):
    """Event kind not present in the configured vocabulary."""

    exit_code = 3


class ParseError(AdlwatchError):
    """Malformed input file; message carries line (and column where known)."""

    exit_code = 3

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", col {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class OrderViolationError(AdlwatchError):
    """Event ticks not strictly increasing."""

    exit_code = 3


class UniquenessError(AdlwatchError):
    """Two events share one tick."""

    exit_code = 3


class TypeCheckError(AdlwatchError):
    """Ill-typed formula or evidence atom."""

    exit_code = 3


class LabelInconsistencyError(AdlwatchError):
    """Training labels violate a hard formula."""

    exit_code = 3


class StratificationError(AdlwatchError):
    """Rule set has a negation cycle."""

    exit_code = 3


class SafetyError(AdlwatchError):
    """Rule head variable not bound by any positive body literal."""

    exit_code = 3


class GenerationError(AdlwatchError):
    """Scenario generator could not realize a requested injection."""

    exit_code = 3


class CapacityError(AdlwatchError):
    """Grounding or solving budget exceeded."""

    exit_code = 4


class InfeasibleError(AdlwatchError):
    """No assignment satisfies the hard clauses."""

    exit_code = 4

    def __init__(self, message, clause=None):
        super().__init__(message)
        self.clause = clause


class SearchFailureError(AdlwatchError):
    """Local search exhausted its restart budget without a feasible state."""

    exit_code = 4
