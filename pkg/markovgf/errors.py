"""Exception hierarchy for markovgf.

Input problems derive from ChainError and map to CLI exit code 2; internal
consistency failures derive from InvariantViolation and map to exit code 1.
"""

from typing import Optional


class MarkovGFError(Exception):
    """Base class for every error raised by markovgf."""


class ConfigError(MarkovGFError):
    """Invalid setting (environment variable or CLI flag)."""


# Algebra

class AlgebraError(MarkovGFError):
    """Exact-arithmetic failure."""


class DivisionNotExact(AlgebraError):
    def __init__(self, dividend, divisor, remainder):
        self.dividend = dividend
        self.divisor = divisor
        self.remainder = remainder
        super().__init__(f"division by {divisor} leaves remainder {remainder}")


class DivisionByZeroFunction(AlgebraError):
    """Division by (or construction over) the zero polynomial."""


class PoleAtPoint(AlgebraError):
    def __init__(self, point, function=None):
        self.point = point
        self.function = function
        super().__init__(f"denominator vanishes at x = {point}")


# Chain input

class ChainError(MarkovGFError):
    """Invalid chain document or state reference.

    ``field`` locates the offending part of the input (e.g. ``matrix[2][3]``)
    so the CLI can print line/field diagnostics.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ChainParseError(ChainError):
    """The document is not valid JSON/CSV or an entry is not a rational."""


class DimensionMismatch(ChainError):
    pass


class DuplicateStateLabel(ChainError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"duplicate state label {label!r}", field="states")


class NegativeEntry(ChainError):
    def __init__(self, row: int, col: int, value):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"negative entry {value}", field=f"matrix[{row}][{col}]")


class NotStochastic(ChainError):
    def __init__(self, row: int, total):
        self.row = row
        self.total = total
        super().__init__(f"row sums to {total}, expected 1", field=f"matrix[{row}]")


class NotIrreducible(ChainError):
    def __init__(self, components: list[list[str]]):
        self.components = components
        parts = " | ".join("{" + ", ".join(c) + "}" for c in components)
        super().__init__(
            f"chain is reducible; strongly connected components: {parts}",
            field="matrix",
        )


class UnknownState(ChainError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"unknown state {state!r}")


class ShiftTooLarge(MarkovGFError):
    def __init__(self, t: int, t_max: int):
        self.t = t
        self.t_max = t_max
        super().__init__(f"shift t={t} exceeds t_max={t_max}")


# Internal consistency

class InvariantViolation(MarkovGFError):
    """A computed quantity broke an identity that must hold exactly."""


class ConstancyViolation(InvariantViolation):
    def __init__(self, u, u2, values):
        self.u = u
        self.u2 = u2
        self.values = values
        super().__init__(
            f"value from state {u!r} differs from state {u2!r}: {values}"
        )


# Simulation

class SimulationError(MarkovGFError):
    pass


class StepCapExceeded(SimulationError):
    def __init__(self, max_steps: int, unfinished: int):
        self.max_steps = max_steps
        self.unfinished = unfinished
        super().__init__(
            f"{unfinished} path(s) still running after max_steps={max_steps}"
        )
