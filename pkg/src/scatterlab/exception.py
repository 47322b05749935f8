#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from typing import NamedTuple


class Error(Exception):
    """Base class for exceptions in this module."""

    pass


class ConfigError(Error):
    """Raised when the user settings file cannot be read."""

    def __init__(self, message: str = "Failed to read configuration"):
        self.message = message
        super().__init__(self.message)


class DomainError(Error, ValueError):
    """Raised when an input violates an operation's precondition."""

    def __init__(self, message: str = "Input outside the operation's domain"):
        self.message = message
        super().__init__(self.message)


class NumericError(Error):
    """Base class for failures of a numerical method on valid input."""

    def __init__(self, message: str = "Numerical evaluation failed"):
        self.message = message
        super().__init__(self.message)


class SingularityError(NumericError):
    """Raised when a quantity diverges, e.g. the forward Coulomb amplitude."""

    def __init__(self, message: str = "Coulomb amplitude diverges at zero momentum transfer"):
        super().__init__(message)


class NonConvergentError(NumericError):
    """Raised when successive Born terms stop shrinking."""

    def __init__(self, ratio: float, order: int):
        self.ratio = ratio
        self.order = order
        super().__init__(
            f"Born series diverges: term norm ratio {ratio:.6g} >= 1 "
            f"for two consecutive orders (reached order {order})"
        )


class UnsupportedOrderError(NumericError):
    """Raised when a time-ordered term beyond the supported order is requested."""

    def __init__(self, order: int, max_order: int = 3):
        self.order = order
        super().__init__(f"Order {order} is not supported (maximum is {max_order})")


class FieldFormatError(Error):
    """Raised when a binary field or matrix payload is malformed."""

    def __init__(self, message: str = "Malformed binary payload"):
        self.message = message
        super().__init__(self.message)


class ScenarioProblem(NamedTuple):
    line: int | None
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}" if self.line else self.message


class ScenarioError(Error):
    """Raised when a scenario file fails to parse or validate.

    Carries every problem found, not only the first one.
    """

    def __init__(self, problems: list[ScenarioProblem]):
        self.problems = list(problems)
        self.message = "\n".join(str(p) for p in self.problems) or "Invalid scenario"
        super().__init__(self.message)
