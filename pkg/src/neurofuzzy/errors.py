"""Exception hierarchy.

Each family maps onto one CLI exit code (see ``neurofuzzy.harness.cli``).
"""


class NeuroFuzzyError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(NeuroFuzzyError, ValueError):
    """Invalid settings: MF counts, epochs, split fractions, radii, ..."""

    exit_code = 2


class DataError(NeuroFuzzyError, ValueError):
    """Problems with the data itself (parsing, ordering, gaps, lengths)."""

    exit_code = 3


class ParameterDomainError(DataError):
    """A membership function was given invalid parameters or a non-finite input."""


class ShapeError(DataError):
    """Arity or length mismatch between arrays, models and datasets."""


class DegenerateInputError(DataError):
    """An input column has zero range, so no partition can be placed on it."""


class InsufficientDataError(DataError):
    """Series too short for the requested lag window."""


class ModelFormatError(DataError):
    """A serialized model could not be read back."""


class NumericalError(NeuroFuzzyError, ArithmeticError):
    """Non-finite values produced during training or inference."""

    exit_code = 4
