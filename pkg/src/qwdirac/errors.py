"""Exception types raised across the package."""


class QWError(Exception):
    """Base class for all package errors."""


class DomainError(QWError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class DimensionError(QWError, ValueError):
    """Array sizes disagree with the lattice."""


class FamilyError(QWError, ValueError):
    """A jet was passed to an emitter for a different limit family."""


class ClassificationError(QWError, ValueError):
    """Sampled points of one jet fall into incompatible limit families."""


class ResolutionError(QWError, ValueError):
    """A wave packet is too narrow for the lattice."""


class DegenerateInputError(QWError, ValueError):
    """Input data make a metric undefined (e.g. zero mean density)."""


class ConfigError(QWError, ValueError):
    """An experiment configuration is invalid."""
