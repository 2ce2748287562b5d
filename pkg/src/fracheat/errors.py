"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class FracHeatError(Exception):
    """Base class for all errors raised by :mod:`fracheat`."""


class DomainError(FracHeatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """A Gamma function argument lies within ``POLE_TOLERANCE`` of a pole."""


class QuadratureBudgetError(FracHeatError, RuntimeError):
    """A quadrature could not reach its tolerance within the node budget."""


class AliasingError(FracHeatError, RuntimeError):
    """A sampled field does not decay enough for a periodic spectral transform."""


class NonIntegrableWeightError(FracHeatError, RuntimeError):
    """A weighted integral failed its endpoint decay test."""


class ConfigError(FracHeatError, ValueError):
    """A run configuration could not be parsed or validated."""
