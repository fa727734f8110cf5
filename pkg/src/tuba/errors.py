"""Exception types shared across the package."""

from __future__ import annotations


class TubaError(Exception):
    """Base class for every error this package raises deliberately."""


class NotFoundError(TubaError):
    """An action, hypothesis, or attribute id is absent from the model."""


class InvalidWeightsError(TubaError):
    """A weight vector does not match the model's attribute count."""


class DistMismatchError(TubaError):
    """A probability distribution does not cover the hypothesis axis."""


class MissingDistributionError(TubaError):
    """A probability-weighted metric was requested without a distribution."""


class UnsupportedMetricError(TubaError):
    """The requested metric is not defined for the requested axis."""


class OverlapError(TubaError):
    """Categories that must be disjoint share members."""


class ZeroMassCategoryError(TubaError):
    """Conditional utility is undefined for a zero-probability category."""


class InvalidKError(TubaError):
    """Requested category count is outside [1, number of leaves]."""


class ModelFormatError(TubaError):
    """A JSON document failed structural or semantic validation.

    `path` points at the offending field when known; `violations` carries
    the full list when a parsed model fails its invariants.
    """

    def __init__(self, message: str, path: str | None = None,
                 violations: list[str] | None = None):
        self.path = path
        self.violations = violations or []
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
