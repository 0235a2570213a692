"""Exception taxonomy shared by all cavityspdc modules.

Two families:

* ``ParameterError`` -- the caller handed us something malformed (bad field
  value, unparseable catalog file, nonsense threshold).  The CLI maps these
  to exit code 2.
* ``DomainError`` -- inputs were well formed but the physics refuses (index
  requested outside a Sellmeier validity window, lossless cavity with
  infinite finesse, design target that no coating can reach).  The CLI maps
  these to exit code 1.
"""


class ParameterError(ValueError):
    """Malformed input value or configuration."""


class CatalogError(ParameterError):
    """Material catalog file failed to parse or validate."""


class CatalogConflictError(CatalogError):
    """Two entries in one catalog file claim the same (material, axis)."""


class DomainError(RuntimeError):
    """Physics-level failure: a precondition of an operation was violated."""


class ValidityRangeError(DomainError):
    """Wavelength or temperature outside a dispersion model's valid range."""


class DegenerateCavityError(DomainError):
    """Round-trip factor too small (or denominator nonpositive): the cavity
    does not store light, so comb quantities are undefined."""


class InfiniteFinesseError(DomainError):
    """Round-trip factor is exactly 1 (lossless, perfectly mirrored)."""


class SingularCoefficientError(DomainError):
    """Airy coefficient diverges because the round-trip factor reaches 1."""


class NonphysicalSignalError(DomainError):
    """Signal wavelength at or below the pump wavelength."""


class DegenerateDispersionError(DomainError):
    """Signal and idler group indices coincide; no clustering, the mode
    count diverges."""


class PhaseMatchingError(DomainError):
    """No first-order quasi-phase-matching: the required poling period is
    nonpositive in this interaction order."""


class SamplingBudgetError(DomainError):
    """Requested window needs more grid points than the policy allows."""

    def __init__(self, message: str, required_points: int, max_points: int):
        super().__init__(message)
        self.required_points = required_points
        self.max_points = max_points


class ResolutionError(DomainError):
    """Convolution kernel narrower than the sampling grid can represent."""


class TuningNotFoundError(DomainError):
    """No temperature in the scan window satisfied the objective."""

    def __init__(self, message: str, best_temperature_c: float, best_metric: float):
        super().__init__(message)
        self.best_temperature_c = best_temperature_c
        self.best_metric = best_metric


class CoatingInfeasibleError(DomainError):
    """No output-mirror reflectivity in (0, 1) reaches the target finesse."""


class DesignInfeasibleError(DomainError):
    """Design verification failed (e.g. a cluster holds more than one mode)."""

    def __init__(self, message: str, cluster=None):
        super().__init__(message)
        self.cluster = cluster
