"""Exception hierarchy shared by the simulation modules and the CLI."""


class QHEError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QHEError, ValueError):
    """An argument lies outside the domain of a function."""


class ProfileError(QHEError):
    """A frequency profile evaluated to a non-finite value or outside its table."""


class StiffnessError(QHEError):
    """The adaptive integrator's step size underflowed."""


class NumericalFailure(QHEError):
    """A computed state violated a physical invariant beyond tolerance."""


class NoResonanceError(QHEError):
    """No parametric drive is present, so no cycle-duration estimate exists."""


class ResonanceMissError(QHEError):
    """The cycle-duration search found no swap inside its window."""

    def __init__(self, message, *, window=None, best_time=None, best_c_sq=None):
        super().__init__(message)
        self.window = window
        self.best_time = best_time
        self.best_c_sq = best_c_sq


class ResolutionError(QHEError):
    """A sampled series is too coarse for a finite-difference check."""


class TruncationError(QHEError):
    """A truncated Fock basis holds too much population near its edge."""


class CycleClosureError(QHEError):
    """Frequencies at the end of a stroke differ from their initial values."""


class ConfigError(QHEError):
    """A scenario configuration failed to parse or validate.

    ``errors`` holds every problem found, not just the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
