"""Exception hierarchy shared by all modules."""

import numpy as np


class RisChannelError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RisChannelError, ValueError):
    """Argument outside the mathematical domain of a function."""


class SingularGeometryError(RisChannelError, ValueError):
    """Two dipoles occupy the same position."""


class CollisionError(SingularGeometryError):
    """A displaced dipole lands on another dipole.

    ``position_index`` identifies the offending trajectory point when known.
    """

    def __init__(self, message, position_index=None):
        super().__init__(message)
        self.position_index = position_index


class ScenarioError(RisChannelError, ValueError):
    """Scenario failed validation or could not be parsed."""

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class ConditioningError(RisChannelError, np.linalg.LinAlgError):
    """Matrix is singular or too ill-conditioned to factorize reliably."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond


class DiagonalizationError(ConditioningError):
    """Eigendecomposition failed or the eigenbasis is ill-conditioned."""


class ResonanceError(RisChannelError, ValueError):
    """Requested shift is too close to an eigenvalue of the secondary block."""

    def __init__(self, message, eigen_index=None, shift=None):
        super().__init__(message)
        self.eigen_index = eigen_index
        self.shift = shift


class UpdateSingularityError(RisChannelError, np.linalg.LinAlgError):
    """Inner capacitance matrix of a low-rank update is singular."""


class CombinedUpdateError(RisChannelError):
    """A stage of a combined update failed; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


class ConditioningWarning(UserWarning):
    """Matrix is solvable but poorly conditioned."""
