"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Shapes or algebras do not fit together."""


class DomainError(ValueError):
    """A value lies outside the domain of the requested operation.

    Parameters
    ----------
    message : str
        Human readable description.
    eigenvalue : float, optional
        The offending eigenvalue, when the violation is spectral.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotInKError(DomainError):
    """Matrix is not a product of two symmetric positive definite matrices."""


class DegenerateProgramError(ArithmeticError):
    """The reduced Newton system of a conic program is singular."""


class StallError(ArithmeticError):
    """Interior-point step length collapsed."""


class InitializationError(RuntimeError):
    """No strictly feasible starting point could be constructed."""


class NearBoundaryWarning(UserWarning):
    """Input is numerically close to the boundary of the cone."""
