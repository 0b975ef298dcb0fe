r"""Exception types raised by the numerical routines."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SingularMaterialError(ValueError):
    """Material parameters make a Mie denominator vanish or a branch undefined."""


class ConvergenceError(RuntimeError):
    """An iteration, sum or quadrature failed to reach its tolerance."""


class TruncationError(ConvergenceError):
    """A truncated expansion (multipole or Matsubara) did not converge."""
