"""Exception hierarchy shared by the library, the CLI and the service."""

from typing import Any


class HCIZError(Exception):
    """Base class for every error raised on purpose by hcizlab."""

    code = "internal_error"
    exit_code = 1
    http_status = 500

    def diagnostic(self) -> dict[str, Any]:
        """One-line machine-readable description of the failure."""
        return {"error": self.code, "message": str(self), "exit_code": self.exit_code}


class DomainError(HCIZError, ValueError):
    """Input outside the domain of an operation (bad measure, odd symplectic size, ...)."""

    code = "domain_error"
    exit_code = 2
    http_status = 422


class OutOfBandError(DomainError):
    """R-transform requested outside (H_min, H_max); use v_branch instead."""

    code = "out_of_band"


class DegeneracyError(DomainError):
    """Repeated or nearly repeated eigenvalues on a path that needs distinct ones."""

    code = "degenerate_spectrum"


class ResolutionError(DomainError):
    """Dimension too small to realize the requested rank fraction."""

    code = "resolution_error"


class UnsupportedMethodError(DomainError):
    """Evaluation method not available for the requested symmetry class."""

    code = "unsupported_method"


class PrecisionError(HCIZError):
    """Multiprecision result failed its verification pass."""

    code = "precision_error"
    exit_code = 3
    http_status = 409

    def __init__(self, message: str, precision_bits: int | None = None):
        super().__init__(message)
        self.precision_bits = precision_bits


class SolverError(HCIZError):
    """A numerical solver (LP, root bracket) did not converge."""

    code = "solver_error"
