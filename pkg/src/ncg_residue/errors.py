"""Exception hierarchy shared by every stage of the residue engine."""


class ResidueError(Exception):
    """Base class for all engine errors."""


class DimensionError(ResidueError, ValueError):
    """Raised for odd/out-of-range dimensions and shape mismatches."""


class JetDepthError(ResidueError):
    """A computation needed x-derivatives deeper than the symbol carries."""


class TruncationError(ResidueError):
    """A requested degree lies below the lowest exactly-known degree."""


class DivergenceError(ResidueError):
    """A xi_n line integral does not converge (integrand decays too slowly)."""


class ValidityError(ResidueError):
    """A theorem was requested outside its dimensional range of validity."""


class RouteDisagreement(ResidueError):
    """Two independent computation routes produced different values."""

    def __init__(self, message, first, second):
        super().__init__(f"{message}: {first!r} vs {second!r}")
        self.first = first
        self.second = second


class SymbolInversionError(ResidueError, ValueError):
    """The leading symbol is not an invertible scalar multiple of |xi|^2."""
