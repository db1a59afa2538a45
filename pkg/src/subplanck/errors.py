"""Exception types shared across the package."""


class SupportError(ValueError):
    """State support escapes the grid, or decay at a grid edge is too weak."""


class NyquistError(ValueError):
    """Displacement outside the range resolvable on the sampled grids."""


class CoverageError(ValueError):
    """Shifted-grid overlap covers too little of the distribution's mass."""


class DomainError(ValueError):
    """Argument outside the validated numerical domain of a special function."""


class RingingError(RuntimeError):
    """Series does not contain enough oscillation structure to analyze."""
