"""Exception types shared across the package."""


class TwpakitError(Exception):
    """Base class for all package-specific errors."""


class SingularBiasError(TwpakitError):
    """Bias point at or beyond the inductive branch of the element."""


class InconsistentMatrixError(TwpakitError):
    """Two-port matrix violates the unit-determinant requirement."""


class OutOfRangeError(TwpakitError):
    """Requested frequency falls outside the tabulated grid."""


class StopbandPlacementError(TwpakitError):
    """A mixing tone was placed inside a forbidden band."""


class DivergenceError(TwpakitError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, cell_index: int):
        super().__init__(message)
        self.cell_index = cell_index


class NoMismatchError(TwpakitError):
    """Phase mismatch is zero, so there is no coherence length to correct."""


class DesignInfeasibleError(TwpakitError):
    """Requested matching structure cannot produce the target band."""


class ResolutionError(TwpakitError):
    """Requested structure is finer than one cell."""


class AlignmentError(TwpakitError):
    """Paired traces do not share a frequency grid."""


class NoModulationError(TwpakitError):
    """Scan is too flat to locate a modulation minimum."""


class ComparisonUnavailableError(TwpakitError):
    """Both process labels are required for a comparison."""


class ConfigError(TwpakitError):
    """Run configuration failed validation."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"[{key}] {message}")
        self.key = key
