"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the front end never has
to guess: 2 for configuration problems, 3 for empty results, 4 for numerical
guards (Nyquist, trust window, convergence) and 5 for anything internal.
"""


class LandauWeylError(Exception):
    exit_code = 5


class ConfigError(LandauWeylError):
    exit_code = 2


class InvalidWindow(ConfigError):
    pass


class BadInterval(ConfigError):
    pass


class SupportOutsideGap(ConfigError):
    pass


class WindowOutsideGap(ConfigError):
    pass


class EmptyBandSet(LandauWeylError):
    exit_code = 3


class EmptyResult(LandauWeylError):
    exit_code = 3


class NumericalGuard(LandauWeylError):
    exit_code = 4


class NyquistViolation(NumericalGuard):
    pass


class NonRealSymbol(NumericalGuard):
    pass


class GridTooCoarse(NumericalGuard):
    pass


class GridTooNarrow(NumericalGuard):
    pass


class ChannelRangeNotConverged(NumericalGuard):
    pass


class BoundaryContamination(NumericalGuard):
    pass


class OffBandSingular(NumericalGuard):
    pass


class DimensionGuardExceeded(NumericalGuard):
    pass


class ConvergenceFailure(NumericalGuard):
    pass


class QuadratureNotConverged(NumericalGuard):
    pass


class CriticalEndpoint(NumericalGuard):
    pass


class CriticalLevel(NumericalGuard):
    pass


class TrustWindowTooSmall(NumericalGuard):
    pass


class CutoffIntrusion(NumericalGuard):
    pass
