"""Exception types raised by latacc."""


class LataccError(Exception):
    """Base class for all library errors."""

    kind = "error"


class DataError(LataccError, ValueError):
    kind = "data_error"


class ConfigError(LataccError, ValueError):
    kind = "config_error"


class ElicitationError(LataccError, ValueError):
    kind = "elicitation_error"


class SamplerStateError(LataccError, RuntimeError):
    kind = "sampler_state_error"


class IdentifiabilityError(LataccError, RuntimeError):
    kind = "identifiability_error"


class GridError(LataccError, ValueError):
    kind = "grid_error"


class DiagnosticsError(LataccError, ValueError):
    kind = "diagnostics_error"


class SummaryError(LataccError, ValueError):
    kind = "summary_error"
