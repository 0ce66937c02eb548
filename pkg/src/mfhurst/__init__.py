"""Multifractal detrended fluctuation analysis of financial return series.

The package measures how the fluctuations of a series scale with
resolution: the generalized Hurst exponent h(q), the multifractal width
Dh(q) = h(-q) - h(q), and the singularity spectrum f(alpha).  h(2) near
0.5 marks a random (efficient) series; a wide Dh marks multifractality.
Rolling-window traces track both through time, and seeded synthetic
generators with closed-form exponents serve as verification oracles.
"""

from .core import (
    FluctuationSurface,
    HurstSpectrum,
    MfdfaConfig,
    Profile,
    build_profile,
    default_q_grid,
    default_scale_grid,
    estimate_hq,
    fluctuation_function,
    mfdfa,
    multifractal_width,
    segment_variances,
    singularity_spectrum,
)
from .errors import InputError, MfhurstError, NumericalError
from .generators import (
    analytic_cascade_hq,
    binomial_cascade,
    binomial_cascade_values,
    fgn,
    fgn_autocovariance,
    white_noise,
)
from .ingest import (
    FORMAT_PRESETS,
    CsvFormat,
    PriceRecord,
    PriceSeries,
    ReturnKind,
    ReturnSeries,
    parse_csv,
    read_returns_csv,
    to_abs_returns,
    to_log_returns,
)
from .rolling import (
    CONTINUOUS_WINDOW_LEN,
    DEFAULT_EVENTS,
    TRADING_WINDOW_LEN,
    EventDelta,
    EventMarker,
    RollingTrace,
    TraceEntry,
    WindowSpec,
    annotate,
    event_delta,
    roll,
    window_spans,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "MfdfaConfig",
    "Profile",
    "FluctuationSurface",
    "HurstSpectrum",
    "build_profile",
    "segment_variances",
    "fluctuation_function",
    "estimate_hq",
    "singularity_spectrum",
    "multifractal_width",
    "mfdfa",
    "default_q_grid",
    "default_scale_grid",
    # ingest
    "CsvFormat",
    "FORMAT_PRESETS",
    "PriceRecord",
    "PriceSeries",
    "ReturnKind",
    "ReturnSeries",
    "parse_csv",
    "read_returns_csv",
    "to_log_returns",
    "to_abs_returns",
    # generators
    "white_noise",
    "fgn",
    "fgn_autocovariance",
    "binomial_cascade",
    "binomial_cascade_values",
    "analytic_cascade_hq",
    # rolling
    "WindowSpec",
    "EventMarker",
    "TraceEntry",
    "RollingTrace",
    "EventDelta",
    "DEFAULT_EVENTS",
    "TRADING_WINDOW_LEN",
    "CONTINUOUS_WINDOW_LEN",
    "window_spans",
    "roll",
    "annotate",
    "event_delta",
    # errors
    "MfhurstError",
    "InputError",
    "NumericalError",
]
