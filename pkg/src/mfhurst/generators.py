"""Synthetic series with analytically known scaling exponents.

These are the estimator's oracles: white noise has h(2) = 0.5 exactly,
fractional Gaussian noise has h(2) = H by construction, and the binomial
multiplicative cascade has a closed-form h(q) for every order, so the
whole q dependence of the estimator can be checked against
:func:`analytic_cascade_hq`.
"""

from __future__ import annotations

import datetime as dt
import math

import numpy as np

from .errors import InputError, NumericalError
from .ingest import ReturnKind, ReturnSeries

__all__ = [
    "EmbeddingFailureError",
    "white_noise",
    "fgn",
    "fgn_autocovariance",
    "binomial_cascade",
    "binomial_cascade_values",
    "analytic_cascade_hq",
]

SYNTHETIC_EPOCH = dt.date(2000, 1, 1)

#: longest series whose consecutive daily dates still fit the calendar
#: (datetime.date ends at 9999-12-31)
_MAX_DATED_LENGTH = dt.date.max.toordinal() - SYNTHETIC_EPOCH.toordinal() + 1

#: negative circulant eigenvalues smaller than this fraction of the largest
#: one are treated as rounding noise and clamped to zero
_EIGENVALUE_RTOL = 1e-12
_MAX_EMBEDDING_DOUBLINGS = 3


class EmbeddingFailureError(NumericalError):
    """Circulant embedding stayed indefinite after repeated enlargement."""


def _synthetic_dates(n: int) -> tuple[dt.date, ...]:
    return tuple(SYNTHETIC_EPOCH + dt.timedelta(days=i) for i in range(n))


def _series(values: np.ndarray, asset: str) -> ReturnSeries:
    return ReturnSeries(
        asset=asset,
        kind=ReturnKind.LOG,
        dates=_synthetic_dates(values.size),
        values=values,
    )


def white_noise(n: int, seed: int = 0, *, asset: str = "white-noise") -> ReturnSeries:
    """I.i.d. standard Gaussian values from a seeded generator."""
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return _series(rng.standard_normal(n), asset)


def fgn_autocovariance(lag, hurst: float):
    """Exact autocovariance of unit-variance fractional Gaussian noise."""
    k = np.abs(np.asarray(lag, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** h2 - 2.0 * k**h2 + np.abs(k - 1.0) ** h2)


def _embedding_eigenvalues(m: int, hurst: float) -> np.ndarray:
    """Eigenvalues of the size-2m circulant embedding of the covariance."""
    gamma = fgn_autocovariance(np.arange(m + 1), hurst)
    first_row = np.concatenate([gamma, gamma[m - 1 : 0 : -1]])
    return np.fft.fft(first_row).real


def fgn(n: int, hurst: float, seed: int = 0, *, asset: str = "fgn") -> ReturnSeries:
    """Stationary fractional Gaussian noise, exact in distribution.

    Uses circulant embedding of the covariance (the Davies-Harte spectral
    construction): the embedding eigenvalues come from an FFT of the
    autocovariance, and one synthesis FFT of complex Gaussian amplitudes
    yields a sample whose covariance matches the target exactly.  If the
    embedding turns out indefinite its size is doubled, up to three times.
    """
    if n < 2:
        raise InputError("n must be >= 2")
    if not 0.0 < hurst < 1.0:
        raise InputError("hurst must be in (0, 1)")
    m = n
    for _ in range(_MAX_EMBEDDING_DOUBLINGS + 1):
        lam = _embedding_eigenvalues(m, hurst)
        if lam.min() >= -_EIGENVALUE_RTOL * lam.max():
            break
        m *= 2
    else:
        raise EmbeddingFailureError(
            f"circulant embedding indefinite after {_MAX_EMBEDDING_DOUBLINGS} "
            f"doublings (H = {hurst}, n = {n})"
        )
    lam = np.clip(lam, 0.0, None)
    big = 2 * m
    rng = np.random.default_rng(seed)
    amplitudes = np.sqrt(lam) * (
        rng.standard_normal(big) + 1j * rng.standard_normal(big)
    )
    sample = math.sqrt(big) * np.fft.ifft(amplitudes).real
    return _series(sample[:n], asset)


def binomial_cascade_values(k_levels: int, p_weight: float, seed: int = 0) -> np.ndarray:
    """Raw binomial-cascade masses of length 2**k_levels, summing to 1.

    The unit mass is split k times into fractions p and 1-p.  Seed 0 gives
    the canonical deterministic left-heavy cascade; any other seed flips
    the left/right order of each individual split at random.
    """
    if not 1 <= k_levels <= 24:
        raise InputError("k_levels must be in 1..24")
    if not 0.5 < p_weight < 1.0:
        raise InputError("p_weight must be in (0.5, 1)")
    rng = np.random.default_rng(seed) if seed != 0 else None
    masses = np.array([1.0])
    for _ in range(k_levels):
        if rng is None:
            left = np.full(masses.size, p_weight)
        else:
            flip = rng.integers(0, 2, size=masses.size).astype(bool)
            left = np.where(flip, 1.0 - p_weight, p_weight)
        split = np.empty(masses.size * 2)
        split[0::2] = masses * left
        split[1::2] = masses * (1.0 - left)
        masses = split
    return masses


def binomial_cascade(
    k_levels: int, p_weight: float, seed: int = 0, *, asset: str = "cascade"
) -> ReturnSeries:
    """Binomial cascade as a date-stamped series; see binomial_cascade_values.

    Daily date stamps cap the length at the calendar ceiling (k <= 21 from
    the synthetic epoch); use :func:`binomial_cascade_values` for the raw
    masses beyond that.
    """
    masses = binomial_cascade_values(k_levels, p_weight, seed)
    if masses.size > _MAX_DATED_LENGTH:
        raise InputError(
            f"2**{k_levels} daily dates exceed the calendar; "
            "use binomial_cascade_values for the raw masses"
        )
    return _series(masses, asset)


def analytic_cascade_hq(q, p_weight: float):
    """Closed-form h(q) of the binomial cascade.

    h(q) = 1/q - ln(p^q + (1-p)^q) / (q ln 2), continued through q = 0 by
    its limit -(ln p + ln(1-p)) / (2 ln 2).  Scalar in, scalar out.
    """
    if not 0.5 < p_weight < 1.0:
        raise InputError("p_weight must be in (0.5, 1)")
    q_arr = np.asarray(q, dtype=float)
    p = p_weight
    r = 1.0 - p
    ln2 = math.log(2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = 1.0 / q_arr - np.log(p**q_arr + r**q_arr) / (q_arr * ln2)
    h = np.where(q_arr == 0.0, -(math.log(p) + math.log(r)) / (2.0 * ln2), h)
    return float(h) if np.isscalar(q) or q_arr.ndim == 0 else h
