"""Multifractal detrended fluctuation analysis.

The pipeline runs in four stages:

1. :func:`build_profile` cumulates the mean-centered series into a profile.
2. :func:`segment_variances` splits the profile into non-overlapping
   segments of length ``s`` (one pass from the start, one from the end, so
   a length not divisible by ``s`` wastes no data), removes a local
   polynomial trend from every segment by ordinary least squares, and
   returns each segment's mean squared residual.
3. :func:`fluctuation_function` averages those residual variances into the
   order-``q`` fluctuation function F_q(s), with the geometric-mean limit
   at q = 0 and near-zero segments excluded so negative moments stay finite.
4. :func:`estimate_hq` fits ln F_q(s) against ln s, giving the generalized
   Hurst exponent h(q) per q, plus the multifractal width Dh(q) =
   h(-q) - h(q) and the Legendre singularity spectrum (alpha, f(alpha)).

h(2) is the classical Hurst exponent: 0.5 for uncorrelated noise, above
for persistence, below for anti-persistence.  A series is monofractal when
h(q) is flat in q, so |Dh(q)| measures multifractal strength.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NumericalError
from .ingest import TooShortError

__all__ = [
    "MfdfaConfig",
    "Profile",
    "FluctuationSurface",
    "HurstSpectrum",
    "ScaleTooLargeError",
    "DegenerateFitError",
    "AllSegmentsZeroError",
    "TooFewScalesError",
    "NonPositiveFluctuationError",
    "GridTooSparseError",
    "QNotOnGridError",
    "default_q_grid",
    "default_scale_grid",
    "build_profile",
    "segment_variances",
    "fluctuation_function",
    "estimate_hq",
    "singularity_spectrum",
    "multifractal_width",
    "mfdfa",
]

DEFAULT_POLY_ORDER = 3
DEFAULT_Q_MAX = 5.0
DEFAULT_Q_STEP = 0.25
DEFAULT_MIN_SCALE = 16
DEFAULT_NUM_SCALES = 20
#: Segments whose residual variance falls below this fraction of the window
#: variance are treated as deterministic and excluded from the moments.
ZERO_VARIANCE_RTOL = 1e-15

_Q_ATOL = 1e-9  # tolerance for locating a q value on the grid


class ScaleTooLargeError(InputError):
    """A scale exceeds what the series length supports."""


class DegenerateFitError(InputError):
    """Segment too short for the detrending order to leave a residual."""


class TooFewScalesError(InputError):
    """Fewer than four scales inside the fit range."""


class GridTooSparseError(InputError):
    """The q grid is too sparse to differentiate h(q)."""


class QNotOnGridError(InputError):
    """A requested moment order is not on the configured q grid."""


class AllSegmentsZeroError(NumericalError):
    """Every segment variance vanished: the window is deterministic."""


class NonPositiveFluctuationError(NumericalError):
    """F_q(s) is not strictly positive on the fitted scale range."""


def default_q_grid(q_max: float = DEFAULT_Q_MAX, q_step: float = DEFAULT_Q_STEP) -> tuple[float, ...]:
    """Symmetric moment-order grid from -q_max to q_max, 0 included."""
    if q_max <= 0 or q_step <= 0:
        raise InputError("q_max and q_step must be positive")
    k = int(round(q_max / q_step))
    if not math.isclose(k * q_step, q_max, rel_tol=0, abs_tol=_Q_ATOL):
        raise InputError("q_max must be a multiple of q_step")
    return tuple(float(i * q_step) for i in range(-k, k + 1))


def default_scale_grid(
    n: int,
    *,
    min_scale: int = DEFAULT_MIN_SCALE,
    max_scale: int | None = None,
    num_scales: int = DEFAULT_NUM_SCALES,
) -> tuple[int, ...]:
    """Roughly ``num_scales`` log-spaced integer scales in [min_scale, N/4].

    Deduplicated after rounding, so short series yield fewer scales.
    """
    if max_scale is None:
        max_scale = n // 4
    if max_scale < min_scale:
        raise ScaleTooLargeError(
            f"series of length {n} cannot support scales >= {min_scale} "
            f"(max usable scale is N/4 = {n // 4})"
        )
    grid = np.geomspace(min_scale, max_scale, num_scales)
    return tuple(int(s) for s in np.unique(np.rint(grid).astype(int)))


@dataclass(frozen=True)
class MfdfaConfig:
    """Estimator settings: detrending order, q grid, scale grid, fit range.

    ``scale_grid=None`` derives the default grid from the series length at
    run time.  ``fit_scale_range=None`` fits over the whole grid.
    """

    poly_order: int = DEFAULT_POLY_ORDER
    q_grid: tuple[float, ...] = default_q_grid()
    scale_grid: tuple[int, ...] | None = None
    fit_scale_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.poly_order < 1:
            raise InputError("poly_order must be >= 1")
        q = np.asarray(self.q_grid, dtype=float)
        if q.size < 3:
            raise GridTooSparseError("q grid needs at least 3 points")
        if np.any(np.diff(q) <= 0):
            raise InputError("q grid must be strictly increasing")
        # symmetric about zero, and the reported orders must be present
        if not np.allclose(q, -q[::-1], rtol=0, atol=_Q_ATOL):
            raise InputError("q grid must be symmetric about 0")
        for needed in (2.0, 5.0):
            if not np.any(np.isclose(q, needed, rtol=0, atol=_Q_ATOL)):
                raise InputError(f"q grid must contain {needed} (and its negative)")
        if self.scale_grid is not None:
            s = np.asarray(self.scale_grid)
            if s.size == 0 or np.any(np.diff(s) <= 0):
                raise InputError("scale grid must be non-empty, strictly increasing")
            if s[0] < self.poly_order + 2:
                raise DegenerateFitError(
                    f"scale {int(s[0])} < poly_order + 2 = {self.poly_order + 2}"
                )
        if self.fit_scale_range is not None:
            lo, hi = self.fit_scale_range
            if lo > hi:
                raise InputError("fit_scale_range must satisfy lo <= hi")

    def resolve_scales(self, n: int) -> tuple[int, ...]:
        """Concrete scale grid for a series of length ``n``."""
        if self.scale_grid is None:
            scales = default_scale_grid(n, min_scale=max(DEFAULT_MIN_SCALE, self.poly_order + 2))
        else:
            scales = self.scale_grid
            if scales[-1] > n // 4:
                raise ScaleTooLargeError(
                    f"scale {scales[-1]} exceeds N/4 = {n // 4} for N = {n}"
                )
        return scales

    def to_dict(self) -> dict:
        return {
            "poly_order": self.poly_order,
            "q_grid": list(self.q_grid),
            "scale_grid": None if self.scale_grid is None else list(self.scale_grid),
            "fit_scale_range": None
            if self.fit_scale_range is None
            else list(self.fit_scale_range),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MfdfaConfig":
        kwargs = {}
        if "poly_order" in data:
            kwargs["poly_order"] = int(data["poly_order"])
        if data.get("q_grid") is not None:
            kwargs["q_grid"] = tuple(float(q) for q in data["q_grid"])
        if data.get("scale_grid") is not None:
            kwargs["scale_grid"] = tuple(int(s) for s in data["scale_grid"])
        if data.get("fit_scale_range") is not None:
            lo, hi = data["fit_scale_range"]
            kwargs["fit_scale_range"] = (int(lo), int(hi))
        return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class Profile:
    """Cumulative sum of the mean-centered series."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", arr)
        if arr.size != self.n:
            raise InputError("profile length does not match n")


def _values_of(returns) -> np.ndarray:
    """Accept a ReturnSeries or any 1-d array-like."""
    values = getattr(returns, "values", returns)
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError("expected a 1-d series")
    return arr


def build_profile(returns) -> Profile:
    """Cumulate the mean-centered series; the full sum telescopes to zero."""
    r = _values_of(returns)
    n = r.size
    if n < 2:
        raise TooShortError("need at least 2 observations")
    y = np.cumsum(r - r.mean())
    # closure check: the last partial sum must vanish up to accumulated rounding
    tol = n * np.finfo(float).eps * (np.abs(r).max() if n else 0.0)
    if abs(float(y[-1])) > tol:
        raise NumericalError(
            f"profile does not close: |Y(N)| = {abs(float(y[-1])):.3e} > {tol:.3e}"
        )
    return Profile(values=y, n=n)


@functools.lru_cache(maxsize=512)
def _detrend_basis(s: int, poly_order: int) -> np.ndarray:
    """Orthonormal basis of degree <= poly_order polynomials on s points.

    The in-segment index is mapped affinely onto [-1, 1] before building
    the Vandermonde matrix; raw indices up to the window length are too
    ill-conditioned for a cubic fit in double precision.
    """
    x = np.linspace(-1.0, 1.0, s)
    vand = np.polynomial.polynomial.polyvander(x, poly_order)
    q, _ = np.linalg.qr(vand)
    q.flags.writeable = False
    return q


def segment_variances(profile: Profile, s: int, poly_order: int = DEFAULT_POLY_ORDER) -> np.ndarray:
    """Detrended residual variance of every length-``s`` segment.

    Returns exactly ``2 * (N // s)`` values: segments taken left to right
    from the start of the profile, then right to left from its end, so the
    residual tail shorter than ``s`` is never discarded on both sides.
    """
    y = profile.values
    n = profile.n
    if s < poly_order + 2:
        raise DegenerateFitError(
            f"scale {s} leaves no residual for a degree-{poly_order} fit"
        )
    n_s = n // s
    if n_s < 1:
        raise ScaleTooLargeError(f"scale {s} exceeds series length {n}")
    forward = y[: n_s * s].reshape(n_s, s)
    backward = y[n - n_s * s :].reshape(n_s, s)[::-1]
    segments = np.concatenate([forward, backward]).T  # (s, 2*n_s)
    basis = _detrend_basis(s, poly_order)
    resid = segments - basis @ (basis.T @ segments)
    return np.mean(resid * resid, axis=0)


def _generalized_means(kept: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Order-q/2 power means of segment variances, raised to 1/q.

    The q = 0 column uses the geometric-mean limit.  Overflow at strongly
    negative q is deliberately left to produce inf, which downstream code
    reports as a non-positive fluctuation.
    """
    out = np.empty(q.size)
    nonzero = q != 0.0
    with np.errstate(over="ignore", divide="ignore"):
        powers = kept[None, :] ** (q[nonzero, None] / 2.0)
        out[nonzero] = powers.mean(axis=1) ** (1.0 / q[nonzero])
    if np.any(~nonzero):
        out[~nonzero] = np.exp(0.5 * np.log(kept).mean())
    return out


def fluctuation_function(
    scales,
    seg_variances_per_scale,
    q_grid,
    *,
    zero_threshold: float = 0.0,
) -> "FluctuationSurface":
    """Aggregate per-segment variances into F_q(s) over the q grid.

    Segments with variance at or below ``zero_threshold`` are excluded
    from the average (the denominator shrinks accordingly) and counted in
    ``zero_segments``; without the exclusion a single flat segment would
    destroy every negative-order moment.
    """
    scales = np.asarray(scales, dtype=int)
    q = np.asarray(q_grid, dtype=float)
    if len(seg_variances_per_scale) != scales.size:
        raise InputError("one segment-variance array required per scale")
    fq = np.empty((q.size, scales.size))
    ns_per_scale = np.empty(scales.size, dtype=int)
    zero_counts = np.empty(scales.size, dtype=int)
    stored_variances = []
    for j, (s, sv) in enumerate(zip(scales, seg_variances_per_scale)):
        sv = np.asarray(sv, dtype=float)
        if np.any(sv < 0):
            raise InputError("segment variances must be non-negative")
        kept = sv[sv > zero_threshold]
        zero_counts[j] = sv.size - kept.size
        ns_per_scale[j] = sv.size // 2
        if kept.size == 0:
            raise AllSegmentsZeroError(
                f"all {sv.size} segments at scale {int(s)} are below the zero "
                "threshold; the window is constant or deterministic"
            )
        fq[:, j] = _generalized_means(kept, q)
        stored_variances.append(sv)
    _check_q_monotonicity(fq, q)
    return FluctuationSurface(
        scales=scales,
        q_grid=q,
        fq=fq,
        ns_per_scale=ns_per_scale,
        zero_segments=zero_counts,
        seg_variances=tuple(stored_variances),
    )


def _check_q_monotonicity(fq: np.ndarray, q: np.ndarray) -> None:
    # power means are non-decreasing in the order; anything beyond float
    # noise means the moments were computed wrong
    finite = np.isfinite(fq)
    diffs = np.diff(fq, axis=0)
    floor = -1e-9 * np.abs(fq[1:, :])
    bad = (diffs < floor) & finite[1:, :] & finite[:-1, :]
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NumericalError(
            f"F_q(s) decreased in q at q = {q[i + 1]:g}, scale column {j}"
        )


@dataclass(frozen=True, eq=False)
class FluctuationSurface:
    """F_q(s) over the (q, scale) grid plus per-segment diagnostics."""

    scales: np.ndarray
    q_grid: np.ndarray
    fq: np.ndarray
    ns_per_scale: np.ndarray
    zero_segments: np.ndarray
    seg_variances: tuple[np.ndarray, ...] | None = None

    def to_csv(self) -> str:
        """Long-format serialization with columns q, s, F."""
        lines = ["q,s,F"]
        for i, q in enumerate(self.q_grid):
            for j, s in enumerate(self.scales):
                lines.append(f"{float(q)!r},{int(s)},{float(self.fq[i, j])!r}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self, config: MfdfaConfig | None = None) -> dict:
        out = {
            "scales": [int(s) for s in self.scales],
            "q_grid": [float(q) for q in self.q_grid],
            "fq": [[_json_float(v) for v in row] for row in self.fq],
            "ns_per_scale": [int(v) for v in self.ns_per_scale],
            "zero_segments": [int(v) for v in self.zero_segments],
        }
        if config is not None:
            out["config"] = config.to_dict()
        return out


def _json_float(v) -> float | None:
    v = float(v)
    return v if math.isfinite(v) else None


def _index_of(q_grid: np.ndarray, q: float) -> int:
    hits = np.nonzero(np.isclose(q_grid, q, rtol=0, atol=_Q_ATOL))[0]
    if hits.size == 0:
        raise QNotOnGridError(f"q = {q:g} is not on the grid")
    return int(hits[0])


@dataclass(frozen=True, eq=False)
class HurstSpectrum:
    """h(q) with regression diagnostics, width function and (alpha, f(alpha))."""

    q_grid: np.ndarray
    hq: np.ndarray
    fit_stderr: np.ndarray
    r_squared: np.ndarray
    alpha: np.ndarray | None = None
    f_alpha: np.ndarray | None = None
    width_fn: np.ndarray | None = None  # Dh(q) aligned with positive_q

    @property
    def positive_q(self) -> np.ndarray:
        return self.q_grid[self.q_grid > _Q_ATOL]

    def h(self, q: float) -> float:
        """h at a grid point; h(2) is the classical Hurst exponent."""
        return float(self.hq[_index_of(self.q_grid, q)])

    def r_squared_at(self, q: float) -> float:
        return float(self.r_squared[_index_of(self.q_grid, q)])

    def width(self, q: float = 5.0) -> float:
        return multifractal_width(self, q)

    def to_csv(self) -> str:
        lines = ["q,hq,fit_stderr,r_squared,alpha,f_alpha"]
        alpha = self.alpha if self.alpha is not None else np.full(self.q_grid.size, np.nan)
        f_alpha = self.f_alpha if self.f_alpha is not None else np.full(self.q_grid.size, np.nan)
        for i, q in enumerate(self.q_grid):
            lines.append(
                ",".join(
                    repr(float(v))
                    for v in (
                        q,
                        self.hq[i],
                        self.fit_stderr[i],
                        self.r_squared[i],
                        alpha[i],
                        f_alpha[i],
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self, config: MfdfaConfig | None = None) -> dict:
        out = {
            "q_grid": [float(q) for q in self.q_grid],
            "hq": [_json_float(v) for v in self.hq],
            "fit_stderr": [_json_float(v) for v in self.fit_stderr],
            "r_squared": [_json_float(v) for v in self.r_squared],
            "alpha": None
            if self.alpha is None
            else [_json_float(v) for v in self.alpha],
            "f_alpha": None
            if self.f_alpha is None
            else [_json_float(v) for v in self.f_alpha],
            "width": {
                "q": [float(q) for q in self.positive_q],
                "dh": None
                if self.width_fn is None
                else [_json_float(v) for v in self.width_fn],
            },
        }
        if config is not None:
            out["config"] = config.to_dict()
        return out


def estimate_hq(
    surface: FluctuationSurface,
    fit_scale_range: tuple[int, int] | None = None,
) -> HurstSpectrum:
    """Slope of ln F_q(s) versus ln s per q, over the fit scale range.

    Also fills the singularity spectrum and the width function, so the
    returned spectrum is complete.

    Parameters
    ----------
    surface:
        Computed fluctuation surface.
    fit_scale_range:
        Inclusive (s_lo, s_hi) bounds selecting which scales enter the
        regression; defaults to every scale on the surface.
    """
    scales = surface.scales
    if fit_scale_range is None:
        mask = np.ones(scales.size, dtype=bool)
    else:
        lo, hi = fit_scale_range
        mask = (scales >= lo) & (scales <= hi)
    m = int(mask.sum())
    if m < 4:
        raise TooFewScalesError(
            f"only {m} scales inside the fit range; at least 4 required"
        )
    f = surface.fq[:, mask]
    if not np.all(f > 0) or not np.all(np.isfinite(f)):
        raise NonPositiveFluctuationError(
            "F_q(s) must be finite and strictly positive over the fit range"
        )
    x = np.log(scales[mask].astype(float))
    y = np.log(f)

    xc = x - x.mean()
    sxx = float(xc @ xc)
    slopes = (y @ xc) / sxx
    intercepts = y.mean(axis=1) - slopes * x.mean()
    resid = y - (intercepts[:, None] + slopes[:, None] * x[None, :])
    ssr = np.sum(resid * resid, axis=1)
    sst = np.sum((y - y.mean(axis=1, keepdims=True)) ** 2, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r_squared = np.where(sst > 0.0, 1.0 - ssr / sst, 1.0)
    stderr = np.sqrt(ssr / (m - 2) / sxx)

    if not np.all(np.isfinite(slopes)):
        raise NumericalError("non-finite h(q) slope")

    spectrum = HurstSpectrum(
        q_grid=surface.q_grid.copy(),
        hq=slopes,
        fit_stderr=stderr,
        r_squared=r_squared,
    )
    spectrum = singularity_spectrum(spectrum)
    width = np.array([multifractal_width(spectrum, q) for q in spectrum.positive_q])
    return replace(spectrum, width_fn=width)


def singularity_spectrum(spectrum: HurstSpectrum) -> HurstSpectrum:
    """Fill (alpha, f(alpha)) by Legendre transform of q h(q).

    h'(q) comes from central finite differences on the grid (one-sided at
    the ends), so alpha = h + q h' and f = q (alpha - h) + 1.
    """
    q = spectrum.q_grid
    if q.size < 3:
        raise GridTooSparseError("need at least 3 q points to differentiate h(q)")
    dh = np.gradient(spectrum.hq, q, edge_order=1)
    alpha = spectrum.hq + q * dh
    f_alpha = q * (alpha - spectrum.hq) + 1.0
    return replace(spectrum, alpha=alpha, f_alpha=f_alpha)


def multifractal_width(spectrum: HurstSpectrum, q: float = 5.0) -> float:
    """Multifractal strength Dh(q) = h(-q) - h(q); zero for monofractals."""
    if abs(q) <= _Q_ATOL:
        raise QNotOnGridError("width is undefined at q = 0")
    return float(
        spectrum.hq[_index_of(spectrum.q_grid, -q)]
        - spectrum.hq[_index_of(spectrum.q_grid, q)]
    )


def mfdfa(
    returns, config: MfdfaConfig | None = None
) -> tuple[FluctuationSurface, HurstSpectrum]:
    """Run the full pipeline on a return series (or plain 1-d array).

    Returns the fluctuation surface and the fitted Hurst spectrum.
    """
    cfg = config or MfdfaConfig()
    values = _values_of(returns)
    scales = cfg.resolve_scales(values.size)
    profile = build_profile(values)
    seg_vars = [segment_variances(profile, s, cfg.poly_order) for s in scales]
    threshold = ZERO_VARIANCE_RTOL * float(np.var(values))
    surface = fluctuation_function(
        scales, seg_vars, cfg.q_grid, zero_threshold=threshold
    )
    spectrum = estimate_hq(surface, cfg.fit_scale_range)
    return surface, spectrum
