"""Rolling-window estimation of h(2) and Dh(5) with event annotation.

A fixed-length window slides across the return series one step at a time;
the full estimation pipeline runs on each window and the summary metrics
are keyed to the window's last observation date, so responses to an event
show up at or after the event itself.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

import numpy as np

from .core import MfdfaConfig, mfdfa, multifractal_width
from .errors import InputError, NumericalError
from .ingest import ReturnKind, ReturnSeries

__all__ = [
    "WindowSpec",
    "EventMarker",
    "TraceEntry",
    "RollingTrace",
    "EventDelta",
    "SeriesShorterThanWindowError",
    "InsufficientCoverageError",
    "DEFAULT_EVENTS",
    "TRADING_WINDOW_LEN",
    "CONTINUOUS_WINDOW_LEN",
    "window_spans",
    "roll",
    "annotate",
    "event_delta",
]

#: three years of 250 trading days, for exchange-traded assets
TRADING_WINDOW_LEN = 750
#: three years of 365 calendar days, for continuously traded assets
CONTINUOUS_WINDOW_LEN = 1095
MIN_WINDOW_LEN = 64


class SeriesShorterThanWindowError(InputError):
    """The series has fewer observations than one window."""


class InsufficientCoverageError(InputError):
    """No usable trace entries on one side of the event."""


@dataclass(frozen=True)
class WindowSpec:
    """Window length and step, both counted in observations."""

    window_len: int = TRADING_WINDOW_LEN
    step: int = 1

    def __post_init__(self):
        if self.window_len < MIN_WINDOW_LEN:
            raise InputError(
                f"window_len must be >= {MIN_WINDOW_LEN} "
                "(the default scale grid cannot exist below that)"
            )
        if self.step < 1:
            raise InputError("step must be >= 1")

    def to_dict(self) -> dict:
        return {"window_len": self.window_len, "step": self.step}


@dataclass(frozen=True)
class EventMarker:
    """A dated annotation drawn on top of a rolling trace."""

    date: dt.date
    label: str
    out_of_range: bool = False


DEFAULT_EVENTS = (
    EventMarker(dt.date(2020, 3, 11), "WHO declares COVID-19 a pandemic"),
    EventMarker(dt.date(2024, 9, 24), "China announces comprehensive stimulus package"),
    EventMarker(dt.date(2025, 4, 2), "US baseline tariffs take effect"),
)


@dataclass(frozen=True)
class TraceEntry:
    """Per-window summary keyed to the window's last observation date."""

    date: dt.date
    h2: float
    dh5: float
    r2_q2: float
    zero_segments: int
    failed: bool = False


@dataclass(frozen=True, eq=False)
class RollingTrace:
    """Date-indexed h(2) / Dh(5) trajectory with event markers."""

    asset: str
    kind: ReturnKind
    window: WindowSpec
    config: MfdfaConfig
    entries: tuple[TraceEntry, ...]
    events: tuple[EventMarker, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.entries, self.entries[1:]):
            if b.date <= a.date:
                raise InputError("entry dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def span(self) -> tuple[dt.date, dt.date] | None:
        if not self.entries:
            return None
        return self.entries[0].date, self.entries[-1].date

    def to_csv(self) -> str:
        lines = ["date,h2,dh5,r2_q2,zero_segments,failed"]
        for e in self.entries:
            lines.append(
                f"{e.date.isoformat()},{_csv_float(e.h2)},{_csv_float(e.dh5)},"
                f"{_csv_float(e.r2_q2)},{e.zero_segments},{int(e.failed)}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "asset": self.asset,
            "kind": self.kind.value,
            "window": self.window.to_dict(),
            "config": self.config.to_dict(),
            "events": [
                {
                    "date": ev.date.isoformat(),
                    "label": ev.label,
                    "out_of_range": ev.out_of_range,
                }
                for ev in self.events
            ],
            "entries": [
                {
                    "date": e.date.isoformat(),
                    "h2": _json_float(e.h2),
                    "dh5": _json_float(e.dh5),
                    "r2_q2": _json_float(e.r2_q2),
                    "zero_segments": e.zero_segments,
                    "failed": e.failed,
                }
                for e in self.entries
            ],
        }

    def plot_data(self) -> dict[str, str]:
        """Two-column text per metric plus an events listing.

        Keys are file suffixes ("h2", "dh5", "events"); failed windows are
        omitted so the files feed straight into any plotting tool.
        """
        h2_lines = [
            f"{e.date.isoformat()}\t{e.h2!r}" for e in self.entries if not e.failed
        ]
        dh5_lines = [
            f"{e.date.isoformat()}\t{e.dh5!r}" for e in self.entries if not e.failed
        ]
        event_lines = [f"{ev.date.isoformat()}\t{ev.label}" for ev in self.events]
        return {
            "h2": "\n".join(h2_lines) + "\n",
            "dh5": "\n".join(dh5_lines) + "\n",
            "events": ("\n".join(event_lines) + "\n") if event_lines else "",
        }


def _csv_float(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def _json_float(v: float):
    v = float(v)
    return v if math.isfinite(v) else None


def window_spans(n_obs: int, window_len: int, step: int) -> Iterator[tuple[int, int]]:
    """Half-open observation spans [k*step, k*step + window_len)."""
    start = 0
    while start + window_len <= n_obs:
        yield start, start + window_len
        start += step


def roll(
    returns: ReturnSeries,
    spec: WindowSpec | None = None,
    config: MfdfaConfig | None = None,
) -> RollingTrace:
    """Estimate h(2) and Dh(5) over every window position.

    Windows where the estimation breaks down numerically (for example a
    constant stretch of prices) become flagged gap entries instead of
    aborting the run.
    """
    spec = spec or WindowSpec()
    cfg = config or MfdfaConfig()
    n = len(returns)
    if n < spec.window_len:
        raise SeriesShorterThanWindowError(
            f"series has {n} observations, window needs {spec.window_len}"
        )
    # resolve the scale grid once: it depends only on the window length,
    # and resolving now surfaces configuration errors before the long loop
    resolved = replace(cfg, scale_grid=cfg.resolve_scales(spec.window_len))

    values = returns.values
    dates = returns.dates
    entries = []
    for start, end in window_spans(n, spec.window_len, spec.step):
        date = dates[end - 1]
        try:
            surface, spectrum = mfdfa(values[start:end], resolved)
        except NumericalError:
            entries.append(
                TraceEntry(date, math.nan, math.nan, math.nan, 0, failed=True)
            )
            continue
        entries.append(
            TraceEntry(
                date,
                spectrum.h(2.0),
                multifractal_width(spectrum, 5.0),
                spectrum.r_squared_at(2.0),
                int(surface.zero_segments.sum()),
            )
        )
    return RollingTrace(
        asset=returns.asset,
        kind=returns.kind,
        window=spec,
        config=cfg,
        entries=tuple(entries),
    )


def annotate(
    trace: RollingTrace,
    events: Iterable[EventMarker] = (),
    *,
    include_defaults: bool = True,
) -> RollingTrace:
    """Attach event markers; defaults are appended unless suppressed.

    Events outside the trace's date span are kept but flagged, and
    duplicate (date, label) pairs are stored once.
    """
    candidates = list(trace.events) + list(events)
    if include_defaults:
        candidates += list(DEFAULT_EVENTS)
    span = trace.span
    seen = set()
    merged = []
    for ev in candidates:
        key = (ev.date, ev.label)
        if key in seen:
            continue
        seen.add(key)
        out = span is None or not (span[0] <= ev.date <= span[1])
        merged.append(replace(ev, out_of_range=out))
    merged.sort(key=lambda ev: (ev.date, ev.label))
    return replace(trace, events=tuple(merged))


@dataclass(frozen=True)
class EventDelta:
    """Mean h2 / dh5 in the horizon before versus at-or-after an event."""

    h2_before: float
    h2_after: float
    h2_delta: float
    dh5_before: float
    dh5_after: float
    dh5_delta: float
    n_before: int
    n_after: int


def event_delta(
    trace: RollingTrace, event: EventMarker, horizon: int = 250
) -> EventDelta:
    """Compare trace means over ``horizon`` entries on each side of an event.

    Failed entries inside the horizon are excluded from the means; the
    comparison is descriptive, no significance is attached to it.
    """
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    before = [e for e in trace.entries if e.date < event.date][-horizon:]
    after = [e for e in trace.entries if e.date >= event.date][:horizon]
    before_ok = [e for e in before if not e.failed]
    after_ok = [e for e in after if not e.failed]
    if not before_ok or not after_ok:
        raise InsufficientCoverageError(
            f"no usable entries {'before' if not before_ok else 'after'} "
            f"{event.date.isoformat()} within {horizon} entries"
        )
    h2_before = float(np.mean([e.h2 for e in before_ok]))
    h2_after = float(np.mean([e.h2 for e in after_ok]))
    dh5_before = float(np.mean([e.dh5 for e in before_ok]))
    dh5_after = float(np.mean([e.dh5 for e in after_ok]))
    return EventDelta(
        h2_before=h2_before,
        h2_after=h2_after,
        h2_delta=h2_after - h2_before,
        dh5_before=dh5_before,
        dh5_after=dh5_after,
        dh5_delta=dh5_after - dh5_before,
        n_before=len(before_ok),
        n_after=len(after_ok),
    )
