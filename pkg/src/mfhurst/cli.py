"""Command-line entry point.

Subcommands::

    returns    price CSV -> return-series CSV
    mfdfa      return-series CSV -> h(q) spectrum (JSON + CSV) and surface CSV
    roll       return-series CSV -> rolling h(2)/Dh(5) trace + plot data
    generate   synthetic series (white | fgn | cascade) -> return-series CSV

Every command writes a run manifest next to its outputs recording the
exact argument vector, input digests, the resolved configuration and the
output digests; re-running the recorded arguments reproduces the outputs
byte for byte.

Exit codes: 0 success, 1 input or validation error (including usage
errors), 2 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .core import MfdfaConfig, default_scale_grid, default_q_grid, mfdfa
from .errors import InputError, MfhurstError
from .generators import binomial_cascade, fgn, white_noise
from .ingest import (
    FORMAT_PRESETS,
    CsvFormat,
    parse_csv,
    read_returns_csv,
    to_abs_returns,
    to_log_returns,
)
from .rolling import (
    CONTINUOUS_WINDOW_LEN,
    TRADING_WINDOW_LEN,
    EventMarker,
    WindowSpec,
    annotate,
    roll,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; keep 2 reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _atomic_write(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path: Path) -> str:
    return _sha256(path.read_bytes())


def _write_outputs(out_dir: Path, outputs: dict[str, str]) -> dict[str, str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, text in outputs.items():
        _atomic_write(out_dir / name, text)
        digests[name] = _sha256(text.encode("utf-8"))
    return digests


def _write_manifest(
    out_dir: Path,
    stem: str,
    argv: list[str],
    inputs: dict[str, str],
    output_digests: dict[str, str],
    *,
    config: MfdfaConfig | None = None,
    window: WindowSpec | None = None,
    csv_format: CsvFormat | None = None,
) -> Path:
    manifest = {
        "tool": "mfhurst",
        "version": __version__,
        "created_utc": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "argv": list(argv),
        "inputs": inputs,
        "outputs": output_digests,
        "mfdfa_config": None if config is None else config.to_dict(),
        "window": None if window is None else window.to_dict(),
        "csv_format": None if csv_format is None else vars(csv_format).copy(),
    }
    path = out_dir / f"{stem}.manifest.json"
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _format_from_args(args) -> CsvFormat:
    fmt = FORMAT_PRESETS[args.format]
    overrides = {}
    if args.date_col is not None:
        overrides["date_column"] = args.date_col
    if args.price_col is not None:
        overrides["price_column"] = args.price_col
    if args.date_pattern is not None:
        overrides["date_pattern"] = args.date_pattern
    if args.thousands is not None:
        overrides["thousands"] = args.thousands
    if overrides:
        fmt = CsvFormat(**{**vars(fmt), **overrides})
    return fmt


def _config_from_args(args, n: int) -> MfdfaConfig:
    """Build the estimator config from --config JSON plus flag overrides."""
    base = {}
    if args.config is not None:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(base, dict):
            raise InputError("--config must hold a JSON object")
    cfg = MfdfaConfig.from_dict(base)
    updates = {}
    if args.poly_order is not None:
        updates["poly_order"] = args.poly_order
    if args.q_max is not None or args.q_step is not None:
        updates["q_grid"] = default_q_grid(
            args.q_max if args.q_max is not None else 5.0,
            args.q_step if args.q_step is not None else 0.25,
        )
    if args.s_min is not None or args.s_max is not None or args.n_scales is not None:
        updates["scale_grid"] = default_scale_grid(
            n,
            min_scale=args.s_min if args.s_min is not None else 16,
            max_scale=args.s_max,
            num_scales=args.n_scales if args.n_scales is not None else 20,
        )
    if args.fit_range is not None:
        updates["fit_scale_range"] = (args.fit_range[0], args.fit_range[1])
    if updates:
        cfg = MfdfaConfig(**{**vars(cfg), **updates})
    return cfg


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("estimator settings")
    g.add_argument("--config", help="JSON file with estimator settings")
    g.add_argument("--poly-order", type=int, help="detrending polynomial order (default 3)")
    g.add_argument("--q-max", type=float, help="largest |q| on the grid (default 5)")
    g.add_argument("--q-step", type=float, help="q grid spacing (default 0.25)")
    g.add_argument("--s-min", type=int, help="smallest scale (default 16)")
    g.add_argument("--s-max", type=int, help="largest scale (default N/4)")
    g.add_argument("--n-scales", type=int, help="number of log-spaced scales (default 20)")
    g.add_argument(
        "--fit-range",
        nargs=2,
        type=int,
        metavar=("LO", "HI"),
        help="scale bounds used in the log-log fit (default: whole grid)",
    )


def cmd_returns(args, argv: list[str]) -> int:
    path = Path(args.input)
    fmt = _format_from_args(args)
    prices = parse_csv(
        path.read_bytes(),
        fmt,
        asset=args.asset or path.stem,
        skip_bad_rows=args.skip_bad_rows,
    )
    returns = to_log_returns(prices)
    if args.kind == "abs":
        returns = to_abs_returns(returns)
    out_dir = Path(args.out_dir)
    stem = args.out or (
        f"{path.stem}-returns" if args.kind == "log" else f"{path.stem}-abs-returns"
    )
    digests = _write_outputs(out_dir, {f"{stem}.csv": returns.to_csv()})
    _write_manifest(
        out_dir,
        stem,
        argv,
        {str(path): _sha256_file(path)},
        digests,
        csv_format=fmt,
    )
    print(f"{len(returns)} {args.kind} returns -> {out_dir / (stem + '.csv')}")
    return EXIT_OK


def cmd_mfdfa(args, argv: list[str]) -> int:
    path = Path(args.input)
    returns = read_returns_csv(path.read_bytes(), asset=path.stem)
    cfg = _config_from_args(args, len(returns))
    surface, spectrum = mfdfa(returns, cfg)
    out_dir = Path(args.out_dir)
    stem = args.out or f"{path.stem}-mfdfa"
    payload = spectrum.to_json_dict(cfg)
    payload["asset"] = returns.asset
    outputs = {
        f"{stem}-spectrum.json": json.dumps(payload, indent=2, sort_keys=True) + "\n",
        f"{stem}-spectrum.csv": spectrum.to_csv(),
        f"{stem}-surface.csv": surface.to_csv(),
    }
    digests = _write_outputs(out_dir, outputs)
    _write_manifest(
        out_dir, stem, argv, {str(path): _sha256_file(path)}, digests, config=cfg
    )
    print(
        f"h(2) = {spectrum.h(2.0):.4f}  Dh(5) = {spectrum.width(5.0):.4f}  "
        f"(n = {len(returns)}, scales {surface.scales[0]}..{surface.scales[-1]})"
    )
    return EXIT_OK


def _parse_event(text: str) -> EventMarker:
    date_part, sep, label = text.partition(":")
    try:
        date = dt.date.fromisoformat(date_part.strip())
    except ValueError as exc:
        raise InputError(f"bad --event {text!r}: {exc}") from exc
    if not sep or not label.strip():
        raise InputError(f"bad --event {text!r}: expected DATE:LABEL")
    return EventMarker(date, label.strip())


def cmd_roll(args, argv: list[str]) -> int:
    path = Path(args.input)
    returns = read_returns_csv(path.read_bytes(), asset=path.stem)
    spec = WindowSpec(window_len=args.window, step=args.step)
    cfg = _config_from_args(args, spec.window_len)
    trace = roll(returns, spec, cfg)
    trace = annotate(
        trace,
        [_parse_event(e) for e in args.event],
        include_defaults=not args.no_default_events,
    )
    out_dir = Path(args.out_dir)
    stem = args.out or f"{path.stem}-roll"
    plot = trace.plot_data()
    outputs = {
        f"{stem}-trace.csv": trace.to_csv(),
        f"{stem}-trace.json": json.dumps(trace.to_json_dict(), indent=2, sort_keys=True)
        + "\n",
        f"{stem}-h2.dat": plot["h2"],
        f"{stem}-dh5.dat": plot["dh5"],
        f"{stem}-events.dat": plot["events"],
    }
    digests = _write_outputs(out_dir, outputs)
    _write_manifest(
        out_dir,
        stem,
        argv,
        {str(path): _sha256_file(path)},
        digests,
        config=cfg,
        window=spec,
    )
    n_failed = sum(e.failed for e in trace.entries)
    print(
        f"{len(trace)} windows ({n_failed} flagged) -> {out_dir / (stem + '-trace.csv')}"
    )
    return EXIT_OK


def cmd_generate(args, argv: list[str]) -> int:
    if args.generator == "white":
        series = white_noise(args.n, args.seed)
        default_stem = f"white-n{args.n}-seed{args.seed}"
    elif args.generator == "fgn":
        series = fgn(args.n, args.hurst, args.seed)
        default_stem = f"fgn-h{args.hurst:g}-n{args.n}-seed{args.seed}"
    else:
        series = binomial_cascade(args.k, args.p, args.seed)
        default_stem = f"cascade-p{args.p:g}-k{args.k}-seed{args.seed}"
    out_dir = Path(args.out_dir)
    stem = args.out or default_stem
    digests = _write_outputs(out_dir, {f"{stem}.csv": series.to_csv()})
    _write_manifest(out_dir, stem, argv, {}, digests)
    print(f"{len(series)} values -> {out_dir / (stem + '.csv')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mfhurst",
        description="Multifractal detrended fluctuation analysis of return series.",
    )
    parser.add_argument("--version", action="version", version=f"mfhurst {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_ret = sub.add_parser("returns", help="derive returns from a price CSV")
    p_ret.add_argument("input", help="price CSV file")
    p_ret.add_argument("--kind", choices=("log", "abs"), default="log")
    p_ret.add_argument("--asset", help="asset label (default: input file stem)")
    p_ret.add_argument(
        "--format",
        choices=sorted(FORMAT_PRESETS),
        default="provider",
        help="CSV format preset",
    )
    p_ret.add_argument("--date-col", help="override the date column name")
    p_ret.add_argument("--price-col", help="override the price column name")
    p_ret.add_argument(
        "--date-pattern", choices=("YYYY-MM-DD", "MM/DD/YYYY", "auto")
    )
    p_ret.add_argument("--thousands", help="thousands separator ('' to disable)")
    p_ret.add_argument(
        "--skip-bad-rows",
        action="store_true",
        help="drop unparseable rows instead of failing",
    )
    p_ret.set_defaults(func=cmd_returns)

    p_mf = sub.add_parser("mfdfa", help="estimate h(q) from a return-series CSV")
    p_mf.add_argument("input", help="return-series CSV (date,value)")
    _add_config_flags(p_mf)
    p_mf.set_defaults(func=cmd_mfdfa)

    p_roll = sub.add_parser("roll", help="rolling-window h(2) and Dh(5) trace")
    p_roll.add_argument("input", help="return-series CSV (date,value)")
    p_roll.add_argument(
        "--window",
        type=int,
        default=TRADING_WINDOW_LEN,
        help=(
            f"observations per window (default {TRADING_WINDOW_LEN} for "
            f"exchange-traded assets; use {CONTINUOUS_WINDOW_LEN} for "
            "continuously traded ones)"
        ),
    )
    p_roll.add_argument("--step", type=int, default=1, help="observations per advance")
    p_roll.add_argument(
        "--event",
        action="append",
        default=[],
        metavar="DATE:LABEL",
        help="extra event marker (repeatable)",
    )
    p_roll.add_argument(
        "--no-default-events",
        action="store_true",
        help="suppress the built-in event markers",
    )
    _add_config_flags(p_roll)
    p_roll.set_defaults(func=cmd_roll)

    p_gen = sub.add_parser("generate", help="synthetic series with known exponents")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True, parser_class=_Parser)
    p_white = gen_sub.add_parser("white", help="i.i.d. standard Gaussian noise")
    p_white.add_argument("--n", type=int, required=True)
    p_white.add_argument("--seed", type=int, default=0)
    p_fgn = gen_sub.add_parser("fgn", help="fractional Gaussian noise")
    p_fgn.add_argument("--hurst", type=float, required=True)
    p_fgn.add_argument("--n", type=int, required=True)
    p_fgn.add_argument("--seed", type=int, default=0)
    p_casc = gen_sub.add_parser("cascade", help="binomial multiplicative cascade")
    p_casc.add_argument("--p", type=float, required=True, help="mass fraction in (0.5, 1)")
    p_casc.add_argument("--k", type=int, required=True, help="number of splits; length 2**k")
    p_casc.add_argument("--seed", type=int, default=0, help="0 = deterministic left-heavy")
    for p in (p_white, p_fgn, p_casc):
        p.set_defaults(func=cmd_generate)

    for p in (p_ret, p_mf, p_roll, p_white, p_fgn, p_casc):
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--out", help="output file stem")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, argv)
    except MfhurstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
