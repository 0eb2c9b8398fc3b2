"""Batch front door: validated JSON configs in, machine-readable files out.

Commands
--------
coeffs       reconstruction coefficients next to their contour-oracle values
forward      compute and serialise a lattice coefficient table
reconstruct  evaluate the inversion on a grid from a stored table
verify       run a named identity suite, emit a JSON report
sweep        fixed-truncation round trips across a list of densities

Contracts: exit 0 on success, 1 when a verification check fails, 2 on
validation problems, 3 on numerical non-convergence.  Data outputs are
byte-deterministic for a fixed config (timings live in a separate
"meta" object excluded from comparisons); error paths never leave
partial files behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DomainError,
    InvalidParameterError,
    NonConvergenceError,
    RegimeError,
    SaturationError,
)
from .oracle import laurent_c0
from .qtheta import SeriesControl, coeff_E, nome_from_tau
from .recon import ReconConfig, reconstruct_grid, round_trip
from .signals import GAUSSIAN_FAMILY, GammaTable, SignalModel, forward_table
from .verify import SUITES, run_suite

THREADS_ENV_VAR = "GABORLATTICE_THREADS"


# ------------------------------------------------------------------ helpers


def _fmt(value: float) -> str:
    """17 significant digits: round-trippable doubles."""
    return format(float(value), ".17g")


def _atomic_write(path: str, data: str):
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _emit(path: str | None, data: str):
    if path is None:
        sys.stdout.write(data)
    else:
        _atomic_write(path, data)


def _json_dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv_dump(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ------------------------------------------------------- config validation


def _expect_keys(obj, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise ConfigError(f"{where}: missing required keys {missing}")


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {obj!r}")
    return float(obj)


def _integer(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(f"{where}: expected an integer, got {obj!r}")
    return obj


def _parse_amplitude(spec, where: str) -> complex:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return complex(spec)
    if isinstance(spec, list) and len(spec) == 2:
        return complex(_number(spec[0], where), _number(spec[1], where))
    raise ConfigError(f"{where}: amplitude must be a number or [re, im]")


def parse_signal(spec, where: str = "signal") -> SignalModel:
    _expect_keys(spec, where, {"kind", "components"})
    if spec["kind"] != GAUSSIAN_FAMILY:
        raise ConfigError(
            f"{where}.kind: only {GAUSSIAN_FAMILY!r} signals are expressible in configs"
        )
    if not isinstance(spec["components"], list) or not spec["components"]:
        raise ConfigError(f"{where}.components: expected a non-empty list")
    comps = []
    for i, comp in enumerate(spec["components"]):
        cw = f"{where}.components[{i}]"
        _expect_keys(comp, cw, {"amplitude", "center", "modulation"})
        comps.append((
            _parse_amplitude(comp["amplitude"], cw),
            _number(comp["center"], cw),
            _number(comp["modulation"], cw),
        ))
    try:
        return SignalModel.gaussian(comps)
    except InvalidParameterError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def signal_to_spec(signal: SignalModel) -> dict:
    return {
        "kind": signal.kind,
        "components": [
            {
                "amplitude": [c.amplitude.real, c.amplitude.imag],
                "center": c.center,
                "modulation": c.modulation,
            }
            for c in signal.components
        ],
    }


def parse_grid(spec, where: str = "grid") -> tuple[float, float, float]:
    _expect_keys(spec, where, {"min", "max", "step"})
    step = _number(spec["step"], f"{where}.step")
    if step <= 0:
        raise ConfigError(f"{where}.step must be positive")
    return (_number(spec["min"], f"{where}.min"),
            _number(spec["max"], f"{where}.max"), step)


def parse_truncation(spec, where: str = "truncation") -> tuple[int, int] | None:
    if spec == "auto":
        return None
    _expect_keys(spec, where, {"M", "K"})
    M = _integer(spec["M"], f"{where}.M")
    K = _integer(spec["K"], f"{where}.K")
    if M < 0 or K < 0:
        raise ConfigError(f"{where}: M and K must be non-negative")
    return (M, K)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc


def _resolve_threads(args) -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
    return max(1, args.threads)


# ------------------------------------------------------------------ coeffs


def cmd_coeffs(args) -> int:
    if not (math.isfinite(args.tau) and args.tau > 0):
        raise InvalidParameterError(f"--tau must be a positive real, got {args.tau!r}")
    params = nome_from_tau(args.tau)
    ctrl = SeriesControl(abs_tol=args.tol) if args.tol is not None else SeriesControl()
    recorded: list[str] = []
    rows = []
    for m in range(args.m_min, args.m_max + 1):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value = coeff_E(m, params, ctrl)
        for w in caught:
            note = str(w.message)
            if note not in recorded:
                recorded.append(note)
        oracle = laurent_c0(m, params, ctrl=ctrl)
        try:
            plain = value.to_complex()
        except SaturationError:
            plain = None
        rel = abs(plain - oracle) / abs(oracle) if plain is not None and oracle != 0 else None
        rows.append({
            "m": m,
            "mantissa_re": value.mantissa.real,
            "mantissa_im": value.mantissa.imag,
            "exponent": value.exponent,
            "value_re": None if plain is None else plain.real,
            "value_im": None if plain is None else plain.imag,
            "oracle_re": oracle.real,
            "oracle_im": oracle.imag,
            "rel_diff_vs_oracle": rel,
        })
    meta = {
        "tau": params.tau,
        "regime": params.regime,
        "variant": "corrected",
        "warnings": recorded,
        "tool_version": __version__,
    }
    if args.format == "json":
        _emit(args.output, _json_dumps({"meta": meta, "rows": rows}))
    else:
        header = list(rows[0]) if rows else [
            "m", "mantissa_re", "mantissa_im", "exponent", "value_re", "value_im",
            "oracle_re", "oracle_im", "rel_diff_vs_oracle",
        ]
        table = [
            ["" if row[key] is None else
             (str(row[key]) if key in ("m", "exponent") else _fmt(row[key]))
             for key in header]
            for row in rows
        ]
        _emit(args.output, _csv_dump(header, table))
        for note in recorded:
            print(f"warning: {note}", file=sys.stderr)
    return 0


# ----------------------------------------------------------------- forward


def _table_document(table: GammaTable, signal_spec: dict | None) -> dict:
    return {
        "meta": {
            "tau": table.tau,
            "M": table.M,
            "K": table.K,
            "signal": signal_spec,
            "tool_version": __version__,
        },
        "data": table.to_payload(),
    }


def _table_from_document(doc: dict, where: str) -> GammaTable:
    _expect_keys(doc, where, {"meta", "data"})
    meta = doc["meta"]
    _expect_keys(meta, f"{where}.meta", {"tau", "M", "K"}, {"signal", "tool_version"})
    data = doc["data"]
    _expect_keys(data, f"{where}.data",
                 {"m", "k", "mantissa_re", "mantissa_im", "exponent"})
    try:
        return GammaTable.from_payload(
            _integer(meta["M"], "M"), _integer(meta["K"], "K"),
            _number(meta["tau"], "tau"), data,
        )
    except (InvalidParameterError, IndexError, TypeError) as exc:
        raise ConfigError(f"{where}: malformed table payload: {exc}") from exc


def cmd_forward(args) -> int:
    config = _load_config(args.config)
    _expect_keys(config, "config", {"tau", "signal", "truncation"}, {"tol", "x_max"})
    tau = _number(config["tau"], "config.tau")
    signal = parse_signal(config["signal"])
    truncation = parse_truncation(config["truncation"])
    tol = args.tol if args.tol is not None else _number(config.get("tol", 1e-8),
                                                        "config.tol")
    threads = _resolve_threads(args)
    if truncation is None:
        from .recon import auto_truncation

        params = nome_from_tau(tau)
        x_max = _number(config.get("x_max", 0.0), "config.x_max")
        choice = auto_truncation(signal, params, tol, x_max=x_max)
        M, K = choice.M, choice.K
    else:
        M, K = truncation
    table = forward_table(signal, tau, M, K, threads=threads)
    _emit(args.output, _json_dumps(_table_document(table, signal_to_spec(signal))))
    return 0


# ------------------------------------------------------------- reconstruct


def cmd_reconstruct(args) -> int:
    config = _load_config(args.config)
    _expect_keys(config, "config", {"tau", "grid"},
                 {"tol", "truncation", "mode", "signal"})
    tau = _number(config["tau"], "config.tau")
    grid = parse_grid(config["grid"])
    tol = args.tol if args.tol is not None else _number(config.get("tol", 1e-8),
                                                        "config.tol")
    mode = config.get("mode", "direct")
    if mode not in ("direct", "fourier_grid"):
        raise ConfigError(f"config.mode: unknown mode {mode!r}")
    truncation = parse_truncation(config.get("truncation", "auto"))
    reference = parse_signal(config["signal"]) if "signal" in config else None

    doc = _load_config(args.table)
    table = _table_from_document(doc, "table")
    if abs(table.tau - tau) > 1e-12 * max(1.0, abs(tau)):
        raise ConfigError(
            f"tau mismatch: config says {tau!r}, table was built at {table.tau!r}"
        )
    params = nome_from_tau(tau)
    recon_config = ReconConfig(tol=tol, grid=grid, mode=mode, truncation=truncation)
    start = time.perf_counter()
    report = reconstruct_grid(recon_config, table, params,
                              reference=reference, threads=_resolve_threads(args))
    elapsed = time.perf_counter() - start

    header = ["x", "f_ref_re", "f_ref_im", "f_rec_re", "f_rec_im", "abs_err"]
    rows = []
    for i, x in enumerate(report.xs):
        rec = report.reconstructed[i]
        if report.reference is not None:
            ref = report.reference[i]
            err = abs(rec - ref)
            rows.append([_fmt(x), _fmt(ref.real), _fmt(ref.imag),
                         _fmt(rec.real), _fmt(rec.imag), _fmt(err)])
        else:
            rows.append([_fmt(x), "", "", _fmt(rec.real), _fmt(rec.imag), ""])
    summary = {
        "summary": {
            "tau": params.tau,
            "points": len(report.xs),
            "M_used": report.M_used,
            "K_used": report.K_used,
            "tail_estimate": report.tail_estimate,
            "sup_error": report.sup_error,
            "l2_error": report.l2_error,
            "mode": mode,
        },
        "meta": {"elapsed_seconds": elapsed, "tool_version": __version__},
    }
    _emit(args.output, _csv_dump(header, rows))
    summary_path = args.summary or (f"{args.output}.summary.json" if args.output else None)
    _emit(summary_path, _json_dumps(summary))
    return 0


# ------------------------------------------------------------------ verify


def cmd_verify(args) -> int:
    signal = None
    if args.config is not None:
        config = _load_config(args.config)
        _expect_keys(config, "config", set(), {"signal"})
        if "signal" in config:
            signal = parse_signal(config["signal"])
    report = run_suite(args.suite, args.tau, signal=signal)
    _emit(args.output, _json_dumps(report.to_payload()))
    return 0 if report.passed else 1


# ------------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    _expect_keys(config, "config", {"tau_list", "signal", "truncation", "grid"}, {"tol"})
    tau_list = config["tau_list"]
    if not isinstance(tau_list, list) or not tau_list:
        raise ConfigError("config.tau_list: expected a non-empty list of numbers")
    taus = [_number(t, "config.tau_list") for t in tau_list]
    signal = parse_signal(config["signal"])
    truncation = parse_truncation(config["truncation"])
    if truncation is None:
        raise ConfigError("config.truncation: sweeps need explicit fixed (M, K)")
    grid = parse_grid(config["grid"])
    tol = _number(config.get("tol", 1e-8), "config.tol")
    threads = _resolve_threads(args)

    header = ["tau", "regime", "status", "sup_error", "l2_error", "M", "K",
              "tail_estimate", "note"]
    rows = []
    for tau in taus:
        params = nome_from_tau(tau)
        try:
            report = round_trip(
                signal, params,
                ReconConfig(tol=tol, grid=grid, truncation=truncation),
                threads=threads,
            )
            rows.append([_fmt(tau), params.regime, "ok",
                         _fmt(report.sup_error), _fmt(report.l2_error),
                         str(report.M_used), str(report.K_used),
                         _fmt(report.tail_estimate), ""])
        except RegimeError as exc:
            rows.append([_fmt(tau), params.regime, "refused",
                         "", "", "", "", "", str(exc)])
    _emit(args.output, _csv_dump(header, rows))
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaborlattice",
        description="Lattice-sample forward transforms, reconstruction, and "
                    "identity verification",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, tol_help=None):
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--threads", type=int, default=1,
                       help=f"worker threads (env {THREADS_ENV_VAR} overrides)")
        if tol_help is not None:
            p.add_argument("--tol", type=float, default=None, help=tol_help)

    p = sub.add_parser("coeffs", help="coefficient listing with oracle column")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--m-min", type=int, default=-4)
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_common(p, tol_help="series term-magnitude stopping threshold")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("forward", help="compute and store a coefficient table")
    p.add_argument("--config", required=True)
    add_common(p, tol_help="override the config's target accuracy")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("reconstruct", help="reconstruct from a stored table")
    p.add_argument("--config", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--summary", help="summary JSON path "
                                     "(default: <output>.summary.json)")
    add_common(p, tol_help="override the config's target accuracy")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", help="run a named identity suite")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--config", help="optional config carrying a signal override")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="fixed-truncation error sweep across densities")
    p.add_argument("--config", required=True)
    add_common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError, DomainError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, SaturationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
