"""Command-line surface: norms, second-iterate dumps, witness sweeps, and
partition checks driven by JSON config files.

Exit codes: 0 success (or verdict true), 1 usage/config error, 2 verification
failure.  All floating-point output uses 17 significant digits so files
round-trip exactly; identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import witness
from .amalgam_norms import (
    AmalgamParams,
    BumpProfile,
    amalgam_norm,
    build_partition,
    fourier_lebesgue_norm,
    modulation_norm,
    sobolev_norm,
)
from .exceptions import ConfigError
from .kdvb import SERIES_THRESHOLD, second_iterate_closed_form, second_iterate_oracle
from .spectral_core import (
    DEFAULT_QUAD_DENSITY,
    FrequencyGrid,
    PiecewiseConstSpectrum,
    SampledSpectrum,
)

ORACLE_REL_TOL = 1e-6


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_exponent(x: float) -> str:
    return "inf" if math.isinf(x) else _fmt(x)


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as ConfigError (exit 1)."""

    def error(self, message):  # noqa: A003 - argparse API
        raise ConfigError(message)


def _check_fields(cfg: dict, required: set[str], optional: set[str], context: str) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError(f"{context} config must be a JSON object")
    for key in cfg:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown config field '{key}' in {context} config")
    for key in required:
        if key not in cfg:
            raise ConfigError(f"missing config field '{key}' in {context} config")


def _as_exponent(value, field: str) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"field '{field}' must be a number or 'inf', got '{value}'")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"field '{field}' must be a number or 'inf'")
    return float(value)


def _as_number(value, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"field '{field}' must be a number")
    return float(value)


def _as_int(value, field: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"field '{field}' must be an integer")
    return value


def _grid_from_config(cfg: dict) -> FrequencyGrid:
    _check_fields(cfg, {"xi_min", "xi_max", "num_points"}, set(), "grid")
    return FrequencyGrid(
        _as_number(cfg["xi_min"], "xi_min"),
        _as_number(cfg["xi_max"], "xi_max"),
        _as_int(cfg["num_points"], "num_points"),
    )


def _spectrum_from_config(cfg: dict):
    _check_fields(cfg, {"type"}, {"N", "pieces", "real_valued_field", "grid", "values"}, "spectrum")
    kind = cfg["type"]
    if kind == "phi_family":
        if "N" not in cfg:
            raise ConfigError("missing config field 'N' in spectrum config")
        return witness.make_phi_N(_as_int(cfg["N"], "N"))
    if kind == "piecewise":
        if "pieces" not in cfg:
            raise ConfigError("missing config field 'pieces' in spectrum config")
        pieces = []
        for entry in cfg["pieces"]:
            if not isinstance(entry, list) or len(entry) != 4:
                raise ConfigError("field 'pieces' entries must be [a, b, re, im]")
            a, b, re, im = (_as_number(v, "pieces") for v in entry)
            pieces.append(((a, b), complex(re, im)))
        return PiecewiseConstSpectrum.from_pieces(pieces, bool(cfg.get("real_valued_field", False)))
    if kind == "sampled":
        if "grid" not in cfg or "values" not in cfg:
            raise ConfigError("sampled spectrum needs 'grid' and 'values' fields")
        grid = _grid_from_config(cfg["grid"])
        values = []
        for entry in cfg["values"]:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ConfigError("field 'values' entries must be [re, im]")
            values.append(complex(entry[0], entry[1]))
        return SampledSpectrum(grid, np.asarray(values))
    raise ConfigError(f"field 'type' must be phi_family|piecewise|sampled, got '{kind}'")


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc


def _write_rows(path: str, fmt: str, header: list[str], rows: list[list[str]]) -> None:
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    else:
        payload = [dict(zip(header, row)) for row in rows]
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")


def _cmd_norm(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, {"spectrum", "norm", "s"}, {"p", "q", "quad_density"}, "norm")
    spectrum = _spectrum_from_config(cfg["spectrum"])
    kind = cfg["norm"]
    s = _as_number(cfg["s"], "s")
    density = args.quad_density or cfg.get("quad_density", DEFAULT_QUAD_DENSITY)
    p = _as_exponent(cfg["p"], "p") if "p" in cfg else 2.0
    q = _as_exponent(cfg["q"], "q") if "q" in cfg else 2.0

    if kind == "amalgam":
        value = amalgam_norm(spectrum, AmalgamParams(p=p, q=q, s=s, quad_density=density))
    elif kind == "fourier_lebesgue":
        value = fourier_lebesgue_norm(spectrum, q, s, density)
    elif kind == "sobolev":
        value = sobolev_norm(spectrum, s, density)
    elif kind == "modulation":
        value = modulation_norm(spectrum, AmalgamParams(p=p, q=q, s=s, quad_density=density))
    else:
        raise ConfigError(
            f"field 'norm' must be amalgam|fourier_lebesgue|sobolev|modulation, got '{kind}'"
        )

    print(
        f"norm={kind} p={_fmt_exponent(p)} q={_fmt_exponent(q)} s={_fmt(s)} "
        f"quad_density={density} value={_fmt(value)}"
    )
    if args.out:
        header = ["norm", "p", "q", "s", "quad_density", "value"]
        row = [kind, _fmt_exponent(p), _fmt_exponent(q), _fmt(s), str(density), _fmt(value)]
        _write_rows(args.out, args.format, header, [row])
    return 0


def _cmd_iterate(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(
        cfg, {"t", "grid"}, {"N", "spectrum", "quad_density", "singularity_threshold"}, "iterate"
    )
    if "N" in cfg:
        spectrum = witness.make_phi_N(_as_int(cfg["N"], "N"))
    elif "spectrum" in cfg:
        spectrum = _spectrum_from_config(cfg["spectrum"])
        if not isinstance(spectrum, PiecewiseConstSpectrum):
            raise ConfigError("iterate needs a piecewise-constant spectrum (or 'N')")
    else:
        raise ConfigError("missing config field 'N' or 'spectrum' in iterate config")
    t = _as_number(cfg["t"], "t")
    grid = _grid_from_config(cfg["grid"])
    density = args.quad_density or cfg.get("quad_density", DEFAULT_QUAD_DENSITY)
    threshold = cfg.get("singularity_threshold", SERIES_THRESHOLD)

    bounds = spectrum.support_bounds()
    if bounds is not None:
        lo, hi = bounds
        if 2 * lo < grid.xi_min or 2 * hi > grid.xi_max:
            raise ConfigError(
                "support overflow: grid must cover the convolution support "
                f"[{_fmt(2 * lo)}, {_fmt(2 * hi)}]"
            )

    points = grid.points()
    closed = [second_iterate_closed_form(spectrum, t, float(x), threshold, density) for x in points]

    header = ["xi", "re", "im", "abs"]
    rows = [[_fmt(x), _fmt(v.real), _fmt(v.imag), _fmt(abs(v))] for x, v in zip(points, closed)]
    max_mismatch = 0.0
    if args.oracle:
        header.append("oracle_rel_mismatch")
        for k, (x, v) in enumerate(zip(points, closed)):
            oracle, _converged = second_iterate_oracle(spectrum, t, float(x))
            scale = max(abs(v), abs(oracle))
            mismatch = abs(v - oracle) / scale if scale > 1e-10 else 0.0
            max_mismatch = max(max_mismatch, mismatch)
            rows[k].append(_fmt(mismatch))

    max_abs = max((abs(v) for v in closed), default=0.0)
    line = f"iterate t={_fmt(t)} points={grid.num_points} max_abs={_fmt(max_abs)}"
    if args.oracle:
        line += f" oracle_max_rel_mismatch={_fmt(max_mismatch)}"
    print(line)
    if args.out:
        _write_rows(args.out, args.format, header, rows)
    if args.oracle and max_mismatch >= ORACLE_REL_TOL:
        print(f"verification failed: oracle mismatch {_fmt(max_mismatch)} >= {ORACLE_REL_TOL}", file=sys.stderr)
        return 2
    return 0


_WITNESS_COLUMNS = ["N", "t", "p", "q", "s", "phi_norm", "a2_box0_lower", "kxi_min_measure", "threshold_ok", "verdict"]


def _witness_rows(reports, report_only: bool) -> list[list[str]]:
    rows = []
    for rep in reports:
        verdict = "NA" if (report_only or rep.verdict is None) else ("true" if rep.verdict else "false")
        rows.append(
            [
                str(rep.N),
                _fmt(rep.t),
                _fmt_exponent(rep.p),
                _fmt_exponent(rep.q),
                _fmt(rep.s),
                _fmt(rep.phi_norm),
                _fmt(rep.a2_box0_lower),
                _fmt(rep.kxi_min_measure),
                "true" if rep.threshold_ok else "false",
                verdict,
            ]
        )
    return rows


def _cmd_witness(args) -> int:
    verify = args.witness_command == "verify"
    cfg = _load_config(args.config)
    _check_fields(cfg, {"t", "N_list", "p", "q", "s"}, {"quad_density", "xi_samples"}, "witness")
    t = _as_number(cfg["t"], "t")
    n_list = cfg["N_list"]
    if not isinstance(n_list, list) or not n_list:
        raise ConfigError("field 'N_list' must be a non-empty list of integers")
    n_list = [_as_int(n, "N_list") for n in n_list]
    p = _as_exponent(cfg["p"], "p")
    q = _as_exponent(cfg["q"], "q")
    s = _as_number(cfg["s"], "s")
    density = args.quad_density or cfg.get("quad_density", DEFAULT_QUAD_DENSITY)
    xi_samples = cfg.get("xi_samples", witness.XI_SWEEP_SAMPLES)

    if verify and not s < -1.0:
        raise ConfigError(f"witness verify requires s < -1, got s={_fmt(s)}")

    params = AmalgamParams(p=p, q=q, s=s, quad_density=density)
    reports = witness.discontinuity_report(
        t, n_list, params, quad_density=density, xi_samples=xi_samples, parallel=args.parallel
    )

    rows = _witness_rows(reports, report_only=not verify)
    print(",".join(_WITNESS_COLUMNS))
    for row in rows:
        print(",".join(row))
    if args.out:
        _write_rows(args.out, args.format, _WITNESS_COLUMNS, rows)

    if not verify:
        return 0
    verdict = reports[0].verdict if reports else False
    if verdict:
        return 0
    print("verification failed: witness verdict false", file=sys.stderr)
    return 2


def _cmd_partition(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    _check_fields(
        cfg,
        set(),
        {"num_points", "seed", "xi_min", "xi_max", "plateau_radius", "support_radius"},
        "partition",
    )
    num_points = cfg.get("num_points", 10000)
    seed = cfg.get("seed", 0)
    xi_min = cfg.get("xi_min", -50.0)
    xi_max = cfg.get("xi_max", 50.0)
    profile = BumpProfile(
        plateau_radius=cfg.get("plateau_radius", 0.5),
        support_radius=cfg.get("support_radius", 1.0),
    )
    windows = build_partition(profile)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(xi_min, xi_max, size=num_points)
    max_error = float(np.max(np.abs(windows.partition_sum(xs) - 1.0)))
    status = "pass" if max_error < 1e-12 else "fail"
    print(f"partition samples={num_points} max_error={_fmt(max_error)} status={status}")
    return 0 if status == "pass" else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="kdvb-amalgam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument("--config", required=config_required, help="path to a JSON config file")
        p.add_argument("--out", help="write the report to this path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quad-density", dest="quad_density", type=int, default=None)
        p.add_argument("--parallel", type=int, default=1)

    norm_p = sub.add_parser("norm", help="compute a single norm of a spectrum")
    add_common(norm_p)

    iter_p = sub.add_parser("iterate", help="dump the second-iterate transform on a grid")
    add_common(iter_p)
    iter_p.add_argument("--oracle", action="store_true", help="cross-check against the time-quadrature oracle")

    wit_p = sub.add_parser("witness", help="run a witness sweep")
    wit_sub = wit_p.add_subparsers(dest="witness_command", required=True)
    for name in ("scan", "verify"):
        sp = wit_sub.add_parser(name)
        add_common(sp)

    part_p = sub.add_parser("partition", help="check the smooth partition of unity")
    part_sub = part_p.add_subparsers(dest="partition_command", required=True)
    check_p = part_sub.add_parser("check")
    add_common(check_p, config_required=False)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "norm":
            return _cmd_norm(args)
        if args.command == "iterate":
            return _cmd_iterate(args)
        if args.command == "witness":
            return _cmd_witness(args)
        if args.command == "partition":
            return _cmd_partition(args)
        raise ConfigError(f"unknown command {args.command}")
    except ValueError as exc:
        # ConfigError, DomainError, SupportOverflowError, parameter errors:
        # all usage/config problems by the exit-code contract
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
