"""Benchmark CLI: convergence and cost scans for the two solvers.

Subcommands:

* ``phase``           one solve, both tan(delta) estimates and timing
* ``scan-n``          partitioned solver, error vs points per partition
* ``scan-partition``  partitioned solver, error vs partition length
* ``scan-h``          Numerov, error vs total point count
* ``compare``         both methods joined, plus point-count ratios at
                      target accuracies

Configuration comes from flags, optionally seeded by a plain key=value
file (``--config``); flags win.  Scans emit CSV (``--out``) or an aligned
table on stdout.  Numeric cells use scientific notation with 12
significant digits.  Exit codes: 0 success, 1 solver failure, 2 bad
configuration.  Rows that fail inside a scan are tagged in the status
column and the scan continues.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .errormodel import flop_estimate, roundoff_bound_local
from .numerov import numerov_phase_shift, numerov_sweep
from .potentials import Kernel, Potential, free, gaussian_kernel, morse, tabulated, woods_saxon
from .scattering import PhaseShiftResult, phase_shift_local, phase_shift_nonlocal
from .solver import Mesh

__all__ = ["main", "RunConfig", "ScanRow", "points_at_accuracy"]

_FLOAT_FMT = "%.11E"

_NAMED_POTENTIALS = {"morse": morse, "woods_saxon": woods_saxon, "free": free}

# Converged tan(delta) references at k = 0.5; both extraction routes agree
# with these to 1e-10 on the default ranges.  V = 0 scatters nothing.
_DEFAULT_REFERENCE = {("morse", 0.5): 2.6994702502, ("woods_saxon", 0.5): -1.7107344227}

# woods_saxon still has a 1.6e-8 tail at 15 fm, so its default range is
# pushed to 20 fm where the tail is below the matching bias threshold.
_DEFAULT_RMAX = {"morse": 100.0, "woods_saxon": 20.0, "free": 20.0}

_CONFIG_KEYS = {
    "method", "potential", "k", "rmax", "plen", "n", "points",
    "kernel", "beta", "v0", "out", "reference",
}

_COMPARE_TARGETS = (1e-6, 1e-8)


@dataclass
class RunConfig:
    """Merged flag/file configuration for one command."""

    method: str
    potential_name: str
    potential: Potential
    k: float
    rmax: float
    plen_list: list[float] | None
    n_list: list[int] | None
    points_list: list[int] | None
    kernel: Kernel | None
    beta: float | None
    v0: float
    out: str | None
    reference: float | None


@dataclass
class ScanRow:
    """One scan measurement; fields a command does not fill stay None."""

    var_name: str
    var_value: float | int
    method: str | None = None
    points: int | None = None
    n_partitions: int | None = None
    h: float | None = None
    tan_delta_match: float | None = None
    tan_delta_integral: float | None = None
    error: float | None = None
    roundoff_bound: float | None = None
    flops: float | None = None
    time_s: float | None = None
    status: str = "ok"

    def cell(self, column: str):
        return self.var_value if column == self.var_name else getattr(self, column)


def _parse_number_list(text: str, kind: type, what: str) -> list:
    """Parse '20', '8,10,12', or the inclusive range '8:26:2'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad {what} range {text!r}; expected start:stop[:step]")
        try:
            start, stop = float(parts[0]), float(parts[1])
            step = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise ConfigError(f"bad {what} range {text!r}") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"bad {what} range {text!r}; need stop >= start and step > 0")
        values = list(np.arange(start, stop + 0.5 * step, step))
    else:
        try:
            values = [float(p) for p in text.split(",") if p.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad {what} list {text!r}") from exc
    out = [kind(round(v)) if kind is int else kind(v) for v in values]
    if kind is int and any(abs(v - f) > 1e-9 for v, f in zip(out, values)):
        raise ConfigError(f"{what} values must be integers, got {text!r}")
    if not out:
        raise ConfigError(f"empty {what} range {text!r}")
    return out


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, _, value = line.partition("=")
                key = key.strip().lower().replace("-", "_")
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _build_potential(name: str) -> tuple[str, Potential]:
    if name in _NAMED_POTENTIALS:
        return name, _NAMED_POTENTIALS[name]()
    try:
        return "custom", tabulated(name)
    except OSError as exc:
        known = ", ".join(sorted(_NAMED_POTENTIALS))
        raise ConfigError(
            f"unknown potential {name!r}: expected one of {known} or a readable two-column file"
        ) from exc
    except ValueError as exc:
        raise ConfigError(f"bad tabulated potential {name!r}: {exc}") from exc


def _positive(value: float, what: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{what} must be positive, got {value}")
    return value


def _merge_config(args: argparse.Namespace) -> RunConfig:
    """Layer config-file values under the flags, then fill defaults."""
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(key: str):
        # v0 has no flag of its own; it arrives via the config file only.
        value = getattr(args, key, None)
        return value if value is not None else file_values.get(key)

    method = (pick("method") or "fedvr").lower()
    if method not in ("fedvr", "numerov"):
        raise ConfigError(f"unknown method {method!r}: expected fedvr or numerov")

    potential_name, potential = _build_potential(pick("potential") or "morse")

    k_raw = pick("k")
    k = _positive(k_raw if k_raw is not None else 0.5, "k")

    rmax_raw = pick("rmax")
    if rmax_raw is None:
        if potential_name not in _DEFAULT_RMAX:
            raise ConfigError("tabulated potentials need an explicit --rmax")
        rmax = _DEFAULT_RMAX[potential_name]
    else:
        rmax = _positive(rmax_raw, "rmax")

    plen_raw = pick("plen")
    plen_list = None
    if plen_raw is not None:
        plen_list = _parse_number_list(str(plen_raw), float, "partition length")
        for length in plen_list:
            _positive(length, "partition length")

    n_raw = pick("n")
    n_list = _parse_number_list(str(n_raw), int, "points per partition") if n_raw is not None else None
    for n in n_list or []:
        if n < 4:
            raise ConfigError(f"points per partition must be at least 4, got {n}")

    points_raw = pick("points")
    points_list = _parse_number_list(str(points_raw), int, "point count") if points_raw is not None else None
    for p in points_list or []:
        if p < 8:
            raise ConfigError(f"Numerov point count must be at least 8, got {p}")

    kernel_name = (pick("kernel") or "none").lower()
    beta_raw = pick("beta")
    beta = _positive(beta_raw, "beta") if beta_raw is not None else None
    v0_raw = pick("v0")
    v0 = float(v0_raw) if v0_raw is not None else 1.0
    if kernel_name == "none":
        kernel = None
    elif kernel_name == "gaussian":
        if beta is None:
            raise ConfigError("--kernel gaussian needs --beta (kernel width in fm)")
        kernel = gaussian_kernel(v0, beta, potential, effective_range=rmax)
    else:
        raise ConfigError(f"unknown kernel {kernel_name!r}: expected none or gaussian")

    reference_raw = pick("reference")
    if reference_raw is not None:
        reference = float(reference_raw)
    elif kernel is not None:
        reference = None
    elif potential_name == "free":
        reference = 0.0
    else:
        reference = _DEFAULT_REFERENCE.get((potential_name, k))

    return RunConfig(
        method=method,
        potential_name=potential_name,
        potential=potential,
        k=k,
        rmax=rmax,
        plen_list=plen_list,
        n_list=n_list,
        points_list=points_list,
        kernel=kernel,
        beta=beta,
        v0=v0,
        out=pick("out"),
        reference=reference,
    )


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _FLOAT_FMT % value


def _emit(rows: list[ScanRow], columns: list[str], out: str | None) -> None:
    table = [[_format_cell(row.cell(col)) for col in columns] for row in rows]
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(table)
        return
    widths = [max(len(col), *(len(r[i]) for r in table)) for i, col in enumerate(columns)]
    print("  ".join(col.rjust(w) for col, w in zip(columns, widths)))
    for r in table:
        print("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))


def _sanitize(message: str) -> str:
    return " ".join(message.replace(",", ";").split())


def _error_against(reference: float | None, tan_delta: float) -> float | None:
    return None if reference is None else abs(tan_delta - reference)


def _single(values: list | None, default, what: str):
    if values is None:
        return default
    if len(values) != 1:
        raise ConfigError(f"{what} takes exactly one value, got {values}")
    return values[0]


def _timed_fedvr(mesh: Mesh, config: RunConfig) -> tuple[PhaseShiftResult, float]:
    t0 = time.perf_counter()
    result = phase_shift_local(mesh, config.potential, config.k)
    return result, time.perf_counter() - t0


def _timed_numerov(config: RunConfig, n_points: int) -> tuple[PhaseShiftResult, float]:
    h = config.rmax / n_points
    t0 = time.perf_counter()
    run = numerov_sweep(config.potential, config.k, h, config.rmax)
    result = numerov_phase_shift(run, config.potential)
    return result, time.perf_counter() - t0


def cmd_phase(config: RunConfig) -> int:
    if config.method == "numerov":
        if config.kernel is not None:
            raise ConfigError("the Numerov comparator only handles local potentials")
        n_points = _single(config.points_list, None, "phase --points")
        if n_points is None:
            raise ConfigError("phase --method numerov needs --points")
        result, elapsed = _timed_numerov(config, n_points)
        points = n_points + 1
        geometry = f"h = {config.rmax / n_points:g} fm"
    elif config.kernel is not None:
        n = _single(config.n_list, 130, "phase --n")
        t0 = time.perf_counter()
        result = phase_shift_nonlocal(config.kernel, config.k, config.rmax, n)
        elapsed = time.perf_counter() - t0
        points = n
        geometry = f"single partition, gaussian kernel beta = {config.beta:g} fm, v0 = {config.v0:g}"
    else:
        n = _single(config.n_list, 20, "phase --n")
        plen = _single(config.plen_list, 1.0, "phase --plen")
        mesh = Mesh.uniform(config.rmax, plen, n)
        result, elapsed = _timed_fedvr(mesh, config)
        points = mesh.unique_points
        geometry = f"{mesh.n_partitions} partitions of {plen:g} fm, {n} points each"

    lines = [
        ("method", config.method),
        ("potential", config.potential_name),
        ("geometry", geometry),
        ("k [1/fm]", f"{config.k:g}"),
        ("r_max [fm]", f"{config.rmax:g}"),
        ("points", str(points)),
        ("tan(delta) match", _FLOAT_FMT % result.tan_delta_match),
        ("tan(delta) integral", _FLOAT_FMT % result.tan_delta_integral),
        ("consistency", _FLOAT_FMT % result.consistency),
    ]
    error = _error_against(config.reference, result.tan_delta_match)
    if error is not None:
        lines.append(("error vs reference", _FLOAT_FMT % error))
    lines.append(("time [s]", f"{elapsed:.4f}"))
    width = max(len(label) for label, _ in lines)
    for label, value in lines:
        print(f"{label.ljust(width)}  {value}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_scan_n(config: RunConfig) -> int:
    if not config.n_list:
        raise ConfigError("scan-n needs --n with a list or range (for example 8:26:2)")
    plen = _single(config.plen_list, 1.0, "scan-n --plen")
    rows = []
    for n in config.n_list:
        row = ScanRow(var_name="n", var_value=n)
        try:
            mesh = Mesh.uniform(config.rmax, plen, n)
            result, row.time_s = _timed_fedvr(mesh, config)
        except (NumericalError, ValueError) as exc:
            row.status = f"error: {_sanitize(str(exc))}"
        else:
            row.points = mesh.unique_points
            row.tan_delta_match = result.tan_delta_match
            row.tan_delta_integral = result.tan_delta_integral
            row.error = _error_against(config.reference, result.tan_delta_match)
            row.roundoff_bound = roundoff_bound_local(n, mesh.n_partitions)
            row.flops = flop_estimate(n, mesh.n_partitions)
        rows.append(row)
    columns = ["n", "points", "tan_delta_match", "tan_delta_integral"]
    if config.reference is not None:
        columns.append("error")
    columns += ["roundoff_bound", "flops", "time_s", "status"]
    _emit(rows, columns, config.out)
    return 0


def cmd_scan_partition(config: RunConfig) -> int:
    n = _single(config.n_list, 20, "scan-partition --n")
    lengths = config.plen_list or [1.0, 2.0, 4.0, 5.0]
    rows = []
    for length in lengths:
        row = ScanRow(var_name="plen", var_value=length)
        try:
            mesh = Mesh.uniform(config.rmax, length, n)
            result, row.time_s = _timed_fedvr(mesh, config)
        except (NumericalError, ValueError) as exc:
            row.status = f"error: {_sanitize(str(exc))}"
        else:
            row.n_partitions = mesh.n_partitions
            row.points = mesh.unique_points
            row.tan_delta_match = result.tan_delta_match
            row.tan_delta_integral = result.tan_delta_integral
            row.error = _error_against(config.reference, result.tan_delta_match)
            row.flops = flop_estimate(n, mesh.n_partitions)
        rows.append(row)
    columns = ["plen", "n_partitions", "points", "tan_delta_match", "tan_delta_integral"]
    if config.reference is not None:
        columns.append("error")
    columns += ["flops", "time_s", "status"]
    _emit(rows, columns, config.out)
    return 0


def cmd_scan_h(config: RunConfig) -> int:
    if not config.points_list:
        raise ConfigError("scan-h needs --points with a list (for example 800,1600,3200)")
    rows = []
    for n_points in config.points_list:
        row = ScanRow(var_name="points", var_value=n_points, h=config.rmax / n_points)
        try:
            result, row.time_s = _timed_numerov(config, n_points)
        except (NumericalError, ValueError) as exc:
            row.status = f"error: {_sanitize(str(exc))}"
        else:
            row.tan_delta_match = result.tan_delta_match
            row.tan_delta_integral = result.tan_delta_integral
            row.error = _error_against(config.reference, result.tan_delta_match)
        rows.append(row)
    columns = ["points", "h", "tan_delta_match", "tan_delta_integral"]
    if config.reference is not None:
        columns.append("error")
    columns += ["time_s", "status"]
    _emit(rows, columns, config.out)
    return 0


def points_at_accuracy(points, errors, target: float) -> float | None:
    """First crossing of the error curve below `target`, log-log interpolated.

    Returns the interpolated point count, or None when the curve never
    reaches the target.  Rows without a finite positive error are skipped.
    """
    points = np.asarray(points, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = np.isfinite(points) & np.isfinite(errors) & (errors > 0)
    points, errors = points[keep], errors[keep]
    order = np.argsort(points)
    points, errors = points[order], errors[order]
    below = np.nonzero(errors <= target)[0]
    if len(below) == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(points[0])
    lp = np.log(points[i - 1 : i + 1])
    le = np.log(errors[i - 1 : i + 1])
    frac = (np.log(target) - le[0]) / (le[1] - le[0])
    return float(np.exp(lp[0] + frac * (lp[1] - lp[0])))


def cmd_compare(config: RunConfig) -> int:
    if config.reference is None:
        raise ConfigError(
            "compare needs a reference tan(delta): pass --reference "
            "(defaults exist only for morse/woods_saxon at k=0.5 and free)"
        )
    if config.kernel is not None:
        raise ConfigError("compare only handles local potentials")
    plen = _single(config.plen_list, 1.0, "compare --plen")
    n_list = config.n_list or list(range(8, 31, 2))
    points_list = config.points_list or [800 * 2**j for j in range(6)]

    rows = []
    for n in n_list:
        row = ScanRow(var_name="var", var_value=n, method="fedvr")
        try:
            mesh = Mesh.uniform(config.rmax, plen, n)
            result, row.time_s = _timed_fedvr(mesh, config)
        except (NumericalError, ValueError) as exc:
            row.status = f"error: {_sanitize(str(exc))}"
        else:
            row.points = mesh.unique_points
            row.error = _error_against(config.reference, result.tan_delta_match)
        rows.append(row)
    for n_points in points_list:
        row = ScanRow(var_name="var", var_value=n_points, method="numerov")
        try:
            result, row.time_s = _timed_numerov(config, n_points)
        except (NumericalError, ValueError) as exc:
            row.status = f"error: {_sanitize(str(exc))}"
        else:
            row.points = n_points
            row.error = _error_against(config.reference, result.tan_delta_match)
        rows.append(row)

    _emit(rows, ["method", "var", "points", "error", "time_s", "status"], config.out)

    for target in _COMPARE_TARGETS:
        crossing = {}
        for method in ("fedvr", "numerov"):
            pts = [r.points for r in rows if r.method == method and r.error is not None]
            errs = [r.error for r in rows if r.method == method and r.error is not None]
            crossing[method] = points_at_accuracy(pts, errs, target)
        f, nv = crossing["fedvr"], crossing["numerov"]
        if f and nv:
            print(f"points to reach error {target:.0e}: fedvr {f:.0f}, numerov {nv:.0f}, ratio {nv / f:.2f}")
        else:
            missing = " and ".join(m for m, v in crossing.items() if not v)
            print(f"points to reach error {target:.0e}: {missing} never reached it in the scanned range")
    return 0


_COMMANDS = {
    "phase": cmd_phase,
    "scan-n": cmd_scan_n,
    "scan-partition": cmd_scan_partition,
    "scan-h": cmd_scan_h,
    "compare": cmd_compare,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedvr-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("phase", "one solve, both tan(delta) estimates"),
        ("scan-n", "error vs points per partition"),
        ("scan-partition", "error vs partition length"),
        ("scan-h", "Numerov error vs total points"),
        ("compare", "both methods plus point-count ratios"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--method", choices=("fedvr", "numerov"))
        p.add_argument("--potential", help="morse, woods_saxon, free, or a two-column file")
        p.add_argument("--k", type=float, help="wavenumber in 1/fm (default 0.5)")
        p.add_argument("--rmax", type=float, help="range end in fm")
        p.add_argument("--plen", help="partition length(s) in fm; list allowed for scan-partition")
        p.add_argument("--n", help="points per partition; list or range (8:26:2) for scans")
        p.add_argument("--points", help="Numerov total point count(s)")
        p.add_argument("--kernel", choices=("none", "gaussian"))
        p.add_argument("--beta", type=float, help="gaussian kernel width in fm")
        p.add_argument("--out", help="write CSV here instead of a stdout table")
        p.add_argument("--config", help="key=value file supplying defaults")
        p.add_argument("--reference", type=float, help="reference tan(delta) for error columns")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _merge_config(args)
        return _COMMANDS[args.command](config)
    except NumericalError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError) as exc:
        # ValueError here means bad geometry or parameters caught by the
        # library (mesh validation and friends), a configuration problem.
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
