"""Command-line front end: ``matraj <command> [options]``.

Every command reads a flat ``key = value`` file (or JSON) given by
``--config``, applies ``--set key=value`` and the dedicated flags on top,
validates everything, and only then computes. Tables go out as CSV (or one
JSON document with ``--format json``); a JSON sidecar with the resolved
config and summary numbers is written next to ``--out``.

Exit codes: 0 success, 2 bad configuration, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import correlation_1d, correlation_2d, verify_crossover
from .crb import (
    crb_1d,
    crb_2d,
    crb_fpa_ula,
    crb_fpa_upa,
    ula_positions,
    upa_positions,
)
from .estimator import MleSettings, monte_carlo
from .model import Region1D, Region2D, SensingConfig, SpatialAoA, Trajectory1D, Trajectory2D
from .traj1d import benchmark_1d, optimal_trajectory
from .traj2d import ScaSettings, ScaSolverError, benchmark_2d, boundary_contact_fraction, optimize_2d

CSV_VERSION = "matraj-csv/1"

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(kind):
    def parse(text):
        if isinstance(text, (list, tuple)):
            return [kind(t) for t in text]
        return [kind(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    return parse


def _region(text):
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    parts = str(text).lower().replace("*", "x").split("x")
    return [float(p) for p in parts]


# key -> (parser, default)
KEYS = {
    "wavelength": (float, 0.05),
    "ts": (float, 1e-5),
    "n": (int, None),
    "t": (float, None),
    "vmax": (float, 10.0),
    "region": (_region, None),
    "region_lambda": (_region, None),
    "snr_db": (float, 0.0),
    "m_fpa": (int, 16),
    "u": (float, None),
    "v": (float, None),
    "theta_deg": (float, None),
    "phi_deg": (float, None),
    "dim": (str, "1d"),
    # optimizer
    "eps": (float, 1e-4),
    "eps_x": (float, 1e-2),
    "eps_y": (float, 1e-2),
    "max_outer": (int, 50),
    "max_inner": (int, 30),
    "k": (int, 250),
    "solver_tol": (float, 1e-8),
    "init": (str, "arc"),
    "favor_spread": (_bool, True),
    # estimator
    "grid_step": (float, 1e-3),
    "grid_step_2d": (float, 1e-2),
    "refine_levels": (int, 3),
    "trials": (int, 200),
    "seed": (int, 0),
    "workers": (int, 1),
    # sweeps, patterns, single-trajectory commands
    "sweep": (str, "t"),
    "values": (_list(float), []),
    "curves": (_list(str), None),
    "mse": (_bool, False),
    "kinds": (_list(str), None),
    "probe_step": (float, None),
    "trajectory": (str, "proposed"),
    "traj_file": (str, None),
    "m": (int, 64),
}

FLAG_KEYS = {
    "wavelength": "wavelength", "ts": "ts", "n": "n", "vmax": "vmax", "region": "region",
    "snr_db": "snr_db", "m_fpa": "m_fpa", "seed": "seed",
}


def parse_config_text(text: str) -> dict:
    """Parse a JSON object or ``key = value`` lines (``#`` starts a comment)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        return {str(k).lower().replace("-", "_"): v for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = line.split("=", 1)
        out[key.strip().lower().replace("-", "_")] = val.strip()
    return out


def resolve(raw: dict) -> dict:
    """Type-convert known keys, fill defaults, reject unknown keys."""
    unknown = sorted(set(raw) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = {}
    for key, (parse, default) in KEYS.items():
        if key in raw and raw[key] is not None and raw[key] != "":
            try:
                cfg[key] = parse(raw[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: {exc}") from exc
        else:
            cfg[key] = default
    cfg["dim"] = cfg["dim"].lower()
    if cfg["dim"] not in ("1d", "2d"):
        raise ConfigError("dim must be 1d or 2d")
    return cfg


def sensing_config(c: dict, dim: str | None = None) -> SensingConfig:
    dim = dim or c["dim"]
    lam = c["wavelength"]
    if c["region"] is not None:
        reg = c["region"]
    elif c["region_lambda"] is not None:
        reg = [r * lam for r in c["region_lambda"]]
    else:
        raise ConfigError("region (metres) or region_lambda (wavelengths) is required")
    if dim == "1d":
        if len(reg) != 1:
            raise ConfigError("1d region takes a single length")
        region = Region1D(reg[0])
    else:
        if len(reg) == 1:
            reg = reg * 2
        if len(reg) != 2:
            raise ConfigError("2d region is WIDTHxHEIGHT or a single side")
        region = Region2D(reg[0], reg[1])
    if c["n"] is None and c["t"] is None:
        raise ConfigError("one of n (snapshots) or t (seconds) is required")
    if c["n"] is not None and c["t"] is not None:
        raise ConfigError("give n or t, not both")
    common = dict(wavelength_m=lam, max_speed_mps=c["vmax"], snr_linear=10.0 ** (c["snr_db"] / 10.0),
                  region=region)
    if c["n"] is not None:
        return SensingConfig(snapshot_interval_s=c["ts"], num_snapshots=c["n"], **common)
    return SensingConfig.from_time(c["t"], c["ts"], **common)


def aoa_from(c: dict, dim: str) -> SpatialAoA:
    if dim == "1d":
        if c["theta_deg"] is not None:
            return SpatialAoA.from_angle(math.radians(c["theta_deg"]))
        return SpatialAoA(0.71 if c["u"] is None else c["u"])
    if c["theta_deg"] is not None or c["phi_deg"] is not None:
        if c["theta_deg"] is None or c["phi_deg"] is None:
            raise ConfigError("planar angles need both theta_deg and phi_deg")
        return SpatialAoA.from_angles(math.radians(c["theta_deg"]), math.radians(c["phi_deg"]))
    return SpatialAoA(0.61 if c["u"] is None else c["u"], 0.71 if c["v"] is None else c["v"])


def sca_settings(c: dict) -> ScaSettings:
    return ScaSettings(eps_outer=c["eps"], eps_x=c["eps_x"], eps_y=c["eps_y"], max_outer=c["max_outer"],
                       max_inner=c["max_inner"], velocity_group_size=c["k"], solver_tol=c["solver_tol"],
                       init=c["init"], favor_spread=c["favor_spread"])


def mle_settings(c: dict) -> MleSettings:
    return MleSettings(coarse_grid_step=c["grid_step"], coarse_grid_step_2d=c["grid_step_2d"],
                       refine_levels=c["refine_levels"], trials=c["trials"], seed=c["seed"],
                       workers=c["workers"])


# ----------------------------------------------------------------------------
# output helpers


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and not isinstance(obj, (str, int)):
        return obj.value
    return obj


class Table:
    def __init__(self, name: str, columns: list[str]):
        self.name = name
        self.columns = columns
        self.rows: list[list] = []

    def add(self, *row):
        self.rows.append(list(row))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION} {self.name}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def to_json(self):
        return {"columns": self.columns, "rows": _jsonable(self.rows)}


class Output:
    """Collects tables and a report, then writes them in the chosen format."""

    def __init__(self, path: str | None, fmt: str, command: str, config: dict):
        self.path = Path(path) if path else None
        self.fmt = fmt
        self.command = command
        self.config = config
        self.tables: list[Table] = []
        self.report: dict = {}

    def _sidecar(self, suffix: str) -> Path:
        return self.path.with_name(self.path.name + suffix)

    def write(self, stdout):
        doc = {"format": CSV_VERSION, "command": self.command, "version": __version__,
               "config": _jsonable(self.config), "report": _jsonable(self.report)}
        if self.fmt == "json":
            doc["tables"] = {t.name: t.to_json() for t in self.tables}
            text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
            if self.path is None:
                stdout.write(text)
            else:
                self.path.write_text(text)
            return
        if self.path is None:
            for t in self.tables:
                stdout.write(t.to_csv())
            if not self.tables:
                stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
            return
        if self.tables:
            self.path.write_text(self.tables[0].to_csv())
            for t in self.tables[1:]:
                self._sidecar(f".{t.name}.csv").write_text(t.to_csv())
            self._sidecar(".json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            self.path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------
# trajectories by name


TRAJ_1D = ("proposed", "move_forward", "back_and_forth", "fpa")
TRAJ_2D = ("proposed", "circle", "upa", "fpa")


def _fpa_setup(cfg: SensingConfig, M: int):
    """Fixed array summed over snapshots: M positions at N-fold SNR."""
    c = cfg.replace(num_snapshots=M, snr_linear=cfg.snr_linear * cfg.num_snapshots)
    if cfg.is_2d:
        r = upa_positions(M, cfg.wavelength_m)
        return Trajectory2D(r, np.zeros((2, M - 1))), c
    x = ula_positions(M, cfg.wavelength_m)
    return Trajectory1D(x, np.zeros(M - 1)), c


def build_trajectory(kind: str, cfg: SensingConfig, c: dict):
    """Return ``(trajectory, config_for_evaluation)`` for a named scheme."""
    if cfg.is_2d:
        if kind == "proposed":
            return optimize_2d(cfg, sca_settings(c)).trajectory, cfg
        if kind == "circle":
            return benchmark_2d("circle", cfg), cfg
        if kind == "upa":
            return benchmark_2d("upa", cfg, strict=False), cfg
    else:
        if kind == "proposed":
            return optimal_trajectory(cfg), cfg
        if kind in ("move_forward", "back_and_forth"):
            return benchmark_1d(kind, cfg), cfg
    if kind == "fpa":
        return _fpa_setup(cfg, c["m_fpa"])
    raise ConfigError(f"unknown trajectory kind {kind!r} for {'2d' if cfg.is_2d else '1d'}")


def _crb_of(traj, cfg):
    return crb_2d(traj, cfg) if isinstance(traj, Trajectory2D) else crb_1d(traj, cfg)


def load_trajectory(path: str, cfg: SensingConfig):
    """Read positions back from an ``optimize1d``/``optimize2d`` CSV file."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    if len(rows) < 2:
        raise ConfigError(f"{path}: no data rows")
    col = {h: i for i, h in enumerate(rows[0])}
    try:
        if "x_n" not in col:
            raise ConfigError(f"{path}: no x_n column")
        x = np.array([float(r[col["x_n"]]) for r in rows[1:]])
        if "y_n" in col:
            y = np.array([float(r[col["y_n"]]) for r in rows[1:]])
            return Trajectory2D.from_positions(np.vstack([x, y]), cfg.snapshot_interval_s)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"cannot parse trajectory file {path}: {exc}") from exc
    return Trajectory1D.from_positions(x, cfg.snapshot_interval_s)


# ----------------------------------------------------------------------------
# commands


def cmd_optimize1d(c, out: Output):
    cfg = sensing_config(c, "1d")
    traj = optimal_trajectory(cfg)
    rep = crb_1d(traj, cfg)
    tab = Table("trajectory", ["n", "t_n", "x_n", "v_n"])
    x, v = traj.positions_m, traj.velocities_mps
    for i in range(cfg.num_snapshots):
        tab.add(i + 1, i * cfg.snapshot_interval_s, x[i], v[i] if i < v.size else None)
    out.tables.append(tab)
    out.report = {"regime": rep.regime.value, "var": rep.var_x, "crb": rep.crb_u,
                  "effective_aperture_m": rep.effective_aperture_m, "num_snapshots": cfg.num_snapshots}


def cmd_optimize2d(c, out: Output):
    cfg = sensing_config(c, "2d")
    try:
        res = optimize_2d(cfg, sca_settings(c))
        traj, trace, failure = res.trajectory, res.trace, None
    except ScaSolverError as exc:
        traj, trace, failure = exc.trajectory, exc.trace, str(exc)
    tab = Table("trajectory", ["n", "t_n", "x_n", "y_n", "vx_n", "vy_n"])
    r, v = traj.positions_m, traj.velocities_mps
    for i in range(cfg.num_snapshots):
        last = i >= v.shape[1]
        tab.add(i + 1, i * cfg.snapshot_interval_s, r[0, i], r[1, i],
                None if last else v[0, i], None if last else v[1, i])
    tr = Table("trace", ["outer_iter", "delta"])
    for k, d in enumerate(trace.deltas):
        tr.add(k, d)
    out.tables += [tab, tr]
    rep = crb_2d(traj, cfg)
    out.report = {"status": trace.status, "delta": trace.deltas[-1], "crb_u": rep.crb_u,
                  "crb_v": rep.crb_v, "crb_max": rep.crb_max,
                  "boundary_contact_fraction": boundary_contact_fraction(traj, cfg),
                  "outer_iterations": len(trace.deltas) - 1}
    if failure:
        out.report["error"] = failure
        raise ScaSolverError(failure)


def cmd_sweep(c, out: Output):
    values = c["values"]
    if not values:
        raise ConfigError("sweep needs a non-empty 'values' list")
    var = c["sweep"].lower()
    if var not in ("t", "n", "snr_db", "a"):
        raise ConfigError("sweep must be one of t, n, snr_db, a")
    dim = c["dim"]
    curves = c["curves"] or (["proposed", "move_forward", "back_and_forth"] if dim == "1d"
                             else ["proposed", "circle", "upa"])
    allowed = TRAJ_1D if dim == "1d" else TRAJ_2D
    bad = [k for k in curves if k not in allowed]
    if bad:
        raise ConfigError(f"unknown curves for {dim}: {bad}")
    cols = [var] + [f"crb_{k}" for k in curves]
    if c["mse"]:
        cols += [f"mse_{k}" for k in curves]
    tab = Table("sweep", cols)
    # resolve every point first so bad values fail before any computation
    points = []
    for val in values:
        cc = dict(c)
        if var == "t":
            cc["t"], cc["n"] = val, None
        elif var == "n":
            cc["n"], cc["t"] = int(val), None
        elif var == "snr_db":
            cc["snr_db"] = val
        else:
            cc["region"] = [val] if dim == "1d" else [val, val]
        points.append(sensing_config(cc, dim))
    aoa = aoa_from(c, dim)
    ms = mle_settings(c)
    for val, cfg in zip(values, points):
        crbs, mses = [], []
        for kind in curves:
            traj, ecfg = build_trajectory(kind, cfg, c)
            if kind == "fpa":
                crbs.append(crb_fpa_ula(c["m_fpa"], cfg) if dim == "1d" else crb_fpa_upa(c["m_fpa"], cfg))
            else:
                crbs.append(_crb_of(traj, ecfg).crb_max if dim == "2d" else _crb_of(traj, ecfg).crb_u)
            if c["mse"]:
                mc = monte_carlo(traj, aoa, ecfg, ms)
                mses.append(mc.mse_u if dim == "1d" else max(mc.mse_u, mc.mse_v))
        tab.add(val, *crbs, *mses)
    out.tables.append(tab)
    out.report = {"points": len(values), "curves": curves}


def cmd_simulate(c, out: Output):
    dim = c["dim"]
    cfg = sensing_config(c, dim)
    aoa = aoa_from(c, dim)
    traj, ecfg = _traj_for(c, cfg)
    mc = monte_carlo(traj, aoa, ecfg, mle_settings(c), keep_estimates=True)
    tab = Table("estimates", ["trial", "u_hat"] + (["v_hat"] if dim == "2d" else []))
    est = np.atleast_2d(mc.estimates.T).T if dim == "1d" else mc.estimates
    for i, row in enumerate(est):
        tab.add(i, *row)
    out.tables.append(tab)
    out.report = mc.to_dict()


def _traj_for(c, cfg):
    if c["traj_file"]:
        return load_trajectory(c["traj_file"], cfg), cfg
    return build_trajectory(c["trajectory"], cfg, c)


def cmd_correlation(c, out: Output):
    dim = c["dim"]
    cfg = sensing_config(c, dim)
    aoa = aoa_from(c, dim)
    kinds = c["kinds"] or (["proposed", "move_forward", "back_and_forth"] if dim == "1d"
                           else ["proposed", "circle", "upa"])
    allowed = TRAJ_1D[:3] if dim == "1d" else TRAJ_2D[:3]
    bad = [k for k in kinds if k not in allowed]
    if bad:
        raise ConfigError(f"unknown correlation kinds for {dim}: {bad}")
    summary = {}
    if dim == "1d":
        tab = Table("correlation", ["kind", "u", "q"])
        step = c["probe_step"] or 1e-4
        for kind in kinds:
            traj, _ = build_trajectory(kind, cfg, c)
            pat = correlation_1d(traj, aoa.u, cfg, step=step)
            for g, q in zip(pat.grid, pat.values):
                tab.add(kind, g, q)
            summary[kind] = {"main_lobe_width": pat.main_lobe_width, "peak_sidelobe": pat.peak_sidelobe,
                             "q_true": pat.peak_value}
    else:
        tab = Table("correlation", ["kind", "u", "v", "q"])
        step = c["probe_step"] or 1e-2
        for kind in kinds:
            traj, _ = build_trajectory(kind, cfg, c)
            pat = correlation_2d(traj, aoa, cfg, step=step)
            for i, gu in enumerate(pat.grid_u):
                for j, gv in enumerate(pat.grid_v):
                    tab.add(kind, gu, gv, pat.values[i, j])
            summary[kind] = {"half_power_area": pat.half_power_area, "main_lobe_width_u": pat.width_u,
                             "main_lobe_width_v": pat.width_v, "q_true": pat.peak_value}
    out.tables.append(tab)
    out.report = summary


def cmd_crossover(c, out: Output):
    dim = c["dim"]
    lam, vm = c["wavelength"], c["vmax"]
    cfg = SensingConfig(wavelength_m=lam, snapshot_interval_s=c["ts"], num_snapshots=1, max_speed_mps=vm,
                        snr_linear=10.0 ** (c["snr_db"] / 10.0),
                        region=Region1D(1.0) if dim == "1d" else Region2D(1.0, 1.0))
    if c["m"] < 1:
        raise ConfigError("m must be >= 1")
    out.report = verify_crossover(dim, c["m"], cfg).to_dict()


def cmd_crb(c, out: Output):
    dim = c["dim"]
    cfg = sensing_config(c, dim)
    traj, ecfg = _traj_for(c, cfg)
    out.report = _crb_of(traj, ecfg).to_dict()


COMMANDS = {
    "optimize1d": cmd_optimize1d,
    "optimize2d": cmd_optimize2d,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "correlation": cmd_correlation,
    "crossover": cmd_crossover,
    "crb": cmd_crb,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matraj", description="Moving-antenna trajectory design and AoA experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="key=value or JSON config file")
        s.add_argument("--out", help="output path (default: standard output)")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--seed", type=int)
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        s.add_argument("--wavelength", type=float, help="wavelength in metres")
        s.add_argument("--ts", type=float, help="snapshot interval in seconds")
        s.add_argument("--n", type=int, help="number of snapshots")
        s.add_argument("--vmax", type=float, help="speed limit in m/s")
        s.add_argument("--region", help="segment length, or WIDTHxHEIGHT, in metres")
        s.add_argument("--snr-db", type=float, dest="snr_db")
        s.add_argument("--m-fpa", type=int, dest="m_fpa", help="fixed-array element count")
    return p


class _ArgError(Exception):
    pass


def _error(stream, code: int, kind: str, message: str) -> int:
    stream.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _error(stderr, EXIT_CONFIG, "usage", "invalid command line")

    try:
        raw = {}
        if args.config:
            raw.update(parse_config_text(Path(args.config).read_text()))
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            raw[k.strip().lower().replace("-", "_")] = v.strip()
        for flag, key in FLAG_KEYS.items():
            val = getattr(args, flag)
            if val is not None:
                raw[key] = val
        if args.n is not None:
            raw.pop("t", None)
        conf = resolve(raw)
        out = Output(args.out, args.format, args.command, conf)
        if out.path is not None and not out.path.parent.exists():
            raise OSError(f"output directory {out.path.parent} does not exist")
        COMMANDS[args.command](conf, out)
        out.write(stdout)
    except ScaSolverError as exc:
        try:
            out.write(stdout)
        except OSError:
            pass
        return _error(stderr, EXIT_SOLVER, "solver_failure", str(exc))
    except OSError as exc:
        return _error(stderr, EXIT_IO, "io", str(exc))
    except (ConfigError, ValueError, TypeError) as exc:
        return _error(stderr, EXIT_CONFIG, "config", str(exc))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
