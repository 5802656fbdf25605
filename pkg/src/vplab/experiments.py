"""Reproducible experiment runs: parameter validation, dispatch, manifests and fits.

A run directory ``<outdir>/<name>`` receives

* ``manifest.txt``: flat ``key=value`` lines (see ``MANIFEST_FIELDS``),
* the CSV and binary outputs of the command,
* ``plot.py``: a plotting script that reads only the CSVs,
* ``.lock`` while the run is in progress.

Numeric outputs depend only on the resolved parameters and the seed.
"""

from __future__ import annotations

import hashlib
import os
import platform
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__

COMMANDS = ("pv", "steady", "fnu", "visc", "scaling")
SCALING_KINDS = ("residual", "thm1", "app3", "fnu")

MANIFEST_FIELDS = {
    "name": "run name (directory name under outdir)",
    "command": "one of pv, steady, fnu, visc, scaling",
    "seed": "integer seed for bootstrap resampling",
    "version": "package version",
    "code_hash": "sha256 over the package sources (first 16 hex digits)",
    "python": "interpreter version",
    "numpy": "numpy version",
    "scipy": "scipy version",
    "param.<key>": "resolved parameter value, defaults included",
    "output.<k>": "file written by the run, relative to the run directory",
    "fit.<label>.<field>": "power-law fit: abscissa, exponent, ci_low, ci_high, n_points",
    "result.<key>": "scalar summary value",
    "started": "UTC start time (ISO 8601)",
    "wall_time": "seconds spent in the run",
    "status": "ok",
}


class ValidationError(ValueError):
    """Bad or missing experiment parameters."""


# -- parameter schema ----------------------------------------------------------------

REQUIRED = object()


def _float(v) -> float:
    return float(v)


def _int(v) -> int:
    f = float(v)
    if f != int(f):
        raise ValueError(f"not an integer: {v!r}")
    return int(f)


def _floats(v) -> tuple:
    if isinstance(v, (list, tuple)):
        return tuple(float(x) for x in v)
    return tuple(float(x) for x in str(v).split(",") if x.strip())


def _grid(v) -> tuple:
    parts = _floats(v)
    if len(parts) != 2:
        raise ValueError("grid must be 'n,L'")
    return (_int(parts[0]), parts[1])


def _omega(v):
    if str(v).strip().lower() == "auto":
        return "auto"
    return float(v)


def _text(v) -> str:
    return str(v).strip()


def _kind(v) -> str:
    v = str(v).strip().lower()
    if v not in SCALING_KINDS:
        raise ValueError(f"kind must be one of {', '.join(SCALING_KINDS)}")
    return v


def _orders(v) -> tuple:
    if str(v).strip().lower() in ("", "none", "leading"):
        return ()
    return tuple(_int(x) for x in _floats(v))


_VISC = {
    "alpha": (_float, 1.0),
    "d": (_float, 1.0),
    "t_start": (_float, 1.0),
    "grid": (_grid, (512, 2.0)),
    "omega": (_omega, "auto"),
}

SCHEMA = {
    "pv": {
        "vortices": (_text, REQUIRED),
        "t_end": (_float, REQUIRED),
        "tol": (_float, 1e-10),
        "samples": (_int, 0),
    },
    "steady": {
        "d": (_floats, REQUIRED),
        "profile": (_text, "gaussian"),
        "alpha": (_float, 1.0),
        "epsilon": (_float, 0.025),
        "pair_d": (_float, 1.0),
        "grid": (_grid, (512, 1.0)),
    },
    "fnu": {
        "nu_over_alpha": (_floats, REQUIRED),
        "alpha": (_float, 1.0),
    },
    "visc": {
        "nu": (_float, REQUIRED),
        "t_end": (_float, REQUIRED),
        "snap_every": (_float, 0.0),
        "snapshots": (_floats, ()),
        "dump": (_int, 1),
        **_VISC,
    },
}

# scaling: shared key plus per-kind keys
SCALING_SCHEMA = {
    "residual": {
        "d": (_floats, REQUIRED),
        "profile": (_text, "gaussian"),
        "orders": (_orders, (2, 3, 4)),
    },
    "thm1": {
        "nu_over_alpha": (_float, REQUIRED),
        "tau_range": (_floats, (0.002, 0.02)),
        "samples": (_int, 11),
        **_VISC,
    },
    "fnu": {
        "nu_over_alpha": (_floats, REQUIRED),
        "alpha": (_float, 1.0),
    },
}
SCALING_SCHEMA["app3"] = SCALING_SCHEMA["thm1"]


def schema_for(command: str, params: dict) -> dict:
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if command != "scaling":
        return SCHEMA[command]
    if "kind" not in params:
        raise ValidationError("missing required parameter(s): kind")
    try:
        kind = _kind(params["kind"])
    except ValueError as exc:
        raise ValidationError(f"kind: {exc}") from None
    return {"kind": (_kind, REQUIRED), **SCALING_SCHEMA[kind]}


def resolve_params(command: str, params: dict) -> dict:
    """Parse, default and type-check a flat parameter table."""
    schema = schema_for(command, params)
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise ValidationError(f"unknown parameter(s) for {command}: {', '.join(unknown)}")
    missing = [k for k, (_, dflt) in schema.items() if dflt is REQUIRED and k not in params]
    if missing:
        raise ValidationError(f"missing required parameter(s): {', '.join(missing)}")
    out = {}
    for key, (conv, dflt) in schema.items():
        if key not in params:
            out[key] = dflt
            continue
        try:
            out[key] = conv(params[key])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{key}: {exc}") from None
    _check_preconditions(command, out)
    return out


def _positive(p, *keys):
    for k in keys:
        if not p[k] > 0:
            raise ValidationError(f"{k} must be positive")


def _check_grid(p):
    n, L = p["grid"]
    if n < 16 or n & (n - 1):
        raise ValidationError("grid: n must be a power of two >= 16")
    if not L > 0:
        raise ValidationError("grid: L must be positive")


def _check_preconditions(command: str, p: dict) -> None:
    if command == "pv":
        _positive(p, "t_end", "tol")
        if p["samples"] < 0:
            raise ValidationError("samples must be nonnegative")
        if not Path(p["vortices"]).is_file():
            raise ValidationError(f"vortices: no such file {p['vortices']!r}")
    elif command == "steady":
        if not p["d"] or min(p["d"]) <= 0:
            raise ValidationError("d must be a nonempty list of positive separations")
        _positive(p, "alpha", "epsilon", "pair_d")
        if not p["epsilon"] < p["pair_d"] / 4:
            raise ValidationError("epsilon must be below pair_d/4 (separated cores)")
        _check_grid(p)
    elif command == "fnu" or (command == "scaling" and p["kind"] == "fnu"):
        if not p["nu_over_alpha"] or min(p["nu_over_alpha"]) <= 0:
            raise ValidationError("nu_over_alpha must be a nonempty list of positive values")
        _positive(p, "alpha")
    elif command == "visc":
        _positive(p, "nu", "alpha", "d", "t_start")
        if not p["t_end"] > p["t_start"]:
            raise ValidationError("t_end must exceed t_start")
        if p["snap_every"] < 0:
            raise ValidationError("snap_every must be nonnegative")
        _check_grid(p)
    elif p["kind"] == "residual":
        if len(p["d"]) < 4 or min(p["d"]) <= 0:
            raise ValidationError("d needs at least four positive separations")
        if any(o not in (2, 3, 4) for o in p["orders"]):
            raise ValidationError("orders must be drawn from 2, 3, 4")
    else:
        _positive(p, "nu_over_alpha", "alpha", "d", "t_start")
        lo, hi = (p["tau_range"] + (0.0, 0.0))[:2]
        if len(p["tau_range"]) != 2 or not 0 < lo < hi:
            raise ValidationError("tau_range must be 'lo,hi' with 0 < lo < hi")
        if p["samples"] < 4:
            raise ValidationError("samples must be at least 4")
        _check_grid(p)


# -- flat config files ---------------------------------------------------------------------

def parse_config(text: str) -> dict:
    """``key = value`` lines; '#' starts a comment; later keys override earlier ones."""
    out = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"config line {num}: empty key")
        out[key.replace("-", "_")] = value
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


# -- power-law fits ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFitResult:
    abscissa: str
    exponent: float
    ci_low: float
    ci_high: float
    n_points: int
    prefactor: float = float("nan")

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_manifest(self, label: str) -> list:
        return [f"fit.{label}.abscissa={self.abscissa}",
                f"fit.{label}.exponent={self.exponent:.17g}",
                f"fit.{label}.ci_low={self.ci_low:.17g}",
                f"fit.{label}.ci_high={self.ci_high:.17g}",
                f"fit.{label}.n_points={self.n_points}"]


def _slopes(lx: np.ndarray, ly: np.ndarray):
    """Least-squares slopes along the last axis (rows are samples)."""
    mx = lx.mean(axis=-1, keepdims=True)
    my = ly.mean(axis=-1, keepdims=True)
    sxx = np.sum((lx - mx) ** 2, axis=-1)
    sxy = np.sum((lx - mx) * (ly - my), axis=-1)
    return sxy, sxx


def fit_power_law(x, y, abscissa: str = "x", seed: int = 0,
                  resamples: int = 1000) -> ScalingFitResult:
    """Fit y = C x^p by least squares in log-log with a bootstrap 95% interval."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError("x and y differ in length")
    if x.size < 4:
        raise ValueError("a power-law fit needs at least 4 points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("fit data must be finite")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("fit data must be strictly positive")
    lx, ly = np.log(x), np.log(y)
    sxy, sxx = _slopes(lx, ly)
    if sxx <= 0:
        raise ValueError("abscissa values are all equal")
    p = float(sxy / sxx)
    c = float(np.exp(ly.mean() - p * lx.mean()))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.size, size=(resamples, x.size))
    bxy, bxx = _slopes(lx[idx], ly[idx])
    ok = bxx > 1e-14 * sxx
    boot = bxy[ok] / bxx[ok]
    lo, hi = np.percentile(boot, [2.5, 97.5])
    # the point estimate always lies in the reported interval
    lo, hi = min(float(lo), p), max(float(hi), p)
    return ScalingFitResult(abscissa, p, lo, hi, int(x.size), c)


# -- experiment runs ----------------------------------------------------------------------------

@dataclass
class ExperimentSpec:
    name: str
    command: str
    params: dict = field(default_factory=dict)
    outdir: Path = Path("runs")
    seed: int = 0

    def __post_init__(self):
        self.outdir = Path(self.outdir)
        if not self.name or any(c in self.name for c in "/\\") or self.name in (".", ".."):
            raise ValidationError(f"invalid run name {self.name!r}")
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        self.params = {k.replace("-", "_"): v for k, v in self.params.items()}


@dataclass
class RunOutputs:
    files: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)     # (csv, x column, y columns, loglog)


def code_hash() -> str:
    h = hashlib.sha256()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, float):
        # shortest text that round-trips
        s = repr(float(v))
        return s[:-2] if s.endswith(".0") else s
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(float(v)) if not isinstance(v, str) else v for v in row) + "\n")


class _RunLock:
    def __init__(self, run_dir: Path):
        self.path = run_dir / ".lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ValidationError(f"run directory {self.path.parent} is locked by another process") from None
        with os.fdopen(fd, "w") as fh:
            fh.write(f"{os.getpid()}\n")
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)
        return False


def run_experiment(spec: ExperimentSpec, log=None) -> Path:
    """Validate, run and record one experiment; returns the run directory."""
    params = resolve_params(spec.command, spec.params)
    run_dir = spec.outdir / spec.name
    run_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with _RunLock(run_dir):
        wall = time.perf_counter()
        out = _DISPATCH[spec.command](params, run_dir, spec.seed, log or (lambda msg: None))
        wall = time.perf_counter() - wall
        if out.plots:
            (run_dir / "plot.py").write_text(_plot_script(out.plots))
            out.files.append("plot.py")
        lines = [f"name={spec.name}", f"command={spec.command}", f"seed={spec.seed}",
                 f"version={__version__}", f"code_hash={code_hash()}",
                 f"python={platform.python_version()}", f"numpy={np.__version__}",
                 f"scipy={scipy.__version__}"]
        lines += [f"param.{k}={_fmt(v)}" for k, v in params.items()]
        lines += [f"output.{i}={f}" for i, f in enumerate(out.files)]
        for label, fit in out.fits.items():
            lines += fit.to_manifest(label)
        lines += [f"result.{k}={_fmt(v)}" for k, v in out.results.items()]
        lines += [f"started={started}", f"wall_time={wall:.3f}", "status=ok"]
        (run_dir / "manifest.txt").write_text("\n".join(lines) + "\n")
    return run_dir


def read_manifest(path) -> dict:
    return parse_config(Path(path).read_text())


def _plot_script(plots) -> str:
    body = ["import csv", "import matplotlib.pyplot as plt", "", "",
            "def column(path, name):",
            "    with open(path) as fh:",
            "        return [float(row[name]) for row in csv.DictReader(fh)]", "", ""]
    for k, (csv_name, xcol, ycols, loglog) in enumerate(plots):
        body.append("fig, ax = plt.subplots()")
        for yc in ycols:
            body.append(f"ax.plot(column({csv_name!r}, {xcol!r}), column({csv_name!r}, {yc!r}), 'o-', label={yc!r})")
        if loglog:
            body += ["ax.set_xscale('log')", "ax.set_yscale('log')"]
        body += [f"ax.set_xlabel({xcol!r})", "ax.legend()",
                 f"fig.savefig({csv_name.rsplit('.', 1)[0] + '.png'!r}, dpi=150)", ""]
    return "\n".join(body)


# -- command implementations ---------------------------------------------------------------------

def _run_pv(p, run_dir, seed, log) -> RunOutputs:
    from .point_vortex import integrate, min_distance_and_turnover, read_vortices

    state = read_vortices(Path(p["vortices"]).read_text())
    t_eval = None
    if p["samples"] > 0:
        t_eval = np.linspace(state.time, p["t_end"], p["samples"] + 1)
    traj = integrate(state, p["t_end"], tol=p["tol"], t_eval=t_eval)
    (run_dir / "trajectory.csv").write_text(traj.to_csv())
    out = RunOutputs(files=["trajectory.csv"])
    ints = traj.integrals()
    ref = np.maximum(np.abs(ints[0]), 1e-300)
    drift = np.max(np.abs(ints - ints[0]) / ref, axis=0)
    out.results.update(steps=float(traj.steps), rejected=float(traj.rejected),
                       drift_H=float(drift[0]), drift_P1=float(drift[1]),
                       drift_P2=float(drift[2]), drift_I=float(drift[3]))
    if state.n > 1:
        dmin, turnover = min_distance_and_turnover(traj)
        out.results.update(min_distance=dmin, turnover=turnover)
    out.plots.append(("trajectory.csv", "x1", ["y1"], False))
    return out


def _run_steady(p, run_dir, seed, log) -> RunOutputs:
    from .biot_savart import GridSpec
    from .radial import check_admissibility, profile_from_name
    from .steady_state import (build_expansion, pair_defect, rescaled_pair_field, residual,
                               rotation_rate)

    profile = profile_from_name(p["profile"])
    out = RunOutputs()
    (run_dir / "admissibility.txt").write_text(check_admissibility(profile).to_text() + "\n")
    out.files.append("admissibility.txt")
    exp = build_expansion(profile, d=p["d"][0], alpha=p["alpha"])
    names = ("omega2", "omega3", "omega4_mode4", "omega4_mode2")
    for name, (_, sec) in zip(names, exp.sector_tables()):
        (run_dir / f"sector_{name}.csv").write_text(sec.to_csv())
        out.files.append(f"sector_{name}.csv")
    rows = []
    for d in p["d"]:
        log(f"residual at d={d:g}")
        rep = residual(exp.with_d(d))
        lead = residual(exp.with_d(d).truncated(()))
        om, defect = rotation_rate(profile, d)
        rows.append((d, rep.norm_X, lead.norm_X, om, defect))
    _write_csv(run_dir / "residual.csv",
               ["d", "residual_norm", "leading_residual_norm", "rotation_rate", "rotation_defect"], rows)
    out.files.append("residual.csv")
    out.plots.append(("residual.csv", "d", ["residual_norm", "leading_residual_norm"], True))
    n, L = p["grid"]
    spec = GridSpec(n, L)
    pd = pair_defect(exp, p["alpha"], p["pair_d"], p["epsilon"], spec)
    rescaled_pair_field(exp, p["alpha"], p["pair_d"], p["epsilon"], spec).dump(run_dir / "pair_field.vpf")
    out.files.append("pair_field.vpf")
    out.results.update(pair_max_defect=pd.max_defect, pair_omega_lab=pd.omega_lab,
                       pair_integral=pd.integral)
    return out


def _fnu_sweep(p, run_dir, seed, out: RunOutputs) -> None:
    from .fokker_planck import solve_F_nu
    from .linear_operator import norm_X
    from .radial import make_gaussian

    profile = make_gaussian()
    alpha = p["alpha"]
    F0 = solve_F_nu(0.0, alpha, profile).F_nu
    rows = []
    for ratio in p["nu_over_alpha"]:
        corr = solve_F_nu(ratio * alpha, alpha, profile)
        diff = norm_X(corr.F_nu - F0, profile)
        rows.append((ratio, ratio / (1 + ratio), diff, corr.rcond))
    rows.sort()
    _write_csv(run_dir / "fnu.csv", ["nu_over_alpha", "nu_over_nu_plus_alpha", "diff_norm", "rcond"], rows)
    out.files.append("fnu.csv")
    out.plots.append(("fnu.csv", "nu_over_nu_plus_alpha", ["diff_norm"], True))
    out.results["F0_norm"] = norm_X(F0, profile)
    if len(rows) >= 4:
        arr = np.array(rows)
        out.fits["diff_norm"] = fit_power_law(arr[:, 1], arr[:, 2], "nu/(nu+alpha)", seed)


def _run_fnu(p, run_dir, seed, log) -> RunOutputs:
    out = RunOutputs()
    _fnu_sweep(p, run_dir, seed, out)
    return out


def _visc_run(p, nu, t_end, snapshots, run_dir, log, dump: bool):
    from .fokker_planck import solve_F_nu
    from .radial import make_gaussian
    from .steady_state import build_expansion
    from .viscous import SolverConfig, error_metrics, initial_pair, run

    alpha, d = p["alpha"], p["d"]
    n, L = p["grid"]
    omega = alpha / (np.pi * d * d) if p["omega"] == "auto" else p["omega"]
    cfg = SolverConfig(nu=nu, Omega=omega, n=n, L=L, t_start=p["t_start"], t_end=t_end,
                       snapshot_times=tuple(snapshots))
    w0 = initial_pair(alpha, d, nu, p["t_start"], cfg.spec)
    profile = make_gaussian()
    expansion = build_expansion(profile)
    F = solve_F_nu(nu, alpha, profile)
    res = run(cfg, w0, progress=lambda t, s: log(f"t={t:.6g} steps={s}"))
    rows, files = [], []
    for k, (t, fld) in enumerate(zip(res.times, res.snapshots)):
        m = error_metrics(fld, alpha, nu, t, d, expansion, F)
        rows.append((m.t, m.nut_over_d2, m.err_thm1, m.err_app1, m.err_app3))
        if dump:
            fld.dump(run_dir / f"snap_{k:04d}.vpf")
            files.append(f"snap_{k:04d}.vpf")
    _write_csv(run_dir / "metrics.csv", ["t", "nut_over_d2", "err_thm1", "err_app1", "err_app3"], rows)
    return np.array(rows), ["metrics.csv"] + files, res


def _run_visc(p, run_dir, seed, log) -> RunOutputs:
    t0, t1 = p["t_start"], p["t_end"]
    snaps = list(p["snapshots"])
    if p["snap_every"] > 0:
        k = np.arange(1, int(np.floor((t1 - t0) / p["snap_every"] * (1 + 1e-12))) + 1)
        snaps += list(t0 + k * p["snap_every"])
    snaps = sorted({round(s, 12) for s in snaps if t0 < s <= t1})
    rows, files, res = _visc_run(p, p["nu"], t1, snaps, run_dir, log, bool(p["dump"]))
    out = RunOutputs(files=files)
    out.results.update(steps=float(res.steps), dt_min=res.dt_min, dt_max=res.dt_max,
                       circulation_drift=float(np.max(np.abs(np.array(res.circulation) - res.circulation[0]))))
    out.plots.append(("metrics.csv", "nut_over_d2", ["err_thm1", "err_app1", "err_app3"], True))
    return out


def _run_scaling(p, run_dir, seed, log) -> RunOutputs:
    out = RunOutputs()
    kind = p["kind"]
    if kind == "fnu":
        _fnu_sweep(p, run_dir, seed, out)
        return out
    if kind == "residual":
        from .radial import profile_from_name
        from .steady_state import build_expansion, residual

        exp = build_expansion(profile_from_name(p["profile"])).truncated(p["orders"])
        rows = []
        for d in sorted(p["d"]):
            log(f"residual at d={d:g}")
            rows.append((d, residual(exp.with_d(d)).norm_X))
        _write_csv(run_dir / "residual.csv", ["d", "residual_norm"], rows)
        out.files.append("residual.csv")
        arr = np.array(rows)
        out.fits["residual_norm"] = fit_power_law(arr[:, 0], arr[:, 1], "d", seed)
        out.plots.append(("residual.csv", "d", ["residual_norm"], True))
        return out
    # thm1 and app3 share one viscous run over log-spaced nu t/d^2
    from .viscous import app3_below_thm1

    nu = p["nu_over_alpha"] * p["alpha"]
    d = p["d"]
    lo, hi = p["tau_range"]
    times = np.geomspace(lo, hi, p["samples"]) * d * d / nu
    if times[0] <= p["t_start"]:
        raise ValidationError("tau_range starts before t_start: lower t_start or raise tau_range")
    rows, files, _ = _visc_run(p, nu, float(times[-1]), times, run_dir, log, dump=False)
    out.files += files
    out.fits["err_thm1"] = fit_power_law(rows[:, 1], rows[:, 2], "nu*t/d^2", seed)
    out.fits["err_app3"] = fit_power_law(rows[:, 1], rows[:, 4], "nu*t/d^2", seed)
    out.results["app3_below_thm1"] = float(all(app3_below_thm1(a, b) for a, b in rows[:, [2, 4]]))
    out.plots.append(("metrics.csv", "nut_over_d2", ["err_thm1", "err_app3"], True))
    return out


_DISPATCH = {"pv": _run_pv, "steady": _run_steady, "fnu": _run_fnu,
             "visc": _run_visc, "scaling": _run_scaling}
