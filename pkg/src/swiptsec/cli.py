"""Command-line experiment runner: single points, sweeps, figure presets, optimization.

Every table is written as CSV preceded by ``#`` comment lines that record
the resolved configuration.  Numbers use 12 significant digits and never
depend on the locale.  Worker count and wall time are kept out of the file
so that runs are byte-reproducible.
"""
from __future__ import annotations

import argparse
import io
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import energy, kernels, secrecy
from .montecarlo import rf_power_empirical
from .optimize import (InfeasibleError, maximize_secrecy, operating_point, secrecy_at)
from .sysmodel import (ConfigError, SystemConfig, config_from_mapping, draw_scenario,
                       load_config, table1_config, tomllib)

PARAMS = ("M", "theta", "rho_k", "zeta", "d_k", "d_w")
METRICS = ("secrecy", "user_rate", "eve_rate", "harvest_user", "harvest_eve", "d_theta")
COLUMNS = ("series", "closed_form", "mc_mean", "mc_stderr", "asymptotic", "status")
DEFAULT_TRIALS = 10_000


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        return "" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".12g")


def _fmt_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(fmt(e) for e in v) + "]"
    return fmt(v)


@dataclass
class SweepSpec:
    param: str
    values: list
    config: SystemConfig = field(default_factory=table1_config)
    metric: str = "secrecy"
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    rho_k: float = 0.4
    theta: float = 0.7
    k: int = 0
    mc: bool = True
    label: str = ""

    def __post_init__(self):
        if self.param not in PARAMS:
            raise ConfigError(f"swept parameter must be one of {PARAMS}, got {self.param!r}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.values:
            raise ConfigError("empty value list")
        if not 0 <= self.k < self.config.K:
            raise ConfigError(f"user index {self.k} out of range")
        checks = {"M": lambda v: v >= 1 and float(v).is_integer(),
                  "theta": lambda v: 0 <= v <= 1, "zeta": lambda v: 0 <= v <= 1,
                  "rho_k": lambda v: 0 < v < 1, "d_k": lambda v: v > 0, "d_w": lambda v: v > 0}
        bad = [v for v in self.values if not checks[self.param](v)]
        if bad:
            raise ConfigError(f"values outside the domain of {self.param}: {bad}")
        self.label = self.label or self.metric


def load_sweep_spec(path, base: SystemConfig | None = None) -> SweepSpec:
    """Read a TOML sweep spec; ``config`` (path, relative to the spec) and ``[system]`` set the fixed config."""
    path = Path(path)
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    cfg = base or table1_config()
    if "config" in data:
        cfg = load_config(path.parent / data.pop("config"), cfg)
    if "system" in data:
        cfg = config_from_mapping(data.pop("system"), cfg)
    known = {"param", "values", "metric", "trials", "seed", "rho_k", "theta", "k", "mc", "label"}
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown sweep keys: {sorted(extra)}")
    return SweepSpec(config=cfg, **data)


def apply_value(spec: SweepSpec, value):
    """Return ``(config, rho_k, theta)`` at one swept value."""
    cfg, rho, theta = spec.config, spec.rho_k, spec.theta
    if spec.param == "M":
        cfg = cfg.replace(M=int(value))
    elif spec.param == "theta":
        theta = float(value)
    elif spec.param == "rho_k":
        rho = float(value)
    elif spec.param == "zeta":
        cfg = cfg.replace(zeta=float(value))
    elif spec.param == "d_k":
        d = list(cfg.geometry.d_user)
        d[spec.k] = float(value)
        cfg = cfg.replace(d_user=tuple(d))
    else:
        cfg = cfg.replace(d_eve=float(value))
    return cfg, rho, theta


@dataclass
class Row:
    value: float
    series: str
    closed: float
    mc: float | None = None
    stderr: float | None = None
    asym: float | None = None
    status: str = "ok"
    wall: float = 0.0


class _Evaluator:
    """Computes one (config, rho, theta) point; Monte Carlo results are shared between metrics."""

    def __init__(self, workers: int = 1):
        self.workers = workers
        self._cache: dict = {}

    def _mc_rates(self, cfg, p, q, rho, trials, seed, key):
        ck = ("rates", cfg, p, q, rho, trials, seed, key)
        if ck not in self._cache:
            self._cache[ck] = secrecy.mc_secrecy_all(cfg, p, q, rho, trials, seed, workers=self.workers, key=key)
        return self._cache[ck]

    def _mc_rf(self, cfg, p, q, trials, seed, key):
        ck = ("rf", cfg, p, q, trials, seed, key)
        if ck not in self._cache:
            # rho = 0 here; the split only scales the samples by (1 - rho)
            self._cache[ck] = rf_power_empirical(cfg, p, q, 0.0, trials, seed, rho_eve=0.0,
                                                 workers=self.workers, key=key)
        return self._cache[ck]

    def point(self, spec: SweepSpec, value, key) -> Row:
        t0 = time.perf_counter()
        cfg, rho, theta = apply_value(spec, value)
        k, metric = spec.k, spec.metric
        try:
            p, q, _, _ = operating_point(cfg, rho, theta, k)
            row = self._metric(cfg, metric, p, q, rho, theta, k, spec, key)
            if spec.mc and p == 0 and metric != "d_theta":
                row.status = "unestimable: zero user pilot; no Monte Carlo"
        except (ConfigError, ValueError) as err:
            row = Row(value, spec.label, float("nan"), status=f"infeasible: {err}".replace(",", ";"))
        row.value, row.series, row.wall = value, spec.label, time.perf_counter() - t0
        return row

    def _metric(self, cfg, metric, p, q, rho, theta, k, spec, key) -> Row:
        mc = spec.mc and p > 0
        if metric == "d_theta":
            h = 1e-6
            d = (secrecy_at(cfg, rho, theta + h, k) - secrecy_at(cfg, rho, theta - h, k)) / (2 * h)
            return Row(0, "", float(d))
        if metric in ("secrecy", "user_rate", "eve_rate"):
            if metric == "secrecy":
                closed = secrecy.secrecy_bound_closed(cfg, p, q, rho, None, k)
            elif metric == "user_rate":
                closed = secrecy.user_rate_bound(cfg, p, q, rho, k)
            else:
                closed = secrecy.eve_rate_bound(cfg, p, q, None, k)
            user_a, eve_a = secrecy.secrecy_asymptotic_terms(cfg, p, q, rho, k)
            asym = {"secrecy": user_a - eve_a, "user_rate": user_a, "eve_rate": eve_a}[metric]
            row = Row(0, "", float(closed), asym=float(asym))
            if mc:
                r = self._mc_rates(cfg, p, q, rho, spec.trials, spec.seed, key)[k]
                est = {"secrecy": r.secrecy, "user_rate": r.user_rate, "eve_rate": r.eve_rate}[metric]
                row.mc, row.stderr = est.mean, est.stderr
            return row
        # harvested energy
        T, eh = cfg.harvest_time, cfg.eh
        if metric == "harvest_user":
            closed = energy.harvested_user(cfg, p, q, rho)[k]
            sat, split = eh.P_s_user, rho
            asym_rf = energy.rf_power_asymptotic(cfg, p, q, rho)[0][k]
        else:
            closed = energy.harvested_eve(cfg, p, q)
            sat, split = eh.P_s_eve, cfg.rho_eve
            asym_rf = energy.rf_power_asymptotic(cfg, p, q, rho)[1]
        row = Row(0, "", float(closed), asym=float(energy.nonlinear_eh(asym_rf, eh, T, sat)))
        if mc:
            users, eve = self._mc_rf(cfg, p, q, spec.trials, spec.seed, key)
            est = users[k] if metric == "harvest_user" else eve
            P, se = (1.0 - split) * est.mean, (1.0 - split) * est.stderr
            f = lambda x: energy.nonlinear_eh(x, eh, T, sat)
            # half the output spread over P +- se; stays informative at the sensitivity kink
            row.mc, row.stderr = float(f(P)), 0.5 * float(f(P + se) - f(max(P - se, 0.0)))
        return row


def run_sweep(spec: SweepSpec, workers: int = 1, key=(), evaluator: _Evaluator | None = None) -> list[Row]:
    """One row per swept value, ordered by value."""
    ev = evaluator or _Evaluator(workers)
    order = sorted(range(len(spec.values)), key=lambda i: spec.values[i])
    return [ev.point(spec, spec.values[i], (*key, i)) for i in order]


def write_csv(stream, header: dict, param: str, rows: list[Row], timing: bool = False) -> None:
    for name, v in header.items():
        stream.write(f"# {name} = {_fmt_value(v)}\n")
    cols = (param, *COLUMNS) + (("wall_time",) if timing else ())
    stream.write(",".join(cols) + "\n")
    for r in rows:
        cells = [fmt(r.value), r.series, fmt(r.closed), fmt(r.mc), fmt(r.stderr), fmt(r.asym), r.status]
        if timing:
            cells.append(fmt(r.wall))
        stream.write(",".join(cells) + "\n")


def config_header(cfg: SystemConfig, prefix: str = "config.") -> dict:
    return {prefix + k: v for k, v in cfg.as_flat_dict().items()}


# ---------------------------------------------------------------- presets

@dataclass
class Preset:
    param: str
    specs: list[SweepSpec]
    check: Callable[[list[Row]], list[tuple[str, bool, str]]]
    notes: dict = field(default_factory=dict)


def _by_series(rows):
    out: dict[str, list[Row]] = {}
    for r in rows:
        out.setdefault(r.series, []).append(r)
    return out


def _mc_close(rows, rel=0.02):
    bad = [r for r in rows if r.mc is not None and r.status == "ok"
           and abs(r.mc - r.closed) > rel * abs(r.closed) + 3 * r.stderr]
    return not bad, f"{len(bad)} points outside {rel:.0%} + 3 stderr"


def _r2_active(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    m = y > 0
    if m.sum() < 3:
        return float("nan")
    A = np.polyfit(x[m], y[m], 1)
    res = y[m] - np.polyval(A, x[m])
    return 1.0 - res.var() / y[m].var()


def _fig2(base, trials, seed):
    Ms = list(range(64, 1025, 64))
    rhos = (0.1, 0.5, 0.8)
    specs = [SweepSpec("M", Ms, base, "harvest_user", trials, seed, rho, 0.7, k, label=f"rho{rho}_k{k}")
             for rho in rhos for k in range(base.K)]

    def check(rows):
        s = _by_series(rows)
        r2 = {lab: _r2_active([r.value for r in rs], [r.closed for r in rs]) for lab, rs in s.items()}
        lin = all(v > 0.999 for v in r2.values() if np.isfinite(v))
        dec = True
        for k in range(base.K):
            cols = np.array([[r.closed for r in s[f"rho{rho}_k{k}"]] for rho in rhos])
            for a, b in zip(cols[:-1], cols[1:]):
                dec &= bool(np.all((a > b) | ((a == 0) & (b == 0))))
        ok_mc, msg = _mc_close(rows)
        return [("closed form linear in M above sensitivity (R^2 > 0.999)", lin,
                 f"min R^2 {min(v for v in r2.values() if np.isfinite(v)):.6f}"),
                ("harvested energy strictly decreasing in rho_k", dec, ""),
                ("Monte Carlo within 2%", ok_mc, msg)]
    return Preset("M", specs, check, {"theta": 0.7})


def _fig3_base(base):
    return base.replace(d_user=(11.0, 13.0, 16.0, 18.0), d_eve=15.0, K=4)


THETAS = [round(0.1 * i, 10) for i in range(1, 11)]


def _fig3(base, trials, seed):
    cfg = _fig3_base(base)
    specs = [SweepSpec("theta", THETAS, cfg, "harvest_user", trials, seed, 0.4, 0.7, k, label=f"k{k}")
             for k in range(cfg.K)]

    def check(rows):
        inc = True
        for rs in _by_series(rows).values():
            c = np.array([r.closed for r in rs])
            inc &= bool(np.all((np.diff(c) > 0) | ((c[1:] == 0) & (c[:-1] == 0))))
        ok_mc, msg = _mc_close(rows)
        return [("harvested energy increasing in theta", inc, ""), ("Monte Carlo within 2%", ok_mc, msg)]
    return Preset("theta", specs, check, {"rho_k": 0.4})


def _fig4(base, trials, seed):
    cfg = _fig3_base(base)
    specs = [SweepSpec("theta", THETAS, cfg, "secrecy", trials, seed, 0.4, 0.7, k, label=f"k{k}")
             for k in range(cfg.K)]

    def check(rows):
        bad = [r for r in rows if r.mc is not None and r.closed > r.mc + 3 * r.stderr]
        worst = max((r.closed - r.mc) / r.stderr for r in rows if r.mc is not None)
        return [("bound <= MC + 3 stderr at every theta", not bad,
                 f"max (bound - MC)/stderr = {worst:.3f}")]
    return Preset("theta", specs, check, {"rho_k": 0.4})


def _fig5(base, trials, seed):
    cfg = _fig3_base(base)
    passive = cfg.replace(zeta=0.0)
    specs = [SweepSpec("theta", THETAS, cfg, "eve_rate", trials, seed, 0.4, 0.7, k, label=f"active_k{k}")
             for k in range(cfg.K)]
    specs += [SweepSpec("theta", THETAS, passive, "eve_rate", trials, seed, 0.4, 0.7, k, label=f"passive_k{k}")
              for k in range(cfg.K)]

    def check(rows):
        pas = [r for r in rows if r.series.startswith("passive")]
        worst = max(max(r.closed, r.mc if r.mc is not None else 0.0) for r in pas)
        return [("passive eavesdropper rate < 0.05 bits/s/Hz", worst < 0.05, f"max {worst:.3g}")]
    return Preset("theta", specs, check, {"rho_k": 0.4, "passive": "zeta = 0, d = d_w"})


def _fig6(base, trials, seed):
    cfg = base.replace(d_user=(13.0,) * base.K, d_eve=15.0)
    Ms, zetas = (200, 400, 800), (0.2, 0.5, 0.7)
    specs = [SweepSpec("theta", THETAS, cfg.replace(M=M, zeta=z), "secrecy", trials, seed, 0.4, 0.7, 0,
                       label=f"M{M}_zeta{z}") for M in Ms for z in zetas]

    def check(rows):
        s = _by_series(rows)
        v = np.array([[[r.closed for r in s[f"M{M}_zeta{z}"]] for z in zetas] for M in Ms])
        zeta_dec = bool(np.all(np.diff(v, axis=1) <= 0))
        m_inc = bool(np.all(np.diff(v, axis=0) > 0))
        spread = v.max(axis=1) - v.min(axis=1)
        return [("bound nonincreasing in zeta", zeta_dec, ""),
                ("bound increasing in M", m_inc,
                 "zeta spread at theta=1: " + ", ".join(f"M{M}: {x:.4f}" for M, x in zip(Ms, spread[:, -1])))]
    return Preset("theta", specs, check, {"rho_k": 0.4})


def _fig7(base, trials, seed):
    cfg = base.replace(d_user=(13.0,) * base.K, d_eve=15.0)
    Ms = [8, 16, 32, 64, 128, 256, 512, 1024, 2048]
    specs = [SweepSpec("M", Ms, cfg, "user_rate", trials, seed, 0.4, 0.7, 0, label="user"),
             SweepSpec("M", Ms, cfg, "eve_rate", trials, seed, 0.4, 0.7, 0, label="eve")]

    def check(rows):
        s = _by_series(rows)
        u = [r.mc for r in s["user"]]
        e = [(r.value, r.mc, r.stderr) for r in s["eve"] if r.value >= 512]
        flat = [abs(b[1] - a[1]) < 2 * np.hypot(a[2], b[2]) for a, b in zip(e[:-1], e[1:])]
        return [("user MC rate strictly increasing in M", bool(np.all(np.diff(u) > 0)), ""),
                ("eavesdropper MC rate flat within 2 stderr for M >= 512", all(flat),
                 ", ".join(f"{a[0]:g}->{b[0]:g}: {b[1] - a[1]:+.4f}" for a, b in zip(e[:-1], e[1:])))]
    return Preset("M", specs, check, {"theta": 0.7, "rho_k": 0.4})


N_GEOMETRIES = 20


def _geometries(base, seed):
    return [base.replace(d_user=g.d_user, d_eve=g.d_eve)
            for g in (draw_scenario(seed, base.K, (10.0, 20.0), i) for i in range(N_GEOMETRIES))]


def _fig8(base, trials, seed):
    thetas = [round(0.02 * i, 10) for i in range(1, 51)]
    specs = [SweepSpec("theta", thetas, c, "secrecy", trials, seed, 0.4, 0.7, 0, mc=False, label=f"geo{i}")
             for i, c in enumerate(_geometries(base, seed))]

    def check(rows):
        vals = [r.closed for r in rows if r.value > 0.05]
        return [("bound positive for theta > 0.05", min(vals) > 0, f"min {min(vals):.4g}")]
    return Preset("theta", specs, check, {"geometry": "d ~ U[10, 20] per preset seed"})


def _fig9(base, trials, seed):
    thetas = [round(0.02 * i, 10) for i in range(5, 51)]
    specs = [SweepSpec("theta", thetas, c, "d_theta", trials, seed, 0.4, 0.7, 0, mc=False, label=f"geo{i}")
             for i, c in enumerate(_geometries(base, seed))]

    def check(rows):
        vals = [r.closed for r in rows]
        return [("d bound / d theta positive", min(vals) > 0, f"min {min(vals):.4g}")]
    return Preset("theta", specs, check, {"geometry": "d ~ U[10, 20] per preset seed"})


PRESETS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5,
           "fig6": _fig6, "fig7": _fig7, "fig8": _fig8, "fig9": _fig9}


def run_preset(name: str, base: SystemConfig, trials: int, seed: int, workers: int = 1):
    preset = PRESETS[name](base, trials, seed)
    ev = _Evaluator(workers)
    rows = []
    for spec in preset.specs:
        rows.extend(run_sweep(spec, workers, (), ev))
    rows.sort(key=lambda r: r.value)   # stable: series order kept within a value
    return preset, rows, preset.check(rows)


# ---------------------------------------------------------------- commands

def _open_out(path):
    return open(path, "w", newline="\n", encoding="ascii") if path else sys.stdout


def _base_config(args) -> SystemConfig:
    return load_config(args.config) if args.config else table1_config()


def cmd_reproduce(args) -> int:
    base = _base_config(args)
    trials = args.trials or DEFAULT_TRIALS
    preset, rows, results = run_preset(args.figure, base, trials, args.seed, args.workers)
    header = {"command": f"reproduce {args.figure}", "seed": args.seed, "trials": trials,
              "metric": ";".join(sorted({s.metric for s in preset.specs})),
              "series": ";".join(s.label for s in preset.specs)}
    header.update({f"preset.{k}": v for k, v in preset.notes.items()})
    header.update(config_header(base))
    for s in preset.specs:
        diff = {k: v for k, v in s.config.as_flat_dict().items() if base.as_flat_dict()[k] != v}
        if diff:
            header[f"series.{s.label}"] = "; ".join(f"{k}={_fmt_value(v)}" for k, v in diff.items())
    out = _open_out(args.out)
    try:
        write_csv(out, header, preset.param, rows, args.timing)
    finally:
        if out is not sys.stdout:
            out.close()
    report = sys.stderr if not args.out else sys.stdout
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {args.figure}: {name}" + (f" ({detail})" if detail else ""), file=report)
    return 0 if all(ok for _, ok, _ in results) else 1


def cmd_sweep(args) -> int:
    base = _base_config(args)
    spec = load_sweep_spec(args.spec, base)
    if args.trials:
        spec.trials = args.trials
    if args.seed is not None:
        spec.seed = args.seed
    rows = run_sweep(spec, args.workers)
    header = {"command": "sweep", "spec": Path(args.spec).name, "metric": spec.metric, "seed": spec.seed,
              "trials": spec.trials, "rho_k": spec.rho_k, "theta": spec.theta, "k": spec.k}
    header.update(config_header(spec.config))
    out = _open_out(args.out)
    try:
        write_csv(out, header, spec.param, rows, args.timing)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_eval(args) -> int:
    cfg = _base_config(args)
    ev = _Evaluator(args.workers)
    trials = DEFAULT_TRIALS if args.trials is None else args.trials
    rows = []
    for metric in ("secrecy", "user_rate", "eve_rate", "harvest_user", "harvest_eve"):
        spec = SweepSpec("theta", [args.theta], cfg, metric, max(trials, 1), args.seed,
                         args.rho, args.theta, args.k, mc=trials > 0, label=metric)
        rows.extend(run_sweep(spec, args.workers, (), ev))
    header = {"command": "eval", "seed": args.seed, "trials": trials,
              "rho_k": args.rho, "k": args.k}
    header.update(config_header(cfg))
    out = _open_out(args.out)
    try:
        write_csv(out, header, "theta", rows, args.timing)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_optimize(args) -> int:
    cfg = _base_config(args)
    q_max = np.inf if args.q_max is None else args.q_max
    try:
        rep = maximize_secrecy(cfg, args.q_min, q_max, args.k, args.audit)
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return 1
    header = {"command": "optimize", "Q_min": args.q_min, "Q_max": q_max, "k": args.k, "audit": args.audit}
    header.update(config_header(cfg))
    buf = io.StringIO()
    for name, v in header.items():
        buf.write(f"# {name} = {_fmt_value(v)}\n")
    buf.write("quantity,value\n")
    for name in ("theta_star", "rho_star", "R_star", "rho_max", "theta_min", "audit_best", "audit_excess",
                 "audit_points"):
        buf.write(f"{name},{fmt(getattr(rep, name))}\n")
    buf.write(f"binding,{';'.join(rep.binding)}\n")
    out = _open_out(args.out)
    try:
        out.write(buf.getvalue())
    finally:
        if out is not sys.stdout:
            out.close()
    ok = rep.border_optimal
    print(f"{'PASS' if ok else 'FAIL'} optimize: no audited point beats the border by > 1e-6 "
          f"(excess {rep.audit_excess:.3g})", file=sys.stderr)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML system config (defaults to the built-in scenario)")
    common.add_argument("--seed", type=int, help="base seed (default 0; a sweep spec may set its own)")
    common.add_argument("--trials", type=int, help=f"Monte Carlo trials per point (default {DEFAULT_TRIALS})")
    common.add_argument("--out", help="CSV output path (stdout if omitted)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="append a wall_time column (not reproducible)")

    ap = argparse.ArgumentParser(prog="swiptsec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s (kernel backend: {kernels.BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a single operating point")
    p.add_argument("--rho", type=float, default=0.4)
    p.add_argument("--theta", type=float, default=0.7)
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", parents=[common], help="run a sweep described by a TOML spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", parents=[common], help="run a figure preset")
    p.add_argument("figure", choices=sorted(PRESETS))
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("optimize", parents=[common], help="maximize the secrecy bound under energy constraints")
    p.add_argument("--q-min", type=float, default=0.0, help="minimum user harvested energy (W s)")
    p.add_argument("--q-max", type=float, help="maximum eavesdropper harvested energy (W s)")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--audit", type=int, default=50, help="audit grid size per axis (0 disables)")
    p.set_defaults(func=cmd_optimize)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.seed is None and args.command != "sweep":
        args.seed = 0
    if args.workers < 1:
        ap.error("--workers must be >= 1")
    if args.trials is not None and args.trials < 0:
        ap.error("--trials must be >= 0")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
