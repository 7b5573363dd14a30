"""Command-line front end: configuration, orchestration, CSV/JSON emission.

Commands
--------
simulate      one coupled trajectory per Hurst index plus the limit, as CSV
converge      ladder-wide distributional diagnostics, as a JSON report
cf            empirical / Riccati / limit characteristic functions on a grid
density       terminal histograms with the analytic reference curve
riccati-check resolvent identity residuals and Riccati ladder gaps

All outputs are deterministic functions of (config, seed): paths are
simulated from per-path counter streams and merged in fixed order, so
reruns are byte-identical. Exit codes: 0 ok, 1 config error,
2 numerical error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .diagnostics import (empirical_cf, histogram_density, ks_critical,
                          ks_distance, moment_checks)
from .ig import IGParams, RngSeed, ig_cdf, ig_pdf
from .kernels import FractionalKernel, ModelParams, UniformGrid, resolvent_residual
from .riccati import (TestFunctionPair, char_functional, char_functional_limit,
                      joint_cf_limit)
from .scheme import residual_path, simulate_coupled, simulate_coupled_batch

__all__ = [
    "RunConfig",
    "DEFAULT_LADDER",
    "REPORT_SCHEMA",
    "load_config",
    "config_hash",
    "validate_report",
    "main",
]

SCHEMA_VERSION = "v1"

# default Hurst ladder: marches toward the boundary through the range
# where the terminal-law distance is monotone and the rungs stay
# separated at the default Monte Carlo resolution
DEFAULT_LADDER = (-0.25, -0.3, -0.35, -0.4, -0.499)

DEFAULT_U_GRID = (0.0, 1.0, 2.0, 3.0)
DEFAULT_V_GRID = tuple(np.linspace(-5.0, 5.0, 21))


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration shared by all commands."""

    V0: float = 0.1
    lam: float = 10.0
    theta: float = 0.1
    nu: float = 1.0
    T: float = 1.0
    H: tuple = DEFAULT_LADDER
    N: int = 2000
    paths: int = 100_000
    seed: int = 20260819
    out: str = "out"
    u_grid: tuple = DEFAULT_U_GRID
    v_grid: tuple = DEFAULT_V_GRID
    bins: int = 100

    def __post_init__(self) -> None:
        if len(self.H) == 0:
            raise ConfigError("H: ladder must not be empty")
        for hh in self.H:
            if not -0.5 < hh <= 0.5:
                raise ConfigError(f"H: every value must be in (-1/2, 1/2], got {hh}")
        if self.N < 2:
            raise ConfigError(f"N: must be >= 2, got {self.N}")
        if self.paths < 1:
            raise ConfigError(f"paths: must be >= 1, got {self.paths}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {self.seed}")
        if self.bins < 10:
            raise ConfigError(f"bins: must be >= 10, got {self.bins}")
        for name in ("V0", "theta"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0, got {getattr(self, name)}")
        if self.lam < 0:
            raise ConfigError(f"lam: must be >= 0, got {self.lam}")
        if self.nu <= 0:
            raise ConfigError(f"nu: must be > 0, got {self.nu}")
        if self.T <= 0:
            raise ConfigError(f"T: must be > 0, got {self.T}")
        if len(self.u_grid) == 0 or len(self.v_grid) == 0:
            raise ConfigError("u_grid/v_grid: must not be empty")

    def model(self) -> ModelParams:
        return ModelParams(V0=self.V0, lam=self.lam, theta=self.theta,
                           nu=self.nu, T=self.T)

    def grid(self) -> UniformGrid:
        return UniformGrid(self.N, T=self.T)


_FLOAT_KEYS = ("V0", "lam", "theta", "nu", "T")
_INT_KEYS = ("N", "paths", "seed", "bins")
_LIST_KEYS = ("H", "u_grid", "v_grid")


def _parse_float_list(name: str, text: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"{name}: expected comma-separated reals, got {text!r}")


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from a flat key=value file plus overrides.

    File lines are `key = value`; blank lines and # comments are
    ignored. CLI flags take precedence over file entries. Unknown
    keys and malformed values raise ConfigError naming the field.
    """
    values: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}")
        for ln, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"config: line {ln} is not key=value: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    kwargs: dict = {}
    for key, val in values.items():
        if key in _FLOAT_KEYS:
            try:
                kwargs[key] = float(val)
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: expected a real number, got {val!r}")
        elif key in _INT_KEYS:
            try:
                kwargs[key] = int(val)
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: expected an integer, got {val!r}")
        elif key in _LIST_KEYS:
            kwargs[key] = (_parse_float_list(key, val)
                           if isinstance(val, str) else tuple(val))
        elif key == "out":
            kwargs[key] = str(val)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return RunConfig(**kwargs)


def config_hash(cfg: RunConfig) -> str:
    """Stable 12-hex-digit digest of the resolved configuration."""
    blob = "\n".join(
        f"{f.name}={getattr(cfg, f.name)!r}" for f in
        sorted(dataclasses.fields(cfg), key=lambda f: f.name))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_csv(path: str, schema: str, cfg: RunConfig, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema=hyperrough.{schema}/{SCHEMA_VERSION} "
                 f"config_hash={config_hash(cfg)} seed={cfg.seed}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _h_tag(H: float) -> str:
    return f"H{H:+.4g}"


def _limit_law(m: ModelParams) -> IGParams:
    return IGParams(m.g0 / (1.0 + m.lam) * m.T, (m.g0 / m.nu) ** 2 * m.T ** 2)


def _m_reference_pdf(m: ModelParams, x):
    """Density of (1+lambda) Y_T - g0 T by change of variables."""
    ol = 1.0 + m.lam
    return ig_pdf(_limit_law(m), (np.asarray(x, float) + m.g0 * m.T) / ol) / ol


def cmd_simulate(cfg: RunConfig) -> int:
    """Emit one coupled trajectory CSV per H plus the limit path."""
    m = cfg.model()
    grid = cfg.grid()
    pairs, limit = simulate_coupled(m, list(cfg.H), grid, RngSeed(cfg.seed, 0))
    os.makedirs(cfg.out, exist_ok=True)
    tg = grid.points()
    for H, pair in zip(cfg.H, pairs):
        resid = residual_path(pair, m, H)
        _write_csv(os.path.join(cfg.out, f"trajectory_{_h_tag(H)}.csv"),
                   "trajectory", cfg, ("t", "X", "M", "residual"),
                   zip(tg, pair.X, pair.M, resid))
    resid = residual_path(limit, m, -0.5)
    _write_csv(os.path.join(cfg.out, "trajectory_limit.csv"),
               "trajectory", cfg, ("t", "X", "M", "residual"),
               zip(tg, limit.X, limit.M, resid))
    return 0


def _cf_max_err(m: ModelParams, batch, u_grid, v_grid) -> float:
    worst = 0.0
    for u in u_grid:
        for v in v_grid:
            emp = empirical_cf(batch, u, v)
            worst = max(worst, abs(emp - joint_cf_limit(m, u, v)))
    return worst


def cmd_converge(cfg: RunConfig) -> int:
    """Ladder-wide convergence diagnostics as a schema-versioned report."""
    m = cfg.model()
    grid = cfg.grid()
    batches, limit = simulate_coupled_batch(
        m, list(cfg.H), grid, cfg.seed, cfg.paths)
    law = _limit_law(m)
    cdf = lambda x: ig_cdf(law, x)
    runs = []
    for batch in batches:
        runs.append({
            "H": float(batch.H),
            "ks_x": ks_distance(batch, "X", cdf),
            "cf_max_err": _cf_max_err(m, batch, cfg.u_grid, cfg.v_grid),
            "residual_sup_mean": float(np.mean(batch.residual_sup)),
            "sup_dist_mean": float(np.mean(batch.sup_dist_limit)),
            "n_clamped": int(batch.n_clamped),
            "moment_checks": moment_checks([batch], m),
        })
    report = {
        "schema": f"hyperrough.converge/{SCHEMA_VERSION}",
        "config_hash": config_hash(cfg),
        "seed": int(cfg.seed),
        "config": {f.name: (list(v) if isinstance(v := getattr(cfg, f.name), tuple)
                            else v)
                   for f in dataclasses.fields(cfg)},
        "ks_critical_1pct": ks_critical(cfg.paths, level=0.01),
        "baseline": {
            "n_paths": int(limit.n_paths),
            "ks_x": ks_distance(limit, "X", cdf),
            "cf_max_err": _cf_max_err(m, limit, cfg.u_grid, cfg.v_grid),
            "moment_checks": moment_checks([limit], m),
        },
        "runs": runs,
    }
    validate_report(report)
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "converge_report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_cf(cfg: RunConfig) -> int:
    """Empirical, Riccati, and limit CFs on the (u, v) grid, aligned by row.

    The empirical surface comes from a batch at the first ladder
    entry; the Riccati surface from the characteristic functional at
    the same H; the limit surface from the closed form.
    """
    m = cfg.model()
    grid = cfg.grid()
    H = cfg.H[0]
    kern = FractionalKernel(H)
    batches, _ = simulate_coupled_batch(m, [H], grid, cfg.seed, cfg.paths,
                                        n_marginals=0)
    batch = batches[0]
    rows = []
    for u in cfg.u_grid:
        for v in cfg.v_grid:
            emp = empirical_cf(batch, u, v)
            ric = char_functional(m, kern, grid,
                                  TestFunctionPair.constants(u, v))
            lim = joint_cf_limit(m, u, v)
            rows.append((u, v, emp.real, emp.imag, ric.real, ric.imag,
                         lim.real, lim.imag))
    os.makedirs(cfg.out, exist_ok=True)
    _write_csv(os.path.join(cfg.out, "cf_grid.csv"), "cf", cfg,
               ("u", "v", "emp_re", "emp_im", "ric_re", "ric_im",
                "lim_re", "lim_im"), rows)
    return 0


def cmd_density(cfg: RunConfig) -> int:
    """Terminal histograms per H and for the limit, with reference curves."""
    m = cfg.model()
    grid = cfg.grid()
    batches, limit = simulate_coupled_batch(
        m, list(cfg.H), grid, cfg.seed, cfg.paths, n_marginals=0)
    law = _limit_law(m)
    os.makedirs(cfg.out, exist_ok=True)
    for tag, batch in [(_h_tag(b.H), b) for b in batches] + [("limit", limit)]:
        for comp in ("X", "M"):
            centers, dens = histogram_density(batch, comp, cfg.bins)
            ref = (ig_pdf(law, centers) if comp == "X"
                   else _m_reference_pdf(m, centers))
            _write_csv(os.path.join(cfg.out, f"density_{comp}_{tag}.csv"),
                       "density", cfg, ("center", "density", "reference"),
                       zip(centers, dens, ref))
    return 0


def cmd_riccati_check(cfg: RunConfig) -> int:
    """Resolvent identity residuals and Riccati ladder gaps, as CSV."""
    m = cfg.model()
    rows = []
    for H in (-0.45, -0.3, 0.0, 0.5):
        kern = FractionalKernel(H)
        for alpha in (1.0, 4.0):
            for n in (cfg.N, 2 * cfg.N):
                res = resolvent_residual(kern, alpha, UniformGrid(n, T=cfg.T))
                rows.append((H, alpha, n, res))
    os.makedirs(cfg.out, exist_ok=True)
    _write_csv(os.path.join(cfg.out, "resolvent_check.csv"),
               "resolvent_check", cfg, ("H", "alpha", "N", "residual"), rows)
    pair = TestFunctionPair.constants(1.0, 0.5)
    lim = char_functional_limit(m, pair)
    grid = cfg.grid()
    rows = []
    for H in cfg.H:
        cf = char_functional(m, FractionalKernel(H), grid, pair)
        rows.append((H, cf.real, cf.imag, abs(cf - lim)))
    _write_csv(os.path.join(cfg.out, "riccati_ladder.csv"),
               "riccati_ladder", cfg, ("H", "cf_re", "cf_im", "gap_to_limit"),
               rows)
    return 0


# template types: float / int / str / bool, suffix ? for nullable,
# dict and single-element list templates nest
_MOMENT_RECORD = {
    "H": "float?", "N": "int", "seed": "int", "metric": "str",
    "time": "float?", "value": "float", "stderr": "float",
    "bound": "float?", "passed": "bool",
}

REPORT_SCHEMA = {
    "schema": "str",
    "config_hash": "str",
    "seed": "int",
    "config": "dict",
    "ks_critical_1pct": "float",
    "baseline": {
        "n_paths": "int", "ks_x": "float", "cf_max_err": "float",
        "moment_checks": [_MOMENT_RECORD],
    },
    "runs": [{
        "H": "float", "ks_x": "float", "cf_max_err": "float",
        "residual_sup_mean": "float", "sup_dist_mean": "float",
        "n_clamped": "int", "moment_checks": [_MOMENT_RECORD],
    }],
}


def validate_report(obj, template=None, where: str = "report") -> None:
    """Validate a converge report against REPORT_SCHEMA.

    Raises ValueError naming the offending path on the first mismatch.
    """
    tpl = REPORT_SCHEMA if template is None else template
    if isinstance(tpl, str):
        nullable = tpl.endswith("?")
        kind = tpl.rstrip("?")
        if obj is None:
            if nullable:
                return
            raise ValueError(f"{where}: unexpected null")
        expect = {"float": (int, float), "int": (int,), "str": (str,),
                  "bool": (bool,), "dict": (dict,)}[kind]
        if kind == "int" and isinstance(obj, bool):
            raise ValueError(f"{where}: expected int, got bool")
        if kind == "float" and isinstance(obj, bool):
            raise ValueError(f"{where}: expected float, got bool")
        if not isinstance(obj, expect):
            raise ValueError(f"{where}: expected {kind}, got {type(obj).__name__}")
        return
    if isinstance(tpl, dict):
        if not isinstance(obj, dict):
            raise ValueError(f"{where}: expected object, got {type(obj).__name__}")
        for key, sub in tpl.items():
            if key not in obj:
                raise ValueError(f"{where}.{key}: missing")
            validate_report(obj[key], sub, f"{where}.{key}")
        return
    if isinstance(tpl, list):
        if not isinstance(obj, list):
            raise ValueError(f"{where}: expected array, got {type(obj).__name__}")
        for i, item in enumerate(obj):
            validate_report(item, tpl[0], f"{where}[{i}]")
        return
    raise ValueError(f"{where}: bad template {tpl!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hyperrough",
                     description="Hyper-rough square-root process toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key=value config file")
    common.add_argument("--seed", type=int, metavar="U64")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--H", metavar="LIST", help="comma-separated Hurst ladder")
    common.add_argument("--N", type=int, metavar="STEPS")
    common.add_argument("--paths", type=int, metavar="COUNT")
    common.add_argument("--u-grid", metavar="LIST", dest="u_grid")
    common.add_argument("--v-grid", metavar="LIST", dest="v_grid")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=fn.__doc__.splitlines()[0])
        sp.set_defaults(func=fn)
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "cf": cmd_cf,
    "density": cmd_density,
    "riccati-check": cmd_riccati_check,
}


def _join_list_flags(argv):
    """Fuse list flags with their values so leading minus signs parse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--H", "--u-grid", "--v-grid") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = _build_parser().parse_args(_join_list_flags(argv))
        overrides = {k: getattr(args, k) for k in
                     ("seed", "out", "H", "N", "paths", "u_grid", "v_grid")}
        cfg = load_config(args.config, overrides)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
