"""``supinf-lab``: run experiments from INI files and write CSV/JSON artifacts.

A config file has an ``[experiment]`` section (``command``, ``output_dir``,
``format``) and a ``[parameters]`` section whose keys depend on the command;
see ``supinf-lab <command> --help``.  Unknown keys are rejected.  ``--set
key=value`` overrides a parameter and ``SUPINF_LAB_OUTPUT_DIR`` overrides the
output directory (``--output-dir`` wins over both).

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 domain error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import io
from .blowup import CSV_FIELDS, blowup_report
from .bubble import BubbleParams, bubble_derivatives, bubble_grid, bubble_profile, bubble_pde_residual
from .core import annulus, ball, make_exponents, uniform_grid
from .curvature import CurvatureProfile
from .emden_fowler import T_MAX, ef_residual, to_ef
from .errors import ConfigError, DimensionError, DomainError, SearchError, SolverError
from .moving_plane import (find_xi, gap, lambda_bar_for, lemma_n4_check, minus_L_gap,
                           z_decomposition)
from .radial_solver import ShootingConfig, pde_residual, shoot
from .supinf import SweepConfig, default_family, run_sweep

ENV_OUTPUT_DIR = "SUPINF_LAB_OUTPUT_DIR"
COMMANDS = ("bubble", "solve", "blowup", "ef", "mplane", "sweep")
FORMATS = ("csv", "json", "both")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_DOMAIN = 0, 2, 3, 4


# -- schema -------------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    kind: str  # int | float | bool | str | floats
    default: Any = None
    check: Callable[[Any], bool] | None = None
    rule: str = ""
    choices: tuple = ()


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _all_pos(xs):
    return len(xs) > 0 and all(x > 0 for x in xs)


CURVATURE = {
    "curvature": Param("str", "constant", choices=("constant", "polynomial", "sinusoidal")),
    "V0": Param("float", None, _pos, "> 0"),
    "eps": Param("float", 0.0),
    "power": Param("float", 2.0, lambda x: x >= 2, ">= 2"),
    "omega": Param("float", 1.0, _pos, "> 0"),
    "a": Param("float", None, _pos, "> 0"),
    "b": Param("float", None, _pos, "> 0"),
    "A": Param("float", 0.0, _nonneg, ">= 0"),
    "alpha": Param("float", 1.0, lambda x: 0 < x <= 1, "in (0, 1]"),
}

DIM = {"n": Param("int", 4)}

SCHEMAS: dict[str, dict[str, Param]] = {
    "bubble": {
        **DIM,
        "lambda": Param("float", 1.0, _pos, "> 0"),
        "rmax": Param("float", 5.0, _pos, "> 0"),
        "step": Param("float", 1e-3, _pos, "> 0"),
    },
    "solve": {
        **DIM,
        "u0": Param("float", 1.0, _pos, "> 0"),
        "r_max": Param("float", 5.0, _pos, "> 0"),
        "step": Param("float", 1e-3, _pos, "> 0"),
        "include_subcritical": Param("bool", False),
        "tolerance": Param("float", 1e-8, lambda x: 0 < x <= 1e-3, "in (0, 1e-3]"),
        **CURVATURE,
    },
    "blowup": {
        **DIM,
        "family": Param("str", "bubble", choices=("bubble", "shooting")),
        "params": Param("floats", (1.0, 10.0, 100.0), _all_pos, "positive list"),
        "R": Param("float", 1.0, _pos, "> 0"),
        "R_tilde": Param("float", 10.0, _pos, "> 0"),
        "step": Param("float", 1e-3, lambda x: 0 < x <= 0.1, "in (0, 0.1]"),
        "include_subcritical": Param("bool", False),
        **CURVATURE,
    },
    "ef": {
        **DIM,
        "source": Param("str", "bubble", choices=("bubble", "shooting")),
        "lam": Param("float", 1.0, _pos, "> 0"),
        "center_offset": Param("float", 0.0, _nonneg, ">= 0"),
        "u0": Param("float", 1.0, _pos, "> 0"),
        "include_subcritical": Param("bool", False),
        "origin": Param("float", 0.0, _nonneg, ">= 0"),
        "t_min": Param("float", -8.0),
        "t_max": Param("float", T_MAX, lambda x: x <= T_MAX + 1e-15, "<= -log 2"),
        "h": Param("float", 1e-3, lambda x: 0 < x <= 0.1, "in (0, 0.1]"),
        "r_step": Param("float", 1e-3, _pos, "> 0"),
        **CURVATURE,
    },
    "mplane": {
        **DIM,
        "source": Param("str", "bubble", choices=("bubble", "shooting")),
        "lam": Param("float", 1.0, _pos, "> 0"),
        "center_offset": Param("float", 0.0, _nonneg, ">= 0"),
        "u0": Param("float", 1.0, _pos, "> 0"),
        "include_subcritical": Param("bool", False),
        "origin": Param("float", 0.0, _nonneg, ">= 0"),
        "t_min": Param("float", -8.0),
        "t1": Param("float", T_MAX, lambda x: x <= T_MAX + 1e-15, "<= -log 2"),
        "lambda_bar": Param("float", None),
        "h": Param("float", 1e-3, lambda x: 0 < x <= 0.1, "in (0, 0.1]"),
        "r_step": Param("float", 1e-3, _pos, "> 0"),
        "m": Param("float", None, _pos, "> 0"),
        **CURVATURE,
    },
    "sweep": {
        **DIM,
        "theorem": Param("int", 1, lambda x: x in (1, 2, 3, 4), "in {1, 2, 3, 4}"),
        "family": Param("str", None, choices=("bubble", "shooting")),
        "params": Param("floats", None, _all_pos, "positive list"),
        "K_radius": Param("float", 0.5, _pos, "> 0"),
        "Omega_radius": Param("float", 1.0, _pos, "> 0"),
        "Omega_inner": Param("float", 0.0, _nonneg, ">= 0"),
        "m": Param("float", None, _pos, "> 0"),
        "include_subcritical": Param("bool", None),
        "step": Param("float", 1e-2, lambda x: 0 < x <= 0.1, "in (0, 0.1]"),
        "workers": Param("int", 1, lambda x: x >= 1, ">= 1"),
        **CURVATURE,
    },
}

EXPERIMENT_KEYS = {"command", "output_dir", "format"}


@dataclass
class ExperimentConfig:
    command: str
    parameters: dict[str, Any]
    output_dir: Path = Path("out")
    format: str = "both"
    lines: dict[str, int] = field(default_factory=dict, repr=False)

    def echo(self) -> dict:
        # the worker count does not change results, so it stays out of the artifacts
        return {"command": self.command, **{k: v for k, v in self.parameters.items() if k != "workers"}}


_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\[\s][^=:]*?)\s*[=:]")


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    where, section = {}, None
    for i, line in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(line)
        if m:
            section = m.group(1).strip()
            continue
        m = _KEY.match(line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip()), i)
    return where


def _convert(key: str, raw: str, spec: Param, line: int | None):
    raw = raw.strip()
    try:
        if spec.kind == "int":
            value = int(raw)
        elif spec.kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
        elif spec.kind == "bool":
            states = configparser.ConfigParser.BOOLEAN_STATES
            if raw.lower() not in states:
                raise ValueError
            value = states[raw.lower()]
        elif spec.kind == "floats":
            value = tuple(float(x) for x in raw.replace(",", " ").split())
            if not all(math.isfinite(x) for x in value):
                raise ValueError
        else:
            value = raw
    except ValueError:
        raise ConfigError(f"expected {spec.kind}, got {raw!r}", line=line, key=key) from None
    if spec.choices and value not in spec.choices:
        raise ConfigError(f"must be one of {', '.join(spec.choices)}", line=line, key=key)
    if spec.check is not None and not spec.check(value):
        raise ConfigError(f"value {raw} out of range ({spec.rule})", line=line, key=key)
    return value


def _fill_defaults(command: str, params: dict) -> dict:
    out = {}
    for key, spec in SCHEMAS[command].items():
        out[key] = params.get(key, spec.default)
    if "V0" in out:
        n = out["n"]
        if out["V0"] is None:
            out["V0"] = float(n * (n - 2))
        lo, hi = _curvature_range(out)
        out["a"] = lo if out["a"] is None else out["a"]
        out["b"] = hi if out["b"] is None else out["b"]
    if command == "sweep":
        th = out["theorem"]
        if out["family"] is None:
            out["family"] = "bubble" if th in (1, 2) else "shooting"
        if out["include_subcritical"] is None:
            out["include_subcritical"] = th in (1, 2) and out["family"] == "shooting"
        if out["m"] is None and th in (3, 4):
            out["m"] = 0.01
        if out["params"] is None:
            out["params"] = default_family(th, out["family"])
    return out


def _curvature_range(p: dict) -> tuple[float, float]:
    tmp = CurvatureProfile(p["curvature"], V0=p["V0"], eps=p["eps"], k=p["power"], omega=p["omega"],
                           radius=_curvature_radius(p))
    lo, hi, _ = tmp.analytic_bounds()
    return lo, hi


def _curvature_radius(p: dict) -> float:
    for key in ("Omega_radius", "r_max", "R"):
        if key in p and p[key] is not None:
            return float(p[key])
    return 2.0


def curvature_from(p: dict, radius: float | None = None) -> CurvatureProfile:
    return CurvatureProfile(p["curvature"], V0=p["V0"], eps=p["eps"], k=p["power"],
                            omega=p["omega"], a=p["a"], b=p["b"], A=p["A"], alpha=p["alpha"],
                            radius=_curvature_radius(p) if radius is None else radius)


def parse_config(text: str, overrides: dict[str, str] | None = None,
                 command: str | None = None) -> ExperimentConfig:
    """Strictly parse an INI experiment file into a typed :class:`ExperimentConfig`.

    ``overrides`` (from ``--set``) replace parameters; ``command`` must agree
    with the file's ``command`` when both are present.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", line=exc.lineno, key=exc.option) from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc.message.splitlines()[0]}",
                          line=getattr(exc, "lineno", None)) from None
    lines = _key_lines(text)
    for section in cp.sections():
        if section not in ("experiment", "parameters"):
            raise ConfigError(f"unknown section [{section}]")
    exp = cp["experiment"] if cp.has_section("experiment") else {}
    for key in exp:
        if key not in EXPERIMENT_KEYS:
            raise ConfigError("unknown key", line=lines.get(("experiment", key)), key=key)
    file_cmd = exp.get("command")
    cmd = command or file_cmd
    if cmd is None:
        raise ConfigError("no command given", key="command")
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}", line=lines.get(("experiment", "command")), key="command")
    if command and file_cmd and command != file_cmd:
        raise ConfigError(f"file is for command {file_cmd!r}, not {command!r}",
                          line=lines.get(("experiment", "command")), key="command")
    fmt = exp.get("format", "both")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}",
                          line=lines.get(("experiment", "format")), key="format")
    schema = SCHEMAS[cmd]
    raw = dict(cp["parameters"]) if cp.has_section("parameters") else {}
    for key, value in (overrides or {}).items():
        raw[key] = value
        lines[("parameters", key)] = None
    params = {}
    for key, value in raw.items():
        line = lines.get(("parameters", key))
        if key not in schema:
            raise ConfigError("unknown key", line=line, key=key)
        params[key] = _convert(key, value, schema[key], line)
    if "n" in params:
        try:
            make_exponents(params["n"])
        except DimensionError as exc:
            raise ConfigError(str(exc), line=lines.get(("parameters", "n")), key="n") from None
    return ExperimentConfig(cmd, _fill_defaults(cmd, params), Path(exp.get("output_dir", "out")), fmt,
                            {k: v for (s, k), v in lines.items() if s == "parameters" and v})


# -- commands -----------------------------------------------------------------

@contextmanager
def _as_config_error():
    """Cross-field validation failures of module configs are config errors."""
    try:
        yield
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _source_profile(p: dict, r_max: float):
    n = p["n"]
    if p["source"] == "bubble":
        params = BubbleParams(n, p["lam"], p["center_offset"])
        return bubble_profile(params, uniform_grid(r_max, p["r_step"]))
    cfg = ShootingConfig.for_dimension(n, u0=p["u0"], r_max=r_max,
                                       step=min(p["r_step"], r_max / 100),
                                       curvature=curvature_from(p, r_max),
                                       include_subcritical=p["include_subcritical"])
    res = shoot(cfg)
    if res.reason != "r_max":
        raise DomainError(f"positivity lost at r = {res.stop_radius:.6g} before r = {r_max}")
    return res.profile


def _t_grid(t_min: float, t_max: float, h: float) -> int:
    count = int(round((t_max - t_min) / h))
    if count < 7:
        raise DomainError("t range holds fewer than 8 nodes")
    return count + 1


def cmd_bubble(cfg: ExperimentConfig):
    p = cfg.parameters
    params = BubbleParams(p["n"], p["lambda"])
    grid = uniform_grid(p["rmax"], p["step"])
    u, du, _ = bubble_derivatives(grid.nodes, params)
    res = bubble_pde_residual(params, grid)
    rows = zip(grid.nodes, u, du)
    return {"bubble": (("r", "u", "du_dr"), rows)}, {"relative_residual": res, "nodes": len(grid),
                                                      "center_value": params.center_value}


def cmd_solve(cfg: ExperimentConfig):
    p = cfg.parameters
    with _as_config_error():
        sc = ShootingConfig.for_dimension(p["n"], u0=p["u0"], r_max=p["r_max"], step=p["step"],
                                          curvature=curvature_from(p, p["r_max"]),
                                          include_subcritical=p["include_subcritical"],
                                          tolerance=p["tolerance"])
    res = shoot(sc)
    prof = res.profile
    summary = {"reason": res.reason, "stop_radius": res.stop_radius, "nodes": len(prof.grid),
               "relative_residual": pde_residual(prof, relative=True),
               "u_min": float(prof.values.min())}
    return {"solve": (("r", "u"), zip(prof.r, prof.values))}, summary


def cmd_blowup(cfg: ExperimentConfig):
    p = cfg.parameters
    n, R, Rt = p["n"], p["R"], p["R_tilde"]
    k = make_exponents(n).k
    family = []
    for x in p["params"]:
        if p["family"] == "bubble":
            bp = BubbleParams(n, x)
            extent = max(R * x, Rt * (1 + 1e-9))
            family.append(bubble_profile(bp, bubble_grid(bp, p["step"], extent)))
        else:
            scale = x ** (1.0 / k)
            r_max = max(R, Rt / scale * (1 + 1e-9))
            count = max(100, math.ceil(r_max * scale / p["step"]))
            sc = ShootingConfig.for_dimension(n, u0=x, r_max=r_max, step=r_max / count,
                                              curvature=curvature_from(p, r_max),
                                              include_subcritical=p["include_subcritical"])
            family.append(shoot(sc).profile)
    series = blowup_report(family, R, Rt)
    rows = [[getattr(d, f) for f in CSV_FIELDS] for d in series]
    return ({"blowup": (CSV_FIELDS, rows)},
            {"rows": series.rows, "decreasing": series.decreasing})


def cmd_ef(cfg: ExperimentConfig):
    p = cfg.parameters
    r_top = p["origin"] + math.exp(p["t_max"])
    prof = _source_profile(p, r_top)
    w = to_ef(prof, p["origin"], p["t_min"], p["t_max"], _t_grid(p["t_min"], p["t_max"], p["h"]))
    V = prof.curvature
    summary = {"w_at_t_max": float(w.w_values[-1]), "nodes": w.t_nodes.size}
    if p["origin"] == 0.0 and p["center_offset"] == 0.0:
        summary["ef_residual"] = ef_residual(w, V, prof.has_subcritical_term)
    return {"ef": (("t", "w"), zip(w.t_nodes, w.w_values))}, summary


def cmd_mplane(cfg: ExperimentConfig):
    p = cfg.parameters
    r_top = p["origin"] + math.exp(p["t1"])
    prof = _source_profile(p, r_top)
    # nodes on t_min + j h, the last one at or below t1
    count = int(math.floor((p["t1"] - p["t_min"]) / p["h"] + 1e-9)) + 1
    if count < 8:
        raise DomainError("t range holds fewer than 8 nodes")
    w = to_ef(prof, p["origin"], p["t_min"], p["t_min"] + (count - 1) * p["h"], count)
    t1 = w.t_max
    u_y = float(prof.values[np.argmin(np.abs(prof.r - p["origin"]))])
    lam_bar = p["lambda_bar"] if p["lambda_bar"] is not None else lambda_bar_for(u_y, p["n"])
    V = prof.curvature
    report = find_xi(w, lam_bar, t1, V=V, include_subcritical=prof.has_subcritical_term)
    g = gap(w, report.xi, t1)
    z1, z2 = z_decomposition(w, report.xi, V, prof.has_subcritical_term, t1)
    try:
        mL = dict(zip(np.round(minus_L_gap(w, report.xi, t1).x, 12),
                      minus_L_gap(w, report.xi, t1).values))
    except DomainError:
        mL = {}
    rows = [(t, gv, a, b, mL.get(round(t, 12))) for t, gv, a, b in zip(g.x, g.values, z1.values, z2.values)]
    summary = {"report": report}
    if p["m"] is not None and p["n"] == 4 and report.xi < t1:
        try:
            summary["lemma_n4"] = lemma_n4_check(w, report.xi, V, p["m"], t1)
        except DomainError as exc:
            summary["lemma_n4"] = f"not evaluable: {exc}"
    return {"mplane": (("t", "gap", "Z1", "Z2", "minus_L_gap"), rows)}, summary


def cmd_sweep(cfg: ExperimentConfig):
    p = cfg.parameters
    Omega = ball(p["Omega_radius"]) if p["Omega_inner"] == 0 else annulus(p["Omega_inner"], p["Omega_radius"])
    with _as_config_error():
        sc = SweepConfig(theorem=p["theorem"], n=p["n"], family=p["family"], params=p["params"],
                         curvature=curvature_from(p, p["Omega_radius"]), K=ball(p["K_radius"]),
                         Omega=Omega, m=p["m"] if p["theorem"] in (3, 4) else None,
                         include_subcritical=p["include_subcritical"], step=p["step"],
                         workers=p["workers"])
    rep = run_sweep(sc)
    cols = ("parameter", "status", "sup_K", "inf_Omega", "value", "closed_form", "error")
    rows = [[getattr(r, c) for c in cols] for r in rep.rows]
    summary = {"empirical_c": rep.empirical_c, "monotone_flag": rep.monotone_flag,
               "closed_form_error": rep.closed_form_error, "rows": rep.rows}
    return {"sweep": (cols, rows)}, summary


HANDLERS = {"bubble": cmd_bubble, "solve": cmd_solve, "blowup": cmd_blowup, "ef": cmd_ef,
            "mplane": cmd_mplane, "sweep": cmd_sweep}


def run(cfg: ExperimentConfig) -> list[Path]:
    """Execute ``cfg`` and write its artifacts; returns the written paths."""
    tables, summary = HANDLERS[cfg.command](cfg)
    echo = cfg.echo()
    written = []
    if cfg.format in ("csv", "both"):
        for name, (cols, rows) in tables.items():
            written.append(io.write_csv(cfg.output_dir / f"{name}.csv", cols, rows, echo))
    if cfg.format in ("json", "both"):
        written.append(io.write_json(cfg.output_dir / f"{cfg.command}.json", summary, echo))
    return written


# -- entry point --------------------------------------------------------------

def _help_defaults(command: str) -> str:
    lines = [f"  {k} = {'(derived)' if s.default is None else io.fmt(s.default) if not isinstance(s.default, tuple) else ' '.join(io.fmt(x) for x in s.default)}"
             for k, s in SCHEMAS[command].items()]
    return "parameters and defaults:\n" + "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supinf-lab", description=__doc__.splitlines()[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, epilog=_help_defaults(name),
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "bubble":
            sp.add_argument("--n", type=str)
            sp.add_argument("--lambda", dest="lam", type=str)
            sp.add_argument("--rmax", type=str)
            sp.add_argument("--step", type=str)
            sp.add_argument("--config", type=Path)
        else:
            sp.add_argument("--config", type=Path, required=True)
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a parameter (repeatable)")
        sp.add_argument("--output-dir", type=Path)
        sp.add_argument("--format", choices=FORMATS)
    return ap


def _overrides(args) -> dict[str, str]:
    out = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    if args.command == "bubble":
        for key, val in (("n", args.n), ("lambda", args.lam), ("rmax", args.rmax), ("step", args.step)):
            if val is not None:
                out[key] = val
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, _overrides(args), command=args.command)
        if os.environ.get(ENV_OUTPUT_DIR):
            cfg.output_dir = Path(os.environ[ENV_OUTPUT_DIR])
        if args.output_dir is not None:
            cfg.output_dir = args.output_dir
        if args.format is not None:
            cfg.format = args.format
        for path in run(cfg):
            print(path)
    except (ConfigError, OSError) as exc:
        print(f"error category=config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, SearchError) as exc:
        print(f"error category=solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except DomainError as exc:
        print(f"error category=domain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
