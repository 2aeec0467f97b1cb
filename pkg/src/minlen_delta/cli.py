"""Command-line front end: ``minlen-delta <subcommand> [options]``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags, later sources winning.
Output is CSV (``# key=value`` metadata lines, a header, 15 significant
digits) or JSON, written to stdout or ``--output``.  Exit status is 0 on
success, 2 for usage or configuration errors and 1 when a computation fails.

The worker count for grid sweeps is read from ``MINLEN_DELTA_WORKERS``
(default 1); results are assembled in grid order regardless.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import bound, flux, quasiposition, scattering
from .bound import PotentialSpec
from .deformation import Kind, make_deformation
from .exceptions import (BudgetExceededError, DomainError, ExtrapolationError, NoSignChangeError,
                         PoleError)

SCHEMA_VERSION = "1"
WORKERS_ENV = "MINLEN_DELTA_WORKERS"
COMMANDS = ("bound", "wavefunction", "scatter", "resonance", "flux", "asymptotic-check", "selfcheck")
DEFORMATIONS = tuple(k.value for k in Kind if k is not Kind.CUSTOM)
COMPUTATION_ERRORS = (DomainError, PoleError, NoSignChangeError, BudgetExceededError,
                      ExtrapolationError, ArithmeticError, ValueError)


class ConfigError(ValueError):
    """Bad configuration file or parameter combination (exit status 2)."""


@dataclass
class RunConfig:
    command: str = "selfcheck"
    deformation: str = "undeformed"
    beta: Optional[float] = None
    b: Optional[float] = None
    hbar: float = 1.0
    mass: float = 1.0
    v0: float = 1.0
    tol: float = 1e-10
    format: str = "csv"
    output: Optional[str] = None
    k: Optional[float] = None
    k_min: Optional[float] = None
    k_max: Optional[float] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    v0_min: Optional[float] = None
    v0_max: Optional[float] = None
    samples: Optional[int] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown subcommand {self.command!r}")
        if self.deformation not in DEFORMATIONS:
            raise ConfigError(f"deformation: expected one of {', '.join(DEFORMATIONS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format: expected csv or json")
        for name in ("beta", "b", "hbar", "mass", "v0", "tol", "k", "v0_min", "v0_max"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name}: must be positive and finite, got {value}")
        for name in ("k_min", "k_max"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name}: must be positive and finite, got {value}")
        if self.samples is not None and self.samples < 2:
            raise ConfigError(f"samples: must be at least 2, got {self.samples}")
        for lo, hi in (("k_min", "k_max"), ("x_min", "x_max"), ("v0_min", "v0_max")):
            a, b = getattr(self, lo), getattr(self, hi)
            if a is not None and b is not None and not a < b:
                raise ConfigError(f"{lo}: must be below {hi}")
        if self.deformation == "cutoff" and self.b is None:
            raise ConfigError("b: required for the cutoff deformation")
        if self.deformation in ("kempf", "maxmomentum") and self.beta is None and self.b is None:
            raise ConfigError(f"beta: required for the {self.deformation} deformation (or give b)")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return raw


def parse_config_text(text: str) -> Dict[str, Any]:
    """Parse flat ``key = value`` text; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "m":
            key = "mass"
        if key not in _FIELD_TYPES or key == "command":
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        out[key] = _convert(key, raw)
    return out


def load_config(path: str, command: str = "selfcheck", overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read a config file, apply ``overrides`` on top and validate."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(command=command, **values).validate()


@dataclass
class OutputRecord:
    command: str
    parameters: Dict[str, Any]
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".15g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return _fmt(value)
    # round-trip through the CSV form so both formats carry the same digits
    return float(format(value, ".15g"))


def render_csv(record: OutputRecord) -> str:
    lines = [f"# schema_version={record.schema_version}", f"# command={record.command}"]
    lines += [f"# {k}={_fmt(v)}" for k, v in record.parameters.items()]
    lines.append(",".join(record.columns))
    for row in record.rows:
        if row.get("k_star") == "none":
            lines.append(f"# no resonance for v0={_fmt(row['v0'])}")
            continue
        lines.append(",".join(_fmt(row[c]) for c in record.columns))
    lines += [f"# {note}" for note in record.notes]
    return "\n".join(lines) + "\n"


def render_json(record: OutputRecord) -> str:
    doc = {
        "schema_version": record.schema_version,
        "command": record.command,
        "parameters": {k: _json_value(v) for k, v in record.parameters.items()},
        "columns": record.columns,
        "rows": [{c: _json_value(row[c]) for c in record.columns} for row in record.rows],
    }
    if record.notes:
        doc["notes"] = record.notes
    return json.dumps(doc, indent=2) + "\n"


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV}: expected an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV}: must be at least 1")
    return n


@contextlib.contextmanager
def _pool():
    n = _worker_count()
    if n == 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=n) as ex:
        yield ex


def _map(pool, fn, items):
    return list(pool.map(fn, items) if pool is not None else map(fn, items))


def _setup(cfg: RunConfig):
    d = make_deformation(cfg.deformation, beta=cfg.beta, b=cfg.b, hbar=cfg.hbar)
    pot = PotentialSpec(cfg.v0, hbar=cfg.hbar, m=cfg.mass)
    params = {"deformation": d.kind.value}
    if d.beta is not None:
        params["beta"] = d.beta
    params.update({"b": d.b, "a": d.a, "hbar": cfg.hbar, "m": cfg.mass, "v0": cfg.v0,
                   "vtilde": pot.vtilde, "tol": cfg.tol})
    return d, pot, params


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


def _default_k_max(d) -> float:
    if math.isfinite(d.a):
        return 0.99 * d.a
    return 5.0 if d.beta is None else 5.0 / math.sqrt(d.beta)


def cmd_bound(cfg, d, pot, params, pool):
    state = bound.solve_bound_state(d, pot, tol=min(cfg.tol, bound.BOUND_TOL))
    row = {"q": state.q, "E": state.E, "norm_const": state.norm_const}
    return OutputRecord("bound", params, list(row), [row])


def cmd_wavefunction(cfg, d, pot, params, pool):
    state = bound.solve_bound_state(d, pot, tol=min(cfg.tol, bound.BOUND_TOL))
    x_min = -5.0 if cfg.x_min is None else cfg.x_min
    x_max = 5.0 if cfg.x_max is None else cfg.x_max
    n = cfg.samples or 101
    xs = _grid(x_min, x_max, n)
    params.update({"x_min": x_min, "x_max": x_max, "samples": n, "q": state.q, "E": state.E})
    if d.finite:
        psi = bound.bound_wavefunction_grid(d, state, pot, xs)
    else:
        psi = _map(pool, lambda x: bound.bound_wavefunction(d, state, pot, x, tol=cfg.tol), xs)
    rows = [{"x": x, "psi": v} for x, v in zip(xs, psi)]
    return OutputRecord("wavefunction", params, ["x", "psi"], rows)


def _k_grid(cfg, d, params):
    k_max = _default_k_max(d) if cfg.k_max is None else cfg.k_max
    n = cfg.samples or 50
    k_min = k_max / n if cfg.k_min is None else cfg.k_min
    if not k_min < k_max:
        raise ConfigError("k_min: must be below k_max")
    params.update({"k_min": k_min, "k_max": k_max, "samples": n})
    return _grid(k_min, k_max, n)


def cmd_scatter(cfg, d, pot, params, pool):
    ks = _k_grid(cfg, d, params)
    points = _map(pool, lambda k: scattering.scattering_point(d, pot, k, cfg.tol), ks)
    rows = [{"k": p.k, "p0": p.p0, "G": p.G, "T": p.T, "R": p.R} for p in points]
    return OutputRecord("scatter", params, ["k", "p0", "G", "T", "R"], rows)


def cmd_flux(cfg, d, pot, params, pool):
    ks = _k_grid(cfg, d, params)
    reports = _map(pool, lambda k: flux.flux_conservation_check(d, pot, k), ks)
    rows = [{"k": k, "j_incident": r.j_incident, "j_transmitted": r.j_transmitted,
             "j_reflected": r.j_reflected, "conservation_defect": r.conservation_defect}
            for k, r in zip(ks, reports)]
    return OutputRecord("flux", params, list(rows[0]), rows)


def cmd_resonance(cfg, d, pot, params, pool):
    v0_min = 0.5 if cfg.v0_min is None else cfg.v0_min
    v0_max = 5.0 if cfg.v0_max is None else cfg.v0_max
    n = cfg.samples or 10
    if math.isfinite(d.a):
        k_max = d.a if cfg.k_max is None else cfg.k_max
    else:
        k_max = (10.0 if d.beta is None else 10.0 / math.sqrt(d.beta)) if cfg.k_max is None else cfg.k_max
    params.update({"v0_min": v0_min, "v0_max": v0_max, "samples": n, "k_max": k_max})
    del params["v0"], params["vtilde"]
    v0s = _grid(v0_min, v0_max, n)
    vtildes = [PotentialSpec(v, cfg.hbar, cfg.mass).vtilde for v in v0s]
    curve = scattering.resonance_curve(d, vtildes, k_max, pool=pool)
    found: Dict[float, List[scattering.ResonancePoint]] = {}
    for pt in curve.points:
        found.setdefault(pt.vtilde, []).append(pt)
    rows = []
    for v0, vt in zip(v0s, vtildes):
        hits = sorted(found.get(vt, []), key=lambda pt: pt.k_star)
        if not hits:
            rows.append({"v0": v0, "vtilde": vt, "k_star": "none", "edge_gap": "none"})
        for pt in hits:
            rows.append({"v0": v0, "vtilde": vt, "k_star": pt.k_star, "edge_gap": pt.gap})
    record = OutputRecord("resonance", params, ["v0", "vtilde", "k_star", "edge_gap"], rows)
    if curve.unresolved:
        record.notes.append(f"G unresolved at {len(curve.unresolved)} sweep points above "
                            f"k={_fmt(min(curve.unresolved))}")
    return record


def cmd_asymptotic(cfg, d, pot, params, pool):
    k = cfg.k if cfg.k is not None else (0.5 * d.a if math.isfinite(d.a) else 1.0)
    x_min = 20.0 * cfg.hbar / k if cfg.x_min is None else cfg.x_min
    x_max = 200.0 * cfg.hbar / k if cfg.x_max is None else cfg.x_max
    n = cfg.samples or 5
    xs = np.geomspace(x_min, x_max, n) if x_min > 0 else _grid(x_min, x_max, n)
    params.update({"k": k, "x_min": x_min, "x_max": x_max, "samples": n})
    del params["v0"], params["vtilde"]
    reports = _map(pool, lambda x: scattering.asymptotic_wave_check(d, k, [x], cfg.hbar), xs)
    rows = []
    for x, r in zip(xs, reports):
        v, lim = r.values[0], r.limits[0]
        rows.append({"x": x, "kernel_re": v.real, "kernel_im": v.imag, "far_re": lim.real,
                     "far_im": lim.imag, "deviation": r.deviations[0]})
    return OutputRecord("asymptotic-check", params, list(rows[0]), rows)


def _selfchecks() -> List[Tuple[str, Any, float, float]]:
    """(name, thunk, reference, tolerance) for the built-in oracle suite."""
    unit = PotentialSpec(1.0)
    kempf1 = make_deformation("kempf", beta=1.0)
    cutoff = make_deformation("cutoff", b=10.0)
    return [
        ("undeformed_bound_energy",
         lambda: bound.solve_bound_state(make_deformation("undeformed"), unit).E, -0.5, 1e-10),
        ("kempf_bound_energy_beta_0.01",
         lambda: bound.solve_bound_state(make_deformation("kempf", beta=0.01), unit).E,
         bound.kempf_bound_energy(0.01, unit), 1e-8),
        ("cutoff_G_k1", lambda: scattering.g_principal(cutoff, 1.0), math.log(9.0 / 11.0), 1e-8),
        ("kempf_G_k1", lambda: scattering.g_principal(kempf1, 1.0), -math.pi / 2.0, 1e-8),
        ("maxmomentum_G_k0.5",
         lambda: scattering.g_principal(make_deformation("maxmomentum", beta=1.0), 0.5), 0.0, 1e-8),
        ("kempf_resonance",
         lambda: scattering.find_resonance(kempf1, PotentialSpec.from_vtilde(1.0), 0.5, 3.0),
         math.sqrt(math.pi - 1.0), 1e-8),
        ("cutoff_unitarity",
         lambda: sum(scattering.transmission_reflection(cutoff, PotentialSpec.from_vtilde(4.0), 3.0)),
         1.0, 1e-12),
        ("kernel_peak",
         lambda: quasiposition.tilde_delta(quasiposition.KernelContext(cutoff), 0.0), 10.0 / math.pi, 1e-14),
        ("kempf_flux_pi_over_4", lambda: flux.plane_wave_flux(kempf1, unit, math.pi / 4.0), 2.0, 1e-12),
    ]


def cmd_selfcheck(cfg, params_unused=None):
    rows = []
    for name, thunk, reference, tol in _selfchecks():
        value = float(thunk())
        error = abs(value - reference)
        rows.append({"check": name, "value": value, "reference": reference, "error": error,
                     "passed": bool(error <= tol)})
    params = {"checks": len(rows)}
    return OutputRecord("selfcheck", params, ["check", "value", "reference", "error", "passed"], rows)


HANDLERS = {
    "bound": cmd_bound,
    "wavefunction": cmd_wavefunction,
    "scatter": cmd_scatter,
    "resonance": cmd_resonance,
    "flux": cmd_flux,
    "asymptotic-check": cmd_asymptotic,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of key = value lines; flags override it")
    common.add_argument("--deformation", choices=DEFORMATIONS)
    common.add_argument("--beta", type=float)
    common.add_argument("--b", type=float, help="momentum-domain half-width")
    common.add_argument("--v0", type=float, help="coupling V0; the reduced vtilde is echoed")
    common.add_argument("--hbar", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", help="write here instead of stdout")
    for flag in ("k", "k-min", "k-max", "x-min", "x-max", "v0-min", "v0-max"):
        common.add_argument(f"--{flag}", type=float)
    common.add_argument("--samples", type=int)

    parser = argparse.ArgumentParser(prog="minlen-delta",
                                     description="Point interaction under deformed commutators.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if args.config:
        return load_config(args.config, args.command, flags)
    return RunConfig(command=args.command, **{k: v for k, v in flags.items() if v is not None}).validate()


def _emit(record: OutputRecord, cfg: RunConfig):
    text = render_json(record) if cfg.format == "json" else render_csv(record)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[List[str]] = None) -> Tuple[int, Optional[OutputRecord]]:
    """Parse ``argv``, run the subcommand and emit its output."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    try:
        cfg = _resolve(args)
        with _pool() as pool:
            if cfg.command == "selfcheck":
                record = cmd_selfcheck(cfg)
            else:
                d, pot, params = _setup(cfg)
                record = HANDLERS[cfg.command](cfg, d, pot, params, pool)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    except COMPUTATION_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1, None
    _emit(record, cfg)
    if cfg.command == "selfcheck":
        for row in record.rows:
            print(f"{'PASS' if row['passed'] else 'FAIL'} {row['check']}", file=sys.stderr)
        if not all(row["passed"] for row in record.rows):
            return 1, record
    return 0, record


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)[0]
