"""JSON/CSV command line front end.

Usage::

    spinchamber --config run.json --command simulate
    spinchamber --config run.json --command decide
    spinchamber --config run.json --command sweep \
        --sweep dtheta:1e-70:1e-40:31:log --out sweep.csv

Single commands print one JSON document to stdout (and to ``--out`` when
given); ``sweep`` writes an RFC-4180 CSV plus a ``<out>.meta.json``
run-metadata sidecar, keeping the data files themselves deterministic.
Failures exit nonzero with a one-line JSON error payload on stderr.  Both
the input document and every emitted JSON document have published schemas
under ``spinchamber/schemas/``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import importlib.resources
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import jsonschema

from . import __version__
from .analytic import (
    ClockParams,
    decoherence_factor,
    reduced_density_matrix,
    x_string_expectation_realclock_log,
    x_string_expectation_unitary,
)
from .config import EnvSpin, ExperimentConfig
from .constants import CODATA2018
from .exact import (
    CapExceededError,
    DEFAULT_ENV_CAP,
    evolve_sequential,
    partial_trace_env,
    x_string_expectation,
    x_string_expectation_collapsed,
)
from .limits import MeasuringDevice, angle_resolution_floor
from .logmag import LogMagnitude
from .verdict import (
    UndecidabilityVerdict,
    decide,
    decide_local,
    feasibility_check,
    undecidability_crossover,
)

__all__ = ["RunManifest", "SweepAxis", "CliError", "run", "main"]

COMMANDS = (
    "simulate",
    "analytic",
    "limits",
    "feasibility",
    "decide",
    "crossover",
    "sweep",
)

SWEEP_PARAMETERS = ("N", "tau", "dtheta", "f", "B_dgamma")

SWEEP_COLUMNS = [
    "parameter",
    "value",
    "n_env",
    "dtheta",
    "signal_log10",
    "signal_linear",
    "floor_log10",
    "floor_linear",
    "margin_log10",
    "verdict",
    "bound_signal_log10",
    "bound_margin_log10",
    "bound_verdict",
    "local_signal_log10",
    "local_floor_log10",
    "local_margin_log10",
    "local_verdict",
]

_EXIT_CODES = {
    "usage": 2,
    "schema": 2,
    "config": 2,
    "resource-cap": 3,
    "sweep-parameter": 4,
    "io": 5,
    "internal": 1,
}


class CliError(Exception):
    """Failure with a machine-readable kind and optional offending field."""

    def __init__(self, kind: str, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.kind = kind
        self.field = field


@dataclass(frozen=True)
class SweepAxis:
    """Parsed ``--sweep PARAM:START:STOP:POINTS:SCALE`` axis descriptor."""

    parameter: str
    start: float
    stop: float
    points: int
    scale: str

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        parts = text.split(":")
        if len(parts) != 5:
            raise CliError(
                "sweep-parameter",
                f"sweep spec must be PARAM:START:STOP:POINTS:SCALE, got {text!r}",
            )
        param, start_s, stop_s, points_s, scale = parts
        if param not in SWEEP_PARAMETERS:
            raise CliError(
                "sweep-parameter",
                f"unknown sweep parameter {param!r}; choose from "
                f"{', '.join(SWEEP_PARAMETERS)}",
                field=param,
            )
        try:
            start, stop, points = float(start_s), float(stop_s), int(points_s)
        except ValueError as exc:
            raise CliError("sweep-parameter", f"bad sweep spec {text!r}: {exc}")
        if points < 1:
            raise CliError("sweep-parameter", "sweep needs at least one point")
        if scale not in ("lin", "log"):
            raise CliError(
                "sweep-parameter", f"scale must be 'lin' or 'log', got {scale!r}"
            )
        if scale == "log" and (start <= 0 or stop <= 0):
            raise CliError(
                "sweep-parameter", "log-scale sweeps need positive endpoints"
            )
        return cls(param, start, stop, points, scale)

    def grid(self) -> list:
        if self.points == 1:
            return [self.start]
        if self.scale == "lin":
            step = (self.stop - self.start) / (self.points - 1)
            return [self.start + i * step for i in range(self.points)]
        lstart, lstop = math.log10(self.start), math.log10(self.stop)
        lstep = (lstop - lstart) / (self.points - 1)
        return [10.0 ** (lstart + i * lstep) for i in range(self.points)]


@dataclass(frozen=True)
class RunManifest:
    """Everything one invocation is about to do; serialised into sidecars."""

    command: str
    config_path: str
    output_path: Optional[str]
    sweep: Optional[SweepAxis]
    n_cap: int
    dephasing_mode: bool


# -- JSON helpers ----------------------------------------------------------


def _jf(x) -> Optional[float]:
    """Floats for JSON: None when non-finite."""
    x = float(x)
    return x if math.isfinite(x) else None


def _amp(z: complex) -> list:
    return [_jf(z.real), _jf(z.imag)]


def _matrix2(m) -> list:
    return [[_amp(complex(m[i, j])) for j in range(2)] for i in range(2)]


def _magnitude(lm: LogMagnitude) -> dict:
    if lm.sign == 0:
        return {"sign": 0, "log10": None, "linear": 0.0}
    linear = lm.to_float()
    if linear == 0.0 or math.isinf(linear):
        linear = None
    return {"sign": lm.sign, "log10": _jf(lm.log10_mag), "linear": linear}


def _verdict_json(v: UndecidabilityVerdict) -> dict:
    return {
        "signal": _magnitude(v.signal),
        "floor": _magnitude(v.floor),
        "preparation_floor": _magnitude(v.preparation_floor),
        "cross_terms": _magnitude(v.cross_terms),
        "verdict": v.verdict,
        "margin_log10": _jf(v.margin_log10),
    }


# -- config loading --------------------------------------------------------


def _config_schema() -> dict:
    ref = importlib.resources.files("spinchamber.schemas") / "config.schema.json"
    return json.loads(ref.read_text())


def load_config_document(path: str) -> dict:
    """Read, parse and schema-validate a run configuration file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliError("io", f"cannot read config file {path!r}: {exc}")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError("schema", f"config file is not valid JSON: {exc}")
    validator = jsonschema.Draft202012Validator(_config_schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        field = "/".join(str(p) for p in error.absolute_path) or "(document root)"
        raise CliError("schema", f"config field {field}: {error.message}", field=field)
    return doc


def _experiment(doc: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_json_dict(doc["experiment"])
    except ValueError as exc:
        raise CliError("config", str(exc))


def _clock(doc: dict, cfg: ExperimentConfig) -> Optional[ClockParams]:
    """Clock from the document; None means the standard clock for cfg."""
    section = doc.get("clock") or {}
    theta = section.get("theta")
    t_exp = section.get("T_exp")
    if theta is None and t_exp is None:
        return None
    if theta is None:
        return ClockParams.for_flight_time(cfg.tau, float(t_exp))
    return ClockParams(
        theta=float(theta),
        T_exp=cfg.T_total if t_exp is None else float(t_exp),
    )


def _require_dtheta(doc: dict, command: str) -> float:
    if "dtheta" not in doc:
        raise CliError("config", f"the {command} command requires 'dtheta'")
    return float(doc["dtheta"])


# -- command handlers ------------------------------------------------------


def _cmd_simulate(doc: dict, manifest: RunManifest) -> dict:
    cfg = _experiment(doc)
    psi = evolve_sequential(
        cfg, dephasing=manifest.dephasing_mode, n_cap=manifest.n_cap
    )
    rho = partial_trace_env(psi)
    return {
        "command": "simulate",
        "n_env": cfg.n_env,
        "dephasing_mode": manifest.dephasing_mode,
        "norm": _jf(psi.norm()),
        "reduced_rho": _matrix2(rho.matrix),
        "x_string": _jf(x_string_expectation(psi)),
        "x_string_collapsed": _jf(x_string_expectation_collapsed(cfg)),
    }


def _cmd_analytic(doc: dict, manifest: RunManifest) -> dict:
    cfg = _experiment(doc)
    clock = _clock(doc, cfg) or ClockParams.for_config(cfg)
    rho = reduced_density_matrix(cfg)
    try:
        realclock = _magnitude(x_string_expectation_realclock_log(cfg, clock))
    except ValueError:
        # The real-clock closed form needs identical couplings; the rest of
        # the analytic payload is still well defined without it.
        realclock = None
    return {
        "command": "analytic",
        "n_env": cfg.n_env,
        "theta": _jf(clock.theta),
        "T_exp": _jf(clock.T_exp),
        "decoherence_factor": _amp(decoherence_factor(cfg)),
        "reduced_rho": _matrix2(rho.matrix),
        "x_string_unitary": _jf(x_string_expectation_unitary(cfg)),
        "x_string_realclock": realclock,
    }


def _cmd_limits(doc: dict, manifest: RunManifest) -> dict:
    if "device" not in doc:
        raise CliError("config", "the limits command requires 'device'")
    dev = doc["device"]
    report = angle_resolution_floor(
        MeasuringDevice(dev["mass"], dev["radius"], dev["duration"])
    )
    return {
        "command": "limits",
        "bound_quantum": _jf(report.bound_quantum),
        "bound_sr": _jf(report.bound_sr),
        "bound_gr": _jf(report.bound_gr),
        "sr_consistent": report.sr_consistent,
        "gr_consistent": report.gr_consistent,
        "binding": _jf(report.binding),
    }


def _cmd_feasibility(doc: dict, manifest: RunManifest) -> dict:
    cfg = _experiment(doc)
    report = feasibility_check(cfg)
    return {
        "command": "feasibility",
        "conditions": [
            {
                "name": c.name,
                "value": _jf(c.value),
                "passed": c.passed,
                "margin_log10": None if c.margin_log10 is None else _jf(c.margin_log10),
            }
            for c in report.conditions
        ],
        "all_passed": report.all_passed,
    }


def _decide_both(cfg: ExperimentConfig, clock, dtheta: float) -> tuple:
    direct = decide(cfg, clock, dtheta, k_model="direct")
    try:
        bound = decide(cfg, clock, dtheta, k_model="bound")
    except ValueError:
        bound = None
    return direct, bound


def _cmd_decide(doc: dict, manifest: RunManifest) -> dict:
    cfg = _experiment(doc)
    dtheta = _require_dtheta(doc, "decide")
    direct, bound = _decide_both(cfg, _clock(doc, cfg), dtheta)
    return {
        "command": "decide",
        "dtheta": dtheta,
        "n_env": cfg.n_env,
        "direct": _verdict_json(direct),
        "bound": None if bound is None else _verdict_json(bound),
    }


def _cmd_crossover(doc: dict, manifest: RunManifest) -> dict:
    cfg = _experiment(doc)
    dtheta = _require_dtheta(doc, "crossover")
    if "n_max" not in doc:
        raise CliError("config", "the crossover command requires 'n_max'")
    result = undecidability_crossover(cfg, dtheta, int(doc["n_max"]))
    return {
        "command": "crossover",
        "dtheta": result.dtheta,
        "n_max": result.n_max,
        "n_star_bound_model": result.n_star_bound_model,
        "n_star_direct_model": result.n_star_direct_model,
    }


# -- sweep -----------------------------------------------------------------


def _sweep_point(
    cfg: ExperimentConfig, doc_dtheta: float, param: str, value: float
) -> tuple:
    """Config and dtheta at one grid point; returns (cfg, dtheta, recorded value)."""
    if param == "N":
        n = int(round(value))
        if n < 0:
            raise CliError("sweep-parameter", f"N must be non-negative, got {value!r}")
        if not cfg.env:
            raise CliError(
                "config", "an N sweep needs one environment spin as template"
            )
        template = cfg.env[0]
        env = (template,) * n
        new = ExperimentConfig(
            central=cfg.central, env=env, B=cfg.B, gamma1=cfg.gamma1,
            gamma2=cfg.gamma2, tau=cfg.tau,
            T_total=max(cfg.T_total, n * cfg.tau), m=cfg.m, d=cfg.d,
        )
        return new, doc_dtheta, n
    if param == "tau":
        if value <= 0:
            raise CliError("sweep-parameter", f"tau must be positive, got {value!r}")
        new = ExperimentConfig(
            central=cfg.central, env=cfg.env, B=cfg.B, gamma1=cfg.gamma1,
            gamma2=cfg.gamma2, tau=value,
            T_total=max(cfg.T_total, cfg.n_env * value), m=cfg.m, d=cfg.d,
        )
        return new, doc_dtheta, value
    if param == "dtheta":
        return cfg, value, value
    if param == "f":
        env = tuple(EnvSpin(s.state, value) for s in cfg.env)
        new = ExperimentConfig(
            central=cfg.central, env=env, B=cfg.B, gamma1=cfg.gamma1,
            gamma2=cfg.gamma2, tau=cfg.tau, T_total=cfg.T_total, m=cfg.m, d=cfg.d,
        )
        return new, doc_dtheta, value
    if param == "B_dgamma":
        if cfg.B == 0:
            raise CliError("config", "a B_dgamma sweep needs a nonzero field B")
        gamma1 = cfg.gamma2 + value * CODATA2018.hbar / cfg.B
        new = ExperimentConfig(
            central=cfg.central, env=cfg.env, B=cfg.B, gamma1=gamma1,
            gamma2=cfg.gamma2, tau=cfg.tau, T_total=cfg.T_total, m=cfg.m, d=cfg.d,
        )
        return new, doc_dtheta, value
    raise CliError("sweep-parameter", f"unknown sweep parameter {param!r}", field=param)


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _lm_log10(lm: LogMagnitude) -> Optional[float]:
    return None if lm.sign == 0 else lm.log10_mag


def _lm_linear(lm: LogMagnitude) -> Optional[float]:
    if lm.sign == 0:
        return 0.0
    linear = lm.to_float()
    if linear == 0.0 or math.isinf(linear):
        return None
    return linear


def _cmd_sweep(doc: dict, manifest: RunManifest) -> dict:
    if manifest.sweep is None:
        raise CliError("usage", "the sweep command requires --sweep")
    if manifest.output_path is None:
        raise CliError("usage", "the sweep command requires --out")
    axis = manifest.sweep
    cfg = _experiment(doc)
    doc_dtheta = _require_dtheta(doc, "sweep")
    clock_doc = _clock(doc, cfg)

    rows = []
    for value in axis.grid():
        point_cfg, dtheta, recorded = _sweep_point(cfg, doc_dtheta, axis.parameter, value)
        direct, bound = _decide_both(point_cfg, clock_doc, dtheta)
        local = decide_local(point_cfg, dtheta)
        row = {
            "parameter": axis.parameter,
            "value": recorded,
            "n_env": point_cfg.n_env,
            "dtheta": dtheta,
            "signal_log10": _lm_log10(direct.signal),
            "signal_linear": _lm_linear(direct.signal),
            "floor_log10": _lm_log10(direct.floor),
            "floor_linear": _lm_linear(direct.floor),
            "margin_log10": direct.margin_log10,
            "verdict": direct.verdict,
            "bound_signal_log10": None if bound is None else _lm_log10(bound.signal),
            "bound_margin_log10": None if bound is None else bound.margin_log10,
            "bound_verdict": None if bound is None else bound.verdict,
            "local_signal_log10": _lm_log10(local.signal),
            "local_floor_log10": _lm_log10(local.floor),
            "local_margin_log10": local.margin_log10,
            "local_verdict": local.verdict,
        }
        rows.append(row)

    out = Path(manifest.output_path)
    try:
        with out.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SWEEP_COLUMNS)
            for row in rows:
                writer.writerow([_csv_cell(row[c]) for c in SWEEP_COLUMNS])
    except OSError as exc:
        raise CliError("io", f"cannot write sweep output {out}: {exc}")
    meta_path = _write_sidecar(out, manifest, extra={"columns": SWEEP_COLUMNS})
    return {
        "command": "sweep",
        "parameter": axis.parameter,
        "points": len(rows),
        "out": str(out),
        "metadata": str(meta_path),
    }


# -- plumbing --------------------------------------------------------------


def _config_sha256(path: str) -> Optional[str]:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError:
        return None


def _write_sidecar(out: Path, manifest: RunManifest, extra: Optional[dict] = None) -> Path:
    meta = {
        "command": manifest.command,
        "config_path": manifest.config_path,
        "config_sha256": _config_sha256(manifest.config_path),
        "out": manifest.output_path,
        "sweep": None if manifest.sweep is None else asdict(manifest.sweep),
        "n_cap": manifest.n_cap,
        "dephasing_mode": manifest.dephasing_mode,
        "package_version": __version__,
        "constants_version": "CODATA2018",
    }
    if extra:
        meta.update(extra)
    meta_path = out.with_name(out.name + ".meta.json")
    try:
        meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        raise CliError("io", f"cannot write metadata sidecar {meta_path}: {exc}")
    return meta_path


_HANDLERS = {
    "simulate": _cmd_simulate,
    "analytic": _cmd_analytic,
    "limits": _cmd_limits,
    "feasibility": _cmd_feasibility,
    "decide": _cmd_decide,
    "crossover": _cmd_crossover,
    "sweep": _cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # raise instead of sys.exit(2)
        raise CliError("usage", message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spinchamber", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", required=True, metavar="PATH",
                        help="run configuration JSON file")
    parser.add_argument("--command", required=True, choices=COMMANDS,
                        help="what to compute")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output file (required for sweep)")
    parser.add_argument("--sweep", metavar="PARAM:START:STOP:POINTS:SCALE",
                        default=None,
                        help=f"sweep axis; PARAM in {{{', '.join(SWEEP_PARAMETERS)}}},"
                             " SCALE lin or log")
    parser.add_argument("--n-cap", type=int, default=DEFAULT_ENV_CAP,
                        help="exact-evolution environment cap (default %(default)s)")
    parser.add_argument("--dephasing-mode", action="store_true",
                        help="truncate the coupling to its sz*sz part")
    return parser


def run(manifest: RunManifest) -> dict:
    """Execute one manifest and return the stdout payload."""
    doc = load_config_document(manifest.config_path)
    handler = _HANDLERS[manifest.command]
    with warnings.catch_warnings():
        # Regime warnings are a library affordance; the CLI keeps stderr
        # reserved for error payloads.
        warnings.simplefilter("ignore")
        payload = handler(doc, manifest)
    if manifest.command != "sweep" and manifest.output_path is not None:
        out = Path(manifest.output_path)
        try:
            out.write_text(json.dumps(payload, indent=2) + "\n")
        except OSError as exc:
            raise CliError("io", f"cannot write output {out}: {exc}")
        _write_sidecar(out, manifest)
    return payload


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        sweep = SweepAxis.parse(args.sweep) if args.sweep is not None else None
        if args.n_cap < 0:
            raise CliError("usage", f"--n-cap must be non-negative, got {args.n_cap}")
        manifest = RunManifest(
            command=args.command,
            config_path=args.config,
            output_path=args.out,
            sweep=sweep,
            n_cap=args.n_cap,
            dephasing_mode=args.dephasing_mode,
        )
        payload = run(manifest)
    except CliError as exc:
        _emit_error(exc.kind, str(exc), exc.field)
        return _EXIT_CODES.get(exc.kind, 1)
    except CapExceededError as exc:
        _emit_error("resource-cap", str(exc))
        return _EXIT_CODES["resource-cap"]
    except ValueError as exc:
        _emit_error("config", str(exc))
        return _EXIT_CODES["config"]
    print(json.dumps(payload, indent=2))
    return 0


def _emit_error(kind: str, message: str, field: Optional[str] = None) -> None:
    payload = {"error": {"kind": kind, "message": message}}
    if field is not None:
        payload["error"]["field"] = field
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
