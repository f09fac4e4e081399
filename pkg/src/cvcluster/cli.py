"""Command-line front end: run protocols, sweeps, table checks, estimators.

All protocol computations are dimensionless (rates in units of kappa,
times in units of 1/kappa); the ``physical`` subcommand exposes the two
SI-unit estimators.  Results are written as a single JSON document with a
schema name and version; floats serialise with full round-trip precision.

Exit codes: 0 pass, 1 verdict failure, 2 configuration error, 3 physics
error (unstable stage or truncated-basis overflow).
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import CutoffTooSmallError, InvalidParameterError, NonHurwitzError
from .fock import FockConfig, integrate_two_mode
from .gaussian import GaussianState, evolve, purity, symplectic_eigenvalues
from .model import (
    PhysicalParams,
    cavity_decay_from_finesse,
    effective_spontaneous_rate,
    two_mode_drift_diffusion,
)
from .protocols import PROTOCOL_KINDS, builtin_protocol, run_protocol
from .tables import check_tables
from .verify import analytic_targets, is_cluster, vacuum_targets

EXIT_PASS = 0
EXIT_VERDICT_FAIL = 1
EXIT_CONFIG_ERROR = 2
EXIT_PHYSICS_ERROR = 3

SCHEMA_NAME = "cvcluster/result"
SCHEMA_VERSION = 1

_METHODS = {"lyapunov": "lyapunov_sequential", "ode": "time_domain"}
_DEFAULT_TOL = {"lyapunov": 1e-6, "ode": 0.05}


class ConfigError(Exception):
    """Invalid run configuration; message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    protocol: str
    r: float
    beta: float
    stage_time: float
    method: str  # "lyapunov" | "ode"
    tol: float
    oracle: bool = False
    oracle_cutoff: int = 20

    def validate(self) -> "RunConfig":
        if self.protocol not in PROTOCOL_KINDS:
            raise ConfigError(f"field 'protocol': unknown value {self.protocol!r}")
        if not 0.0 <= self.r < 1.0:
            raise ConfigError(f"field 'r': must lie in [0, 1), got {self.r}")
        if self.beta <= 0:
            raise ConfigError(f"field 'beta': must be positive, got {self.beta}")
        if self.stage_time <= 0:
            raise ConfigError(f"field 'stage_time': must be positive, got {self.stage_time}")
        if self.method not in _METHODS:
            raise ConfigError(f"field 'method': must be one of {sorted(_METHODS)}")
        if self.tol <= 0:
            raise ConfigError(f"field 'tol': must be positive, got {self.tol}")
        if self.oracle_cutoff < 4:
            raise ConfigError(f"field 'oracle_cutoff': must be at least 4, got {self.oracle_cutoff}")
        return self

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "r": self.r,
            "beta": self.beta,
            "stage_time": self.stage_time,
            "method": self.method,
            "tol": self.tol,
            "oracle": self.oracle,
            "oracle_cutoff": self.oracle_cutoff,
        }


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _document(kind: str, payload: dict) -> dict:
    return {
        "schema": f"cvcluster/{kind}",
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        **payload,
    }


def _write(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_once(config: RunConfig) -> tuple[dict, bool]:
    """Execute one protocol run; returns (result payload, verdict)."""
    params = PhysicalParams.from_ratios(config.beta, config.r, kappa=1.0)
    protocol = builtin_protocol(config.protocol, params, stage_time=config.stage_time)
    run = run_protocol(protocol, params, method=_METHODS[config.method])
    report = is_cluster(run.final_state, config.protocol, params.xi, config.tol)
    ensemble = run.ensemble_state
    payload = {
        "resolved_config": config.as_dict(),
        "warnings": list(run.warnings),
        "stages": [
            {
                "index": t.index,
                "target_mode": t.target_mode,
                "beam_splitter": _complex_pair(t.beam_splitter),
                "squeezing": _complex_pair(t.squeezing),
                "slow_regime": t.slow_regime,
                "nullifier_variances": t.nullifier_variances.tolist(),
                "ensemble_purity": t.ensemble_purity,
                "cavity_cross_norm": t.cavity_cross_norm,
            }
            for t in run.stages
        ],
        "final": {
            "mode_labels": list(run.final_state.mode_labels),
            "covariance_row_major": run.final_state.cov.reshape(-1).tolist(),
            "ensemble_covariance_row_major": ensemble.cov.reshape(-1).tolist(),
            "nullifier_variances": report.variances.tolist(),
            "analytic_targets": report.targets.tolist(),
            "vacuum_variances": report.vacuum.tolist(),
            "ensemble_purity": purity(ensemble.cov),
            "ensemble_symplectic_eigenvalues": symplectic_eigenvalues(ensemble.cov).tolist(),
        },
        "verdict": {
            "passed": report.passed,
            "tolerance": config.tol,
            "node_passed": report.node_passed.tolist(),
        },
    }
    return payload, report.passed


def _oracle_section(config: RunConfig) -> dict:
    """Cross-check the reduced cavity + target-mode model against the
    number-basis integrator at the configured beta, r and stage time."""
    fock = integrate_two_mode(
        FockConfig(
            beta=config.beta,
            r=config.r,
            kappa=1.0,
            t_final=config.stage_time,
            cutoff_a=config.oracle_cutoff,
            cutoff_d=config.oracle_cutoff,
        )
    )
    dd = two_mode_drift_diffusion(config.beta, config.r, kappa=1.0)
    gaussian = evolve(GaussianState.vacuum(("cavity", "d")), dd, config.stage_time)
    gap = float(np.abs(fock.covariance - gaussian.cov).max())
    return {
        "cutoff": config.oracle_cutoff,
        "t_final": config.stage_time,
        "max_covariance_gap": gap,
        "trace_error": fock.trace_error,
        "leakage": fock.leakage,
        "fock_covariance_row_major": fock.covariance.reshape(-1).tolist(),
        "gaussian_covariance_row_major": gaussian.cov.reshape(-1).tolist(),
    }


def _config_from_args(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"field 'config': cannot read {args.config}: {exc}") from exc
        # accept either a bare config object or a previous result document
        base = loaded.get("resolved_config", loaded)
        if not isinstance(base, dict):
            raise ConfigError("field 'config': document does not contain a config object")
        unknown = set(base) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"field 'config': unknown fields {sorted(unknown)}")
    merged = {
        "protocol": args.protocol if args.protocol is not None else base.get("protocol"),
        "r": args.r if args.r is not None else base.get("r", 0.5),
        "beta": args.beta if args.beta is not None else base.get("beta", 2.5),
        "stage_time": args.stage_time
        if args.stage_time is not None
        else base.get("stage_time", 4.0),
        "method": args.method if args.method is not None else base.get("method", "lyapunov"),
        "oracle": args.oracle or base.get("oracle", False),
        "oracle_cutoff": args.oracle_cutoff
        if args.oracle_cutoff is not None
        else base.get("oracle_cutoff", 20),
    }
    if merged["protocol"] is None:
        raise ConfigError("field 'protocol': required (flag --protocol or config file)")
    tol = args.tol if args.tol is not None else base.get("tol")
    if tol is None:
        tol = _DEFAULT_TOL.get(merged["method"], 1e-6)
    merged["tol"] = tol
    try:
        return RunConfig(**merged).validate()
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


def cmd_run(args) -> int:
    config = _config_from_args(args)
    payload, passed = _run_once(config)
    if config.oracle:
        payload["oracle"] = _oracle_section(config)
    else:
        payload["oracle"] = None
    _write(_document("result", payload), args.out)
    return EXIT_PASS if passed else EXIT_VERDICT_FAIL


def _sweep_point(protocol: str, method: str, tol: float, point) -> dict:
    beta, r, stage_time = point
    config = RunConfig(
        protocol=protocol, r=r, beta=beta, stage_time=stage_time, method=method, tol=tol
    ).validate()
    payload, passed = _run_once(config)
    variances = np.array(payload["final"]["nullifier_variances"])
    targets = analytic_targets(protocol, math.atanh(r))
    return {
        "beta": beta,
        "r": r,
        "stage_time": stage_time,
        "max_abs_error": float(np.abs(variances - targets).max()),
        "slow_regime": bool(beta * math.sqrt(1.0 - r**2) <= 0.5),
        "passed": passed,
    }


def cmd_sweep(args) -> int:
    try:
        betas = [float(x) for x in args.beta.split(",") if x.strip()]
        rs = [float(x) for x in args.r.split(",") if x.strip()]
        stage_times = [float(x) for x in args.stage_time.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"grid values must be numbers: {exc}") from exc
    if not betas or not rs or not stage_times:
        raise ConfigError("field 'beta'/'r'/'stage_time': sweep grid must be nonempty")
    if args.protocol is None:
        raise ConfigError("field 'protocol': required")
    method = args.method if args.method is not None else "ode"
    tol = args.tol if args.tol is not None else _DEFAULT_TOL[method]
    grid = [(b, r, t) for b in betas for r in rs for t in stage_times]
    # gather by grid index, not completion order, so output is deterministic
    with ThreadPoolExecutor(max_workers=min(8, len(grid))) as pool:
        rows = list(pool.map(lambda p: _sweep_point(args.protocol, method, tol, p), grid))
    doc = _document(
        "sweep",
        {
            "resolved_config": {
                "protocol": args.protocol,
                "beta": betas,
                "r": rs,
                "stage_time": stage_times,
                "method": method,
                "tol": tol,
            },
            "rows": rows,
        },
    )
    _write(doc, args.out)
    return EXIT_PASS


def cmd_check_tables(args) -> int:
    report = check_tables(r=args.r)
    lines = []
    for entry in report.entries:
        tag = f"[{entry.kind} stage {entry.index}]"
        if entry.matches:
            lines.append(f"{tag} OK")
        elif entry.whitelisted:
            lines.append(f"{tag} WHITELISTED ({len(entry.mismatches)} differing entries)")
            for note in entry.notes:
                lines.append(f"    note: {note}")
            for mm in entry.mismatches:
                lines.append(f"    {mm}")
        else:
            lines.append(f"{tag} UNEXPECTED MISMATCH")
            for mm in entry.mismatches:
                lines.append(f"    {mm}")
    summary = "all mismatches whitelisted" if report.ok else "UNEXPECTED MISMATCHES PRESENT"
    lines.append(f"checked {len(report.entries)} stages: {summary}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        doc = _document(
            "table-check",
            {
                "ok": report.ok,
                "entries": [
                    {
                        "kind": e.kind,
                        "index": e.index,
                        "matches": e.matches,
                        "whitelisted": e.whitelisted,
                        "mismatches": [str(m) for m in e.mismatches],
                        "notes": list(e.notes),
                    }
                    for e in report.entries
                ],
            },
        )
        _write(doc, args.out)
    return EXIT_PASS if report.ok else EXIT_VERDICT_FAIL


def cmd_physical(args) -> int:
    payload = {}
    if (args.finesse is None) != (args.round_trip_length is None):
        raise ConfigError("fields 'finesse' and 'round_trip_length' must be given together")
    if (args.gamma_over_2pi is None) != (args.drive_ratio is None):
        raise ConfigError("fields 'gamma_over_2pi' and 'drive_ratio' must be given together")
    if args.finesse is None and args.gamma_over_2pi is None:
        raise ConfigError("nothing to compute: give a finesse/length or a gamma/ratio pair")
    if args.finesse is not None:
        kappa = cavity_decay_from_finesse(args.finesse, args.round_trip_length)
        payload["cavity"] = {
            "finesse": args.finesse,
            "round_trip_length_m": args.round_trip_length,
            "kappa_rad_per_s": kappa,
            "kappa_over_2pi_hz": kappa / (2.0 * math.pi),
        }
    if args.gamma_over_2pi is not None:
        payload["spontaneous_emission"] = {
            "gamma_over_2pi_hz": args.gamma_over_2pi,
            "drive_ratio": args.drive_ratio,
            "gamma_eff_hz": effective_spontaneous_rate(args.gamma_over_2pi, args.drive_ratio),
        }
    _write(_document("physical", payload), args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvcluster",
        description="Dissipative preparation of four-mode cluster states in a ring cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one protocol and verify the final state")
    run.add_argument("--protocol", choices=PROTOCOL_KINDS, default=None)
    run.add_argument("--r", type=float, default=None, help="squeezing drive ratio in [0, 1)")
    run.add_argument("--beta", type=float, default=None, help="coupling beta in units of kappa")
    run.add_argument("--stage-time", type=float, default=None, help="per-stage time, units 1/kappa")
    run.add_argument("--method", choices=sorted(_METHODS), default=None)
    run.add_argument("--tol", type=float, default=None, help="verdict tolerance per nullifier")
    run.add_argument("--oracle", action="store_true", help="add the number-basis cross-check")
    run.add_argument("--oracle-cutoff", type=int, default=None)
    run.add_argument("--config", default=None, help="JSON config or previous result document")
    run.add_argument("--out", default=None, help="output path (stdout when omitted)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="grid over beta, r and stage time")
    sweep.add_argument("--protocol", choices=PROTOCOL_KINDS, default=None)
    sweep.add_argument("--beta", default="2.5", help="comma-separated values")
    sweep.add_argument("--r", default="0.5", help="comma-separated values")
    sweep.add_argument("--stage-time", default="4", help="comma-separated values")
    sweep.add_argument("--method", choices=sorted(_METHODS), default=None)
    sweep.add_argument("--tol", type=float, default=None)
    sweep.add_argument("--out", default=None)
    sweep.set_defaults(func=cmd_sweep)

    tables = sub.add_parser("check-tables", help="compare generated stages with reference tables")
    tables.add_argument("--r", type=float, default=0.5)
    tables.add_argument("--out", default=None)
    tables.set_defaults(func=cmd_check_tables)

    physical = sub.add_parser("physical", help="SI-unit estimators")
    physical.add_argument("--finesse", type=float, default=None)
    physical.add_argument("--round-trip-length", type=float, default=None, help="meters")
    physical.add_argument("--gamma-over-2pi", type=float, default=None, help="Hz")
    physical.add_argument("--drive-ratio", type=float, default=None, help="Omega / Delta")
    physical.add_argument("--out", default=None)
    physical.set_defaults(func=cmd_physical)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (NonHurwitzError, CutoffTooSmallError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS_ERROR


if __name__ == "__main__":
    sys.exit(main())
