"""``dfs-sim`` command line: run | enumerate | verify | noise-bench.

Settings come from an optional JSON ``--config`` file; command-line flags
override it.  Exit codes: 0 all checks pass, 1 verification failure,
2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Sequence

import numpy as np

from .equations import TOL, verify_suite
from .logic import LogicalAmplitudes
from .noise import (
    AngleDistribution,
    ErrorOperatorSpec,
    dfs_weight_under_errors,
    fidelity_samples,
)
from .oracle import enumerate_branches
from .protocols import (
    PROTOCOLS,
    TABLE_1,
    PhaseParams,
    ProtocolSpec,
    aligned_output,
    run_protocol_sampled,
)

COMMANDS = ("run", "enumerate", "verify", "noise-bench")

DEFAULT_DISTRIBUTIONS = (
    {"kind": "uniform", "low": 0.0, "high": 2 * math.pi},
    {"kind": "fixed", "value": math.pi},
    {"kind": "gaussian", "mean": 0.0, "sigma": 0.25},
    {"kind": "gaussian", "mean": 0.0, "sigma": 0.5},
    {"kind": "gaussian", "mean": 0.0, "sigma": 1.0},
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "run"
    protocol: str = "hadamard"
    alpha: complex = 1.0
    beta: complex = 0.0
    c: complex = 1.0
    d: complex = 0.0
    theta: float = 0.0
    phases: PhaseParams = PhaseParams()
    transfer: bool = False
    forced: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    samples: int = 10_000
    draws: int = 20
    pin_phases: bool = False
    corrupt_cell: tuple[int, int] | None = None
    distributions: list[dict] = field(default_factory=lambda: [dict(d) for d in DEFAULT_DISTRIBUTIONS])
    errors: list[dict] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    timestamp: bool = True

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; choose from {', '.join(PROTOCOLS)}")
        for name, (x, y) in (("alpha/beta", (self.alpha, self.beta)), ("c/d", (self.c, self.d))):
            norm2 = abs(x) ** 2 + abs(y) ** 2
            if abs(norm2 - 1) > 1e-12:
                raise ConfigError(f"|{name}|^2 sum to {norm2:.17g}, expected 1")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.draws < 1:
            raise ConfigError("draws must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        try:
            for dist in self.distributions:
                AngleDistribution(**dist)
            for err in self.errors:
                ErrorOperatorSpec(**err)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad noise spec: {exc}") from None

    def spec(self) -> ProtocolSpec:
        return ProtocolSpec(self.protocol, theta=self.theta, phases=self.phases,
                            transfer=self.transfer, forced=dict(self.forced))

    def logical_input(self) -> np.ndarray:
        if self.protocol in ("rz", "hadamard"):
            return np.array([self.alpha, self.beta], dtype=complex)
        return np.kron([self.alpha, self.beta], [self.c, self.d]).astype(complex)

    def table(self):
        if self.corrupt_cell is None:
            return TABLE_1
        table = dict(TABLE_1)
        good = TABLE_1[self.corrupt_cell]
        table[self.corrupt_cell] = lambda ph: (good(ph)[0] + math.pi, good(ph)[1])
        return table


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_complex(value) -> complex:
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        parts = value.split(",")
        try:
            if len(parts) == 1:
                return complex(float(parts[0]))
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
    raise ConfigError(f"cannot read {value!r} as a complex number (use 're,im')")


def parse_pair(value, kind=float) -> tuple:
    if isinstance(value, str):
        value = value.split(",")
    try:
        a, b = value
        return kind(a), kind(b)
    except (TypeError, ValueError):
        raise ConfigError(f"expected two comma-separated numbers, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfs-sim", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--draws", type=int, help="random parameter draws for verify")
    p.add_argument("--protocol", help="|".join(PROTOCOLS))
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--c")
    p.add_argument("--d")
    p.add_argument("--theta", type=float)
    p.add_argument("--phases", help="'phi_t,phi_tp' in radians")
    p.add_argument("--transfer", action="store_true", default=None,
                   help="cphase: run both Hadamards as full teleporting blocks")
    p.add_argument("--force", action="append", default=None, metavar="BLOCK=LABEL",
                   help="pin a measurement outcome (repeatable)")
    p.add_argument("--corrupt-cell", help="verify: perturb correction-table cell 'P1,P2' (negative control)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--no-timestamp", action="store_true", default=None)
    return p


def load_config(argv: Sequence[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    raw: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")

    cli = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    if "no_timestamp" in cli:
        cli["timestamp"] = not cli.pop("no_timestamp")
    if "force" in cli:
        forced = {}
        for item in cli.pop("force"):
            block, _, label = item.partition("=")
            forced[block] = int(label) if label in ("0", "1") else label
        cli["forced"] = forced
    merged = {**raw, **cli}
    noise = merged.pop("noise", None) or {}

    cfg = RunConfig()
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(merged) - known - {"corrupt_cell"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        updates: dict[str, Any] = {}
        for key, val in merged.items():
            if key in ("alpha", "beta", "c", "d"):
                updates[key] = parse_complex(val)
            elif key == "phases":
                updates[key] = PhaseParams(*parse_pair(val))
            elif key == "corrupt_cell":
                updates[key] = parse_pair(val, int)
            elif key in ("seed", "samples", "draws"):
                updates[key] = int(val)
            elif key == "theta":
                updates[key] = float(val)
            else:
                updates[key] = val
        if "phases" in cli and merged.get("command") == "verify":
            updates["pin_phases"] = True
        if "distributions" in noise:
            updates["distributions"] = list(noise["distributions"])
        if "errors" in noise:
            updates["errors"] = list(noise["errors"])
        cfg = replace(cfg, **updates)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(x)
    return format(x, ".17g")


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON with floats written at 17 significant digits."""
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [inner + dumps(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _emit(cfg: RunConfig, report: dict, table_rows: list[dict] | None = None) -> None:
    if cfg.timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    if cfg.format == "csv" and table_rows is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(table_rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in table_rows:
            writer.writerow({k: _fmt_float(v) if isinstance(v, float) else v for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = dumps(report) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parameters(cfg: RunConfig) -> dict:
    params = {"alpha": _cplx(cfg.alpha), "beta": _cplx(cfg.beta)}
    if cfg.protocol in ("cphase", "cr-block"):
        params.update(c=_cplx(cfg.c), d=_cplx(cfg.d))
    if cfg.protocol == "rz":
        params["theta"] = cfg.theta
    else:
        params["phases"] = [cfg.phases.phi_t, cfg.phases.phi_tp]
    if cfg.transfer:
        params["transfer"] = True
    return params


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_run(cfg: RunConfig) -> int:
    spec = cfg.spec()
    logical = cfg.logical_input()
    res = run_protocol_sampled(spec, logical, cfg.seed, table=cfg.table())
    out, fid = aligned_output(spec, res, logical)
    report = {
        "command": "run",
        "protocol": cfg.protocol,
        "seed": cfg.seed,
        "parameters": _parameters(cfg),
        "record": [{"block": b, "outcome": str(lab), "probability": p} for b, lab, p in res.record.entries],
        "branch_probability": res.record.probability,
        "corrections": [{"gate": c.name, "qubit": c.qubit} for c in res.corrections],
        "output_pairs": [list(p) for p in res.output_pairs],
        "output_amplitudes": [_cplx(z) for z in out],
        "ideal_amplitudes": [_cplx(z) for z in spec.ideal_output(logical)],
        "fidelity": fid,
        "pass": fid >= 1 - TOL,
    }
    _emit(cfg, report)
    return 0 if report["pass"] else 1


def cmd_enumerate(cfg: RunConfig) -> int:
    spec = cfg.spec()
    tree = enumerate_branches(spec, cfg.logical_input(), table=cfg.table())
    total = tree.total_probability
    report = {
        "command": "enumerate",
        "protocol": cfg.protocol,
        "parameters": _parameters(cfg),
        "branch_count": len(tree),
        "probability_sum": total,
        "probability_sum_ok": abs(total - 1) <= TOL,
        "min_fidelity": tree.min_fidelity,
        "branches": [
            {
                "record": [{"block": b, "outcome": str(lab)} for b, lab, _ in br.record.entries],
                "probability": br.probability,
                "corrections": [{"gate": c.name, "qubit": c.qubit} for c in br.corrections],
                "fidelity": br.fidelity,
            }
            for br in tree.branches
        ],
    }
    report["pass"] = report["probability_sum_ok"] and tree.min_fidelity >= 1 - TOL
    _emit(cfg, report)
    return 0 if report["pass"] else 1


def cmd_verify(cfg: RunConfig) -> int:
    reports = verify_suite(cfg.draws, cfg.seed, table=cfg.table(),
                           phases=cfg.phases if cfg.pin_phases else None)
    summary: dict[str, dict] = {}
    for r in reports:
        s = summary.setdefault(r.equation, {"equation": r.equation, "runs": 0, "min_fidelity": 1.0, "pass": True})
        s["runs"] += 1
        s["min_fidelity"] = min(s["min_fidelity"], r.fidelity)
        s["pass"] = s["pass"] and r.passed

    def _jsonable(params):
        return {k: (_cplx(v) if isinstance(v, (complex, np.complexfloating)) else v) for k, v in params.items()}

    failures = []
    for r in reports:
        if not r.passed:
            d = r.to_dict()
            d["parameters"] = _jsonable(d["parameters"])
            failures.append(d)
    report = {
        "command": "verify",
        "draws": cfg.draws,
        "seed": cfg.seed,
        "tolerance": TOL,
        "results": list(summary.values()),
        "failures": failures,
        "pass": not failures,
    }
    _emit(cfg, report, table_rows=[{k: v for k, v in s.items()} for s in summary.values()])
    return 0 if report["pass"] else 1


def _bench_row(job) -> dict:
    kind, payload, amps, samples, seq = job
    rng = np.random.default_rng(seq)
    if kind == "dephasing":
        encoding, dist = payload
        f = fidelity_samples(encoding, amps, dist, samples, rng)
        return {
            "encoding": encoding,
            "distribution": dist.kind,
            "parameter": float(dist.parameter),
            "mean_fidelity": float(f.mean()),
            "stderr": float(f.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
            "samples": samples,
            "mean_dfs_weight": None,
        }
    err = payload
    w = dfs_weight_under_errors(amps, [err], samples, rng)
    return {
        "encoding": "dfs",
        "distribution": f"error:{err.kind}",
        "parameter": float(err.probability),
        "mean_fidelity": None,
        "stderr": float(w.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
        "samples": samples,
        "mean_dfs_weight": float(w.mean()),
    }


def worker_count() -> int:
    try:
        cap = int(os.environ.get("DFS_SIM_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(cap, n) if cap > 0 else n)


def cmd_noise_bench(cfg: RunConfig) -> int:
    amps = LogicalAmplitudes(cfg.alpha, cfg.beta)
    jobs: list[tuple] = []
    for dist in cfg.distributions:
        d = AngleDistribution(**dist)
        for encoding in ("dfs", "bare"):
            jobs.append(("dephasing", (encoding, d)))
    for err in cfg.errors:
        jobs.append(("error", ErrorOperatorSpec(**err)))
    seqs = np.random.SeedSequence(cfg.seed).spawn(len(jobs))
    full = [(k, p, amps, cfg.samples, s) for (k, p), s in zip(jobs, seqs)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(_bench_row, full))  # map keeps job order
    report = {
        "command": "noise-bench",
        "seed": cfg.seed,
        "amplitudes": [_cplx(cfg.alpha), _cplx(cfg.beta)],
        "rows": rows,
    }
    _emit(cfg, report, table_rows=rows)
    return 0


HANDLERS = {"run": cmd_run, "enumerate": cmd_enumerate, "verify": cmd_verify, "noise-bench": cmd_noise_bench}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = load_config(argv)
    except ConfigError as exc:
        print(f"dfs-sim: config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return 2 if exc.code else 0
    try:
        return HANDLERS[cfg.command](cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"dfs-sim: {cfg.command} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
