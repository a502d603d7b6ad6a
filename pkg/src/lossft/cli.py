"""Command-line front end: ``lossft {check,counts,equiv,locations,build}``.

Exit codes: 0 success, 1 configuration error, 2 violations or
counterexamples found, 3 truncation or engine error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .circuit import FaultModel, circuit_from_text, circuit_to_text, enumerate_fault_locations
from .protocols import PROTOCOLS, LruStrategy, build_cat_prep, build_protocol, count_matrix

EXIT_OK, EXIT_CONFIG, EXIT_VIOLATION, EXIT_ENGINE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    protocol: str = "steane"
    lru: str | None = None
    faults: tuple[str, ...] = ("pauli", "loss")
    pauli_set: str = "full15"
    loss_set: str = "full9"
    rounds: int = 3
    cap: int = 1 << 20
    format: str = "json"
    output: str | None = None
    seed: int = 0
    jobs: int = 1

    def fault_model(self) -> FaultModel:
        return FaultModel("pauli" in self.faults, "loss" in self.faults, self.pauli_set, self.loss_set)

    def strategy(self) -> LruStrategy | None:
        return None if self.lru is None else LruStrategy.parse(self.lru)


_KEYS = {
    "protocol": str, "lru": str, "faults": str, "pauli_set": str, "loss_set": str, "rounds": int,
    "cap": int, "format": str, "output": str, "seed": int, "jobs": int,
}


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment.  Keys match the long
    flags with dashes or underscores."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in _KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {k!r}")
        try:
            out[k] = _KEYS[k](v)
        except ValueError:
            raise ConfigError(f"{path}:{n}: bad value for {k}: {v!r}") from None
    return out


def make_config(args: argparse.Namespace) -> RunConfig:
    vals = {k: getattr(args, k) for k in _KEYS if getattr(args, k, None) is not None}
    if getattr(args, "config", None):
        try:
            vals.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    if "jobs" not in vals and os.environ.get("LOSSFT_JOBS"):
        try:
            vals["jobs"] = int(os.environ["LOSSFT_JOBS"])
        except ValueError:
            raise ConfigError("LOSSFT_JOBS must be an integer") from None
    if isinstance(vals.get("faults"), str):
        vals["faults"] = tuple(s.strip() for s in vals["faults"].split(",") if s.strip())
    cfg = RunConfig(**vals)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.protocol not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {cfg.protocol!r}")
    if not cfg.faults or set(cfg.faults) - {"pauli", "loss"}:
        raise ConfigError("--faults takes a comma list of 'pauli' and/or 'loss'")
    if cfg.pauli_set not in ("full15", "depolarizing"):
        raise ConfigError(f"unknown Pauli set {cfg.pauli_set!r}")
    if cfg.loss_set not in ("paper5", "full9"):
        raise ConfigError(f"unknown loss set {cfg.loss_set!r}")
    if cfg.format not in ("json", "csv", "markdown"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    if cfg.rounds < 1 or cfg.cap < 1 or cfg.jobs < 1:
        raise ConfigError("rounds, cap and jobs must be positive")
    if cfg.lru is not None:
        try:
            s = LruStrategy.parse(cfg.lru)
        except ValueError:
            raise ConfigError(f"unknown LRU strategy {cfg.lru!r}") from None
        if cfg.protocol == "shor" and s is LruStrategy.POST_ZERO:
            raise ConfigError("the Shor gadget has no |0> ancilla for post-zero LRUs")


def _write(cfg: RunConfig, data: bytes) -> None:
    if cfg.output:
        Path(cfg.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _build(cfg: RunConfig):
    kw = {"rounds": cfg.rounds} if cfg.protocol == "shor" else {}
    return build_protocol(cfg.protocol, cfg.strategy(), **kw)


# --- commands --------------------------------------------------------------------


def cmd_check(cfg: RunConfig, args) -> int:
    from .checker import check_input_correction, check_single_faults, emit_report

    build = _build(cfg)
    progress = None
    if args.progress:
        def progress(i, total):
            if i == total or i % 100 == 0:
                print(f"  {i}/{total}", file=sys.stderr)
    report = check_single_faults(build, cfg.fault_model(), jobs=cfg.jobs, cap=cfg.cap, rounds=cfg.rounds, progress=progress)
    report.input_results = check_input_correction(build, cap=cfg.cap)
    _write(cfg, emit_report(report, cfg.format, timing=args.timing))
    t = report.totals()
    print(
        f"{build.protocol}/{build.strategy.value}: {t['specs']} specs, {t['violations']} violations, {t['errors']} errors",
        file=sys.stderr,
    )
    return report.exit_code()


def cmd_counts(cfg: RunConfig, args) -> int:
    m = count_matrix()
    strategies = [s.value for s in LruStrategy]
    if cfg.format == "json":
        d = {p: {s: m[p, s] for s in strategies} for p in PROTOCOLS}
        _write(cfg, (json.dumps(d, sort_keys=True, indent=1) + "\n").encode())
        return EXIT_OK
    sep = "," if cfg.format == "csv" else " | "
    rows = [sep.join(["protocol"] + strategies)]
    if cfg.format == "markdown":
        rows = ["| " + rows[0] + " |", "|" + "---|" * (len(strategies) + 1)]
    for p in PROTOCOLS:
        cells = [p] + ["-" if m[p, s] is None else str(m[p, s]) for s in strategies]
        rows.append(("| " + sep.join(cells) + " |") if cfg.format == "markdown" else sep.join(cells))
    _write(cfg, ("\n".join(rows) + "\n").encode())
    return EXIT_OK


def cmd_equiv(cfg: RunConfig, args) -> int:
    from .loss_mapping import control_then_target, corpus, replacement_plan, single_replacement, verify_equivalence
    from .oracle import MAX_QUBITS

    if args.qubits > MAX_QUBITS or args.qubits < 2:
        raise ConfigError(f"--qubits must be between 2 and {MAX_QUBITS}")
    if args.count < 0:
        raise ConfigError("--count must be non-negative")
    lines = []
    failures = 0
    if args.forced_single:
        c, loss, q = control_then_target()
        res = verify_equivalence(c, loss, q, single_replacement(replacement_plan(c, loss, q)))
        lines.append(f"control-then-target single-replacement: {'equivalent' if res else 'NOT equivalent'}")
        if not res:
            lines.append(f"  witness: {res.witness}")
            failures += 1
    else:
        cases = corpus(args.count, args.qubits, cfg.seed)
        if not cases:
            print("warning: empty corpus", file=sys.stderr)
        for i, (c, loss, q) in enumerate(cases):
            plan = replacement_plan(c, loss, q)
            res = verify_equivalence(c, loss, q, plan)
            if not res:
                failures += 1
                lines.append(f"case {i}: qubit {q} lost at {loss}: {res.witness}")
        lines.append(f"{len(cases) - failures}/{len(cases)} circuits equivalent (seed {cfg.seed})")
    _write(cfg, ("\n".join(lines) + "\n").encode())
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_locations(cfg: RunConfig, args) -> int:
    if args.circuit == "cat":
        c = build_cat_prep()
    elif args.circuit_file:
        c = circuit_from_text(Path(args.circuit_file).read_text())
    else:
        c = _build(cfg).circuit
    ops = {op.location_id: op for op in c.ops}
    rows = []
    for s in enumerate_fault_locations(c, cfg.fault_model()):
        op = ops[s.location_id]
        rows.append(f"{s.location_id}\t{op.kind}\t{' '.join(map(str, op.qubits))}\t{op.tag}\t{s.fault_type}")
    _write(cfg, ("\n".join(rows) + "\n" if rows else "").encode())
    print(f"{len(rows)} fault specs", file=sys.stderr)
    return EXIT_OK


def cmd_build(cfg: RunConfig, args) -> int:
    c = build_cat_prep() if args.circuit == "cat" else _build(cfg).circuit
    _write(cfg, circuit_to_text(c).encode())
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: config error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--protocol", choices=PROTOCOLS)
    common.add_argument("--lru", help="none, data-pre, post-zero or at07 (protocol default if omitted)")
    common.add_argument("--faults", help="comma list of pauli,loss (default both)")
    common.add_argument("--pauli-set", dest="pauli_set", help="full15 or depolarizing")
    common.add_argument("--loss-set", dest="loss_set", help="full9 or paper5")
    common.add_argument("--rounds", type=int, help="Shor syndrome rounds (default 3)")
    common.add_argument("--cap", type=int, help="branch cap (default 2^20)")
    common.add_argument("--format", help="json, csv or markdown")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, help="seed for randomized corpora")
    common.add_argument("--jobs", type=int, help="worker processes (default $LOSSFT_JOBS or 1)")
    common.add_argument("--config", help="key=value file; its values take precedence over flags")

    p = _Parser(prog="lossft", description="Loss-aware fault-tolerance checks for [[7,1,3]] EC gadgets.")
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("check", parents=[common], help="exhaustive single-fault check")
    c.add_argument("--timing", action="store_true", help="include wall time (makes the report non-reproducible)")
    c.add_argument("--progress", action="store_true")
    c.set_defaults(func=cmd_check)
    c = sub.add_parser("counts", parents=[common], help="LRU count matrix")
    c.set_defaults(func=cmd_counts)
    c = sub.add_parser("equiv", parents=[common], help="loss versus replacement equivalence corpus")
    c.add_argument("--count", type=int, default=200)
    c.add_argument("--qubits", type=int, default=6)
    c.add_argument("--forced-single", action="store_true", help="check the control-then-target circuit with one replacement")
    c.set_defaults(func=cmd_equiv)
    c = sub.add_parser("locations", parents=[common], help="list enumerated fault specs")
    c.add_argument("--circuit", choices=("cat",), help="use the verified 4-cat subcircuit instead of a protocol")
    c.add_argument("--circuit-file", help="circuit text file")
    c.set_defaults(func=cmd_locations)
    c = sub.add_parser("build", parents=[common], help="emit a gadget circuit in text form")
    c.add_argument("--circuit", choices=("cat",))
    c.set_defaults(func=cmd_build)
    return p


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"lossft: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"lossft: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # engine failures map to a distinct exit code
        print(f"lossft: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
