"""Exhaustive single-fault checking of error-correction gadgets.

For every admissible fault the gadget is simulated on the encoded test states
|0> and |+>.  Each terminal branch is judged by completing its lost output
qubits with every Pauli, running one ideal decode round and reading the
logical operator of the test state.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .circuit import Circuit, FaultModel, FaultSpec, enumerate_fault_locations
from .css import CssCode
from .protocols import ProtocolBuild, build_protocol, emit_encoder
from .sim import BranchSet, SimBranch, SimulationError, TruncationError, _Plan, _reset, run

TEST_STATES = ("zero", "plus")
SCHEMA = "lossft-report/1"


@dataclass(frozen=True)
class Witness:
    test_state: str
    path: str
    completion: str  # "q:P" pairs, e.g. "22:X,23:Z"; empty when nothing was lost
    effect: str
    lost: tuple[int, ...] = ()

    @classmethod
    def from_dict(cls, d: dict) -> "Witness":
        return cls(d["test_state"], d["path"], d["completion"], d["effect"], tuple(d["lost"]))


@dataclass(frozen=True)
class BranchVerdict:
    path: str
    lost: tuple[int, ...]
    ok: bool
    completion: str = ""
    effect: str = "identity"


@dataclass(frozen=True)
class SpecResult:
    location_id: int
    fault_type: str
    tag: str
    ok: bool
    branches: int
    witness: Witness | None = None
    error: str = ""

    @property
    def spec(self) -> FaultSpec:
        return FaultSpec(self.location_id, self.fault_type)


@dataclass
class FaultReport:
    protocol: str
    strategy: str
    fault_model: str
    results: list[SpecResult] = field(default_factory=list)
    input_results: list[SpecResult] = field(default_factory=list)
    engine_version: str = __version__
    wall_time: float | None = None

    @property
    def violations(self) -> list[SpecResult]:
        return [r for r in self.results + self.input_results if not r.ok and not r.error]

    @property
    def errors(self) -> list[SpecResult]:
        return [r for r in self.results + self.input_results if r.error]

    def totals(self) -> dict:
        rs = self.results + self.input_results
        return {
            "specs": len(self.results),
            "input_cases": len(self.input_results),
            "ok": sum(r.ok for r in rs),
            "violations": len(self.violations),
            "errors": len(self.errors),
        }

    def exit_code(self) -> int:
        if self.errors:
            return 3
        return 2 if self.violations else 0


# --- branch assessment ---------------------------------------------------------


def _measure_all(branches, gens):
    """Measure each generator on every branch, returning (branch, bits) pairs."""
    out = [(b, ()) for b in branches]
    for g in gens:
        px = [j for j in range(g.n) if (g.x >> j) & 1]
        pz = [j for j in range(g.n) if (g.z >> j) & 1]
        nxt = []
        for t, bits in out:
            bit, piv = t.measure_pauli(px, pz)
            if piv is None:
                nxt.append((t, bits + (bit,)))
            else:
                t1 = t.copy()
                t1.r ^= 1 << piv
                nxt.append((t, bits + (0,)))
                nxt.append((t1, bits + (1,)))
        out = nxt
    return out


def _ideal_readout(t, code: CssCode, qubits, test_state: str) -> set[int]:
    """Outcomes of one ideal decode round followed by the test-state logical readout."""
    n = code.n
    full = t.n
    lift = lambda p: _lift(p, qubits, full)
    gens = [lift(g) for g in code.stabilizers]
    results = set()
    mx = code.h_x.shape[0]
    for tb, bits in _measure_all([t], gens):
        sx, sz = bits[:mx], bits[mx:]
        x = code.decode_table_x.get(sz, 0)
        z = code.decode_table_z.get(sx, 0)
        for j in range(n):
            if (x >> j) & 1:
                tb.pauli(qubits[j], "X")
            if (z >> j) & 1:
                tb.pauli(qubits[j], "Z")
        logical = lift(code.logical_z[0] if test_state == "zero" else code.logical_x[0])
        v = tb.expectation(logical)
        if v is None:
            results.update((0, 1))
        else:
            results.add(0 if v == 1 else 1)
    return results


def _lift(p, qubits, full: int):
    from .pauli import PauliOperator

    x = z = 0
    for j, q in enumerate(qubits):
        x |= ((p.x >> j) & 1) << q
        z |= ((p.z >> j) & 1) << q
    return PauliOperator(full, x, z, p.phase)


def completion_outcomes(build: ProtocolBuild, branch: SimBranch, test_state: str):
    """Yield ``(lost, letters, outcomes)`` for every Pauli completion of the
    lost output qubits; ``outcomes`` is the set of possible logical readouts."""
    outs = build.output_qubits
    lost = tuple(q for q in outs if branch.is_lost(q))
    base = branch.copy()
    base.snap = None
    for q in lost:
        base.lost &= ~(1 << q)
        kids = _reset(base, q)
        if len(kids) != 1:
            raise SimulationError("lost qubit was not in a Z eigenstate")
    for letters in itertools.product("IXYZ", repeat=len(lost)):
        t = base.tableau.copy()
        for q, p in zip(lost, letters):
            t.pauli(q, p)
        yield lost, letters, _ideal_readout(t, build.code, outs, test_state)


def assess_branch(build: ProtocolBuild, branch: SimBranch, test_state: str) -> BranchVerdict:
    """Judge a terminal branch: every Pauli completion of the lost output
    qubits must decode back to the expected logical value 0."""
    lost = ()
    for lost, letters, got in completion_outcomes(build, branch, test_state):
        if got != {0}:
            completion = ",".join(f"{q}:{p}" for q, p in zip(lost, letters))
            effect = ("logical_X" if test_state == "zero" else "logical_Z") if got == {1} else "uncorrectable_after_decode"
            return BranchVerdict(branch.path, lost, False, completion, effect)
    return BranchVerdict(branch.path, lost, True)


# --- runs ------------------------------------------------------------------------


def initial_branch(build: ProtocolBuild, test_state: str) -> SimBranch:
    """The ideal encoded test state on the data block, all else |0>."""
    c = Circuit(build.circuit.n_qubits)
    emit_encoder(c, build.code, test_state, build.data_qubits)
    bs = run(c)
    if len(bs) != 1:
        raise SimulationError("encoder is not deterministic")
    b = bs.branches[0]
    b.outcomes = {}
    return b


class _Context:
    """Per-process cache of the plan and initial branches of one build."""

    def __init__(self, build: ProtocolBuild, cap: int):
        self.build = build
        self.cap = cap
        self.plan = _Plan(build.circuit, build.output_qubits)
        self.initial = {s: initial_branch(build, s) for s in TEST_STATES}
        self.tags = {op.location_id: op.tag for op in build.circuit.ops}


def _check_one(ctx: _Context, faults, label: FaultSpec, initial: dict | None = None) -> SpecResult:
    tag = ctx.tags.get(label.location_id, "")
    n_branches = 0
    try:
        for s in TEST_STATES:
            start = (initial or ctx.initial)[s]
            bs = run(ctx.build.circuit, faults, ctx.cap, initial=[start], merge=True, plan=ctx.plan)
            n_branches += len(bs)
            for b in bs:
                v = assess_branch(ctx.build, b, s)
                if not v.ok:
                    w = Witness(s, v.path, v.completion, v.effect, v.lost)
                    return SpecResult(label.location_id, label.fault_type, tag, False, n_branches, w)
    except (TruncationError, SimulationError) as exc:
        return SpecResult(label.location_id, label.fault_type, tag, False, n_branches, error=f"{type(exc).__name__}: {exc}")
    return SpecResult(label.location_id, label.fault_type, tag, True, n_branches)


_WORKER: _Context | None = None


def _worker_init(protocol, strategy, rounds, cap):
    global _WORKER
    kw = {"rounds": rounds} if protocol == "shor" else {}
    _WORKER = _Context(build_protocol(protocol, strategy, **kw), cap)


def _worker_run(spec: FaultSpec) -> SpecResult:
    return _check_one(_WORKER, [spec], spec)


def default_jobs() -> int:
    env = os.environ.get("LOSSFT_JOBS")
    return int(env) if env else 1


def check_single_faults(
    build: ProtocolBuild,
    model: FaultModel,
    *,
    jobs: int | None = None,
    cap: int = 1 << 20,
    specs=None,
    rounds: int = 3,
    progress=None,
) -> FaultReport:
    """Check every FaultSpec of ``model`` (or the given ``specs``).

    With ``jobs > 1`` specs are farmed out to worker processes, which rebuild
    the gadget by name; results are always returned in enumeration order.
    """
    t0 = time.perf_counter()
    specs = list(enumerate_fault_locations(build.circuit, model) if specs is None else specs)
    jobs = default_jobs() if jobs is None else jobs
    report = FaultReport(build.protocol, build.strategy.value, model.describe())
    if jobs > 1 and len(specs) > 1:
        chunk = max(1, len(specs) // (jobs * 8))
        with ProcessPoolExecutor(jobs, initializer=_worker_init, initargs=(build.protocol, build.strategy, rounds, cap)) as ex:
            for i, r in enumerate(ex.map(_worker_run, specs, chunksize=chunk)):
                report.results.append(r)
                if progress:
                    progress(i + 1, len(specs))
    else:
        ctx = _Context(build, cap)
        for i, s in enumerate(specs):
            report.results.append(_check_one(ctx, [s], s))
            if progress:
                progress(i + 1, len(specs))
    report.wall_time = time.perf_counter() - t0
    return report


INPUT_DAMAGE = ("X", "Y", "Z", "L")


def check_input_correction(build: ProtocolBuild, *, cap: int = 1 << 20) -> list[SpecResult]:
    """Fault-free gadget applied to a data block carrying one damaged qubit.

    Results use ``location_id = -1 - qubit`` and the damage letter as fault
    type.  Pauli damage must leave the output with a trivial syndrome and
    every case must leave no output qubit lost and the logical value intact.
    """
    from .sim import _inject

    ctx = _Context(build, cap)
    out = []
    code = build.code
    gens = [_lift(g, build.output_qubits, build.circuit.n_qubits) for g in code.stabilizers]
    for q in build.data_qubits:
        for dmg in INPUT_DAMAGE:
            tag = f"input-q{q}"
            res = None
            n_branches = 0
            try:
                for s in TEST_STATES:
                    start = ctx.initial[s].copy()
                    starts = _inject(start, (q,), dmg)
                    bs = run(build.circuit, (), cap, initial=starts, merge=True, plan=ctx.plan)
                    n_branches += len(bs)
                    for b in bs:
                        v = assess_branch(build, b, s)
                        if not v.ok:
                            res = SpecResult(-1 - q, dmg, tag, False, n_branches, Witness(s, v.path, v.completion, v.effect, v.lost))
                        elif v.lost:
                            res = SpecResult(-1 - q, dmg, tag, False, n_branches, Witness(s, b.path, "", "residual_loss", v.lost))
                        elif any(b.tableau.expectation(g) != 1 for g in gens):
                            res = SpecResult(-1 - q, dmg, tag, False, n_branches, Witness(s, b.path, "", "detectable", ()))
                        if res:
                            break
                    if res:
                        break
            except (TruncationError, SimulationError) as exc:
                res = SpecResult(-1 - q, dmg, tag, False, n_branches, error=f"{type(exc).__name__}: {exc}")
            out.append(res or SpecResult(-1 - q, dmg, tag, True, n_branches))
    return out


def check_protocol(protocol: str, strategy=None, model: FaultModel | None = None, *, rounds=3, jobs=None, cap=1 << 20, progress=None) -> FaultReport:
    kw = {"rounds": rounds} if protocol == "shor" else {}
    build = build_protocol(protocol, strategy, **kw)
    model = model or FaultModel()
    t0 = time.perf_counter()
    report = check_single_faults(build, model, jobs=jobs, cap=cap, rounds=rounds, progress=progress)
    report.input_results = check_input_correction(build, cap=cap)
    report.wall_time = time.perf_counter() - t0
    return report


def replay_witness(build: ProtocolBuild, spec: FaultSpec, w: Witness, cap: int = 1 << 20) -> BranchVerdict:
    """Re-simulate the single branch named by a witness (no merging)."""
    start = initial_branch(build, w.test_state)
    bs = run(build.circuit, [spec], cap, initial=[start], path=w.path)
    matches = [b for b in bs if b.path == w.path]
    if len(matches) != 1:
        raise SimulationError(f"witness path {w.path!r} does not name exactly one branch")
    return assess_branch(build, matches[0], w.test_state)


# --- serialization ------------------------------------------------------------------


def _result_dict(r: SpecResult) -> dict:
    d = {"location_id": r.location_id, "fault_type": r.fault_type, "tag": r.tag, "ok": r.ok, "branches": r.branches}
    d["witness"] = None if r.witness is None else {**asdict(r.witness), "lost": list(r.witness.lost)}
    d["error"] = r.error
    return d


def report_to_dict(r: FaultReport, *, timing: bool = False) -> dict:
    return {
        "schema": SCHEMA,
        "engine_version": r.engine_version,
        "protocol": r.protocol,
        "strategy": r.strategy,
        "fault_model": r.fault_model,
        "totals": r.totals(),
        "results": [_result_dict(x) for x in r.results],
        "input_results": [_result_dict(x) for x in r.input_results],
        "wall_time": round(r.wall_time, 3) if timing and r.wall_time is not None else None,
    }


def _result_from(d: dict) -> SpecResult:
    w = d.get("witness")
    return SpecResult(d["location_id"], d["fault_type"], d["tag"], d["ok"], d["branches"], Witness.from_dict(w) if w else None, d.get("error", ""))


def report_from_json(text: str) -> FaultReport:
    d = json.loads(text)
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {d.get('schema')!r}")
    r = FaultReport(d["protocol"], d["strategy"], d["fault_model"], engine_version=d["engine_version"], wall_time=d.get("wall_time"))
    r.results = [_result_from(x) for x in d["results"]]
    r.input_results = [_result_from(x) for x in d["input_results"]]
    if r.totals() != d["totals"]:
        raise ValueError("report totals do not match its entries")
    return r


CSV_FIELDS = ("location_id", "fault_type", "tag", "ok", "branches", "test_state", "path", "completion", "effect", "error")


def emit_report(r: FaultReport, fmt: str = "json", *, timing: bool = False) -> bytes:
    """Serialize deterministically; ``json`` is canonical (sorted keys)."""
    if fmt == "json":
        return (json.dumps(report_to_dict(r, timing=timing), sort_keys=True, indent=1) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for x in r.results + r.input_results:
            wt = x.witness
            w.writerow([
                x.location_id, x.fault_type, x.tag, int(x.ok), x.branches,
                wt.test_state if wt else "", wt.path if wt else "", wt.completion if wt else "",
                wt.effect if wt else "", x.error,
            ])
        return buf.getvalue().encode()
    if fmt == "markdown":
        return _markdown(r).encode()
    raise ValueError(f"unsupported report format {fmt!r}")


def _markdown(r: FaultReport) -> str:
    t = r.totals()
    lines = [
        f"# {r.protocol} / {r.strategy}",
        "",
        f"fault model `{r.fault_model}`; {t['specs']} specs, {t['input_cases']} input cases, "
        f"{t['violations']} violations, {t['errors']} errors",
        "",
    ]
    by_loc: dict[int, list[SpecResult]] = {}
    for x in r.results:
        by_loc.setdefault(x.location_id, []).append(x)
    lines += ["| location | tag | types | failing |", "|---|---|---|---|"]
    for loc in sorted(by_loc):
        xs = by_loc[loc]
        bad = [x.fault_type for x in xs if not x.ok]
        lines.append(f"| {loc} | {xs[0].tag} | {len(xs)} | {' '.join(bad) or '-'} |")
    bad = [x for x in r.results + r.input_results if not x.ok]
    if bad:
        lines += ["", "## Witnesses", "", "| spec | test | path | completion | effect |", "|---|---|---|---|---|"]
        for x in bad:
            w = x.witness
            if w:
                lines.append(f"| {x.location_id}:{x.fault_type} | {w.test_state} | `{w.path}` | {w.completion or '-'} | {w.effect} |")
            else:
                lines.append(f"| {x.location_id}:{x.fault_type} | - | - | - | {x.error} |")
    return "\n".join(lines) + "\n"
