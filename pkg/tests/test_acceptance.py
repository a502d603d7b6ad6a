"""End-to-end acceptance checks.  Each test records one PASS/FAIL line that is
repeated in the terminal summary.  The exhaustive protocol checks share one
cached report per gadget, so the whole file takes roughly ten minutes on one core."""

import itertools
import json
import time
from fractions import Fraction

import pytest

from lossft.checker import _Context, _lift, check_input_correction, check_protocol, completion_outcomes, initial_branch, report_from_json
from lossft.circuit import AcceptRule, Circuit, FaultModel, FaultSpec, enumerate_fault_locations
from lossft.cli import main
from lossft.css import steane_713
from lossft.loss_mapping import control_then_target, corpus, replacement_plan, single_replacement, verify_equivalence
from lossft.oracle import oracle_agrees
from lossft.pauli import PauliOperator, commutes
from lossft.protocols import ANC_ENC, build_protocol, count_matrix, emit_cat, emit_encoder
from lossft.sim import apply_loss, run
from oracle_corpus import cases

FULL = FaultModel()
CODE = steane_713()
_REPORTS = {}
_TIMES = {}


def full_report(protocol, strategy=None):
    """Exhaustive full-model report, computed once per session."""
    key = (protocol, strategy)
    if key not in _REPORTS:
        t0 = time.perf_counter()
        _REPORTS[key] = check_protocol(protocol, strategy, FULL)
        _TIMES[key] = time.perf_counter() - t0
    return _REPORTS[key]


def test_criterion_01_steane_data_pre(tmp_path, record_criterion):
    out = tmp_path / "steane.json"
    t0 = time.perf_counter()
    rc = main(["check", "--protocol", "steane", "--lru", "data-pre", "-o", str(out)])
    elapsed = time.perf_counter() - t0
    r = report_from_json(out.read_text())
    _REPORTS["steane", None] = r
    t = r.totals()
    ok = rc == 0 and t["violations"] == 0 and t["errors"] == 0 and t["specs"] > 0 and elapsed < 300
    record_criterion(1, ok, f"steane/data_pre full model: {t['specs']} specs, {t['violations']} violations, {elapsed:.0f}s")
    assert ok


def test_criterion_02_steane_input_loss(record_criterion):
    build = build_protocol("steane", "data_pre")
    res = [r for r in check_input_correction(build) if r.fault_type == "L"]
    # and directly: no branch ends with a lost output qubit
    residual = 0
    for q in build.data_qubits:
        for s in ("zero", "plus"):
            starts = list(apply_loss(initial_branch(build, s), q))
            for b in run(build.circuit, initial=starts, merge=True):
                residual += any(b.is_lost(x) for x in build.output_qubits)
    ok = len(res) == 7 and all(r.ok for r in res) and residual == 0
    record_criterion(2, ok, f"steane/data_pre input loss: {sum(r.ok for r in res)}/7 qubits clean, {residual} residual-loss branches")
    assert ok


def test_criterion_03_knill_without_lrus(record_criterion):
    build = build_protocol("knill", "none")
    r = full_report("knill", "none")
    enc_cnots = {
        op.location_id
        for op in build.circuit.ops
        if op.kind == "cnot" and op.tag == ANC_ENC and set(op.qubits) <= set(build.output_qubits)
    }
    hits = [v for v in r.violations if v.fault_type == "LL" and v.location_id in enc_cnots]
    ctx = _Context(build, 1 << 20)
    shown = None
    for v in hits:
        for s in ("zero", "plus"):
            bs = run(build.circuit, [v.spec], initial=[ctx.initial[s]], merge=True, plan=ctx.plan)
            for b in bs:
                if "R" in b.path:
                    continue
                for lost, letters, got in completion_outcomes(build, b, s):
                    if len(lost) == 2 and 1 in got:
                        shown = (v.location_id, s, b.path, lost, "".join(letters))
                        break
                if shown:
                    break
            if shown:
                break
        if shown:
            break
    ok = len(r.violations) >= 1 and shown is not None
    record_criterion(3, ok, f"knill/none: {len(r.violations)} violations, {len(hits)} LL on |0> encoder CNOTs; example {shown}")
    assert ok


@pytest.mark.xfail(strict=True, reason="single |+> encoder losses give two adversarial Bell-measurement bits; see the decisions ledger")
def test_criterion_04_knill_post_zero(record_criterion):
    r = full_report("knill", "post_zero_ancilla")
    bad = sorted({v.location_id for v in r.violations})
    ok = not r.violations and not r.errors
    record_criterion(4, ok, f"knill/post_zero: {len(r.violations)} violations at locations {bad}")
    assert ok


def test_criterion_05_shor(record_criterion):
    build = build_protocol("shor")
    assert build.circuit.count("classical_parity") == 18
    r = full_report("shor")
    t = r.totals()
    elapsed = _TIMES.get(("shor", None), 0.0)
    ok = t["violations"] == 0 and t["errors"] == 0 and elapsed < 1800
    record_criterion(5, ok, f"shor/data_pre, 6 generators x 3 rounds: {t['specs']} specs, {t['violations']} violations, {elapsed:.0f}s")
    assert ok


def test_criterion_06_lru_counts(record_criterion):
    m = count_matrix()
    want = {("knill", "post_zero_ancilla"): 7, ("knill", "at07_generic"): 28, ("steane", "at07_generic"): 35}
    want.update({(p, "none"): 0 for p in ("steane", "shor", "knill")})
    ok = all(m[k] == v for k, v in want.items())
    record_criterion(6, ok, "LRU counts " + ", ".join(f"{p}/{s}={m[p, s]}" for p, s in want))
    assert ok


def test_criterion_07_pauli_only(record_criterion):
    # the Pauli-only model is exactly the loss-free subset of the full model
    pauli = FaultModel(include_loss=False)
    lines = []
    ok = True
    for protocol, strategy in (("steane", None), ("shor", None), ("knill", "post_zero_ancilla")):
        r = full_report(protocol, strategy)
        kw = {"rounds": 3} if protocol == "shor" else {}
        specs = enumerate_fault_locations(build_protocol(protocol, strategy, **kw).circuit, pauli)
        subset = [x for x in r.results if "L" not in x.fault_type]
        same = [x.spec for x in subset] == specs
        bad = sum(not x.ok for x in subset) + sum(not x.ok for x in r.input_results if x.fault_type != "L")
        ok &= same and bad == 0
        lines.append(f"{protocol} {len(subset)} specs/{bad} bad")
    record_criterion(7, ok, "Pauli only: " + ", ".join(lines))
    assert ok


def test_criterion_08_loss_replacement_equivalence(record_criterion):
    cs = corpus(200, 6, seed=0)
    good = 0
    for c, loss, q in cs:
        plan = replacement_plan(c, loss, q)
        good += len(plan.insertions) <= 1 and bool(verify_equivalence(c, loss, q, plan))
    c, loss, q = control_then_target()
    plan = replacement_plan(c, loss, q)
    single = bool(verify_equivalence(c, loss, q, single_replacement(plan)))
    double = len(plan.insertions) == 2 and bool(verify_equivalence(c, loss, q, plan))
    ok = good == 200 and not single and double
    record_criterion(8, ok, f"{good}/200 single-replacement equivalent; control-then-target single={single} two-replacement={double}")
    assert ok


# -- criterion 9 ---------------------------------------------------------------------------


def projection_circuit(kind, lost):
    """Target block 0..6, ancilla 7..13, verifier 14..20.

    The ancilla (|0> or |+>) loses the two qubits in ``lost`` right after
    encoding and is verified with one transversal coupling; afterwards it is
    coupled transversally to the target, as control for |0> and as target
    for |+>.
    """
    tgt, anc, ver = range(0, 7), range(7, 14), range(14, 21)
    c = Circuit(21)
    emit_encoder(c, CODE, kind, tgt)
    start = len(c.ops)
    emit_encoder(c, CODE, kind, anc)
    waits = [c.wait(anc[j]).location_id for j in lost]
    emit_encoder(c, CODE, kind, ver)
    names = [f"v{j}" for j in range(7)]
    for a, v, name in zip(anc, ver, names):
        if kind == "zero":
            c.cnot(a, v)
        else:
            c.cnot(v, a)
    for v, name in zip(ver, names):
        (c.meas_z if kind == "zero" else c.meas_x)(v, name)
    basis = "Z" if kind == "zero" else "X"
    c.verification_block([op.location_id for op in c.ops[start:]], AcceptRule("codeword", tuple(names), CODE.name, basis))
    for a, t in zip(anc, tgt):
        if kind == "zero":
            c.cnot(a, t)
        else:
            c.cnot(t, a)
    return c, [FaultSpec(w, "L") for w in waits]


def target_description(kind):
    logical = CODE.logical_z[0] if kind == "zero" else CODE.logical_x[0]
    return [_lift(g, range(7), 21) for g in CODE.stabilizers] + [_lift(logical, range(7), 21)]


def test_criterion_09_verification_projection(record_criterion):
    summary = []
    ok = True
    for kind in ("zero", "plus"):
        desc = target_description(kind)
        worst_accept = Fraction(1)
        for lost in itertools.combinations(range(7), 2):
            c, faults = projection_circuit(kind, lost)
            bs = run(c, faults)
            accepted = [b for b in bs if "R" not in b.path]
            weight = sum((b.weight for b in accepted), Fraction(0))
            intact = all(b.tableau.expectation(g) == 1 for b in accepted for g in desc)
            ok &= intact and 0 < weight < 1
            worst_accept = min(worst_accept, weight)
        summary.append(f"{kind}: all 21 pairs intact, min accepted weight {worst_accept}")
    record_criterion(9, ok, "; ".join(summary))
    assert ok


# -- criterion 10 --------------------------------------------------------------------------


def parity_circuit(g):
    """One Shor syndrome bit: verified cat on 7..10 (verifier 11) coupled to
    the support of ``g`` and read out in the X basis."""
    c = Circuit(12)
    emit_cat(c, (7, 8, 9, 10), 11)
    for a, d in zip((7, 8, 9, 10), g.support):
        (c.cnot if g.x else c.cz)(a, d)
    outs = [f"m{j}" for j in range(4)]
    for a, name in zip((7, 8, 9, 10), outs):
        c.meas_x(a, name)
    c.append("classical_parity", (), "", "p", inputs=outs)
    return c


def test_criterion_10_cat_physics(record_criterion):
    c = Circuit(4)
    c.prep_x(0)
    for q in (1, 2, 3):
        c.prep_z(q)
    c.cnot(0, 1)
    c.cnot(1, 2)
    c.cnot(0, 3)
    w = c.wait(1).location_id
    bs = run(c, [FaultSpec(w, "L")])
    zs = [PauliOperator.from_support(4, [q], "Z") for q in (0, 2, 3)]
    vals = sorted(tuple(b.tableau.expectation(z) for z in zs) for b in bs)
    cat_ok = len(bs) == 2 and vals == [(-1, -1, -1), (1, 1, 1)] and {b.weight for b in bs} == {Fraction(1, 2)}

    parity_ok = True
    n_branches = 0
    for s, g in enumerate(CODE.stabilizers):
        circ = parity_circuit(g)
        for state in ("zero", "plus"):
            for err in [None] + [(q, p) for q in range(7) for p in "XZ"]:
                start = Circuit(12)
                emit_encoder(start, CODE, state, range(7))
                (b0,) = run(start)
                if err:
                    b0.tableau.pauli(*err)
                flip = int(err is not None and not commutes(PauliOperator.from_support(7, [err[0]], err[1]), g))
                for b in run(circ, initial=[b0]):
                    n_branches += 1
                    parity_ok &= b.bit("p") == flip
    ok = cat_ok and parity_ok
    record_criterion(10, ok, f"cat loss branches {vals} weights 1/2: {cat_ok}; Shor parity over {n_branches} branches: {parity_ok}")
    assert ok


def test_criterion_11_oracle_corpus(record_criterion):
    corpus_cases = cases()
    bad = []
    for label, c, faults in corpus_cases:
        agree, key = oracle_agrees(c, faults)
        if not agree:
            bad.append((label, key))
    n_loss = sum(any("L" in f.fault_type for f in faults) for _, _, faults in corpus_cases)
    ok = not bad and max(c.n_qubits for _, c, _ in corpus_cases) <= 10
    record_criterion(11, ok, f"{len(corpus_cases) - len(bad)}/{len(corpus_cases)} corpus cases agree ({n_loss} with loss faults)")
    assert ok, json.dumps(bad[:3], default=str)
