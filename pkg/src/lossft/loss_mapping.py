"""Rewriting a qubit loss as replacements by fresh |0> or |+> qubits.

After a loss the qubit's later interactions decide what it behaves like: a
lost CNOT control (or CZ party) acts like |0>, a lost CNOT target like |+>.
:func:`replacement_plan` places a replacement before each post-loss CNOT
unless the previous post-loss event was a CNOT in the same role, and before
each measurement unless it reads the basis left by that role (X after
control, Z after target).  :func:`verify_equivalence` checks a plan against
the loss semantics with the dense oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, FaultSpec
from .oracle import oracle_branches, reduced_state

CONTROL, TARGET, CZ, MEAS_Z, MEAS_X, LRU, HADAMARD = (
    "cnot-control", "cnot-target", "cz-party", "meas_z", "meas_x", "lru", "hadamard"
)
ZERO, PLUS = "zero", "plus"


@dataclass(frozen=True)
class RoleProfile:
    qubit: int
    events: tuple[tuple[int, str], ...]  # (location_id, role) after the loss point


@dataclass(frozen=True)
class ReplacementPlan:
    qubit: int
    loss_point: int
    insertions: tuple[tuple[int, str], ...]  # (location_id the replacement precedes, kind)

    @property
    def classification(self) -> str:
        return "single-replacement" if len(self.insertions) == 1 else "multi-replacement"


def role_profile(c: Circuit, loss_point: int, q: int) -> RoleProfile:
    idx = c.op_index()
    if loss_point not in idx:
        raise ValueError(f"no operation with location {loss_point}")
    events = []
    for op in c.ops[idx[loss_point] + 1:]:
        if q not in op.qubits or op.kind in ("classical_pauli", "decode_and_correct"):
            continue
        k = op.kind
        if k == "cnot":
            events.append((op.location_id, CONTROL if op.qubits[0] == q else TARGET))
        elif k == "cz":
            events.append((op.location_id, CZ))
        elif k in (MEAS_Z, MEAS_X, LRU, HADAMARD):
            events.append((op.location_id, k))
        elif k in ("prep_z", "prep_x"):
            raise ValueError(f"qubit {q} is re-prepared at {op.location_id}; outside the replacement rule")
        if k == "lru":
            break
    return RoleProfile(q, tuple(events))


def _kind_role(role: str) -> str:
    return CONTROL if role in (CONTROL, CZ) else TARGET


def replacement_plan(c: Circuit, loss_point: int, q: int) -> ReplacementPlan:
    prev = None
    ins = []
    for loc, role in role_profile(c, loss_point, q).events:
        if role in (CONTROL, TARGET, CZ):
            r = _kind_role(role)
            if prev != r:
                ins.append((loc, ZERO if r == CONTROL else PLUS))
            prev = r
        elif role in (MEAS_X, MEAS_Z):
            matched = (role == MEAS_X and prev == CONTROL) or (role == MEAS_Z and prev == TARGET)
            if not matched:
                ins.append((loc, ZERO if role == MEAS_X else PLUS))
            prev = None
        elif role == HADAMARD:
            prev = None
        else:  # an LRU ends the lost episode
            break
    return ReplacementPlan(q, loss_point, tuple(ins))


def _loss_fault(c: Circuit, loss_point: int, q: int) -> FaultSpec:
    op = c.ops[c.op_index()[loss_point]]
    if q not in op.qubits:
        raise ValueError(f"qubit {q} is not acted on at location {loss_point}")
    if len(op.qubits) == 1:
        return FaultSpec(loss_point, "L")
    return FaultSpec(loss_point, "".join("L" if x == q else "I" for x in op.qubits))


def _truncate(c: Circuit, profile: RoleProfile) -> Circuit:
    """Drop everything from the first post-loss LRU on ``q`` onward."""
    stop = next((loc for loc, r in profile.events if r == LRU), None)
    out = Circuit(c.n_qubits)
    for op in c.ops:
        if stop is not None and op.location_id >= stop:
            break
        out.append(op.kind, op.qubits, op.tag, op.name, location_id=op.location_id, **dict(op.args))
    return out


def apply_plan(c: Circuit, plan: ReplacementPlan) -> Circuit:
    """Copy of ``c`` with a fresh-state preparation of the qubit before each insertion."""
    before = {loc: kind for loc, kind in plan.insertions}
    out = Circuit(c.n_qubits)
    for op in c.ops:
        if op.location_id in before:
            kind = before[op.location_id]
            out.append("prep_z" if kind == ZERO else "prep_x", (plan.qubit,), "replacement")
        out.append(op.kind, op.qubits, op.tag, op.name, **dict(op.args))
    return out


def _ensemble(branches, q, n, q_names, scale_fair: bool) -> dict:
    others = [x for x in range(n) if x != q]
    out: dict = {}
    for b in branches:
        rec = tuple(sorted((k, v[0]) for k, v in b.record.items() if k not in q_names))
        qbits = tuple(sorted((k, v[0]) for k, v in b.record.items() if k in q_names))
        alive = [x for x in others if x not in b.lost]
        w = b.weight * (2 ** len(q_names) if scale_fair else 1)
        key = (rec, qbits, tuple(sorted(set(b.lost) - {q})))
        out[key] = out.get(key, 0) + float(w) * reduced_state(b, alive)
    return out


@dataclass(frozen=True)
class EquivalenceResult:
    equal: bool
    witness: str = ""

    def __bool__(self) -> bool:
        return self.equal


def verify_equivalence(c: Circuit, loss_point: int, q: int, plan: ReplacementPlan | None = None) -> EquivalenceResult:
    """Compare loss of ``q`` after ``loss_point`` with the replacement plan.

    Both sides are run densely.  Records must agree on every bit outside
    ``q``'s own measurements; those are adversarial under loss and fair with
    a replacement, so replacement weights are rescaled by two per measurement
    of ``q`` and the outcome sets must match.  Reduced states exclude ``q``.
    """
    profile = role_profile(c, loss_point, q)
    c = _truncate(c, profile)
    plan = plan or replacement_plan(c, loss_point, q)
    start = c.op_index()[loss_point]
    q_names = {op.name for op in c.ops[start + 1:] if op.kind in (MEAS_Z, MEAS_X) and op.qubits[0] == q}
    lossy = _ensemble(oracle_branches(c, [_loss_fault(c, loss_point, q)]), q, c.n_qubits, q_names, False)
    repl = _ensemble(oracle_branches(apply_plan(c, plan)), q, c.n_qubits, q_names, True)
    for key in sorted(lossy.keys() | repl.keys(), key=repr):
        a, b = lossy.get(key), repl.get(key)
        if a is None or b is None:
            side = "replacement" if a is None else "loss"
            return EquivalenceResult(False, f"record {key[0]} q-bits {key[1]} occurs only under {side}")
        if not np.array_equal(a, b):
            return EquivalenceResult(False, f"record {key[0]} q-bits {key[1]}: reduced states differ")
    return EquivalenceResult(True)


# --- corpora ------------------------------------------------------------------------


def random_role_consistent(rng: random.Random, n: int = 6, depth: int = 14):
    """Random Clifford circuit with one qubit lost that afterwards acts in a
    single CNOT role and is finally measured in the matching basis (or not at
    all).  Returns (circuit, loss_point, qubit)."""
    c = Circuit(n)
    q = rng.randrange(n)
    role = rng.choice((CONTROL, TARGET, CZ))
    for x in range(n):
        (c.prep_x if rng.random() < 0.5 else c.prep_z)(x)
    others = [x for x in range(n) if x != q]

    def random_gate(allow_q: bool):
        pool = list(range(n)) if allow_q else others
        k = rng.random()
        if k < 0.25:
            c.h(rng.choice(pool))
        else:
            a, b = rng.sample(pool, 2)
            (c.cnot if k < 0.75 else c.cz)(a, b)

    for _ in range(rng.randrange(0, 4)):
        random_gate(True)
    a = rng.choice(others)
    loss_op = c.cnot(q, a) if rng.random() < 0.5 else c.cnot(a, q)
    for _ in range(depth):
        if rng.random() < 0.35:
            p = rng.choice(others)
            if role == TARGET:
                c.cnot(p, q)
            elif role == CONTROL:
                c.cnot(q, p)
            else:
                c.cz(q, p) if rng.random() < 0.5 else c.cz(p, q)
        else:
            random_gate(False)
    for x in others:
        if rng.random() < 0.5:
            (c.meas_x if rng.random() < 0.5 else c.meas_z)(x, f"m{x}")
    if rng.random() < 0.6:
        if role == TARGET:
            c.meas_z(q, f"m{q}")
        else:
            c.meas_x(q, f"m{q}")
    return c, loss_op.location_id, q


def corpus(count: int = 200, n: int = 6, seed: int = 0):
    rng = random.Random(seed)
    return [random_role_consistent(rng, n) for _ in range(count)]


def control_then_target() -> tuple[Circuit, int, int]:
    """Qubit 0 is lost, then used as a CNOT control and afterwards as a target."""
    c = Circuit(3)
    c.prep_z(0)
    c.prep_x(1)
    c.prep_x(2)
    loss = c.cnot(0, 1)
    c.cnot(0, 1)
    c.cnot(2, 0)
    c.meas_z(0, "m0")
    return c, loss.location_id, 0


def single_replacement(plan: ReplacementPlan) -> ReplacementPlan:
    """The plan cut down to its first insertion."""
    return ReplacementPlan(plan.qubit, plan.loss_point, plan.insertions[:1])
