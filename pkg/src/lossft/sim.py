"""Branching stabilizer simulation under the loss model.

Every random event splits a branch: fair measurement outcomes (dyadic weight
halves), the fictitious Z measurement realising the partial trace of a lost
qubit, adversarial outcomes of measuring a lost qubit, and the adversarial
Pauli an LRU leaves on a replaced qubit.  Each split appends one character to
the branch ``path`` so any branch can be replayed exactly with ``run(path=...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import MEASUREMENTS, READERS, Circuit, FaultSpec, Operation
from .css import get_code
from .tableau import Tableau

DETERMINISTIC = "deterministic"
FAIR = "fair-random"
LOST = "lost-unknown"
DERIVED = "derived"

DEFAULT_CAP = 1 << 20


class TruncationError(RuntimeError):
    """Branch count exceeded the cap; results would be incomplete."""


class SimulationError(RuntimeError):
    pass


class SimBranch:
    __slots__ = ("tableau", "lost", "outcomes", "weight", "adversarial", "path", "snap")

    def __init__(self, tableau, lost=0, outcomes=None, weight=Fraction(1), adversarial=False, path=""):
        self.tableau = tableau
        self.lost = lost
        self.outcomes = {} if outcomes is None else outcomes
        self.weight = weight
        self.adversarial = adversarial
        self.path = path
        self.snap = None

    @classmethod
    def fresh(cls, n: int) -> "SimBranch":
        return cls(Tableau(n))

    def copy(self) -> "SimBranch":
        b = SimBranch(self.tableau.copy(), self.lost, dict(self.outcomes), self.weight, self.adversarial, self.path)
        b.snap = self.snap
        return b

    def is_lost(self, q: int) -> bool:
        return bool((self.lost >> q) & 1)

    @property
    def lost_qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.tableau.n) if (self.lost >> q) & 1)

    def bit(self, name: str) -> int:
        return self.outcomes[name][0]

    def __repr__(self) -> str:
        return f"SimBranch(path={self.path!r}, lost={self.lost_qubits}, weight={self.weight})"


@dataclass
class BranchSet:
    branches: list[SimBranch] = field(default_factory=list)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def total_weight(self) -> Fraction:
        return sum((b.weight for b in self.branches), Fraction(0))


# --- primitives (in place on an owned branch; return the children) -----------


def _split_fair(b: SimBranch, pivot: int) -> list[SimBranch]:
    """Children for a random tableau outcome already prepared with outcome 0."""
    b1 = b.copy()
    b1.tableau.r ^= 1 << pivot
    half = b.weight / 2
    b.weight = b1.weight = half
    b.path += "0"
    b1.path += "1"
    return [b, b1]


def _reset(b: SimBranch, q: int) -> list[SimBranch]:
    if b.is_lost(q):
        return [b]
    bit, piv = b.tableau.measure_z(q)
    if piv is None:
        if bit:
            b.tableau.pauli(q, "X")
        return [b]
    b0, b1 = _split_fair(b, piv)
    b1.tableau.pauli(q, "X")
    return [b0, b1]


def _loss(b: SimBranch, q: int) -> list[SimBranch]:
    if b.is_lost(q):
        return [b]
    bit, piv = b.tableau.measure_z(q)
    kids = [b] if piv is None else _split_fair(b, piv)
    for k in kids:
        k.lost |= 1 << q
    return kids


def _lru(b: SimBranch, q: int, name: str) -> list[SimBranch]:
    if not b.is_lost(q):
        return [b]
    b.lost &= ~(1 << q)
    kids = []
    for k in _reset(b, q):
        for letter in "IXYZ":
            c = k.copy() if letter != "Z" else k
            c.tableau.pauli(q, letter)
            c.outcomes[name] = ("IXYZ".index(letter), LOST)
            c.adversarial = True
            c.path += letter
            kids.append(c)
    return kids


def _measure(b: SimBranch, q: int, basis: str, name: str) -> list[SimBranch]:
    if b.is_lost(q):
        b1 = b.copy()
        for k, v in ((b, 0), (b1, 1)):
            k.outcomes[name] = (v, LOST)
            k.adversarial = True
            k.path += str(v)
        return [b, b1]
    t = b.tableau
    bit, piv = t.measure_x(q) if basis == "X" else t.measure_z(q)
    if piv is None:
        b.outcomes[name] = (bit, DETERMINISTIC)
        return [b]
    b0, b1 = _split_fair(b, piv)
    b0.outcomes[name] = (0, FAIR)
    b1.outcomes[name] = (1, FAIR)
    return [b0, b1]


def _pauli(b: SimBranch, q: int, letter: str) -> None:
    if letter != "I" and not b.is_lost(q):
        b.tableau.pauli(q, letter)


def _gate(b: SimBranch, op: Operation) -> list[SimBranch]:
    k = op.kind
    qs = op.qubits
    t = b.tableau
    if k == "cnot" or k == "cz":
        if b.lost & ((1 << qs[0]) | (1 << qs[1])):
            return [b]  # identity on the surviving partner
        if k == "cnot":
            t.cnot(qs[0], qs[1])
        else:
            t.cz(qs[0], qs[1])
        return [b]
    if k == "hadamard":
        if not b.is_lost(qs[0]):
            t.h(qs[0])
        return [b]
    if k == "wait":
        return [b]
    if k == "prep_z":
        return _reset(b, qs[0])
    if k == "prep_x":
        kids = _reset(b, qs[0])
        if not b.is_lost(qs[0]):
            for c in kids:
                c.tableau.h(qs[0])
        return kids
    if k == "classical_pauli":
        if _xor(b, op.inputs):
            for q, letter in zip(qs, op.arg("pauli")):
                _pauli(b, q, letter)
        return [b]
    raise SimulationError(f"apply_gate cannot handle {k!r}")


def _xor(b: SimBranch, names) -> int:
    v = 0
    for n in names:
        v ^= b.outcomes[n][0]
    return v


def _decode_and_correct(b: SimBranch, op: Operation) -> None:
    code = get_code(op.arg("code"))
    targets = op.qubits
    if op.arg("mode", "transversal") == "transversal":
        basis = op.arg("basis")
        bits = [b.outcomes[n][0] for n in op.inputs]
        v = sum(bit << j for j, bit in enumerate(bits))
        if basis == "X":
            checks, table, letter = code.h_x, code.decode_table_z, "Z"
        else:
            checks, table, letter = code.h_z, code.decode_table_x, "X"
        synd = tuple((sum(1 << j for j, e in enumerate(r) if e) & v).bit_count() % 2 for r in checks)
        support = table.get(synd, 0)
        for j, q in enumerate(targets):
            if (support >> j) & 1:
                _pauli(b, q, letter)
        return
    # repeated full-syndrome rounds with 2-of-3 style majority
    rounds = [tuple(b.outcomes[n][0] for n in grp) for grp in op.rounds]
    chosen = None
    for s in rounds:
        if sum(s == other for other in rounds) * 2 > len(rounds):
            chosen = s
            break
    if chosen is None:
        return
    mx = code.h_x.shape[0]
    synd_x, synd_z = chosen[:mx], chosen[mx:]
    x = code.decode_table_x.get(synd_z, 0)
    z = code.decode_table_z.get(synd_x, 0)
    for j, q in enumerate(targets):
        bx, bz = (x >> j) & 1, (z >> j) & 1
        if bx or bz:
            _pauli(b, q, "Y" if bx and bz else ("X" if bx else "Z"))


def _classical(b: SimBranch, op: Operation) -> None:
    if op.kind == "classical_parity":
        b.outcomes[op.name] = (_xor(b, op.inputs), DERIVED)
    elif op.kind == "classical_decode":
        from .css import classical_decode_measurement

        bits = [b.outcomes[n][0] for n in op.inputs]
        logical, _ = classical_decode_measurement(get_code(op.arg("code")), bits, op.arg("basis"))
        b.outcomes[op.name] = (logical, DERIVED)
    elif op.kind == "decode_and_correct":
        _decode_and_correct(b, op)


def _inject(b: SimBranch, qubits, fault_type: str) -> list[SimBranch]:
    kids = [b]
    for q, ch in zip(qubits, fault_type):
        if ch == "L":
            kids = [c for k in kids for c in _loss(k, q)]
        else:
            for k in kids:
                _pauli(k, q, ch)
    return kids


# --- public single-step API --------------------------------------------------


def apply_gate(b: SimBranch, op: Operation) -> SimBranch:
    """Apply a prep/hadamard/cnot/cz/wait/classical_pauli op to a copy of ``b``.

    Preparation of a qubit that is already in use acts as a reset and can
    split the branch; use :func:`run` for those cases.
    """
    kids = _gate(b.copy(), op)
    if len(kids) != 1:
        raise SimulationError("operation split the branch; use run()")
    return kids[0]


def apply_loss(b: SimBranch, q: int) -> BranchSet:
    return BranchSet(_loss(b.copy(), q))


def apply_lru(b: SimBranch, q: int, name: str = "lru") -> BranchSet:
    return BranchSet(_lru(b.copy(), q, name))


def measure(b: SimBranch, q: int, basis: str, name: str) -> BranchSet:
    return BranchSet(_measure(b.copy(), q, basis.upper(), name))


# --- circuit execution ---------------------------------------------------------


class _Plan:
    """Per-circuit precomputation shared by every run of that circuit."""

    def __init__(self, c: Circuit, keep=()):
        self.c = c
        self.ops = c.ops
        self.index = c.op_index()
        self.block_start = {}
        self.block_end = {}
        for blk in c.blocks:
            s, e = self.index[blk.members[0]], self.index[blk.members[-1]]
            self.block_start[s] = blk
            self.block_end[e] = (s, blk)
        # last use of every named bit and qubit, for merge mode
        last_read = {}
        for i, op in enumerate(self.ops):
            if op.name:
                last_read.setdefault(op.name, i)
            if op.kind in READERS:
                for n in op.inputs:
                    last_read[n] = i
        for e, (_, blk) in self.block_end.items():
            for n in blk.accept.names:
                last_read[n] = max(last_read.get(n, e), e)
        self.dead_after: dict[int, list[str]] = {}
        for n, i in last_read.items():
            self.dead_after.setdefault(i, []).append(n)
        keep = set(keep)
        last_q = {}
        for i, op in enumerate(self.ops):
            for q in op.qubits:
                last_q[q] = i
        self.retire_after: dict[int, list[int]] = {}
        for q, i in last_q.items():
            if q not in keep and self.ops[i].kind in MEASUREMENTS:
                self.retire_after.setdefault(i, []).append(q)


def _retire(b: SimBranch, q: int, basis_x: bool, bit: int | None) -> None:
    """Return a measured, never-again-used qubit to |0>, so equal states merge.

    ``bit`` is the recorded outcome when the qubit was measured while present;
    the qubit is then known to sit in that eigenstate.
    """
    t = b.tableau
    if b.is_lost(q) or bit is None:
        b.lost &= ~(1 << q)
        bit, piv = t.measure_z(q)
        if piv is not None:
            raise SimulationError(f"retired qubit {q} is not in a product state")
    elif basis_x:
        t.h(q)
    if bit:
        t.pauli(q, "X")


def _merge(branches: list[SimBranch]) -> list[SimBranch]:
    groups: dict = {}
    for b in branches:
        key = (b.tableau.state_key(), b.lost, tuple(b.outcomes.items()), b.adversarial)
        first = groups.get(key)
        if first is None:
            groups[key] = b
        else:
            first.weight += b.weight
    return list(groups.values())


class _Runner:
    def __init__(self, plan: _Plan, faults, cap: int, merge: bool, path: str | None):
        self.plan = plan
        self.cap = cap
        self.merge = merge
        self.path = path
        self.faults: dict[int, list[str]] = {}
        for f in faults:
            if f.location_id not in plan.index:
                raise SimulationError(f"fault at unknown location {f.location_id}")
            self.faults.setdefault(plan.index[f.location_id], []).append(f.fault_type)

    def _filter(self, kids):
        if self.path is None:
            return kids
        return [k for k in kids if self.path.startswith(k.path) or k.path.startswith(self.path)]

    def run_range(self, branches, start, stop, faulty=True):
        plan = self.plan
        ops = plan.ops
        for i in range(start, stop):
            op = ops[i]
            if i in plan.block_start:
                for b in branches:
                    b.snap = b.copy()
            fts = self.faults.get(i, ()) if faulty else ()
            new = []
            for b in branches:
                new.extend(self._step(b, op, fts))
            branches = self._filter(new)
            if i in plan.block_end:
                branches = self._verify(branches, i)
            if self.merge:
                for q in plan.retire_after.get(i, ()):
                    for b in branches:
                        bit = None if b.is_lost(q) else b.outcomes[op.name][0]
                        _retire(b, q, op.kind == "meas_x", bit)
                dead = plan.dead_after.get(i)
                if dead:
                    for b in branches:
                        for n in dead:
                            b.outcomes.pop(n, None)
                    if len(branches) > 1:
                        branches = _merge(branches)
            if len(branches) > self.cap:
                raise TruncationError(f"{len(branches)} branches exceed cap {self.cap} at location {op.location_id}")
        return branches

    def _step(self, b, op, fts):
        k = op.kind
        q = op.qubits
        if k in MEASUREMENTS:
            kids = [b]
            for ft in fts:
                kids = [c for x in kids for c in _inject(x, q, ft)]
            return [c for x in kids for c in _measure(x, q[0], "X" if k == "meas_x" else "Z", op.name)]
        if k == "lru":
            kids = _lru(b, q[0], f"lru@{op.location_id}")
        elif k in ("classical_parity", "classical_decode", "decode_and_correct"):
            _classical(b, op)
            return [b]
        else:
            kids = _gate(b, op)
        for ft in fts:
            kids = [c for x in kids for c in _inject(x, q, ft)]
        return kids

    def _verify(self, branches, end):
        start, blk = self.plan.block_end[end]
        out = []
        for b in branches:
            if blk.accept.accepts({n: b.outcomes[n][0] for n in blk.accept.names}):
                b.snap = None
                out.append(b)
                continue
            retry = b.snap.copy()
            retry.weight = b.weight
            retry.adversarial = b.adversarial
            retry.path = b.path + "R"
            retry.outcomes = {k: v for k, v in retry.outcomes.items() if k in b.outcomes}
            retry.snap = None
            if self.path is not None and not (self.path.startswith(retry.path) or retry.path.startswith(self.path)):
                continue
            redo = self.run_range([retry], start, end, faulty=False)
            redo = self._filter([c for x in redo for c in self._last(x, end)])
            for r in redo:
                if not blk.accept.accepts({n: r.outcomes[n][0] for n in blk.accept.names}):
                    raise SimulationError(f"ideal re-preparation rejected at block ending {blk.members[-1]}")
                r.snap = None
            out.extend(redo)
        return out

    def _last(self, b, end):
        return self._step(b, self.plan.ops[end], ())


def run(
    c: Circuit,
    faults=(),
    cap: int = DEFAULT_CAP,
    *,
    initial=None,
    merge: bool = False,
    keep=(),
    path: str | None = None,
    plan: _Plan | None = None,
) -> BranchSet:
    """Execute ``c`` over every branch.

    Args:
        faults: FaultSpecs; each fault is applied right after its location's
            ideal operation (right before it for measurements).
        cap: maximum number of live branches; exceeding it raises
            TruncationError.
        initial: starting branches (default: one all-|0> branch).
        merge: drop outcomes once nothing reads them, return measured qubits
            to |0>, and merge branches holding identical states.  Records
            then only contain live bits.
        keep: qubits never retired in merge mode (the protocol outputs).
        path: replay only the branch with this path string.
    """
    plan = plan or _Plan(c, keep)
    if initial is None:
        branches = [SimBranch.fresh(c.n_qubits)]
    else:
        branches = [b.copy() for b in (initial.branches if isinstance(initial, BranchSet) else initial)]
    runner = _Runner(plan, faults, cap, merge, path)
    branches = runner._filter(branches)
    return BranchSet(runner.run_range(branches, 0, len(plan.ops)))


def trace_dump(bs: BranchSet) -> str:
    """One line per branch: path, outcome record, lost set, stabilizer rows."""
    mark = {DETERMINISTIC: "d", FAIR: "f", LOST: "l", DERIVED: "c"}
    lines = []
    for b in bs:
        rec = ",".join(f"{n}={v}{mark[c]}" for n, (v, c) in b.outcomes.items())
        lost = ",".join(map(str, b.lost_qubits))
        stabs = " ".join(str(s) for s in b.tableau.stabilizers())
        lines.append(f"{b.path or '-'}\t{rec or '-'}\t{lost or '-'}\t{b.weight}\t{stabs}")
    return "\n".join(lines) + ("\n" if lines else "")
