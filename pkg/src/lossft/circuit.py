"""Location-labelled circuits, verification blocks and fault-location enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

QUANTUM_1Q = ("prep_z", "prep_x", "hadamard", "wait", "lru", "meas_z", "meas_x")
QUANTUM_2Q = ("cnot", "cz")
CLASSICAL = ("classical_parity", "classical_decode", "classical_pauli", "decode_and_correct")
KINDS = QUANTUM_1Q + QUANTUM_2Q + CLASSICAL
MEASUREMENTS = ("meas_z", "meas_x")
# ops that read named bits
READERS = ("classical_parity", "classical_decode", "classical_pauli", "decode_and_correct")

SINGLE_PAULI = ("X", "Y", "Z")
TWO_PAULI_FULL = tuple(a + b for a, b in itertools.product("IXYZ", repeat=2) if a + b != "II")
TWO_PAULI_DEPOLARIZING = ("XI", "IX", "XX", "ZI", "IZ", "ZZ")
LOSS_PAPER5 = ("LI", "IL", "LL", "LX", "XL")
LOSS_FULL9 = ("LI", "IL", "LL", "LX", "LY", "LZ", "XL", "YL", "ZL")


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Operation:
    kind: str
    qubits: tuple[int, ...]
    location_id: int
    tag: str = ""
    name: str = ""
    args: tuple[tuple[str, str], ...] = ()

    def arg(self, key: str, default=None):
        for k, v in self.args:
            if k == key:
                return v
        return default

    @property
    def inputs(self) -> list[str]:
        """Named bits this op reads, in order."""
        raw = self.arg("inputs", "")
        return [s for s in raw.replace("|", ",").split(",") if s]

    @property
    def rounds(self) -> list[list[str]]:
        return [[s for s in grp.split(",") if s] for grp in self.arg("inputs", "").split("|")]


@dataclass(frozen=True)
class AcceptRule:
    """Verification predicate over named measurement bits.

    ``all_zero`` accepts iff every bit is 0.  ``codeword`` decodes the bits as a
    transversal measurement of ``code`` in ``basis`` and accepts iff the
    syndrome is trivial and the logical bit is 0.
    """

    kind: str
    names: tuple[str, ...]
    code: str = ""
    basis: str = ""

    def __str__(self) -> str:
        if self.kind == "all_zero":
            return "all_zero:" + ",".join(self.names)
        return f"codeword:{self.code}:{self.basis}:" + ",".join(self.names)

    @classmethod
    def parse(cls, text: str) -> "AcceptRule":
        parts = text.split(":")
        if parts[0] == "all_zero":
            return cls("all_zero", tuple(parts[1].split(",")))
        if parts[0] == "codeword":
            return cls("codeword", tuple(parts[3].split(",")), parts[1], parts[2])
        raise CircuitError(f"unknown accept rule {text!r}")

    def accepts(self, bits: dict) -> bool:
        values = [bits[n] for n in self.names]
        if self.kind == "all_zero":
            return not any(values)
        from .css import classical_decode_measurement, get_code

        logical, synd = classical_decode_measurement(get_code(self.code), values, self.basis)
        return logical == 0 and not any(synd)


@dataclass(frozen=True)
class VerificationBlock:
    members: tuple[int, ...]  # location ids, contiguous in op order
    accept: AcceptRule
    retry: str = "ideal"
    label: str = ""


@dataclass(frozen=True)
class FaultSpec:
    location_id: int
    fault_type: str

    def __str__(self) -> str:
        return f"{self.location_id}:{self.fault_type}"

    @classmethod
    def parse(cls, text: str) -> "FaultSpec":
        loc, ft = text.split(":")
        return cls(int(loc), ft)


@dataclass(frozen=True)
class FaultModel:
    include_pauli: bool = True
    include_loss: bool = True
    two_qubit_pauli_set: str = "full15"
    loss_combination_set: str = "full9"

    def __post_init__(self):
        if not (self.include_pauli or self.include_loss):
            raise ValueError("fault model must include Pauli or loss faults")
        if self.two_qubit_pauli_set not in ("full15", "depolarizing"):
            raise ValueError(f"unknown two-qubit Pauli set {self.two_qubit_pauli_set!r}")
        if self.loss_combination_set not in ("paper5", "full9"):
            raise ValueError(f"unknown loss combination set {self.loss_combination_set!r}")

    def fault_types(self, kind: str) -> tuple[str, ...]:
        """Admissible fault types for an op kind, in canonical order."""
        if kind in QUANTUM_2Q:
            out = ()
            if self.include_pauli:
                out += TWO_PAULI_FULL if self.two_qubit_pauli_set == "full15" else TWO_PAULI_DEPOLARIZING
            if self.include_loss:
                out += LOSS_FULL9 if self.loss_combination_set == "full9" else LOSS_PAPER5
            return out
        if kind in QUANTUM_1Q:
            # the reduced set counts losses at preparations and gates, not at readout
            loss = self.include_loss and not (self.loss_combination_set == "paper5" and kind in ("meas_z", "meas_x"))
            return (SINGLE_PAULI if self.include_pauli else ()) + (("L",) if loss else ())
        return ()

    def describe(self) -> str:
        parts = [p for p, on in (("pauli", self.include_pauli), ("loss", self.include_loss)) if on]
        return f"{','.join(parts)};{self.two_qubit_pauli_set};{self.loss_combination_set}"


@dataclass
class Circuit:
    """Ordered operation list over ``n_qubits`` qubits.

    Ops are added through the builder methods, which hand out fresh location
    ids and enforce the ordering rules; simulation treats the result as
    read-only.
    """

    n_qubits: int
    ops: list[Operation] = field(default_factory=list)
    blocks: list[VerificationBlock] = field(default_factory=list)
    _names: dict = field(default_factory=dict, repr=False)  # bit name -> producing op index

    def _next_loc(self) -> int:
        return self.ops[-1].location_id + 1 if self.ops else 0

    def append(self, kind: str, qubits=(), tag: str = "", name: str = "", location_id: int | None = None, **args) -> Operation:
        if kind not in KINDS:
            raise CircuitError(f"unknown op kind {kind!r}")
        qubits = tuple(int(q) for q in qubits)
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.n_qubits} qubits")
        if kind in QUANTUM_2Q and (len(qubits) != 2 or qubits[0] == qubits[1]):
            raise CircuitError(f"{kind} needs two distinct qubits, got {qubits}")
        if kind in QUANTUM_1Q and len(qubits) != 1:
            raise CircuitError(f"{kind} acts on one qubit, got {qubits}")
        str_args = tuple((k, v if isinstance(v, str) else _join(v)) for k, v in sorted(args.items()))
        loc = self._next_loc() if location_id is None else location_id
        if self.ops and loc <= self.ops[-1].location_id:
            raise CircuitError("location ids must increase")
        op = Operation(kind, qubits, loc, tag, name, str_args)
        for src in op.inputs:
            if src not in self._names:
                raise CircuitError(f"{kind} at {loc} reads {src!r} before it is produced")
        if kind in MEASUREMENTS or kind in ("classical_parity", "classical_decode"):
            if not name:
                raise CircuitError(f"{kind} needs an output name")
            if name in self._names:
                raise CircuitError(f"duplicate measurement name {name!r}")
            self._names[name] = len(self.ops)
        self.ops.append(op)
        return op

    # convenience builders
    def prep_z(self, q, tag=""):
        return self.append("prep_z", (q,), tag)

    def prep_x(self, q, tag=""):
        return self.append("prep_x", (q,), tag)

    def h(self, q, tag=""):
        return self.append("hadamard", (q,), tag)

    def cnot(self, c, t, tag=""):
        return self.append("cnot", (c, t), tag)

    def cz(self, a, b, tag=""):
        return self.append("cz", (a, b), tag)

    def wait(self, q, tag=""):
        return self.append("wait", (q,), tag)

    def lru(self, q, tag="lru"):
        return self.append("lru", (q,), tag)

    def meas_z(self, q, name, tag=""):
        return self.append("meas_z", (q,), tag, name)

    def meas_x(self, q, name, tag=""):
        return self.append("meas_x", (q,), tag, name)

    def verification_block(self, members, accept: AcceptRule, retry: str = "ideal", label: str = "") -> VerificationBlock:
        members = tuple(members)
        index = {op.location_id: i for i, op in enumerate(self.ops)}
        try:
            idx = sorted(index[m] for m in members)
        except KeyError as exc:
            raise CircuitError(f"block member {exc.args[0]} is not in the circuit") from None
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise CircuitError("block members must be contiguous")
        for b in self.blocks:
            if set(b.members) & set(members):
                raise CircuitError("verification blocks overlap")
        for name in accept.names:
            src = self._names.get(name)
            if src is None or src > idx[-1]:
                raise CircuitError(f"accept rule reads {name!r}, which is not produced by the block end")
        touched = {q for i in idx for q in self.ops[i].qubits}
        for op in self.ops[: idx[0]]:
            if touched & set(op.qubits):
                raise CircuitError("block qubits must be fresh when the block starts")
        if retry != "ideal":
            raise CircuitError(f"unsupported retry policy {retry!r}")
        block = VerificationBlock(tuple(self.ops[i].location_id for i in idx), accept, retry, label)
        self.blocks.append(block)
        return block

    def extend(self, other: "Circuit") -> None:
        """Append every op and block of ``other`` with renumbered locations."""
        remap = {}
        for op in other.ops:
            new = self.append(op.kind, op.qubits, op.tag, op.name, **dict(op.args))
            remap[op.location_id] = new.location_id
        for b in other.blocks:
            self.verification_block([remap[m] for m in b.members], b.accept, b.retry, b.label)

    def op_index(self) -> dict[int, int]:
        return {op.location_id: i for i, op in enumerate(self.ops)}

    def count(self, kind: str) -> int:
        return sum(op.kind == kind for op in self.ops)


def _join(v) -> str:
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple)):
        return "|".join(",".join(map(str, g)) for g in v)
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v)


def new_circuit(n: int) -> Circuit:
    return Circuit(n)


def enumerate_fault_locations(c: Circuit, m: FaultModel) -> list[FaultSpec]:
    """One FaultSpec per (location, admissible fault type).

    Ordered by location id, then by the fault-type order of ``FaultModel``:
    single-qubit X, Y, Z, L; two-qubit Paulis lexicographic over IXYZ, then
    loss patterns.
    """
    return [FaultSpec(op.location_id, ft) for op in c.ops for ft in m.fault_types(op.kind)]


# --- text format ------------------------------------------------------------

HEADER = "# lossft circuit v1"


def circuit_to_text(c: Circuit) -> str:
    lines = [HEADER, f"qubits {c.n_qubits}"]
    starts = {b.members[0]: b for b in c.blocks}
    ends = {b.members[-1] for b in c.blocks}
    for op in c.ops:
        if op.location_id in starts:
            b = starts[op.location_id]
            label = f" label={b.label}" if b.label else ""
            lines.append(f"[ block accept={b.accept} retry={b.retry}{label}")
        extra = ([f"name={op.name}"] if op.name else []) + [f"{k}={v}" for k, v in op.args]
        fields = [str(op.location_id), op.kind, " ".join(map(str, op.qubits)), op.tag]
        if extra:
            fields.append(" ".join(extra))
        lines.append("; ".join(fields))
        if op.location_id in ends:
            lines.append("]")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    c = None
    pending = None
    members: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("qubits"):
            c = Circuit(int(line.split()[1]))
            continue
        if c is None:
            raise CircuitError("missing 'qubits' line")
        if line.startswith("["):
            kv = dict(tok.split("=", 1) for tok in line[1:].split()[1:])
            pending = kv
            members = []
            continue
        if line == "]":
            c.verification_block(members, AcceptRule.parse(pending["accept"]), pending.get("retry", "ideal"), pending.get("label", ""))
            pending = None
            continue
        fields = [f.strip() for f in line.split(";")]
        loc, kind, qubits, tag = fields[:4]
        kv = dict(tok.split("=", 1) for tok in fields[4].split()) if len(fields) > 4 else {}
        name = kv.pop("name", "")
        op = c.append(kind, [int(q) for q in qubits.split()], tag, name, location_id=int(loc), **kv)
        if pending is not None:
            members.append(op.location_id)
    if c is None:
        raise CircuitError("empty circuit text")
    return c
