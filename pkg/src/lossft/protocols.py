"""Steane, Shor and Knill error-correction gadgets for the [[7,1,3]] code.

Every builder returns a :class:`ProtocolBuild` whose circuit expects the data
block on qubits 0..6 and leaves the corrected block on ``output_qubits``.
Ancilla blocks are verified inside verification blocks, so a rejected
ancilla is re-prepared ideally by the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .circuit import AcceptRule, Circuit
from .css import CssCode, steane_713
from .pauli import gf2_rref


class LruStrategy(str, Enum):
    NONE = "none"
    DATA_PRE = "data_pre"
    POST_ZERO = "post_zero_ancilla"
    AT07 = "at07_generic"

    @classmethod
    def parse(cls, text: str) -> "LruStrategy":
        aliases = {"data-pre": "data_pre", "post-zero": "post_zero_ancilla", "post_zero": "post_zero_ancilla", "at07": "at07_generic"}
        return cls(aliases.get(text, text))


PROTOCOLS = ("steane", "shor", "knill")

# tags
ANC_ENC = "ancilla-encode"
VER_ENC = "verifier-encode"
VERIFY = "verify"
COUPLE = "couple"
MEASURE = "measure"
LRU = "lru"
CORRECT = "correct"
CAT_PREP = "cat-prep"
CAT_GROW = "cat-grow"


@dataclass(frozen=True)
class ProtocolBuild:
    protocol: str
    strategy: LruStrategy
    circuit: Circuit
    data_qubits: tuple[int, ...]
    output_qubits: tuple[int, ...]
    code: CssCode

    @property
    def n_lrus(self) -> int:
        return self.circuit.count("lru")


# --- encoders ---------------------------------------------------------------


def _fanout(code: CssCode, kind: str):
    """Pivot qubits and CNOT pairs (in block-local indices) of the encoder."""
    rows, pivots = gf2_rref(code.h_x if kind == "zero" else code.h_z)
    pairs = []
    for row, p in sorted(zip(rows, pivots), key=lambda rp: -rp[1]):
        for j in range(code.n):
            if row[j] and j != p:
                pairs.append((p, j) if kind == "zero" else (j, p))
    return pivots, pairs


def emit_encoder(c: Circuit, code: CssCode, kind: str, qubits, tag: str = ANC_ENC) -> None:
    """Append the encoder of |0> (``kind='zero'``) or |+> (``'plus'``) on ``qubits``.

    For ``zero`` the pivot qubits of the X-check matrix start in |+> and fan
    out to the rest of their row; ``plus`` is the dual construction with the
    Z checks, pivots in |0> and reversed CNOTs.
    """
    if kind not in ("zero", "plus"):
        raise ValueError(f"unknown encoder kind {kind!r}")
    pivots, pairs = _fanout(code, kind)
    for j in range(code.n):
        superposed = (j in pivots) == (kind == "zero")
        c.append("prep_x" if superposed else "prep_z", (qubits[j],), tag)
    for a, b in pairs:
        c.cnot(qubits[a], qubits[b], tag)


def encode_logical(code: CssCode | None = None, kind: str = "zero") -> Circuit:
    code = code or steane_713()
    if code.k != 1:
        raise ValueError("encoders are only provided for k = 1 codes")
    c = Circuit(code.n)
    emit_encoder(c, code, kind, range(code.n))
    return c


def _lrus(c: Circuit, qubits, tag: str = LRU) -> None:
    for q in qubits:
        c.lru(q, tag)


def emit_verified(c: Circuit, code: CssCode, kind: str, anc, ver, *, anc_lru=False, ver_lru=False, label="") -> None:
    """Encode ``anc`` and a verifier ``ver`` of the same kind, couple them
    transversally and postselect on a trivial verifier readout.

    |0> ancillas are checked for X errors (ancilla controls, verifier measured
    in Z); |+> ancillas for Z errors (verifier controls, measured in X).
    """
    start = len(c.ops)
    emit_encoder(c, code, kind, anc, ANC_ENC)
    if anc_lru:
        _lrus(c, anc)
    emit_encoder(c, code, kind, ver, VER_ENC)
    if ver_lru:
        _lrus(c, ver)
    names = []
    for a, v in zip(anc, ver):
        if kind == "zero":
            c.cnot(a, v, VERIFY)
        else:
            c.cnot(v, a, VERIFY)
    for j, v in enumerate(ver):
        name = f"{label}v{j}"
        names.append(name)
        if kind == "zero":
            c.meas_z(v, name, VERIFY)
        else:
            c.meas_x(v, name, VERIFY)
    rule = AcceptRule("codeword", tuple(names), code.name, "Z" if kind == "zero" else "X")
    c.verification_block([op.location_id for op in c.ops[start:]], rule, label=label)


def steane_verification(kind: str = "zero", code: CssCode | None = None) -> Circuit:
    """Stand-alone verified ancilla: ancilla on 0..n-1, verifier on n..2n-1."""
    code = code or steane_713()
    c = Circuit(2 * code.n)
    emit_verified(c, code, kind, range(code.n), range(code.n, 2 * code.n), label="a")
    return c


def emit_cat(c: Circuit, qubits, verifier: int, *, lru=False, label="") -> None:
    """Verified 4-qubit cat state on ``qubits`` (c1..c4).

    c1 starts in |+> and grows along two independent chains c1->c2->c3 and
    c1->c4; the chain ends c3 and c4 are checked against each other through
    the verifier, which must read 0.
    """
    if len(qubits) != 4:
        raise ValueError("only 4-qubit cats are supported")
    c1, c2, c3, c4 = qubits
    start = len(c.ops)
    c.prep_x(c1, CAT_PREP)
    for q in (c2, c3, c4, verifier):
        c.prep_z(q, CAT_PREP)
    c.cnot(c1, c2, CAT_GROW)
    c.cnot(c2, c3, CAT_GROW)
    c.cnot(c1, c4, CAT_GROW)
    if lru:
        _lrus(c, (*qubits, verifier))
    c.cnot(c3, verifier, VERIFY)
    c.cnot(c4, verifier, VERIFY)
    name = f"{label}cv"
    c.meas_z(verifier, name, VERIFY)
    c.verification_block([op.location_id for op in c.ops[start:]], AcceptRule("all_zero", (name,)), label=label)


def build_cat_prep(size: int = 4) -> Circuit:
    if size != 4:
        raise ValueError("only 4-qubit cats are supported")
    c = Circuit(5)
    emit_cat(c, (0, 1, 2, 3), 4)
    return c


# --- gadgets ----------------------------------------------------------------


def _block(start: int, n: int) -> tuple[int, ...]:
    return tuple(range(start, start + n))


def build_steane_ec(strategy=LruStrategy.DATA_PRE, code: CssCode | None = None) -> ProtocolBuild:
    """Z correction from a verified |0> ancilla, then X correction from a
    verified |+> ancilla, each read out transversally and lookup-decoded."""
    strategy = LruStrategy(strategy)
    code = code or steane_713()
    n = code.n
    data = _block(0, n)
    a0, v0, ap, vp = (_block(n * i, n) for i in (1, 2, 3, 4))
    c = Circuit(5 * n)
    at07 = strategy is LruStrategy.AT07
    if strategy in (LruStrategy.DATA_PRE, LruStrategy.AT07):
        _lrus(c, data)
    emit_verified(c, code, "zero", a0, v0, anc_lru=at07 or strategy is LruStrategy.POST_ZERO, ver_lru=at07, label="z")
    for a, d in zip(a0, data):
        c.cnot(a, d, COUPLE)
    names = [f"sz{j}" for j in range(n)]
    for a, name in zip(a0, names):
        c.meas_x(a, name, MEASURE)
    c.append("decode_and_correct", data, CORRECT, code=code.name, mode="transversal", basis="X", inputs=names)
    emit_verified(c, code, "plus", ap, vp, anc_lru=at07, ver_lru=at07, label="x")
    for d, a in zip(data, ap):
        c.cnot(d, a, COUPLE)
    names = [f"sx{j}" for j in range(n)]
    for a, name in zip(ap, names):
        c.meas_z(a, name, MEASURE)
    c.append("decode_and_correct", data, CORRECT, code=code.name, mode="transversal", basis="Z", inputs=names)
    return ProtocolBuild("steane", strategy, c, data, data, code)


def build_shor_ec(rounds: int = 3, strategy=LruStrategy.DATA_PRE, code: CssCode | None = None) -> ProtocolBuild:
    """Each round measures every generator with a fresh verified cat.

    X-type generators couple by CNOT (cat controls), Z-type by CZ; the parity
    of the four X-basis cat outcomes is the generator's eigenvalue bit.  All
    rounds feed one majority-vote decode at the end.
    """
    strategy = LruStrategy(strategy)
    if strategy is LruStrategy.POST_ZERO:
        raise ValueError("the Shor gadget has no encoded |0> ancilla for post_zero_ancilla LRUs")
    code = code or steane_713()
    if rounds < 1:
        raise ValueError("rounds must be positive")
    gens = code.stabilizers
    n = code.n
    data = _block(0, n)
    c = Circuit(n + rounds * len(gens) * 5)
    if strategy is LruStrategy.DATA_PRE:
        _lrus(c, data)
    groups = []
    nxt = n
    for r in range(rounds):
        bits = []
        for s, g in enumerate(gens):
            cat, ver = _block(nxt, 4), nxt + 4
            nxt += 5
            label = f"r{r}s{s}"
            emit_cat(c, cat, ver, lru=strategy is LruStrategy.AT07, label=label)
            support = g.support
            if len(support) != 4:
                raise ValueError("cat coupling needs weight-4 generators")
            x_type = g.x != 0
            for a, d in zip(cat, support):
                if x_type:
                    c.cnot(a, d, COUPLE)
                else:
                    c.cz(a, d, COUPLE)
            outs = [f"{label}m{j}" for j in range(4)]
            for a, name in zip(cat, outs):
                c.meas_x(a, name, MEASURE)
            c.append("classical_parity", (), MEASURE, f"{label}p", inputs=outs)
            bits.append(f"{label}p")
        groups.append(bits)
    c.append("decode_and_correct", data, CORRECT, code=code.name, mode="rounds", inputs=groups)
    return ProtocolBuild("shor", strategy, c, data, data, code)


def build_knill_ec(strategy=LruStrategy.POST_ZERO, code: CssCode | None = None) -> ProtocolBuild:
    """Teleport the data through a logical Bell pair built from verified
    |+> and |0> ancillas; the |0> block carries the output."""
    strategy = LruStrategy(strategy)
    code = code or steane_713()
    n = code.n
    data = _block(0, n)
    ap, vp, a0, v0 = (_block(n * i, n) for i in (1, 2, 3, 4))
    c = Circuit(5 * n)
    at07 = strategy is LruStrategy.AT07
    if strategy is LruStrategy.DATA_PRE:
        _lrus(c, data)
    emit_verified(c, code, "plus", ap, vp, anc_lru=at07, ver_lru=at07, label="p")
    emit_verified(c, code, "zero", a0, v0, anc_lru=at07 or strategy is LruStrategy.POST_ZERO, ver_lru=at07, label="z")
    for p, z in zip(ap, a0):
        c.cnot(p, z, COUPLE)
    for d, p in zip(data, ap):
        c.cnot(d, p, COUPLE)
    m1 = [f"bx{j}" for j in range(n)]
    m2 = [f"bz{j}" for j in range(n)]
    for d, name in zip(data, m1):
        c.meas_x(d, name, MEASURE)
    c.append("classical_decode", (), CORRECT, "mx", code=code.name, basis="X", inputs=m1)
    for p, name in zip(ap, m2):
        c.meas_z(p, name, MEASURE)
    c.append("classical_decode", (), CORRECT, "mz", code=code.name, basis="Z", inputs=m2)
    lx, lz = code.logical_x[0], code.logical_z[0]
    xs = [a0[j] for j in lx.support]
    zs = [a0[j] for j in lz.support]
    c.append("classical_pauli", xs, CORRECT, pauli="X" * len(xs), inputs=["mz"])
    c.append("classical_pauli", zs, CORRECT, pauli="Z" * len(zs), inputs=["mx"])
    return ProtocolBuild("knill", strategy, c, data, a0, code)


BUILDERS = {"steane": build_steane_ec, "shor": build_shor_ec, "knill": build_knill_ec}
DEFAULT_STRATEGY = {"steane": LruStrategy.DATA_PRE, "shor": LruStrategy.DATA_PRE, "knill": LruStrategy.POST_ZERO}


def build_protocol(protocol: str, strategy=None, **kwargs) -> ProtocolBuild:
    try:
        builder = BUILDERS[protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {protocol!r}; choose from {', '.join(PROTOCOLS)}") from None
    strategy = DEFAULT_STRATEGY[protocol] if strategy is None else LruStrategy.parse(str(getattr(strategy, "value", strategy)))
    return builder(strategy=strategy, **kwargs)


def count_lrus(protocol: str, strategy) -> int:
    return build_protocol(protocol, strategy).n_lrus


def count_matrix() -> dict[tuple[str, str], int | None]:
    """LRU count of every (protocol, strategy); None where the pair is undefined."""
    out = {}
    for p in PROTOCOLS:
        for s in LruStrategy:
            try:
                out[p, s.value] = count_lrus(p, s)
            except ValueError:
                out[p, s.value] = None
    return out
