"""Dense state-vector oracle for small circuits, independent of the tableau.

Loss is modelled literally: a lost qubit's tensor slot is frozen (gates that
touch it are skipped) and traced out at the end.  Resets and LRUs move the
qubit onto a fresh slot, leaving the old one to be traced out too.  Every
stabilizer state has equal-magnitude nonzero amplitudes, so vectors are kept
rescaled to entries in {0, +-1, +-i} and all densities are exact dyadic
rationals in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuit import Circuit
from .css import classical_decode_measurement, get_code

MAX_QUBITS = 12
MAX_SLOTS = 18


class OracleLimitError(ValueError):
    pass


@dataclass
class _OBranch:
    vec: np.ndarray  # tensor with one axis per slot
    slot: list  # qubit -> slot
    lost: set
    fresh: set  # qubits whose slot has never been touched
    record: dict = field(default_factory=dict)
    weight: Fraction = Fraction(1)
    snap: object = None

    def copy(self) -> "_OBranch":
        return _OBranch(self.vec.copy(), self.slot[:], set(self.lost), set(self.fresh), dict(self.record), self.weight, self.snap)


def _canon(v: np.ndarray) -> np.ndarray:
    flat = v.reshape(-1)
    nz = np.flatnonzero(np.abs(flat) > 1e-9)
    if nz.size == 0:
        raise AssertionError("zero state vector")
    out = flat / flat[nz[0]]
    out = np.round(out.real) + 1j * np.round(out.imag)
    return out.reshape(v.shape)


def _ix(v, axis, val):
    idx = [slice(None)] * v.ndim
    idx[axis] = val
    return tuple(idx)


def _x(v, a):
    return np.flip(v, axis=a).copy()


def _z(v, a):
    v = v.copy()
    v[_ix(v, a, 1)] *= -1
    return v


def _h(v, a):
    v0, v1 = v[_ix(v, a, 0)], v[_ix(v, a, 1)]
    return _canon(np.stack([v0 + v1, v0 - v1], axis=a))


def _cnot(v, c, t):
    v = v.copy()
    sub = v[_ix(v, c, 1)]
    t2 = t - 1 if t > c else t
    v[_ix(v, c, 1)] = np.flip(sub, axis=t2)
    return v


def _cz(v, a, b):
    v = v.copy()
    idx = [slice(None)] * v.ndim
    idx[a] = 1
    idx[b] = 1
    v[tuple(idx)] *= -1
    return v


def _pauli(v, a, letter):
    if letter == "X":
        return _x(v, a)
    if letter == "Z":
        return _z(v, a)
    if letter == "Y":
        return 1j * _x(_z(v, a), a)
    return v


def _project(v, a, bit):
    """Projected (canonical) vector and the number of surviving amplitudes."""
    p = np.zeros_like(v)
    p[_ix(v, a, bit)] = v[_ix(v, a, bit)]
    cnt = int(np.count_nonzero(np.abs(p) > 1e-9))
    return (_canon(p) if cnt else None), cnt


def _new_slot(b: _OBranch, q: int) -> None:
    if b.vec.ndim >= MAX_SLOTS:
        raise OracleLimitError(f"oracle needs more than {MAX_SLOTS} slots")
    b.vec = np.multiply.outer(b.vec, np.array([1, 0], dtype=complex))
    b.slot[q] = b.vec.ndim - 1


def _reset(b: _OBranch, q: int) -> None:
    if q in b.lost:
        return
    if q in b.fresh:
        b.fresh.discard(q)
        return
    _new_slot(b, q)


def _measure(b: _OBranch, q: int, basis: str, name: str) -> list[_OBranch]:
    b.fresh.discard(q)
    if q in b.lost:
        b1 = b.copy()
        b.record[name] = (0, "lost-unknown")
        b1.record[name] = (1, "lost-unknown")
        return [b, b1]
    a = b.slot[q]
    v = _h(b.vec, a) if basis == "X" else b.vec
    total = int(np.count_nonzero(np.abs(v) > 1e-9))
    kids = []
    parts = [(bit,) + _project(v, a, bit) for bit in (0, 1)]
    live = [p for p in parts if p[2]]
    for bit, pv, cnt in live:
        k = b.copy()
        k.vec = _h(pv, a) if basis == "X" else pv
        k.weight = b.weight * Fraction(cnt, total)
        k.record[name] = (bit, "deterministic" if len(live) == 1 else "fair-random")
        kids.append(k)
    return kids


def _xor(b, names):
    v = 0
    for n in names:
        v ^= b.record[n][0]
    return v


def _apply(b: _OBranch, q: int, letter: str) -> None:
    if letter != "I" and q not in b.lost:
        b.fresh.discard(q)
        b.vec = _pauli(b.vec, b.slot[q], letter)


def _classical(b: _OBranch, op) -> None:
    k = op.kind
    if k == "classical_parity":
        b.record[op.name] = (_xor(b, op.inputs), "derived")
    elif k == "classical_decode":
        bits = [b.record[n][0] for n in op.inputs]
        bit, _ = classical_decode_measurement(get_code(op.arg("code")), bits, op.arg("basis"))
        b.record[op.name] = (bit, "derived")
    elif k == "classical_pauli":
        if _xor(b, op.inputs):
            for q, letter in zip(op.qubits, op.arg("pauli")):
                _apply(b, q, letter)
    elif k == "decode_and_correct":
        code = get_code(op.arg("code"))
        if op.arg("mode", "transversal") == "transversal":
            bits = [b.record[n][0] for n in op.inputs]
            basis = op.arg("basis")
            checks = code.h_x if basis == "X" else code.h_z
            synd = tuple(int(np.dot(r, bits) % 2) for r in checks)
            table = code.decode_table_z if basis == "X" else code.decode_table_x
            e = table.get(synd, 0)
            for j, q in enumerate(op.qubits):
                if (e >> j) & 1:
                    _apply(b, q, "Z" if basis == "X" else "X")
        else:
            rounds = [tuple(b.record[n][0] for n in grp) for grp in op.rounds]
            chosen = next((s for s in rounds if 2 * rounds.count(s) > len(rounds)), None)
            if chosen is not None:
                mx = code.h_x.shape[0]
                x = code.decode_table_x.get(chosen[mx:], 0)
                z = code.decode_table_z.get(chosen[:mx], 0)
                for j, q in enumerate(op.qubits):
                    if (x >> j) & 1:
                        _apply(b, q, "X")
                    if (z >> j) & 1:
                        _apply(b, q, "Z")


def _fault(b: _OBranch, qubits, ft: str) -> list[_OBranch]:
    for q, ch in zip(qubits, ft):
        if ch == "L":
            b.lost.add(q)
        else:
            _apply(b, q, ch)
    return [b]


def _step(b: _OBranch, op, fts) -> list[_OBranch]:
    k, qs = op.kind, op.qubits
    if k in ("meas_z", "meas_x"):
        for ft in fts:
            _fault(b, qs, ft)
        kids = _measure(b, qs[0], "X" if k == "meas_x" else "Z", op.name)
        return kids
    if k in ("classical_parity", "classical_decode", "classical_pauli", "decode_and_correct"):
        _classical(b, op)
        return [b]
    kids = [b]
    if k in ("prep_z", "prep_x"):
        _reset(b, qs[0])
        if k == "prep_x" and qs[0] not in b.lost:
            b.fresh.discard(qs[0])
            b.vec = _h(b.vec, b.slot[qs[0]])
    elif k == "hadamard":
        if qs[0] not in b.lost:
            b.fresh.discard(qs[0])
            b.vec = _h(b.vec, b.slot[qs[0]])
    elif k in ("cnot", "cz"):
        if not (set(qs) & b.lost):
            b.fresh.difference_update(qs)
            a, t = b.slot[qs[0]], b.slot[qs[1]]
            b.vec = _cnot(b.vec, a, t) if k == "cnot" else _cz(b.vec, a, t)
    elif k == "lru":
        q = qs[0]
        if q in b.lost:
            b.lost.discard(q)
            _new_slot(b, q)
            kids = []
            for i, letter in enumerate("IXYZ"):
                c = b.copy()
                _apply(c, q, letter)
                c.record[f"lru@{op.location_id}"] = (i, "lost-unknown")
                kids.append(c)
    for ft in fts:
        kids = [x for c in kids for x in _fault(c, qs, ft)]
    return kids


def _run_ops(c: Circuit, branches, start, stop, faults, index_of_block):
    ops = c.ops
    starts, ends = index_of_block
    for i in range(start, stop):
        op = ops[i]
        if i in starts:
            for b in branches:
                b.snap = b.copy()
        new = []
        for b in branches:
            new.extend(_step(b, op, faults.get(i, ())))
        branches = new
        if i in ends:
            s, blk = ends[i]
            kept = []
            for b in branches:
                if blk.accept.accepts({n: b.record[n][0] for n in blk.accept.names}):
                    kept.append(b)
                    continue
                r = b.snap.copy()
                r.weight = b.weight
                redo = _run_ops(c, [r], s, i + 1, {}, ({}, {}))
                for x in redo:
                    if not blk.accept.accepts({n: x.record[n][0] for n in blk.accept.names}):
                        raise AssertionError("ideal retry rejected")
                kept.extend(redo)
            branches = kept
    return branches


def _record_key(record: dict) -> tuple:
    """Outcome bits plus whether each was adversarial.  Deterministic and
    fair-random are merged: the tableau's fictitious loss measurement can make
    an outcome deterministic per branch that is fair-random in the mixture."""
    return tuple(sorted((n, bit, cert == "lost-unknown") for n, (bit, cert) in record.items()))


@dataclass
class Ensemble:
    """Weighted reduced states keyed by (outcome record, lost qubit set)."""

    groups: dict

    def keys(self):
        return set(self.groups)


def _reduced(vec: np.ndarray, keep_axes, n_axes) -> np.ndarray:
    drop = [a for a in range(n_axes) if a not in keep_axes]
    m = np.transpose(vec, list(keep_axes) + drop).reshape(2 ** len(keep_axes), -1)
    cnt = np.count_nonzero(np.abs(vec) > 1e-9)
    return (m @ m.conj().T) / cnt


def oracle_branches(c: Circuit, faults=()) -> list:
    """Final dense branches of ``c``; each has ``vec``, ``slot``, ``lost``,
    ``record`` and ``weight``."""
    n = c.n_qubits
    if n > MAX_QUBITS:
        raise OracleLimitError(f"{n} qubits exceed the oracle limit of {MAX_QUBITS}")
    index = c.op_index()
    fmap: dict[int, list[str]] = {}
    for f in faults:
        fmap.setdefault(index[f.location_id], []).append(f.fault_type)
    starts = {index[b.members[0]] for b in c.blocks}
    ends = {index[b.members[-1]]: (index[b.members[0]], b) for b in c.blocks}
    vec = np.zeros((2,) * n, dtype=complex)
    vec[(0,) * n] = 1
    b0 = _OBranch(vec, list(range(n)), set(), set(range(n)))
    return _run_ops(c, [b0], 0, len(c.ops), fmap, (starts, ends))


def reduced_state(b, qubits) -> np.ndarray:
    """Density matrix of ``qubits`` (in the given order) for a dense branch."""
    return _reduced(b.vec, [b.slot[q] for q in qubits], b.vec.ndim)


def dense_oracle_run(c: Circuit, faults=()) -> Ensemble:
    """Run ``c`` densely with the given FaultSpecs.

    Returns an :class:`Ensemble` mapping ``(record, lost)`` to the summed
    ``weight * rho`` of the surviving (non-lost) qubits in qubit order.
    """
    groups: dict = {}
    for b in oracle_branches(c, faults):
        alive = [q for q in range(c.n_qubits) if q not in b.lost]
        key = (_record_key(b.record), tuple(sorted(b.lost)))
        groups[key] = groups.get(key, 0) + float(b.weight) * reduced_state(b, alive)
    return Ensemble(groups)


# --- tableau side ----------------------------------------------------------------


def tableau_vector(t) -> np.ndarray:
    """State vector (tensor, axis j = qubit j) of a stabilizer tableau."""
    n = t.n
    probe = t.copy()
    basis = []
    for q in range(n):
        bit, piv = probe.measure_z(q)
        basis.append(0 if piv is not None else bit)
    v = np.zeros((2,) * n, dtype=complex)
    v[tuple(basis)] = 1
    for s in t.stabilizers():
        w = v.copy()
        for q in range(n):
            w = _pauli(w, q, s.letter(q))
        if s.sign < 0:
            w = -w
        v = v + w
    return _canon(v)


def branchset_ensemble(bs) -> Ensemble:
    groups: dict = {}
    for b in bs:
        n = b.tableau.n
        v = tableau_vector(b.tableau)
        alive = [q for q in range(n) if not b.is_lost(q)]
        rho = _reduced(v, alive, n)
        key = (_record_key(b.outcomes), tuple(b.lost_qubits))
        groups[key] = groups.get(key, 0) + float(b.weight) * rho
    return Ensemble(groups)


def compare_ensembles(a: Ensemble, b: Ensemble):
    """Exact comparison; returns (equal, first differing key or None)."""
    for key in sorted(a.keys() | b.keys(), key=repr):
        x, y = a.groups.get(key), b.groups.get(key)
        if x is None or y is None or not np.array_equal(x, y):
            return False, key
    return True, None


def oracle_agrees(c: Circuit, faults=()) -> tuple[bool, object]:
    """Tableau branch mixture versus dense ensemble for one circuit."""
    from .sim import run

    return compare_ensembles(branchset_ensemble(run(c, faults)), dense_oracle_run(c, faults))
