"""Seeded corpus of small circuits (at most 10 qubits) with injected faults,
shared by the oracle tests and the acceptance suite."""

import random

from lossft.circuit import AcceptRule, Circuit, FaultModel, FaultSpec, enumerate_fault_locations
from lossft.loss_mapping import corpus as mapping_corpus
from lossft.protocols import build_cat_prep

SEED = 2024


def random_circuit(rng: random.Random, n: int, depth: int) -> Circuit:
    c = Circuit(n)
    for q in range(n):
        (c.prep_x if rng.random() < 0.5 else c.prep_z)(q)
    n_lru = 0
    for _ in range(depth):
        r = rng.random()
        if r < 0.2:
            c.h(rng.randrange(n))
        elif r < 0.75:
            a, b = rng.sample(range(n), 2)
            (c.cnot if r < 0.6 else c.cz)(a, b)
        elif r < 0.82 and n_lru < 2:
            c.lru(rng.randrange(n))
            n_lru += 1
        else:
            c.wait(rng.randrange(n))
    names = []
    for q in rng.sample(range(n), rng.randrange(1, n)):
        name = f"m{q}"
        (c.meas_x if rng.random() < 0.5 else c.meas_z)(q, name)
        names.append(name)
    if names and rng.random() < 0.5:
        c.append("classical_pauli", (rng.randrange(n),), name="", pauli="X", inputs=names[:2])
    return c


def random_faults(rng: random.Random, c: Circuit, k: int) -> list[FaultSpec]:
    specs = [s for s in enumerate_fault_locations(c, FaultModel()) if c.ops[c.op_index()[s.location_id]].kind not in ("lru",)]
    chosen = rng.sample(specs, min(k, len(specs)))
    by_loc = {}
    for s in chosen:
        by_loc.setdefault(s.location_id, s)
    return sorted(by_loc.values(), key=lambda s: s.location_id)


def verified_bell_pair() -> Circuit:
    """Bell pair on 0,1 checked by parity onto qubit 2."""
    c = Circuit(4)
    c.prep_x(0)
    c.prep_z(1)
    c.prep_z(2)
    c.cnot(0, 1)
    c.cnot(0, 2)
    c.cnot(1, 2)
    c.meas_z(2, "v")
    c.verification_block([op.location_id for op in c.ops], AcceptRule("all_zero", ("v",)))
    c.prep_x(3)
    c.cnot(3, 0)
    c.meas_x(1, "out")
    return c


def cases():
    """(label, circuit, faults) triples."""
    rng = random.Random(SEED)
    out = []
    cat = build_cat_prep()
    for s in enumerate_fault_locations(cat, FaultModel()):
        out.append((f"cat {s}", cat, [s]))
    bell = verified_bell_pair()
    for s in enumerate_fault_locations(bell, FaultModel()):
        out.append((f"bell {s}", bell, [s]))
    for i, (c, loss, q) in enumerate(mapping_corpus(40, 6, seed=SEED)):
        fault = FaultSpec(loss, "".join("L" if x == q else "I" for x in c.ops[c.op_index()[loss]].qubits))
        out.append((f"mapping {i}", c, [fault]))
    for i in range(120):
        n = rng.randrange(2, 11)
        c = random_circuit(rng, n, rng.randrange(4, 16))
        out.append((f"random {i} n={n}", c, random_faults(rng, c, rng.randrange(0, 3))))
    return out
