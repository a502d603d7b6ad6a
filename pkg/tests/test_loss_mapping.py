import random

import pytest

from lossft.circuit import Circuit
from lossft.loss_mapping import (
    CONTROL,
    LRU,
    MEAS_X,
    PLUS,
    ZERO,
    ReplacementPlan,
    control_then_target,
    corpus,
    replacement_plan,
    role_profile,
    single_replacement,
    verify_equivalence,
)


def control_twice_then_meas_x():
    c = Circuit(3)
    c.prep_x(0)
    c.prep_z(1)
    c.prep_z(2)
    loss = c.cnot(0, 1)
    first = c.cnot(0, 2)
    c.cnot(0, 1)
    c.meas_x(0, "m0")
    c.meas_z(1, "m1")
    return c, loss.location_id, first.location_id


def test_control_profile_single_zero():
    c, loss, first = control_twice_then_meas_x()
    prof = role_profile(c, loss, 0)
    assert [r for _, r in prof.events] == [CONTROL, CONTROL, MEAS_X]
    plan = replacement_plan(c, loss, 0)
    assert plan.insertions == ((first, ZERO),)
    assert plan.classification == "single-replacement"
    assert verify_equivalence(c, loss, 0)


def test_control_then_target_needs_two():
    c, loss, q = control_then_target()
    plan = replacement_plan(c, loss, q)
    assert [k for _, k in plan.insertions] == [ZERO, PLUS]
    assert plan.classification == "multi-replacement"
    assert verify_equivalence(c, loss, q, plan)
    res = verify_equivalence(c, loss, q, single_replacement(plan))
    assert not res and res.witness


def test_basis_matched_measurement_is_exempt():
    c = Circuit(2)
    c.prep_x(0)
    c.prep_z(1)
    loss = c.cnot(0, 1)
    tgt = c.cnot(0, 1)
    c.meas_z(1, "m")
    plan = replacement_plan(c, loss.location_id, 1)
    assert plan.insertions == ((tgt.location_id, PLUS),)
    assert verify_equivalence(c, loss.location_id, 1)


def test_unused_qubit_gives_empty_plan():
    c = Circuit(2)
    c.prep_x(0)
    c.prep_z(1)
    loss = c.cnot(0, 1)
    c.h(0)
    c.meas_x(0, "m")
    plan = replacement_plan(c, loss.location_id, 1)
    assert plan.insertions == ()
    assert verify_equivalence(c, loss.location_id, 1)


def test_lru_ends_the_episode():
    c = Circuit(2)
    c.prep_x(0)
    c.prep_z(1)
    loss = c.cnot(0, 1)
    c.lru(1)
    c.cnot(1, 0)
    prof = role_profile(c, loss.location_id, 1)
    assert [r for _, r in prof.events] == [LRU]
    assert replacement_plan(c, loss.location_id, 1).insertions == ()


def test_reprep_after_loss_is_rejected():
    c = Circuit(2)
    c.prep_x(0)
    c.prep_z(1)
    loss = c.cnot(0, 1)
    c.prep_z(1)
    with pytest.raises(ValueError):
        role_profile(c, loss.location_id, 1)


def test_wrong_replacement_kind_is_detected():
    # negative control: a |+> where the rule asks for |0> must be caught
    c, loss, _ = control_twice_then_meas_x()
    good = replacement_plan(c, loss, 0)
    bad = ReplacementPlan(0, loss, tuple((loc, PLUS if k == ZERO else ZERO) for loc, k in good.insertions))
    assert not verify_equivalence(c, loss, 0, bad)


def test_corpus_is_single_replacement_and_equivalent():
    cases = corpus(60, 6, seed=11)
    for c, loss, q in cases:
        plan = replacement_plan(c, loss, q)
        assert len(plan.insertions) <= 1
        assert verify_equivalence(c, loss, q, plan), circuit_summary(c)


def circuit_summary(c):
    return "; ".join(f"{op.kind}{op.qubits}" for op in c.ops)


def mixed_role_circuit(rng: random.Random, n=5, depth=10):
    c = Circuit(n)
    for x in range(n):
        (c.prep_x if rng.random() < 0.5 else c.prep_z)(x)
    q = rng.randrange(n)
    others = [x for x in range(n) if x != q]
    loss = c.cnot(q, rng.choice(others))
    for _ in range(depth):
        p = rng.choice(others)
        r = rng.random()
        if r < 0.3:
            c.cnot(q, p)
        elif r < 0.6:
            c.cnot(p, q)
        elif r < 0.7:
            c.cz(p, q)
        elif r < 0.8:
            c.h(q)
        else:
            a, b = rng.sample(others, 2)
            c.cnot(a, b)
    (c.meas_x if rng.random() < 0.5 else c.meas_z)(q, "mq")
    for x in others[:2]:
        c.meas_z(x, f"m{x}")
    return c, loss.location_id, q


def test_multi_replacement_plans_are_sound():
    rng = random.Random(5)
    multi = 0
    for _ in range(40):
        c, loss, q = mixed_role_circuit(rng)
        plan = replacement_plan(c, loss, q)
        multi += plan.classification == "multi-replacement"
        assert len(plan.insertions) <= len(role_profile(c, loss, q).events)
        assert verify_equivalence(c, loss, q, plan), circuit_summary(c)
    assert multi > 10
