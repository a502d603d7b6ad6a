# coding: utf-8

# # Swapping a lost qubit for a fresh one
#
# As long as a lost qubit only ever plays one role afterwards (always control,
# or always target) the loss can be traded for a single fresh qubit, |0> for
# controls and |+> for targets, inserted at the first use.  A qubit that is
# used both ways needs one replacement per change of role.

# In[1]:

from lossft.loss_mapping import control_then_target, corpus, replacement_plan, role_profile, single_replacement, verify_equivalence


# In[2]:

c, loss, q = control_then_target()
for op in c.ops:
    print(op.location_id, op.kind, op.qubits)
print("roles after the loss:", role_profile(c, loss, q).events)


# In[3]:

plan = replacement_plan(c, loss, q)
print(plan)
print("full plan equivalent:", bool(verify_equivalence(c, loss, q, plan)))
res = verify_equivalence(c, loss, q, single_replacement(plan))
print("first replacement only:", bool(res))
print(res.witness)


# A seeded batch of random circuits where the lost qubit keeps one role.
# Each is checked against the dense density-matrix engine.

# In[4]:

cases = corpus(50, 6, seed=1)
good = sum(bool(verify_equivalence(c, l, q)) for c, l, q in cases)
print(f"{good}/{len(cases)} equivalent")

