# coding: utf-8

# # Losing a qubit in a stabilizer circuit
#
# A lost qubit is gone: gates that touch it do nothing to the partner and a
# readout of it returns an arbitrary bit.  The simulator models the moment of
# loss as a Z measurement nobody gets to see, so a loss splits a branch in two
# whenever the qubit was entangled.

# In[1]:

from lossft.circuit import Circuit, FaultSpec
from lossft.pauli import PauliOperator
from lossft.sim import run, trace_dump


# Start with a Bell pair.

# In[2]:

c = Circuit(2)
c.prep_x(0)
c.prep_z(1)
c.cnot(0, 1)
print(trace_dump(run(c)))


# Now lose qubit 1 right after the CNOT.  Two branches of weight 1/2 come out,
# with qubit 0 left in |0> or |1>: the partner is maximally mixed.

# In[3]:

loc = c.ops[-1].location_id
bs = run(c, [FaultSpec(loc, "IL")])
print(trace_dump(bs))
for b in bs:
    print(b.weight, b.tableau.expectation(PauliOperator.parse("ZI")))


# A later CNOT controlled by the lost qubit is simply skipped, so qubit 2
# stays in |0> whichever way the loss went.

# In[4]:

c2 = Circuit(3)
c2.prep_x(0)
c2.prep_z(1)
c2.prep_z(2)
c2.cnot(0, 1)
c2.cnot(1, 2)
c2.meas_z(2, "m")
for b in run(c2, [FaultSpec(c2.ops[3].location_id, "IL")]):
    print(b.path, b.outcomes)


# A four-qubit cat that loses one member dephases: two branches, all-zero and
# all-one on the survivors.

# In[5]:

cat = Circuit(4)
cat.prep_x(0)
for q in (1, 2, 3):
    cat.prep_z(q)
cat.cnot(0, 1)
cat.cnot(1, 2)
cat.cnot(0, 3)
w = cat.wait(1)
for b in run(cat, [FaultSpec(w.location_id, "L")]):
    print(b.weight, [b.tableau.expectation(PauliOperator.from_support(4, [q], "Z")) for q in (0, 2, 3)])
