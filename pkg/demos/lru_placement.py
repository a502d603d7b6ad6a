# coding: utf-8

# # Where do the leakage-reduction units go?
#
# Each gadget can be built with no LRUs, with LRUs on the incoming data, with
# LRUs right after the encoded |0> ancilla, or with the generic placement after
# every encoded block.  This script prints the counts and then runs a few
# targeted single-fault checks.  The exhaustive runs live behind
# `lossft check` and take minutes.

# In[1]:

from lossft.checker import check_input_correction, check_single_faults, replay_witness
from lossft.circuit import FaultModel, FaultSpec
from lossft.protocols import build_protocol, count_matrix


# In[2]:

for (protocol, strategy), n in count_matrix().items():
    print(f"{protocol:7s} {strategy:18s} {'-' if n is None else n}")


# ## Input loss on the Steane gadget
#
# Without LRUs a lost data qubit sails through and ends up lost on the output.
# With one LRU per data qubit up front it becomes an ordinary single error.

# In[3]:

for strategy in ("none", "data_pre"):
    res = [r for r in check_input_correction(build_protocol("steane", strategy)) if r.fault_type == "L"]
    print(strategy, sum(r.ok for r in res), "of", len(res), "input losses handled")


# ## Teleportation gadget without LRUs
#
# One CNOT inside the |0> encoder loses both of its qubits.  That block is the
# output of the gadget, so two losses reach the output.

# In[4]:

knill = build_protocol("knill", "none")
enc = [op for op in knill.circuit.ops if op.kind == "cnot" and set(op.qubits) <= set(knill.output_qubits)]
spec = FaultSpec(enc[0].location_id, "LL")
(res,) = check_single_faults(knill, FaultModel(), specs=[spec]).results
print(spec, "ok" if res.ok else res.witness)


# The witness can be replayed on its own.

# In[5]:

print(replay_witness(knill, spec, res.witness))


# The same fault once the |0> block gets its seven LRUs:

# In[6]:

fixed = build_protocol("knill", "post_zero")
print(check_single_faults(fixed, FaultModel(), specs=[spec]).results[0].ok)
