"""Ergodicity verdicts with witnesses, one per POVM class."""

import json

import numpy as np

from kusuoka.ergodicity import ergodicity_verdict, nonergodic_tail_mass, verify_witness
from kusuoka.instances import example_eigenbasis_pvm, random_general_instance, reducible_rank1_instance, trine_povm
from kusuoka.pifs import Pifs
from kusuoka.quantum import haar_random_unitary

cases = {
    "eigenbasis (2,1) PVM": example_eigenbasis_pvm(),
    "trine POVM, Haar U": Pifs.build(haar_random_unitary(2, 5).matrix, trine_povm()),
    "reducible rank-1": reducible_rank1_instance(4, 6, seed=1, split=2),
    "general POVM": random_general_instance(3, 3, seed=2),
}

for name, p in cases.items():
    v = ergodicity_verdict(p)
    line = f"{name:22s} {v.status.value:22s} via {v.criterion_used.value}"
    if v.witness is not None:
        line += f", witness {v.witness.to_dict()['type']} verified={verify_witness(p, v)}"
    print(line)

ex = cases["eigenbasis (2,1) PVM"]
print("mass of eventually-all-1 sequences:", nonergodic_tail_mass(ex.u, ex.povm))
print(json.dumps(ergodicity_verdict(ex).to_dict()["witness"], default=lambda a: np.asarray(a).tolist()))
