"""Stationary densities of operator families A_1 A_1* + ... + A_k A_k* = I."""

import warnings

import numpy as np

from kusuoka.errors import NonUniqueWarning
from kusuoka.general_kusuoka import OperatorFamily, fixed_point_residual, kusuoka_prob, kusuoka_system, stationary_density
from kusuoka.instances import random_general_instance

p = random_general_instance(3, 3, seed=0)
fam = OperatorFamily.from_pifs(p)
rho = stationary_density(fam)
print("family {U* sqrt(Pi_i)}: density\n", np.round(rho.matrix, 12), "\nresidual", fixed_point_residual(fam, rho))

g = 0.3
damping = OperatorFamily.build([np.array([[1, 0], [0, np.sqrt(1 - g)]]), np.array([[0, 0], [np.sqrt(g), 0]])])
rho = stationary_density(damping)
print("non-unital family: density diag", np.round(np.diag(rho.matrix).real, 6))
sys = kusuoka_system(damping)
print("P(1, 2, 1) =", kusuoka_prob(sys, (0, 1, 0)))

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    stationary_density(OperatorFamily.build([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
print("diagonal family:", caught[0].category.__name__, "-", caught[0].message)
