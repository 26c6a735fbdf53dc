"""Monte Carlo trajectories against exact cylinder probabilities."""

import itertools

from kusuoka.instances import example_eigenbasis_pvm, hadamard_qubit
from kusuoka.pifs import cylinder_table, format_outcomes
from kusuoka.trajectories import constant_tail_fraction, empirical_cylinder_freq, sample_outcomes, sample_trajectory

had = hadamard_qubit()
stats = empirical_cylinder_freq(had, 2, 50_000, 3, seed=1, threads=4)
exact = cylinder_table(had, 2)
for s in itertools.product(range(2), repeat=2):
    f, se = stats.frequency(s), stats.standard_error(s)
    print(f"Hadamard P({format_outcomes(s)}) exact {exact[s]:.4f} empirical {f:.4f} +- {se:.4f}")

ex = example_eigenbasis_pvm()
print("one eigenbasis trajectory:", sample_trajectory(ex, 12, seed=4).render())
frac = constant_tail_fraction(sample_outcomes(ex, 5000, 30, seed=2), 0)
print(f"fraction of all-1 trajectories {frac:.4f} (exact 2/3)")
