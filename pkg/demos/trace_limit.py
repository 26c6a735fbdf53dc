"""tr((PU)^m (PU)^{*m}) converges to the number of eigen-directions of U inside Theta.

Here U has an eigenvector planted in Theta = range(P), so the limit is 1;
the rate is the spectral radius of PU on the complement.
"""

from kusuoka.ergodicity import lemma_trace_limit
from kusuoka.instances import reducible_pvm2_instance

p = reducible_pvm2_instance(4, seed=3)
res = lemma_trace_limit(p.u, p.povm, cap=None)
print(f"limit {res.spectral_value}, rate {res.rate:.4f}, m_max {res.m_max}")
for m in (1, 2, 5, 10, 50, res.m_max):
    print(f"  m = {m:5d}  trace = {res.sequence[m - 1]:.12f}")
print("converged:", res.converged, f"gap {res.convergence_gap:.2e}")
