"""String reversal: exact symmetry for (d-1, 1) PVMs, broken for a generic rank-1 POVM."""

from kusuoka.instances import random_pvm2_instance, random_rank1_instance
from kusuoka.pifs import format_outcomes
from kusuoka.reversibility import reversibility_scan

for name, p, n in [("(d-1,1) PVM, d=4", random_pvm2_instance(4, seed=0), 8),
                   ("rank-1, d=3, k=3", random_rank1_instance(3, 3, seed=0), 4)]:
    res = reversibility_scan(p, n)
    print(f"{name:18s} max |P(s) - P(reverse s)| = {res.max_discrepancy:.3e}"
          f" at {format_outcomes(res.worst_string)} ({res.strings_checked} strings)")
