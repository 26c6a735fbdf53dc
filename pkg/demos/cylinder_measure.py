"""Exact cylinder probabilities for a qutrit measured in an eigenbasis of U.

U = diag(1, i, -1) and the measurement splits the basis as {e1, e2} | {e3}.
The state never leaves the block it was projected into, so only the
constant strings carry mass: 2/3 on 1^n and 1/3 on 2^n.
"""

from kusuoka.instances import example_eigenbasis_pvm
from kusuoka.pifs import cylinder_prob_pair, cylinder_table, format_outcomes

p = example_eigenbasis_pvm()

for s in [(0,), (0, 0, 0), (1, 1, 1), (0, 1), (1, 0, 0)]:
    trace_form, hs_form = cylinder_prob_pair(p, s)
    print(f"P({format_outcomes(s):>5}) = {trace_form:.15f}   (HS form {hs_form:.15f})")

table = cylinder_table(p, 4)
print("length-4 cylinders sum to", table.sum())
print("non-zero length-4 cylinders:", int((table > 1e-15).sum()))
