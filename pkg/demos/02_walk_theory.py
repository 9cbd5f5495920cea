"""Edge random walks and exact butterfly velocities.

The right end of an evolving Pauli string performs a random walk.  For
unitary gates it is a plain biased walk; the symmetric ensembles add memory
(a persistent walk) or an internal parity (a four-state walk).  Everything
below is exact rational arithmetic.
"""
from fractions import Fraction as F

from symcirc.report import format_table, repro_table
from symcirc.walks import (
    biased_walk,
    chain_front,
    evenodd_chain,
    four_state_front,
    persistent_walk,
    recipe_probs,
    series_vb,
)

print("unitary qubits:", biased_walk(F(1, 5)).as_strings())

p1, p2 = recipe_probs("coe", 2)
print(f"COE: p1 = {p1}, p2 = {p2} ->", persistent_walk(p1, p2).as_strings())

# the orthogonal edge carries a transpose parity
st = evenodd_chain("orthogonal", 2)
print(f"O: p_e = {st.p_e}, p_o = {st.p_o}, back-step p = {st.p}")
cont = four_state_front(st.probs)
v, D = chain_front(st.probs)
print(f"   continuum D = {float(cont.D):.4f}, exact chain D = {float(D):.4f}, v_B = {v}")

# CSE: the two-state recipe and the closed form disagree at q = 2
print("CSE recipe v_B:", persistent_walk(*recipe_probs("cse", 2)).v_B)

print("\nlarge-q expansion of the COE velocity:", [str(c) for c in series_vb("coe", 6)])
print()
print(format_table(repro_table()))
