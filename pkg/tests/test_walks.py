import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from symcirc.kernels import SymmetryClass
from symcirc.walks import (
    FourStateProbs,
    biased_walk,
    chain_front,
    class_walk,
    closed_form_p,
    closed_form_vb,
    evenodd_chain,
    four_state_front,
    markov_front,
    mixing_chain,
    persistent_walk,
    recipe_probs,
    series_value,
    series_vb,
    site_parity_counts,
    stationary,
)

ALL = list(SymmetryClass)
probs = st.fractions(min_value=0, max_value=1, max_denominator=50)


def test_biased_walk_examples():
    w = biased_walk(F(1, 5))
    assert (w.v_B, w.D) == (F(3, 5), F(8, 25))
    assert biased_walk(F(1, 2)).v_B == 0 and biased_walk(F(1, 2)).D == F(1, 2)
    assert biased_walk(0).v_B == 1 and biased_walk(0).D == 0
    with pytest.raises(ValueError):
        biased_walk(F(3, 2))


def test_persistent_walk_coe_qubits():
    assert recipe_probs("coe", 2) == (F(19, 70), F(51, 280))
    w = persistent_walk(F(19, 70), F(51, 280))
    assert w.p == F(76, 305) and w.v_B == F(153, 305)
    assert abs(float(w.D) - 0.31) < 0.01


@given(probs)
def test_persistent_without_memory_is_biased(p):
    w = persistent_walk(p, p)
    assert w.alpha == 0 and w.p == p and w.D == w.D0


@given(probs, probs)
def test_walk_solution_invariants(p1, p2):
    if p2 - p1 == 1:
        with pytest.raises(ValueError):
            persistent_walk(p1, p2)
        return
    w = persistent_walk(p1, p2)
    assert w.v_B == 1 - 2 * w.p
    assert -1 <= w.alpha < 1
    if w.alpha == -1:  # strict alternation: no spreading at all
        assert w.v_B == 0 and w.D == 0


def test_persistent_diffusion_continuous_in_alpha():
    p1 = F(1, 4)
    for k in range(1, 30):
        a = F(k, 1000)
        w = persistent_walk(p1, p1 + a)
        assert abs(w.D - w.D0) <= 3 * abs(a)


@given(probs, probs)
@settings(max_examples=60)
def test_persistent_matches_markov_chain(p1, p2):
    if p2 - p1 == 1 or (p1 == 0 and p2 == 0):
        return
    w = persistent_walk(p1, p2)
    P = [[1 - p1, p1], [1 - p2, p2]]
    v, D = markov_front(P, [1, -1])
    assert v == w.v_B and D == w.D


@pytest.mark.parametrize(
    "cls, q, v",
    [("unitary", 2, F(3, 5)), ("coe", 2, F(153, 305)), ("cse", 2, F(11, 41)),
     ("orthogonal", 2, F(23, 39)), ("symplectic", 2, F(7, 15))],
)
def test_closed_form_qubits(cls, q, v):
    assert closed_form_vb(cls, q) == v
    assert closed_form_vb(cls, q) == 1 - 2 * closed_form_p(cls, q)


@pytest.mark.parametrize("cls", ALL)
@pytest.mark.parametrize("q", range(2, 11))
def test_closed_form_bounds_and_ordering(cls, q):
    v = closed_form_vb(cls, q)
    assert 0 < v < 1
    if cls is not SymmetryClass.UNITARY:
        assert v < closed_form_vb("unitary", q)


def test_closed_form_rejects_small_q():
    with pytest.raises(ValueError):
        closed_form_vb("unitary", 1)


@pytest.mark.parametrize(
    "cls, expected",
    [("unitary", [1, 0, -2, 0, 2, 0, -2]), ("coe", [1, 0, -2, 0, -2, 0, 14]),
     ("orthogonal", [1, 0, -2, 0, 0, 6])],
)
def test_series_examples(cls, expected):
    assert series_vb(cls, len(expected) - 1) == expected


_q = sympy.symbols("q", positive=True)
# the rational functions, transcribed independently of the implementation
RATIONAL = {
    "unitary": (_q**2 - 1) / (_q**2 + 1),
    "coe": (_q**2 - 1) ** 2 * (_q**4 + 4 * _q**2 + 2) / ((_q**2 + 1) * (_q**6 + 3 * _q**4 + 2 * _q**2 + 2)),
    "cse": (_q**8 - 5 * _q**6 + 5 * _q**4 + 3 * _q**2 - 6) / (_q**8 - 3 * _q**6 + _q**4 + _q**2 - 2),
    "orthogonal": (_q**4 + _q**3 + _q - 3) / ((_q + 1) * (_q**3 + 2 * _q + 1)),
    "symplectic": (_q**4 - _q**3 + _q - 3) / ((_q**2 + 1) * (_q**2 - _q + 1)),
}


@pytest.mark.parametrize("cls", list(RATIONAL))
def test_series_matches_symbolic_expansion(cls):
    u = sympy.symbols("u", positive=True)
    ser = sympy.series(RATIONAL[cls].subs(_q, 1 / u), u, 0, 9).removeO()
    sym = [sympy.Rational(ser.coeff(u, k)) for k in range(9)]
    assert [F(int(c.p), int(c.q)) for c in sym] == series_vb(cls, 8)
    for k in range(2, 12):
        r = sympy.Rational(RATIONAL[cls].subs(_q, k))
        assert closed_form_vb(cls, k) == F(int(r.p), int(r.q))


@pytest.mark.parametrize("cls", ALL)
def test_partial_sums_converge(cls):
    c = series_vb(cls, 8)
    exact = closed_form_vb(cls, 100)
    err = abs(float(series_value(c[:8], 100) - exact))
    assert err < 1e-12
    first_omitted = next((abs(float(x)) / 100**k for k, x in enumerate(c) if k >= 8 and x != 0), None)
    if first_omitted:
        assert err <= 2 * first_omitted


def test_series_order_bound():
    with pytest.raises(ValueError):
        series_vb("unitary", 9)


def test_orthogonal_qubit_chain():
    s = evenodd_chain("orthogonal", 2)
    assert (s.p_e, s.p_o, s.p) == (F(9, 13), F(4, 13), F(8, 39))
    assert s.conditional("e", "fwd", "e") == F(6, 7)
    assert s.conditional("e", "fwd", "o") == F(1, 7)
    assert s.conditional("o", "fwd", "e") == F(2, 5)
    assert s.conditional("o", "fwd", "o") == F(3, 5)
    assert s.conditional("o", "back", "o") == F(3, 4)
    assert s.back("e") == F(2, 9) and s.back("o") == F(1, 6)
    assert four_state_front(s.probs).v_B == F(23, 39)
    assert abs(float(four_state_front(s.probs).D) - 0.31) < 0.01


@pytest.mark.parametrize("cls, side", [("orthogonal", "right"), ("orthogonal", "left"), ("symplectic", "right")])
@pytest.mark.parametrize("q", [2, 4, 6, 8, 10])
def test_evenodd_chain_matches_closed_form(cls, q, side):
    s = evenodd_chain(cls, q, side)
    assert s.p_e + s.p_o == 1
    assert s.p == closed_form_p(cls, q)
    (ee, oe), (eo, oo) = s.recursion()
    assert (ee * s.p_e + oe * s.p_o, eo * s.p_e + oo * s.p_o) == (s.p_e, s.p_o)
    assert stationary([[ee, eo], [oe, oo]]) == [s.p_e, s.p_o]
    v, _ = chain_front(s.probs)
    assert v == closed_form_vb(cls, q) == four_state_front(s.probs).v_B


@pytest.mark.parametrize("q", [3, 5, 7])
def test_orthogonal_odd_q(q):
    assert evenodd_chain("orthogonal", q).p == closed_form_p("orthogonal", q)


def test_orthogonal_recursion_general_q():
    for q in range(2, 6):
        (ee, oe), (eo, oo) = evenodd_chain("orthogonal", q).recursion()
        assert ee == F((q + 2) * (q * q + 1), 2 * q * (q * q + 2))
        assert ee + eo == 1 and oe + oo == 1


@pytest.mark.parametrize("q", [4, 6, 8])
def test_symplectic_edges_at_larger_q(q):
    right, left = (evenodd_chain("symplectic", q, side) for side in ("right", "left"))
    assert right.p != left.p
    sr, sl = (evenodd_chain("symplectic", q, side, "structural") for side in ("right", "left"))
    assert sr.p == sl.p
    assert sr.p != closed_form_p("symplectic", q)
    assert evenodd_chain("symplectic", 2, "left", "structural").p == F(4, 15)


@pytest.mark.parametrize("q", [2, 4, 6])
def test_structural_counts_from_matrices(q):
    import numpy as np

    m = q // 2
    J = np.kron(np.array([[0, 1], [-1, 0]]), np.eye(m))
    n = q * q
    basis = np.eye(n).reshape(n, q, q)
    tau = np.array([b.T.ravel() for b in basis]).T
    kap = np.array([(J @ b.T @ np.linalg.inv(J)).ravel() for b in basis]).T
    counts = site_parity_counts("symplectic", q, "structural")
    for (lam, rho), c in counts.items():
        proj = (np.eye(n) + lam * kap) @ (np.eye(n) + rho * tau) / 4
        dim = int(round(np.trace(proj)))
        assert dim - (1 if lam == rho == 1 else 0) == c


def test_parity_counts():
    assert site_parity_counts("orthogonal", 2)[(1, 1)] == 2
    sp = site_parity_counts("symplectic", 2)
    assert sp[(1, 1)] == 0 and sum(sp.values()) == 3
    with pytest.raises(ValueError):
        site_parity_counts("symplectic", 3)
    with pytest.raises(ValueError):
        site_parity_counts("coe", 2)


def _random_persistent_embedding(rng):
    p1 = F(rng.randint(0, 40), 40)
    p2 = F(rng.randint(0, 40), 40)
    return p1, p2


def test_four_state_reduces_to_persistent():
    rng = random.Random(2024)
    checked = 0
    while checked < 1000:
        p1, p2 = _random_persistent_embedding(rng)
        if p2 - p1 == 1 or p1 == 0:
            continue
        w = persistent_walk(p1, p2)
        pr = FourStateProbs.from_persistent(p1, p2)
        fs = four_state_front(pr)
        assert (fs.v_B, fs.D, fs.p) == (w.v_B, w.D, w.p)
        assert chain_front(pr) == (w.v_B, w.D)
        checked += 1


def test_four_state_validation():
    with pytest.raises(ValueError, match="sum to one"):
        FourStateProbs(F(1, 2), 0, 0, 0, 1, 0, 0, 0)
    with pytest.raises(ValueError, match="reducible"):
        FourStateProbs(1, 0, 0, 0, 1, 0, 0, 0)
    with pytest.raises(ValueError, match="negative"):
        FourStateProbs(F(3, 2), F(-1, 2), 0, 0, 1, 0, 0, 0)


def test_chain_front_differs_from_continuum_for_genuine_four_state():
    s = evenodd_chain("orthogonal", 2)
    v, D = chain_front(s.probs)
    assert v == F(23, 39)
    assert D != four_state_front(s.probs).D
    assert abs(float(D) - 0.3204) < 1e-3


def test_mixing_chain_reproduces_velocities():
    for cls in ALL:
        for side in ("right", "left"):
            P, steps, states = mixing_chain(cls, side)
            assert all(sum(row) == 1 for row in P)
            v, D = markov_front(P, steps)
            if cls is not SymmetryClass.CSE:
                assert v == closed_form_vb(cls, 2)
            else:
                assert v == class_walk(cls, 2, "recipe").v_B == F(3, 11)


def test_cse_variants():
    p1, p2 = recipe_probs("cse", 2)
    assert persistent_walk(p1, p2).v_B == F(3, 11)
    assert class_walk("cse", 2).v_B == F(11, 41)
    with pytest.raises(ValueError):
        class_walk("cse", 2, "printed")
    with pytest.raises(ValueError):
        recipe_probs("unitary", 2)


def test_unitary_diffusion_closed_form():
    for q in range(2, 8):
        assert class_walk("unitary", q).D == F(2 * q * q, (q * q + 1) ** 2)
