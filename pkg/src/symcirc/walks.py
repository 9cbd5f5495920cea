"""Exact endpoint random walks and closed-form butterfly velocities.

All quantities are :class:`fractions.Fraction`.  The walks are

* the uncorrelated biased walk (back-step probability ``p``),
* the two-state persistent walk where the back-step probability is ``p1``
  after a forward step and ``p2`` after a back step,
* the four-state walk whose internal state is the parity of the edge
  operator together with the direction of the last step.

:func:`markov_front` computes drift and diffusion of any finite Markov chain
whose step is fixed by the destination state; it is used as an exact
cross-check of the closed-form expressions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .kernels import SymmetryClass, kernel, rates

__all__ = [
    "WalkSolution",
    "FourStateProbs",
    "EvenOddState",
    "biased_walk",
    "persistent_walk",
    "four_state_front",
    "chain_front",
    "markov_front",
    "stationary",
    "closed_form_vb",
    "closed_form_p",
    "recipe_probs",
    "evenodd_chain",
    "site_parity_counts",
    "mixing_chain",
    "class_walk",
    "series_vb",
    "series_value",
]

F = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class WalkSolution:
    """Stationary back-step probability, persistence, drift and diffusion."""

    p: Fraction
    alpha: Fraction
    v_B: Fraction
    D0: Fraction
    D: Fraction

    def as_floats(self) -> dict[str, float]:
        return {k: float(getattr(self, k)) for k in ("p", "alpha", "v_B", "D0", "D")}

    def as_strings(self) -> dict[str, str]:
        return {k: str(getattr(self, k)) for k in ("p", "alpha", "v_B", "D0", "D")}


def biased_walk(p) -> WalkSolution:
    p = _frac(p)
    if not 0 <= p <= 1:
        raise ValueError(f"back-step probability must be in [0, 1], got {p}")
    D0 = 2 * p * (1 - p)
    return WalkSolution(p, F(0), 1 - 2 * p, D0, D0)


def persistent_walk(p1, p2) -> WalkSolution:
    """Two-state walk: back with ``p1`` after a forward step, ``p2`` after a back step."""
    p1, p2 = _frac(p1), _frac(p2)
    for name, v in (("p1", p1), ("p2", p2)):
        if not 0 <= v <= 1:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    alpha = p2 - p1
    if alpha == 1:
        raise ValueError("p1 = 0, p2 = 1 leaves the walk frozen in its first state")
    p = p1 / (1 + p1 - p2)
    D0 = 2 * p * (1 - p)
    return WalkSolution(p, alpha, 1 - 2 * p, D0, D0 * (1 + alpha) / (1 - alpha))


@dataclass(frozen=True)
class FourStateProbs:
    """Joint step/parity probabilities of the four-state edge walk.

    From an even edge operator: forward to even (``alpha``), back to even
    (``beta``), forward to odd (``gamma``), back to odd (``delta``).  From an
    odd one: forward to odd (``mu``), back to odd (``nu``), forward to even
    (``sigma``), back to even (``tau``).
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    mu: Fraction
    nu: Fraction
    sigma: Fraction
    tau: Fraction

    def __post_init__(self):
        for k in ("alpha", "beta", "gamma", "delta", "mu", "nu", "sigma", "tau"):
            v = _frac(getattr(self, k))
            if v < 0:
                raise ValueError(f"{k} is negative: {v}")
            object.__setattr__(self, k, v)
        if self.alpha + self.beta + self.gamma + self.delta != 1:
            raise ValueError("even-state probabilities do not sum to one")
        if self.mu + self.nu + self.sigma + self.tau != 1:
            raise ValueError("odd-state probabilities do not sum to one")
        if self.gamma + self.delta + self.sigma + self.tau == 0:
            raise ValueError("parity never changes; the four-state walk is reducible")

    @classmethod
    def from_persistent(cls, p1, p2) -> "FourStateProbs":
        """Embed a two-state walk: "even" = last step forward, "odd" = last step back."""
        p1, p2 = _frac(p1), _frac(p2)
        return cls(alpha=1 - p1, beta=F(0), gamma=F(0), delta=p1,
                   mu=F(0), nu=p2, sigma=1 - p2, tau=F(0))

    STATES = ("f_e", "f_o", "b_e", "b_o")

    def transition_matrix(self) -> list[list[Fraction]]:
        even = [self.alpha, self.gamma, self.beta, self.delta]
        odd = [self.sigma, self.mu, self.tau, self.nu]
        return [even, odd, even, odd]

    def steps(self) -> list[int]:
        return [1, 1, -1, -1]


def four_state_front(pr: FourStateProbs) -> WalkSolution:
    """Drift and diffusion of the four-state walk in closed form."""
    a, b, g, d = pr.alpha, pr.beta, pr.gamma, pr.delta
    m, n, s, t = pr.mu, pr.nu, pr.sigma, pr.tau
    S = g + d + s + t
    v = ((g + d) * (s + m - t - n) + (s + t) * (a + g - b - d)) / S
    p = (1 - v) / 2
    D0 = 2 * p * (1 - p)
    corr = 2 * (a + g - m - s) / S * ((s + t) * (a - g - b + d) + (d + g) * (s - m - t + n)) / S
    D = (1 + corr) * D0
    ratio = D / D0 if D0 else F(1)
    alpha = (ratio - 1) / (ratio + 1)
    return WalkSolution(p, alpha, v, D0, D)


def _solve(A, b):
    """Exact Gaussian elimination; A is square, entries Fractions."""
    n = len(A)
    M = [list(map(_frac, row)) + [_frac(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def stationary(P) -> list[Fraction]:
    """Stationary distribution of an irreducible stochastic matrix."""
    n = len(P)
    A = [[_frac(P[j][i]) - (1 if i == j else 0) for j in range(n)] for i in range(n - 1)]
    A.append([F(1)] * n)
    return _solve(A, [F(0)] * (n - 1) + [F(1)])


def markov_front(P, steps) -> tuple[Fraction, Fraction]:
    """Exact ``(v, D)`` for a walk whose step is ``steps[s]`` on entering state ``s``.

    Uses the fundamental matrix ``Z = (I - P + 1 pi^T)^-1``; the asymptotic
    variance per step is ``<g, (2Z - I) g>_pi`` with ``g`` the centred step.
    """
    n = len(P)
    pi = stationary(P)
    v = sum(pi[i] * steps[i] for i in range(n))
    g = [steps[i] - v for i in range(n)]
    # Z g solves (I - P + 1 pi^T) y = g
    A = [[(1 if i == j else 0) - _frac(P[i][j]) + pi[j] for j in range(n)] for i in range(n)]
    y = _solve(A, g)
    var = sum(pi[i] * g[i] * (2 * y[i] - g[i]) for i in range(n))
    return v, var / 2


# closed forms ---------------------------------------------------------------

def _check_q(q) -> int:
    q = int(q)
    if q < 2:
        raise ValueError(f"local dimension must be at least 2, got {q}")
    return q


def closed_form_p(cls, q) -> Fraction:
    """Stationary back-step probability in closed form for each class."""
    cls = SymmetryClass.parse(cls)
    q = _check_q(q)
    q2 = q * q
    if cls is SymmetryClass.UNITARY:
        return F(1, q2 + 1)
    if cls is SymmetryClass.COE:
        return F(q2 * (q2 * q2 + 5 * q2 + 2), (q2 + 1) * (q2**3 + 3 * q2 * q2 + 2 * q2 + 2))
    if cls is SymmetryClass.CSE:
        return F((q2 * q2 - 1) * (q2 - 2), q2**4 - 3 * q2**3 + q2 * q2 + q2 - 2)
    if cls is SymmetryClass.ORTHOGONAL:
        return F(q2 + q + 2, (q + 1) * (q**3 + 2 * q + 1))
    return F(q2 - q + 2, (q2 + 1) * (q2 - q + 1))


def _vb_poly(cls):
    """(numerator, denominator) coefficient lists in q, lowest power first."""
    def mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out

    if cls is SymmetryClass.UNITARY:
        return [-1, 0, 1], [1, 0, 1]
    if cls is SymmetryClass.COE:
        num = mul(mul([1, 0, -1], [1, 0, -1]), [2, 0, 4, 0, 1])
        den = mul([1, 0, 1], [2, 0, 2, 0, 3, 0, 1])
        return num, den
    if cls is SymmetryClass.CSE:
        return [-6, 0, 3, 0, 5, 0, -5, 0, 1], [-2, 0, 1, 0, 1, 0, -3, 0, 1]
    if cls is SymmetryClass.ORTHOGONAL:
        return [-3, 1, 0, 1, 1], mul([1, 1], [1, 2, 0, 1])
    return [-3, 1, 0, -1, 1], mul([1, 0, 1], [1, -1, 1])


def _poly_eval(c, x):
    return sum(F(ci) * x**i for i, ci in enumerate(c))


def closed_form_vb(cls, q) -> Fraction:
    """Butterfly velocity as an exact rational function of the local dimension."""
    cls = SymmetryClass.parse(cls)
    q = _check_q(q)
    num, den = _vb_poly(cls)
    return _poly_eval(num, q) / _poly_eval(den, q)


def series_vb(cls, order: int = 8) -> list[Fraction]:
    """Coefficients ``c[k]`` of ``v_B = sum_k c[k] / q**k`` up to ``k = order``."""
    cls = SymmetryClass.parse(cls)
    if not 0 <= order <= 8:
        raise ValueError("order must be between 0 and 8")
    num, den = _vb_poly(cls)
    deg = len(den) - 1
    # with u = 1/q: v = (sum num[i] u^(deg-i)) / (sum den[i] u^(deg-i))
    a = [F(0)] * (order + 1)
    for i, c in enumerate(num):
        k = deg - i
        if 0 <= k <= order:
            a[k] += c
    b = [F(0)] * (order + 1)
    for i, c in enumerate(den):
        k = deg - i
        if 0 <= k <= order:
            b[k] += c
    out = []
    for k in range(order + 1):
        s = a[k] - sum(b[j] * out[k - j] for j in range(1, k + 1))
        out.append(s / b[0])
    return out


def series_value(coeffs, q) -> Fraction:
    return sum(c / F(q) ** k for k, c in enumerate(coeffs))


# two-state walks ------------------------------------------------------------

def recipe_probs(cls, q) -> tuple[Fraction, Fraction]:
    """Back-step probabilities ``(p1, p2)`` of the circular-ensemble edge walk.

    ``p1``: the edge gate holds ``(A, I)`` and its output has an identity on
    the outer site.  ``p2``: the edge gate holds ``(C, A)`` with ``C`` drawn
    uniformly from the ``q**2`` single-site operators of the interior.
    """
    cls = SymmetryClass.parse(cls)
    if cls not in (SymmetryClass.COE, SymmetryClass.CSE):
        raise ValueError("the two-state recipe applies to the circular ensembles only")
    q = _check_q(q)
    d = q * q
    r = rates(cls, d)
    half = F(d, 2)
    p1 = r.p_s + (half - 2) * r.p_c + half * r.p_a
    p2_naive = (half - 1) * r.p_c + half * r.p_a
    p2 = F(d - 1, d) * p2_naive + F(1, d) * (d - 1) * r.p_c
    return p1, p2


# even/odd walks -------------------------------------------------------------

@dataclass(frozen=True)
class EvenOddState:
    """Stationary parity distribution of the edge operator and its move rates.

    ``joint[(parity, move, next_parity)]`` is the probability, given the
    current parity, of making ``move`` ("fwd"/"back") and arriving with
    ``next_parity``.
    """

    cls: SymmetryClass
    q: int
    side: str
    p_e: Fraction
    p_o: Fraction
    p: Fraction
    joint: dict = field(repr=False)
    probs: FourStateProbs = field(repr=False)

    def back(self, parity: str) -> Fraction:
        return sum(v for (s, m, _), v in self.joint.items() if s == parity and m == "back")

    def conditional(self, parity: str, move: str, nxt: str) -> Fraction:
        tot = sum(v for (s, m, _), v in self.joint.items() if s == parity and m == move)
        return self.joint[(parity, move, nxt)] / tot

    def recursion(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Matrix ``R`` with ``(p_e, p_o)(t) = R (p_e, p_o)(t - 1)``."""
        j = self.joint
        ee = j[("e", "fwd", "e")] + j[("e", "back", "e")]
        oe = j[("o", "fwd", "e")] + j[("o", "back", "e")]
        eo = j[("e", "fwd", "o")] + j[("e", "back", "o")]
        oo = j[("o", "fwd", "o")] + j[("o", "back", "o")]
        return (ee, oe), (eo, oo)


def site_parity_counts(cls, q, counts: str = "closed_form") -> dict[tuple[int, int], Fraction]:
    """Non-identity single-site operators counted by (left-site sign, right-site sign).

    On a gate the parity of ``A (x) B`` is ``lam(A) * rho(B)``.  Orthogonal
    gates use transposition on both sites.  Symplectic gates conjugate the
    left site with ``J`` and transpose the right one.  The number of
    non-identity operators even under both is ``q/2 - 1`` with
    ``counts="closed_form"`` (the choice that reproduces the closed-form right
    edge) and ``q**2/4 - 1`` with ``counts="structural"`` (the dimension of the
    symmetric matrices commuting with ``J``).  Both vanish for qubits.
    """
    cls = SymmetryClass.parse(cls)
    q = _check_q(q)
    if counts not in ("closed_form", "structural"):
        raise ValueError(f"unknown counts {counts!r}")
    n_e = F((q - 1) * (q + 2), 2)
    n_o = F(q * (q - 1), 2)
    if cls is SymmetryClass.ORTHOGONAL:
        return {(1, 1): n_e, (1, -1): F(0), (-1, 1): F(0), (-1, -1): n_o}
    if cls is SymmetryClass.SYMPLECTIC:
        if q % 2:
            raise ValueError("symplectic gates need an even local dimension")
        both = F(q, 2) - 1 if counts == "closed_form" else F(q * q, 4) - 1
        # keys are (lam, rho): lam from J-conjugation, rho from transposition
        return {
            (1, 1): both,
            (-1, 1): n_e - both,
            (1, -1): F(q * (q - 1), 2) - 1 - both,
            (-1, -1): n_o - (F(q * (q - 1), 2) - 1 - both),
        }
    raise ValueError("parity counts exist for the orthogonal and symplectic classes only")


def evenodd_chain(cls, q, side: str = "right", counts: str = "closed_form") -> EvenOddState:
    """Edge walk of the orthogonal/symplectic circuits with an even/odd internal state.

    Outputs of a gate are uniform over the non-identity two-site operators of
    the input's parity; the interior site that joins the edge gate after a
    back step is uniform over all ``q**2`` single-site operators.  ``counts``
    is passed to :func:`site_parity_counts`; for the symplectic class with
    ``q >= 4`` only ``"structural"`` gives the same velocity on both edges,
    and only ``"closed_form"`` reproduces :func:`closed_form_p` on the right.
    """
    cls = SymmetryClass.parse(cls)
    q = _check_q(q)
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    N = site_parity_counts(cls, q, counts)
    lam_count = {s: sum(v for (l, r), v in N.items() if l == s) for s in (1, -1)}
    rho_count = {s: sum(v for (l, r), v in N.items() if r == s) for s in (1, -1)}
    lam_all = {1: lam_count[1] + 1, -1: lam_count[-1]}
    rho_all = {1: rho_count[1] + 1, -1: rho_count[-1]}
    q2 = q * q
    total = {
        1: lam_all[1] * rho_all[1] - 1 + lam_all[-1] * rho_all[-1],
        -1: lam_all[1] * rho_all[-1] + lam_all[-1] * rho_all[1],
    }
    name = {1: "e", -1: "o"}
    joint = {}
    for par in (1, -1):
        acc = {(m, nx): F(0) for m in ("fwd", "back") for nx in (1, -1)}
        if side == "right":
            # back: output (P, I), lam(P) = par; next gate holds (C, P)
            for (l, r), cnt in N.items():
                if l != par:
                    continue
                for c_sign in (1, -1):
                    pc = lam_all[c_sign] / q2
                    acc[("back", c_sign * r)] += cnt * pc
            # forward: output (A, B), B != I; next gate holds (B, I)
            for (lb, rb), cnt in N.items():
                need = par * rb
                acc[("fwd", lb)] += cnt * lam_all[need]
        else:
            # back: output (I, Q), rho(Q) = par; next gate holds (Q, C)
            for (l, r), cnt in N.items():
                if r != par:
                    continue
                for c_sign in (1, -1):
                    pc = rho_all[c_sign] / q2
                    acc[("back", l * c_sign)] += cnt * pc
            # forward: output (P, B), P != I; next gate holds (I, P)
            for (lp, rp), cnt in N.items():
                need = par * lp
                acc[("fwd", rp)] += cnt * rho_all[need]
        for (m, nx), v in acc.items():
            joint[(name[par], m, name[nx])] = v / total[par]
    probs = FourStateProbs(
        alpha=joint[("e", "fwd", "e")], beta=joint[("e", "back", "e")],
        gamma=joint[("e", "fwd", "o")], delta=joint[("e", "back", "o")],
        mu=joint[("o", "fwd", "o")], nu=joint[("o", "back", "o")],
        sigma=joint[("o", "fwd", "e")], tau=joint[("o", "back", "e")],
    )
    S = probs.gamma + probs.delta + probs.sigma + probs.tau
    p_e = (probs.sigma + probs.tau) / S
    p_o = 1 - p_e
    back_e = probs.beta + probs.delta
    back_o = probs.nu + probs.tau
    return EvenOddState(cls, q, side, p_e, p_o, back_e * p_e + back_o * p_o, joint, probs)


# qubit chains straight from the 16x16 kernels --------------------------------

def mixing_chain(cls, side: str = "right") -> tuple[list[list[Fraction]], list[int], list[tuple[str, int]]]:
    """Edge chain for qubits built from the exact kernel.

    States are ``(last move, edge operator)``.  After a forward move the edge
    gate holds ``(A, I)``; after a back move it holds ``(C, A)`` with ``C``
    uniform over ``I, X, Y, Z``.  Mirror images for the left edge.
    """
    k = kernel(cls).exact
    states = [(m, a) for m in ("f", "b") for a in (1, 2, 3)]
    index = {s: i for i, s in enumerate(states)}
    P = [[F(0)] * 6 for _ in states]
    for (m, a) in states:
        if side == "right":
            inputs = [(4 * a, F(1))] if m == "f" else [(4 * c + a, F(1, 4)) for c in range(4)]
        else:
            inputs = [(a, F(1))] if m == "f" else [(4 * a + c, F(1, 4)) for c in range(4)]
        for inp, w in inputs:
            for out in range(1, 16):
                pr = k[inp][out] * w
                if not pr:
                    continue
                hi, lo = divmod(out, 4)
                if side == "right":
                    nxt = ("f", lo) if lo else ("b", hi)
                else:
                    nxt = ("f", hi) if hi else ("b", lo)
                P[index[(m, a)]][index[nxt]] += pr
    steps = [1 if m == "f" else -1 for m, _ in states]
    return P, steps, states


def chain_front(pr: FourStateProbs) -> tuple[Fraction, Fraction]:
    """Exact ``(v, D)`` of the four-state walk from its fundamental matrix.

    The continuum expression in :func:`four_state_front` matches this only
    when the walk collapses to two states; in general they differ slightly.
    """
    return markov_front(pr.transition_matrix(), pr.steps())


def class_walk(cls, q: int = 2, variant: str = "closed_form", side: str = "right") -> WalkSolution:
    """Edge walk of one symmetry class at local dimension ``q``.

    ``variant`` matters for the CSE only: ``"closed_form"`` takes the
    closed-form ``p`` and back-solves ``p2`` from it, ``"recipe"`` uses
    :func:`recipe_probs` unchanged.  ``side`` selects the edge for the
    orthogonal and symplectic walks (only the symplectic rates differ).
    """
    cls = SymmetryClass.parse(cls)
    q = _check_q(q)
    if variant not in ("closed_form", "recipe"):
        raise ValueError(f"unknown variant {variant!r}")
    if cls is SymmetryClass.UNITARY:
        return biased_walk(F(1, q * q + 1))
    if cls in (SymmetryClass.COE, SymmetryClass.CSE):
        p1, p2 = recipe_probs(cls, q)
        if cls is SymmetryClass.CSE and variant == "closed_form":
            p = closed_form_p(cls, q)
            p2 = 1 + p1 - p1 / p
        return persistent_walk(p1, p2)
    return four_state_front(evenodd_chain(cls, q, side).probs)
