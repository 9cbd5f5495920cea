"""Operator growth under a single GUE Hamiltonian on a few qubits.

``H`` is normalized so its spectrum fills ``[-2, 2]`` (off-diagonal variance
``1/d``).  For each sample the initial Pauli ``O0`` is evolved exactly,
``O0(t) = exp(-iHt) O0 exp(iHt)``, and expanded on all ``4**n`` Pauli strings.
The weights ``|gamma_p(t)|**2`` are averaged over three groups: the initial
operator itself, the other strings commuting with it, and the strings
anticommuting with it.  The identity never carries weight and is left out.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, single_site_matrix

__all__ = [
    "GueConfig",
    "GueRun",
    "sample_gue",
    "pauli_coefficients",
    "coeffs",
    "pauli_groups",
    "ensemble_curves",
    "locate_regimes",
    "plateau_prediction",
]

# T[a, i, j] = conj(P_a)[i, j] / 2, so that sum_ij M[i, j] T[a, i, j] = Tr(P_a^dag M) / 2
_T = np.stack([single_site_matrix(a).conj() for a in range(4)]) / 2


def sample_gue(d: int, rng) -> np.ndarray:
    """Hermitian ``d x d`` GUE matrix with ``E|H_ij|^2 = 1/d``."""
    if d < 2:
        raise ValueError("Hilbert-space dimension must be at least 2")
    a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(d)
    return (a + a.conj().T) / 2


def pauli_coefficients(m: np.ndarray, n_qubits: int) -> np.ndarray:
    """``Tr(P^dag M) / 2**n`` for every Pauli string, batched over leading axes.

    Strings are indexed in base 4 with qubit 0 as the most significant digit
    and codes I, X, Y, Z = 0..3, matching :class:`symcirc.pauli.PauliString`.
    """
    m = np.asarray(m)
    lead = m.shape[:-2]
    d = 2**n_qubits
    if m.shape[-2:] != (d, d):
        raise ValueError(f"expected trailing shape ({d}, {d}), got {m.shape[-2:]}")
    x = m.reshape(lead + (2,) * (2 * n_qubits))
    k = len(lead)
    # contract one (row, column) pair per qubit; the new Pauli axis goes last
    for q in range(n_qubits):
        x = np.tensordot(x, _T, axes=([k, k + n_qubits - q], [1, 2]))
    return x.reshape(lead + (4**n_qubits,))


def _string_index(op: PauliString) -> int:
    idx = 0
    for c in op.codes():
        idx = 4 * idx + int(c)
    return idx


def _string_matrix(op: PauliString) -> np.ndarray:
    m = np.array([[1.0 + 0j]])
    for c in op.codes():
        m = np.kron(m, single_site_matrix(int(c)))
    return m


def coeffs(h: np.ndarray, o0: PauliString, t) -> np.ndarray:
    """``|gamma_p(t)|**2`` for all strings ``p``, shape ``(len(t), 4**n)``."""
    if o0.is_identity():
        raise ValueError("initial operator must be a non-identity Pauli string")
    n = o0.n
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam, v = np.linalg.eigh(h)
    ot = v.conj().T @ _string_matrix(o0) @ v
    ph = np.exp(-1j * np.outer(t, lam))  # (T, d)
    # e^{-iHt} O e^{iHt} in the eigenbasis, rotated back
    m = ph[:, :, None] * ot[None] * ph.conj()[:, None, :]
    m = v[None] @ m @ v.conj().T[None]
    g = pauli_coefficients(m, n)
    return (g * g.conj()).real


def pauli_groups(o0: PauliString) -> tuple[int, np.ndarray, np.ndarray]:
    """Index of ``o0`` and boolean masks of the commuting and anticommuting strings."""
    n = o0.n
    idx = _string_index(o0)
    codes = np.array(np.unravel_index(np.arange(4**n), (4,) * n)).T  # (4**n, n)
    mine = np.asarray(o0.codes())
    # single-site Paulis anticommute when both are non-identity and differ
    anti_sites = (codes != 0) & (mine[None] != 0) & (codes != mine[None])
    anti = (anti_sites.sum(axis=1) % 2) == 1
    comm = ~anti
    comm[0] = False
    comm[idx] = False
    return idx, comm, anti


@dataclass(frozen=True)
class GueConfig:
    n_qubits: int = 5
    samples: int = 200
    t_max: float = 200.0
    n_times: int = 401
    seed: int = 0
    initial: str | None = None

    def __post_init__(self):
        if not 1 <= self.n_qubits <= 5:
            raise ValueError("n_qubits must be between 1 and 5")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.t_max <= 0 or self.n_times < 2:
            raise ValueError("need t_max > 0 and at least two time points")

    @property
    def d(self) -> int:
        return 2**self.n_qubits

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_times)

    @property
    def operator(self) -> PauliString:
        label = self.initial or "Z" + "I" * (self.n_qubits - 1)
        op = PauliString.from_label(label)
        if op.n != self.n_qubits:
            raise ValueError(f"initial operator {label!r} has {op.n} sites, expected {self.n_qubits}")
        return op


@dataclass
class GueRun:
    config: GueConfig
    t: np.ndarray
    g_initial: np.ndarray
    g_commute: np.ndarray
    g_anticommute: np.ndarray
    r2: np.ndarray
    max_norm_error: float
    regimes: dict = field(default_factory=dict)
    per_sample_initial: np.ndarray | None = field(default=None, repr=False)

    def plateau_ratio(self) -> float:
        lo, hi = self.regimes["plateau"]
        sl = (self.t >= lo) & (self.t <= hi)
        n_c = self.n_commute
        n_a = self.n_anticommute
        others = (self.g_commute[sl] * n_c + self.g_anticommute[sl] * n_a) / (n_c + n_a)
        return float(self.g_initial[sl].mean() / others.mean())

    def plateau_ratio_stderr(self) -> float:
        """Sampling error of :meth:`plateau_ratio` from the spread of the initial-operator weight."""
        lo, hi = self.regimes["plateau"]
        sl = (self.t >= lo) & (self.t <= hi)
        per = self.per_sample_initial[:, sl].mean(axis=1)
        g = per.mean()
        others = (1 - g) / (self.n_commute + self.n_anticommute)
        return float(per.std(ddof=1) / np.sqrt(len(per)) / others)

    @property
    def n_anticommute(self) -> int:
        return 4**self.config.n_qubits // 2

    @property
    def n_commute(self) -> int:
        return 4**self.config.n_qubits // 2 - 2

    def dip_values(self) -> dict[str, float]:
        """Group weights averaged over the dip window (the smoothing span around the dip)."""
        lo, hi = self.regimes["dip_window"]
        sl = (self.t >= lo) & (self.t <= hi)
        return {
            "initial": float(self.g_initial[sl].mean()),
            "commute": float(self.g_commute[sl].mean()),
            "anticommute": float(self.g_anticommute[sl].mean()),
        }

    def ramp_mask(self) -> np.ndarray:
        lo, hi = self.regimes["ramp"]
        return (self.t >= lo) & (self.t <= hi)


def _one_sample(cfg: GueConfig, seed_seq, idx, comm, anti):
    rng = np.random.default_rng(seed_seq)
    h = sample_gue(cfg.d, rng)
    c = coeffs(h, cfg.operator, cfg.times)
    lam = np.linalg.eigvalsh(h)
    z = np.exp(1j * np.outer(cfg.times, lam)).sum(axis=1)
    return (c[:, idx], c[:, comm].mean(axis=1), c[:, anti].mean(axis=1),
            (z * z.conj()).real, float(np.max(np.abs(c.sum(axis=1) - 1))))


def locate_regimes(t: np.ndarray, r2: np.ndarray, d: int) -> dict[str, tuple[float, float] | float]:
    """Dip time from the minimum of ``R2``; plateau from where it first saturates at ``d``.

    ``R2`` is smoothed with a running mean of a few points before locating
    the dip, since single time points are noisy.  The same span around the
    dip is reported as ``dip_window``.
    """
    w = max(1, len(t) // 100)
    smooth = np.convolve(r2, np.ones(2 * w + 1) / (2 * w + 1), mode="same")
    # skip the initial decay, which starts at d**2
    start = int(np.argmax(smooth < d))
    dip_i = start + int(np.argmin(smooth[start:len(t) - w]))
    above = np.flatnonzero(smooth[dip_i:len(t) - w] >= 0.95 * d)
    sat_i = dip_i + int(above[0]) if len(above) else len(t) - 1
    return {
        "dip": float(t[dip_i]),
        "dip_window": (float(t[max(dip_i - w, 0)]), float(t[min(dip_i + w, len(t) - 1)])),
        "ramp": (float(t[dip_i]), float(t[sat_i])),
        "plateau": (float(min(2 * t[sat_i], t[-1] / 2)), float(t[-1])),
    }


def ensemble_curves(cfg: GueConfig, *, threads: int | None = None) -> GueRun:
    """Group-averaged coefficient curves and ``R2(t)`` over ``cfg.samples`` Hamiltonians.

    Sample ``k`` uses the ``k``-th child of ``SeedSequence(cfg.seed)``;
    results are reduced in sample order, so the thread count is irrelevant.
    """
    op = cfg.operator
    idx, comm, anti = pauli_groups(op)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.samples)
    workers = max(1, int(threads or 1))
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda s: _one_sample(cfg, s, idx, comm, anti), seeds))
    gi, gc, ga, r2 = (np.zeros(cfg.n_times) for _ in range(4))
    err = 0.0
    per = np.empty((cfg.samples, cfg.n_times))
    for k, (a, b, c, r, e) in enumerate(parts):
        per[k] = a
        gi += a
        gc += b
        ga += c
        r2 += r
        err = max(err, e)
    m = cfg.samples
    run = GueRun(cfg, cfg.times, gi / m, gc / m, ga / m, r2 / m, err, per_sample_initial=per)
    run.regimes = locate_regimes(run.t, run.r2, cfg.d)
    return run


def plateau_prediction(n_qubits: int, samples: int, rng) -> tuple[float, float]:
    """Infinite-time ratio of initial to average other weight, from Haar eigenvectors.

    With a non-degenerate spectrum the time average of ``|gamma_O0|**2`` is
    ``((sum_i |O_ii|**2)**2 + sum_{i != j} |O_ij|**4) / d**2`` in the
    eigenbasis, whose GUE distribution is Haar.  Returns (ratio, stderr).
    """
    d = 2**n_qubits
    o = np.diag(np.r_[np.ones(d // 2), -np.ones(d // 2)])
    vals = np.empty(samples)
    for k in range(samples):
        _, v = np.linalg.eigh(sample_gue(d, rng))
        a = np.abs(v.conj().T @ o @ v) ** 2
        diag = np.diag(a)
        vals[k] = diag.sum() ** 2 + (a**2).sum() - (diag**2).sum()
    g = vals.mean() / d**2
    others = (1 - g) / (d * d - 2)
    return float(g / others), float(vals.std(ddof=1) / np.sqrt(samples) / d**2 / others)
