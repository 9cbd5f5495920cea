"""Monte Carlo evolution of Pauli strings under brickwork random circuits.

Layer ``t`` (counting from 0) applies gates on the links of parity ``t % 2``;
the gate on link ``l`` acts on sites ``(l, l + 1)``.  Edge positions are
recorded in frontier-link coordinates (see :func:`symcirc.pauli.front_links`),
in which both edges move by exactly one link per layer.

The ensemble engine is compiled with numba.  Random numbers are drawn from a
counter-based generator keyed by ``(seed, trajectory, layer, gate)``, so the
output is a pure function of :class:`SimConfig` whatever the thread count.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .kernels import SymmetryClass, TransitionKernel, kernel
from .pauli import PauliString, SiteOp, gate_sites, make_string, n_gates
from .rng import uniform

__all__ = [
    "BoundaryError",
    "SimConfig",
    "EnsembleStats",
    "step",
    "run_ensemble",
    "simulate_edges",
]

log = logging.getLogger(__name__)

# numba falls back to another threading layer on its own; the notice is noise
warnings.filterwarnings("ignore", message="The TBB threading layer", category=numba.NumbaWarning)


class BoundaryError(RuntimeError):
    """The operator reached the end of the chain."""


@dataclass(frozen=True)
class SimConfig:
    cls: SymmetryClass
    n: int
    t_max: int
    ensemble: int
    seed: int
    initial_site: int | None = None
    initial_op: SiteOp = SiteOp.X
    burn_in: int = 20
    fit_window: tuple[int, int] | None = None
    track_occupancy: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cls", SymmetryClass.parse(self.cls))
        object.__setattr__(self, "initial_op", SiteOp.parse(self.initial_op))
        if self.initial_op is SiteOp.I:
            raise ValueError("initial operator must be a non-identity Pauli")
        if self.t_max < 1:
            raise ValueError("t_max must be at least 1")
        if self.ensemble < 1:
            raise ValueError("ensemble must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.n <= 2 * self.t_max + 2:
            raise ValueError(f"n={self.n} too small: need n > 2*t_max + 2 = {2 * self.t_max + 2}")
        site = self.site
        if site - self.t_max - 1 < 0 or site + self.t_max + 1 > self.n - 1:
            raise ValueError(f"initial site {site} lets the light cone reach the chain ends")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            object.__setattr__(self, "fit_window", (int(lo), int(hi)))

    @property
    def site(self) -> int:
        return self.n // 2 if self.initial_site is None else int(self.initial_site)

    @property
    def window(self) -> tuple[int, int]:
        if self.fit_window is not None:
            return self.fit_window
        return max(self.burn_in, self.t_max // 3), self.t_max

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cls"] = self.cls.value
        d["initial_op"] = self.initial_op.name
        d["initial_site"] = self.site
        d["fit_window"] = list(self.window)
        return d


def _frontier(lo: int, hi: int, parity: int) -> tuple[int, int]:
    left = lo - 1 if (lo - 1 - parity) % 2 == 0 else lo
    right = hi if (hi - parity) % 2 == 0 else hi - 1
    return left, right


def step(s: PauliString, layer_parity: int, k: TransitionKernel, rng) -> PauliString:
    """Apply one brickwork layer to a single string.

    ``rng.random(m)`` is called once with ``m`` = number of gates in the
    layer; gate ``g`` uses the ``g``-th draw.  Identity windows are left alone.
    """
    if s.is_identity():
        raise ValueError("cannot evolve the identity string")
    codes = s.codes()
    nz = np.flatnonzero(codes)
    if nz[0] == 0 or nz[-1] == s.n - 1:
        raise BoundaryError("light cone hit boundary")
    par = layer_parity & 1
    draws = np.asarray(rng.random(n_gates(s.n, par)), dtype=float)
    for g in range(n_gates(s.n, par)):
        i, j = gate_sites(g, par)
        inp = 4 * int(codes[i]) + int(codes[j])
        if inp == 0:
            continue
        out = int(np.searchsorted(k.cumulative[inp], draws[g], side="right"))
        codes[i], codes[j] = out >> 2, out & 3
    return PauliString.from_codes(codes)


@njit(parallel=True, cache=True)
def _simulate(cum, n, t_max, n_traj, seed, site, op, chunk, track_occ):
    right = np.empty((n_traj, t_max + 1), np.int32)
    left = np.empty((n_traj, t_max + 1), np.int32)
    status = np.zeros(n_traj, np.int8)
    n_chunks = (n_traj + chunk - 1) // chunk
    occ = np.zeros((n_chunks if track_occ else 0, t_max + 1, n), np.int32)
    for ci in prange(n_chunks):
        codes = np.zeros(n, np.uint8)
        stop = min(n_traj, (ci + 1) * chunk)
        for tr in range(ci * chunk, stop):
            codes[:] = 0
            codes[site] = op
            lo = site
            hi = site
            for t in range(t_max + 1):
                par = t & 1
                ll = lo - 1 if (lo - 1 - par) % 2 == 0 else lo
                rl = hi if (hi - par) % 2 == 0 else hi - 1
                right[tr, t] = rl
                left[tr, t] = ll
                if track_occ:
                    for x in range(lo, hi + 1):
                        if codes[x] != 0:
                            occ[ci, t, x] += 1
                if t == t_max:
                    break
                if lo == 0 or hi == n - 1:
                    status[tr] = 1
                    break
                for l in range(ll, rl + 1, 2):
                    inp = codes[l] * 4 + codes[l + 1]
                    if inp == 0:
                        continue
                    u = uniform(seed, tr, t, l // 2)
                    j = 0
                    while j < 15 and u >= cum[inp, j]:
                        j += 1
                    codes[l] = j >> 2
                    codes[l + 1] = j & 3
                new_lo = ll
                while new_lo <= rl + 1 and codes[new_lo] == 0:
                    new_lo += 1
                if new_lo > rl + 1:
                    status[tr] = 2
                    break
                new_hi = rl + 1
                while codes[new_hi] == 0:
                    new_hi -= 1
                lo = new_lo
                hi = new_hi
    return right, left, status, occ


def simulate_edges(cfg: SimConfig, *, threads: int | None = None, chunk: int = 512):
    """Raw frontier-link trajectories, shape ``(ensemble, t_max + 1)`` each."""
    k = kernel(cfg.cls)
    if threads is not None:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    right, left, status, occ = _simulate(
        np.ascontiguousarray(k.cumulative), cfg.n, cfg.t_max, cfg.ensemble,
        np.uint64(cfg.seed), cfg.site, int(cfg.initial_op), chunk, cfg.track_occupancy,
    )
    if np.any(status == 1):
        raise BoundaryError("light cone hit boundary")
    if np.any(status == 2):  # pragma: no cover - kernels never map a non-identity to II
        raise RuntimeError("a trajectory became the identity string")
    occupancy = occ.sum(axis=0, dtype=np.int64) if cfg.track_occupancy else None
    return right, left, occupancy


def _moments(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exact integer sums, so the reduction order cannot change the result
    x = x.astype(np.int64)
    m = x.shape[0]
    s1 = x.sum(axis=0)
    s2 = (x * x).sum(axis=0)
    mean = s1 / m
    if m > 1:
        var = (m * s2 - s1 * s1) / (m * (m - 1))
    else:
        var = np.zeros_like(mean)
    return mean, var


def _histogram(x: np.ndarray, offset: int, width: int) -> np.ndarray:
    out = np.zeros((x.shape[1], width), np.int64)
    for t in range(x.shape[1]):
        out[t] = np.bincount(x[:, t] + offset, minlength=width)
    return out


@dataclass
class EnsembleStats:
    """Per-layer edge statistics of an ensemble run.

    ``right``/``left`` hold the raw frontier links of every trajectory when
    available; ``rho_*_counts[t, x + 1]`` counts trajectories with that edge
    on link ``x`` (links run from -1 to n - 1).
    """

    config: SimConfig | None
    t: np.ndarray
    mean_R: np.ndarray
    var_R: np.ndarray
    mean_L: np.ndarray
    var_L: np.ndarray
    origin_R: int
    origin_L: int
    rho_R_counts: np.ndarray | None = None
    rho_L_counts: np.ndarray | None = None
    right: np.ndarray | None = field(default=None, repr=False)
    left: np.ndarray | None = field(default=None, repr=False)
    occupancy: np.ndarray | None = field(default=None, repr=False)
    n_traj: int = 0

    LINK_OFFSET = 1

    @classmethod
    def from_edges(cls, right: np.ndarray, left: np.ndarray, config: SimConfig | None = None,
                   occupancy: np.ndarray | None = None) -> "EnsembleStats":
        right = np.asarray(right)
        left = np.asarray(left)
        mean_R, var_R = _moments(right)
        mean_L, var_L = _moments(left)
        width = (config.n + 1) if config is not None else int(max(right.max(), left.max())) + 2
        return cls(
            config=config,
            t=np.arange(right.shape[1]),
            mean_R=mean_R, var_R=var_R, mean_L=mean_L, var_L=var_L,
            origin_R=int(right[0, 0]), origin_L=int(left[0, 0]),
            rho_R_counts=_histogram(right, cls.LINK_OFFSET, width),
            rho_L_counts=_histogram(left, cls.LINK_OFFSET, width),
            right=right, left=left, occupancy=occupancy, n_traj=right.shape[0],
        )

    @property
    def t_max(self) -> int:
        return int(self.t[-1])

    @property
    def links(self) -> np.ndarray:
        return np.arange(self.rho_R_counts.shape[1]) - self.LINK_OFFSET

    def rho_R(self, t: int) -> np.ndarray:
        return self.rho_R_counts[t] / self.rho_R_counts[t].sum()

    def rho_L(self, t: int) -> np.ndarray:
        return self.rho_L_counts[t] / self.rho_L_counts[t].sum()

    def occupancy_density(self) -> np.ndarray | None:
        if self.occupancy is None:
            return None
        return self.occupancy / self.n_traj


def run_ensemble(cfg: SimConfig, *, threads: int | None = None) -> EnsembleStats:
    """Evolve ``cfg.ensemble`` independent strings and aggregate edge statistics."""
    log.info("simulating %s: n=%d t_max=%d ensemble=%d seed=%d",
             cfg.cls.value, cfg.n, cfg.t_max, cfg.ensemble, cfg.seed)
    right, left, occ = simulate_edges(cfg, threads=threads)
    return EnsembleStats.from_edges(right, left, cfg, occ)


def initial_string(cfg: SimConfig) -> PauliString:
    return make_string(cfg.n, cfg.site, cfg.initial_op)
