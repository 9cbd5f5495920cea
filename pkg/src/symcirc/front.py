"""Fits of front drift and diffusion, and checks of the front profile.

The right edge is fitted as recorded and the left edge is negated, so both
report a positive velocity.  With raw trajectories available the slope error
comes from the spread of per-trajectory slopes and the diffusion error from
a delete-one-group jackknife; from aggregated moments alone the ordinary
least-squares error is reported instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .simulate import EnsembleStats, SimConfig

__all__ = [
    "LineFit",
    "SideFit",
    "FrontFit",
    "ProfileCheck",
    "fit_line",
    "fit_front",
    "front_profile_check",
    "binomial_walk_stats",
    "sampled_walk_stats",
    "MIN_WINDOW",
]

MIN_WINDOW = 10
JACKKNIFE_GROUPS = 20


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    stderr: float
    r2: float

    def at(self, t) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(t, dtype=float)


def fit_line(t: np.ndarray, y: np.ndarray) -> LineFit:
    """Ordinary least squares ``y = a + b t`` with the textbook slope error."""
    res = sps.linregress(np.asarray(t, dtype=float), np.asarray(y, dtype=float))
    r2 = float(res.rvalue**2) if np.isfinite(res.rvalue) else 1.0
    return LineFit(float(res.slope), float(res.intercept), float(res.stderr), r2)


@dataclass(frozen=True)
class SideFit:
    """Fits for one edge: mean (slope = v) and variance (slope = 2 D)."""

    side: str
    mean: LineFit
    var: LineFit
    v: float
    v_stderr: float
    D: float
    D_stderr: float

    def to_dict(self) -> dict:
        return {
            "v_B_hat": self.v, "v_B_stderr": self.v_stderr,
            "v_B_ols_stderr": self.mean.stderr, "r2_mean": self.mean.r2,
            "D_hat": self.D, "D_stderr": self.D_stderr,
            "D_ols_stderr": self.var.stderr / 2, "r2_var": self.var.r2,
        }


@dataclass(frozen=True)
class FrontFit:
    """Velocity and diffusion averaged over both edges, plus per-edge fits."""

    window: tuple[int, int]
    v_B_hat: float
    v_B_stderr: float
    D_hat: float
    D_stderr: float
    right: SideFit
    left: SideFit
    stderr_method: str
    config: SimConfig | None = field(default=None, repr=False)

    @property
    def r2(self) -> dict[str, float]:
        return {
            "mean_R": self.right.mean.r2, "var_R": self.right.var.r2,
            "mean_L": self.left.mean.r2, "var_L": self.left.var.r2,
        }

    def to_dict(self) -> dict:
        out = {
            "v_B_hat": self.v_B_hat, "v_B_stderr": self.v_B_stderr,
            "D_hat": self.D_hat, "D_stderr": self.D_stderr,
            "window": list(self.window), "stderr_method": self.stderr_method,
            "right": self.right.to_dict(), "left": self.left.to_dict(), "r2": self.r2,
        }
        if self.config is not None:
            out["class"] = self.config.cls.value
            out["seed"] = self.config.seed
            out["ensemble"] = self.config.ensemble
        return out


def _check_window(stats: EnsembleStats, window) -> tuple[int, int]:
    if window is None:
        if stats.config is None:
            raise ValueError("no fit window given and the stats carry no config")
        window = stats.config.window
    lo, hi = int(window[0]), int(window[1])
    burn_in = stats.config.burn_in if stats.config is not None else 0
    if lo < burn_in or hi > stats.t_max or lo > hi:
        raise ValueError(f"fit window [{lo}, {hi}] outside [{burn_in}, {stats.t_max}]")
    if hi - lo + 1 < MIN_WINDOW:
        raise ValueError(f"fit window [{lo}, {hi}] shorter than {MIN_WINDOW} layers")
    return lo, hi


def _slope_weights(t: np.ndarray) -> np.ndarray:
    tc = t - t.mean()
    return tc / np.dot(tc, tc)


def _group_slopes(x: np.ndarray, w: np.ndarray, groups: int) -> tuple[np.ndarray, float]:
    """Delete-one-group jackknife of the variance slope; returns (replicates, full)."""
    x = x.astype(np.float64)
    m = x.shape[0]
    bounds = np.linspace(0, m, groups + 1).astype(int)
    s1 = np.stack([x[a:b].sum(axis=0) for a, b in zip(bounds[:-1], bounds[1:])])
    s2 = np.stack([(x[a:b] ** 2).sum(axis=0) for a, b in zip(bounds[:-1], bounds[1:])])
    sizes = np.diff(bounds)

    def slope(S1, S2, k):
        var = (S2 - S1 * S1 / k) / (k - 1)
        return float(np.dot(var, w))

    full = slope(s1.sum(0), s2.sum(0), m)
    reps = np.array([slope(s1.sum(0) - s1[g], s2.sum(0) - s2[g], m - sizes[g]) for g in range(groups)])
    return reps, full


def _jackknife_se(reps: np.ndarray) -> float:
    g = len(reps)
    return float(np.sqrt((g - 1) / g * np.sum((reps - reps.mean()) ** 2)))


def fit_front(stats: EnsembleStats, window=None) -> FrontFit:
    """Fit ``v_B`` and ``D`` from the edge moments over ``window`` (inclusive)."""
    lo, hi = _check_window(stats, window)
    sl = slice(lo, hi + 1)
    t = stats.t[sl].astype(float)
    fits = {}
    for side, mean, var, origin, sign in (
        ("right", stats.mean_R, stats.var_R, stats.origin_R, 1),
        ("left", stats.mean_L, stats.var_L, stats.origin_L, -1),
    ):
        fits[side] = (fit_line(t, sign * (mean[sl] - origin)), fit_line(t, var[sl]))

    w = _slope_weights(t)
    have_raw = stats.right is not None and stats.left is not None and stats.right.shape[0] >= 2 * JACKKNIFE_GROUPS
    sides = {}
    if have_raw:
        method = "trajectory"
        sR = stats.right[:, sl].astype(np.float64) @ w
        sL = -(stats.left[:, sl].astype(np.float64) @ w)
        m = len(sR)
        se = {"right": sR.std(ddof=1) / np.sqrt(m), "left": sL.std(ddof=1) / np.sqrt(m)}
        v_comb = (sR + sL) / 2
        v_se = float(v_comb.std(ddof=1) / np.sqrt(m))
        repR, fullR = _group_slopes(stats.right[:, sl], w, JACKKNIFE_GROUPS)
        repL, fullL = _group_slopes(stats.left[:, sl], w, JACKKNIFE_GROUPS)
        dse = {"right": _jackknife_se(repR / 2), "left": _jackknife_se(repL / 2)}
        D_se = _jackknife_se((repR + repL) / 4)
    else:
        method = "ols"
        se = {s: fits[s][0].stderr for s in fits}
        dse = {s: fits[s][1].stderr / 2 for s in fits}
        v_se = 0.5 * float(np.hypot(se["right"], se["left"]))
        D_se = 0.5 * float(np.hypot(dse["right"], dse["left"]))
    for s, (mf, vf) in fits.items():
        sides[s] = SideFit(s, mf, vf, mf.slope, float(se[s]), vf.slope / 2, float(dse[s]))
    return FrontFit(
        window=(lo, hi),
        v_B_hat=(sides["right"].v + sides["left"].v) / 2,
        v_B_stderr=v_se,
        D_hat=(sides["right"].D + sides["left"].D) / 2,
        D_stderr=D_se,
        right=sides["right"],
        left=sides["left"],
        stderr_method=method,
        config=stats.config,
    )


@dataclass(frozen=True)
class ProfileCheck:
    """Edge histogram at one time against the Gaussian front of the fit.

    The edge only visits every other link at a given time, so the Gaussian
    density is doubled on the visited sublattice.
    """

    t: int
    side: str
    center: float
    variance: float
    sup_norm: float
    skewness: float
    excess_kurtosis: float
    n_points: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def front_profile_check(stats: EnsembleStats, t: int, *, side: str = "right",
                        fit: FrontFit | None = None, window=None) -> ProfileCheck:
    """Sup-norm distance and shape moments of ``rho(., t)`` against the fitted Gaussian."""
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    if fit is None:
        fit = fit_front(stats, window)
    lo, hi = fit.window
    if not lo <= t <= hi:
        raise ValueError(f"t={t} outside the fit window [{lo}, {hi}]")
    sf = fit.right if side == "right" else fit.left
    sign, origin = (1, stats.origin_R) if side == "right" else (-1, stats.origin_L)
    rho = stats.rho_R(t) if side == "right" else stats.rho_L(t)
    x = sign * (stats.links - origin)
    center = float(sf.mean.at(t))
    var = float(sf.var.at(t))
    # visited links share the parity of the edge at this time
    occupied = np.flatnonzero(rho > 0)
    parity = int(x[occupied[0]]) % 2
    lattice = (x % 2) == parity
    gauss = 2 * sps.norm.pdf(x, loc=center, scale=np.sqrt(var))
    sup = float(np.max(np.abs(rho[lattice] - gauss[lattice])))
    mu = float(np.dot(rho, x))
    m2 = float(np.dot(rho, (x - mu) ** 2))
    m3 = float(np.dot(rho, (x - mu) ** 3))
    m4 = float(np.dot(rho, (x - mu) ** 4))
    return ProfileCheck(int(t), side, center, var, sup, m3 / m2**1.5, m4 / m2**2 - 3, int(lattice.sum()))


def binomial_walk_stats(p: float, t_max: int, *, origin: int = 0, width: int | None = None) -> EnsembleStats:
    """Exact moments and histograms of the biased walk, both edges mirrored.

    Back steps have probability ``p``; no sampling is involved, so
    ``rho_*_counts`` hold probabilities.
    """
    t = np.arange(t_max + 1)
    mean = (1 - 2 * p) * t
    var = 4 * p * (1 - p) * t
    width = width if width is not None else 2 * t_max + 3
    off = t_max + 1  # link x sits in column x + off
    rhoR = np.zeros((t_max + 1, width))
    rhoL = np.zeros((t_max + 1, width))
    for tt in range(t_max + 1):
        k = np.arange(tt + 1)  # number of back steps
        pmf = sps.binom.pmf(k, tt, p)
        rhoR[tt, tt - 2 * k + off] = pmf
        rhoL[tt, -(tt - 2 * k) + off] = pmf
    st = EnsembleStats(
        config=None, t=t, mean_R=origin + mean, var_R=var, mean_L=-origin - mean, var_L=var,
        origin_R=origin, origin_L=-origin, rho_R_counts=rhoR, rho_L_counts=rhoL,
    )
    st.LINK_OFFSET = off - origin
    return st


def sampled_walk_stats(p: float, t_max: int, ensemble: int, rng, *, origin: int = 0) -> EnsembleStats:
    """Ensemble of independent biased walks (right edge) and mirrored copies (left)."""
    steps = np.where(rng.random((ensemble, t_max)) < p, -1, 1)
    R = np.concatenate([np.zeros((ensemble, 1), int), np.cumsum(steps, axis=1)], axis=1) + origin
    steps = np.where(rng.random((ensemble, t_max)) < p, -1, 1)
    L = -(np.concatenate([np.zeros((ensemble, 1), int), np.cumsum(steps, axis=1)], axis=1)) - origin
    shift = t_max + 1 + abs(origin)
    st = EnsembleStats.from_edges(R + shift, L + shift)
    return st
