"""Haar sampling of 4x4 gates and Monte Carlo estimates of their Pauli kernels.

Each ensemble is sampled directly (QR with phase fixing for U(4) and O(4),
structure-preserving Gram-Schmidt for USp(4), ``V^T V`` and ``V^D V`` for the
circular ensembles) and the second-moment kernel

    S[a, p] = E[ (1/d^2) Tr(U P_a U^dag P_p)^2 ]

is estimated by a plain sample mean.  Nothing here uses the analytic rates,
so the estimates are an independent check on :mod:`symcirc.kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import SymmetryClass, TransitionKernel, kernel
from .pauli import J_SYMPLECTIC, TWO_SITE_LABELS, two_site_matrix

__all__ = [
    "Gate",
    "KernelEstimate",
    "KernelComparison",
    "sample_gate",
    "sample_gates",
    "gate_residuals",
    "estimate_kernel",
    "compare",
    "z_scores",
    "PAULIS",
    "TOL",
    "even_rate_check",
    "oracle_report",
]

D = 4
TOL = 1e-12
J = J_SYMPLECTIC.astype(float)
PAULIS = np.stack([two_site_matrix(i) for i in range(16)])


def _ginibre(rng, n, size=None, real=False):
    shape = (n, n) if size is None else (size, n, n)
    if real:
        return rng.standard_normal(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _haar_qr(z):
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    if np.any(np.abs(diag) < 1e-10):
        return None
    # fix the phase/sign freedom of QR so the result is Haar distributed
    return q * (diag / np.abs(diag))[..., None, :]


def _haar_unitary(rng, size):
    while True:
        u = _haar_qr(_ginibre(rng, D, size))
        if u is not None:
            return u


def _haar_orthogonal(rng, size):
    while True:
        u = _haar_qr(_ginibre(rng, D, size, real=True))
        if u is not None:
            return u.astype(complex)


def _haar_usp_single(rng):
    # quaternionic Ginibre [[A, B], [-conj(B), conj(A)]]; columns j and j+2
    # are paired by v -> -J conj(v)
    while True:
        a = _ginibre(rng, 2)
        b = _ginibre(rng, 2)
        z = np.block([[a, b], [-b.conj(), a.conj()]])
        cols = [None] * 4
        ok = True
        for j in range(2):
            v = z[:, j].copy()
            for k in range(j):
                for u in (cols[k], cols[k + 2]):
                    v -= u * np.vdot(u, v)
            nrm = np.linalg.norm(v)
            if nrm < 1e-10:
                ok = False
                break
            v /= nrm
            cols[j] = v
            cols[j + 2] = -J @ v.conj()
        if ok:
            return np.stack(cols, axis=1)


def _haar_symplectic(rng, size):
    return np.stack([_haar_usp_single(rng) for _ in range(size)])


def _dual(u):
    return J @ np.swapaxes(u, -1, -2) @ J.T


def sample_gates(cls, n: int, rng) -> np.ndarray:
    """``n`` independent gates from ensemble ``cls``, shape ``(n, 4, 4)``."""
    cls = SymmetryClass.parse(cls)
    if cls is SymmetryClass.UNITARY:
        return _haar_unitary(rng, n)
    if cls is SymmetryClass.ORTHOGONAL:
        return _haar_orthogonal(rng, n)
    if cls is SymmetryClass.SYMPLECTIC:
        return _haar_symplectic(rng, n)
    v = _haar_unitary(rng, n)
    if cls is SymmetryClass.COE:
        return np.swapaxes(v, -1, -2) @ v
    return _dual(v) @ v


@dataclass(frozen=True)
class Gate:
    cls: SymmetryClass
    matrix: np.ndarray

    def residuals(self) -> dict[str, float]:
        return gate_residuals(self.cls, self.matrix)


def sample_gate(cls, rng) -> Gate:
    cls = SymmetryClass.parse(cls)
    g = Gate(cls, sample_gates(cls, 1, rng)[0])
    return g


def gate_residuals(cls, u: np.ndarray) -> dict[str, float]:
    """Max-norm residuals of unitarity and of the ensemble's defining constraint."""
    cls = SymmetryClass.parse(cls)
    u = np.asarray(u)
    eye = np.eye(D)
    out = {"unitary": float(np.max(np.abs(np.swapaxes(u.conj(), -1, -2) @ u - eye)))}
    if cls is SymmetryClass.COE:
        out["symmetric"] = float(np.max(np.abs(u - np.swapaxes(u, -1, -2))))
    elif cls is SymmetryClass.ORTHOGONAL:
        out["real"] = float(np.max(np.abs(u.imag)))
    elif cls is SymmetryClass.SYMPLECTIC:
        out["symplectic"] = float(np.max(np.abs(np.swapaxes(u, -1, -2) @ J @ u - J)))
    elif cls is SymmetryClass.CSE:
        out["self_dual"] = float(np.max(np.abs(u - _dual(u))))
    return out


def _traces(u: np.ndarray) -> np.ndarray:
    """Tr(U P_a U^dag P_p) for a batch of gates, shape (n, 16, 16) [gate, a, p]."""
    conj = np.einsum("nij,ajk,nlk->nail", u, PAULIS, u.conj(), optimize=True)
    return np.einsum("nail,pli->nap", conj, PAULIS, optimize=True)


@dataclass
class KernelEstimate:
    cls: SymmetryClass
    n_samples: int
    mean: np.ndarray
    stderr: np.ndarray
    cross_pairs: list = field(default_factory=list)
    cross_mean: np.ndarray | None = None
    cross_stderr: np.ndarray | None = None
    max_imag: float = 0.0
    max_residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "class": self.cls.value,
            "n_samples": self.n_samples,
            "labels": list(TWO_SITE_LABELS),
            "mean": self.mean.tolist(),
            "stderr": self.stderr.tolist(),
            "cross_pairs": [
                {"p": TWO_SITE_LABELS[p], "a": TWO_SITE_LABELS[a], "b": TWO_SITE_LABELS[b],
                 "mean": float(m), "stderr": float(s)}
                for (p, a, b), m, s in zip(self.cross_pairs, self.cross_mean, self.cross_stderr)
            ],
            "max_imag_trace": self.max_imag,
            "max_gate_residual": self.max_residual,
        }


def _cross_pairs():
    # a fixed spread of (p, a, b) triples with a != b, all non-identity
    out = []
    for p in (1, 5, 10, 15):
        for a, b in ((1, 2), (4, 8), (5, 10), (3, 12), (6, 9), (7, 14)):
            out.append((p, a, b))
    return out


def estimate_kernel(cls, n: int, rng, *, chunk: int = 5000, imag_tol: float = 1e-10) -> KernelEstimate:
    """Sample ``n`` gates and average ``(1/16) Tr(U P_a U^dag P_p)^2``."""
    cls = SymmetryClass.parse(cls)
    if n < 2:
        raise ValueError("need at least two samples for a standard error")
    pairs = _cross_pairs()
    pi = np.array([t[0] for t in pairs])
    ai = np.array([t[1] for t in pairs])
    bi = np.array([t[2] for t in pairs])
    s1 = np.zeros((16, 16))
    s2 = np.zeros((16, 16))
    c1 = np.zeros(len(pairs))
    c2 = np.zeros(len(pairs))
    max_imag = 0.0
    max_res = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        u = sample_gates(cls, m, rng)
        max_res = max(max_res, max(gate_residuals(cls, u).values()))
        tr = _traces(u)
        imag = float(np.max(np.abs(tr.imag)))
        max_imag = max(max_imag, imag)
        if imag > imag_tol:
            raise RuntimeError(f"non-real Pauli trace {imag:.3g}: gate sampler is broken")
        t = tr.real
        x = t * t / D**2
        s1 += x.sum(axis=0)
        s2 += (x * x).sum(axis=0)
        y = t[:, ai, pi] * t[:, bi, pi] / D**2
        c1 += y.sum(axis=0)
        c2 += (y * y).sum(axis=0)
        done += m
    mean = s1 / n
    var = np.maximum(s2 / n - mean**2, 0.0) * n / (n - 1)
    cmean = c1 / n
    cvar = np.maximum(c2 / n - cmean**2, 0.0) * n / (n - 1)
    return KernelEstimate(
        cls, n, mean, np.sqrt(var / n), pairs, cmean, np.sqrt(cvar / n), max_imag, max_res
    )


def z_scores(dev: np.ndarray, stderr: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    dev = np.abs(np.asarray(dev, dtype=float))
    stderr = np.asarray(stderr, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, dev / stderr, np.inf)
    return np.where(dev <= atol, 0.0, z)


@dataclass
class KernelComparison:
    cls: SymmetryClass
    max_abs_dev: float
    max_z: float
    z_threshold: float
    worst_entry: tuple[str, str]
    passed: bool
    z: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "class": self.cls.value,
            "max_abs_dev": self.max_abs_dev,
            "max_z": self.max_z,
            "z_threshold": self.z_threshold,
            "worst_entry": list(self.worst_entry),
            "passed": self.passed,
        }


def compare(
    est: KernelEstimate,
    k: TransitionKernel | np.ndarray | None = None,
    *,
    z_threshold: float = 4.0,
    atol: float = 1e-12,
) -> KernelComparison:
    """z-scores of every entry of ``est`` against an analytic kernel.

    Deviations below ``atol`` count as exact agreement: structurally zero
    traces come out at the 1e-16 rounding level, and their squares have
    standard errors far below that.
    """
    if k is None:
        k = kernel(est.cls)
    if isinstance(k, TransitionKernel):
        if k.cls is not est.cls:
            raise ValueError(f"cannot compare a {est.cls} estimate with a {k.cls} kernel")
        target = k.matrix
    else:
        target = np.asarray(k, dtype=float)
    dev = est.mean - target
    z = z_scores(dev, est.stderr, atol)
    idx = np.unravel_index(int(np.argmax(z)), z.shape)
    max_z = float(z[idx])
    return KernelComparison(
        est.cls,
        float(np.max(np.abs(dev))),
        max_z,
        z_threshold,
        (TWO_SITE_LABELS[idx[0]], TWO_SITE_LABELS[idx[1]]),
        bool(max_z <= z_threshold),
        z,
    )


def even_rate_check(est: KernelEstimate) -> dict:
    """Pooled estimate of the symplectic even-to-even rate against both candidate constants."""
    from .kernels import rates
    from .pauli import Parity, sympl_parity_table

    if est.cls is not SymmetryClass.SYMPLECTIC:
        raise ValueError("the even-rate check applies to the symplectic class")
    table = sympl_parity_table()
    even = [i for i in range(1, 16) if table[i] is Parity.EVEN]
    idx = np.array([(a, p) for a in even for p in even])
    vals = est.mean[idx[:, 0], idx[:, 1]]
    errs = est.stderr[idx[:, 0], idx[:, 1]]
    # the pooled mean is fixed by row normalization, so judge entry by entry
    r = rates(SymmetryClass.SYMPLECTIC, D)
    out = {"entries": len(vals), "mean": float(vals.mean()), "candidates": {}}
    for name, val in (("stochastic", r.p_e), ("alternative", r.p_e_alt)):
        z = np.abs(vals - float(val)) / errs
        out["candidates"][name] = {"value": str(val), "max_z": float(z.max()), "min_z": float(z.min())}
    out["supported"] = min(out["candidates"], key=lambda k: out["candidates"][k]["max_z"])
    return out


def oracle_report(classes, n: int, seed: int, *, threads: int | None = None, z_threshold: float = 4.0) -> dict:
    """Estimate and compare the kernels of ``classes``.

    Each class draws from its own child of ``SeedSequence(seed)``, indexed by
    the class's position in :class:`SymmetryClass`, so the result for a class
    does not depend on which other classes are requested or on threading.
    """
    from concurrent.futures import ThreadPoolExecutor

    classes = [SymmetryClass.parse(c) for c in classes]
    children = np.random.SeedSequence(seed).spawn(len(SymmetryClass))
    order = list(SymmetryClass)

    def one(cls):
        rng = np.random.default_rng(children[order.index(cls)])
        est = estimate_kernel(cls, n, rng)
        cmp_ = compare(est, z_threshold=z_threshold)
        cross_z = z_scores(est.cross_mean, est.cross_stderr)
        rec = {
            "estimate": est.to_dict(),
            "comparison": cmp_.to_dict(),
            "cross_max_z": float(cross_z.max()),
            "passed": bool(cmp_.passed and cross_z.max() <= z_threshold),
        }
        if cls is SymmetryClass.SYMPLECTIC:
            rec["even_rate"] = even_rate_check(est)
        return cls.value, rec

    with ThreadPoolExecutor(max_workers=max(1, int(threads or 1))) as ex:
        results = dict(ex.map(one, classes))
    return {"n_samples": n, "seed": seed, "z_threshold": z_threshold, "classes": results}
