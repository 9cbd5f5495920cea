"""Two-site transition kernels for the five gate ensembles.

Rates are exact :class:`fractions.Fraction` values as functions of the gate
dimension ``d = q**2``.  For qubits the rates are assembled into a 16x16
row-stochastic matrix over two-site Paulis (row = input, column = output)
which the simulators sample from.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .pauli import (
    Parity,
    TWO_SITE_LABELS,
    commutation_table,
    sympl_parity_table,
    transpose_parity_table,
)

__all__ = [
    "SymmetryClass",
    "KernelRates",
    "TransitionKernel",
    "rates",
    "kernel",
    "apply_gate",
    "kernel_from_product_formula",
]


class SymmetryClass(enum.Enum):
    UNITARY = "unitary"
    COE = "coe"
    CSE = "cse"
    ORTHOGONAL = "orthogonal"
    SYMPLECTIC = "symplectic"

    @classmethod
    def parse(cls, name) -> "SymmetryClass":
        if isinstance(name, SymmetryClass):
            return name
        key = str(name).strip().lower()
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown symmetry class {name!r} (expected one of {valid})") from None

    def __str__(self) -> str:
        return self.value


_ALIASES = {
    "u": "unitary", "cue": "unitary", "haar": "unitary",
    "o": "orthogonal", "orth": "orthogonal",
    "sp": "symplectic", "symp": "symplectic",
}


@dataclass(frozen=True)
class KernelRates:
    """Exact transition rates of one ensemble at gate dimension ``d``.

    Only the fields relevant to ``cls`` are set.  For the symplectic class
    ``p_e`` is the per-target even rate that makes rows stochastic and
    ``p_e_alt`` keeps the alternative constant ``2/((d-1)(d+1))``.
    """

    cls: SymmetryClass
    d: int
    p_uniform: Fraction | None = None
    p_s: Fraction | None = None
    p_c: Fraction | None = None
    p_a: Fraction | None = None
    p_e: Fraction | None = None
    p_o: Fraction | None = None
    n_e: int | None = None
    n_o: int | None = None
    p_e_alt: Fraction | None = None

    def row_totals(self) -> dict[str, Fraction]:
        """Total outgoing probability of each kind of non-identity input."""
        d = self.d
        if self.cls is SymmetryClass.UNITARY:
            return {"any": self.p_uniform * (d * d - 1)}
        if self.cls in (SymmetryClass.COE, SymmetryClass.CSE):
            half = Fraction(d * d, 2)
            return {"any": self.p_s + self.p_c * (half - 2) + self.p_a * half}
        return {"even": self.n_e * self.p_e, "odd": self.n_o * self.p_o}

    def is_normalized(self) -> bool:
        return all(v == 1 for v in self.row_totals().values())


def rates(cls, d: int) -> KernelRates:
    """Exact rates for ensemble ``cls`` acting on a ``d``-dimensional gate."""
    cls = SymmetryClass.parse(cls)
    d = int(d)
    if d < 4:
        raise ValueError(f"gate dimension must be at least 4, got {d}")
    if cls in (SymmetryClass.CSE, SymmetryClass.SYMPLECTIC) and d % 2:
        raise ValueError(f"{cls.value} gates need an even dimension, got {d}")
    F = Fraction
    if cls is SymmetryClass.UNITARY:
        return KernelRates(cls, d, p_uniform=F(1, d * d - 1))
    if cls is SymmetryClass.COE:
        den = d * (d + 1) * (d + 3)
        return KernelRates(
            cls, d,
            p_s=F(3 * d + 8, den),
            p_c=F(d + 4, den),
            p_a=F((d + 2) ** 2, d * den),
        )
    if cls is SymmetryClass.CSE:
        den = d * (d - 3) * (d - 1)
        return KernelRates(
            cls, d,
            p_s=F(3 * d - 8, den),
            p_c=F(d - 4, den),
            p_a=F((d - 2) ** 2, d * den),
        )
    if cls is SymmetryClass.ORTHOGONAL:
        return KernelRates(
            cls, d,
            p_e=F(2, (d - 1) * (d + 2)),
            p_o=F(2, d * (d - 1)),
            n_e=(d - 1) * (d + 2) // 2,
            n_o=d * (d - 1) // 2,
        )
    return KernelRates(
        cls, d,
        p_e=F(2, (d + 1) * (d - 2)),
        p_o=F(2, d * (d + 1)),
        n_e=(d + 1) * (d - 2) // 2,
        n_o=d * (d + 1) // 2,
        p_e_alt=F(2, (d - 1) * (d + 1)),
    )


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    cls: SymmetryClass
    exact: tuple[tuple[Fraction, ...], ...]
    matrix: np.ndarray = field(repr=False)
    cumulative: np.ndarray = field(repr=False)

    @classmethod
    def from_exact(cls_, sym: SymmetryClass, exact) -> "TransitionKernel":
        exact = tuple(tuple(Fraction(v) for v in row) for row in exact)
        mat = np.array([[float(v) for v in row] for row in exact])
        cum = np.cumsum(mat, axis=1)
        # exact row sums are 1; pin the last entry so sampling never falls off
        cum[:, -1] = 1.0
        mat.setflags(write=False)
        cum.setflags(write=False)
        return cls_(sym, exact, mat, cum)

    def row(self, p: int) -> np.ndarray:
        return self.matrix[p]

    def labels(self) -> tuple[str, ...]:
        return TWO_SITE_LABELS

    def to_records(self) -> list[dict]:
        return [
            {"in": TWO_SITE_LABELS[i], **{TWO_SITE_LABELS[j]: str(self.exact[i][j]) for j in range(16)}}
            for i in range(16)
        ]


def _assemble(entry) -> list[list[Fraction]]:
    rows = [[Fraction(0)] * 16 for _ in range(16)]
    rows[0][0] = Fraction(1)
    for p in range(1, 16):
        for a in range(1, 16):
            rows[p][a] = entry(p, a)
    return rows


@lru_cache(maxsize=None)
def kernel(cls) -> TransitionKernel:
    """Qubit (d = 4) transition kernel for ``cls``."""
    cls = SymmetryClass.parse(cls)
    r = rates(cls, 4)
    if cls is SymmetryClass.UNITARY:
        rows = _assemble(lambda p, a: r.p_uniform)
    elif cls in (SymmetryClass.COE, SymmetryClass.CSE):
        comm = commutation_table()

        def entry(p, a):
            if a == p:
                return r.p_s
            return r.p_a if comm[p, a] else r.p_c

        rows = _assemble(entry)
    else:
        table = transpose_parity_table() if cls is SymmetryClass.ORTHOGONAL else sympl_parity_table()
        counts = {
            par: sum(1 for i in range(1, 16) if table[i] is par) for par in Parity
        }
        rate = {par: Fraction(1, counts[par]) for par in Parity}
        expected = {Parity.EVEN: r.p_e, Parity.ODD: r.p_o}
        if rate != expected:  # pragma: no cover - guarded by tests
            raise AssertionError(f"{cls}: parity counts {counts} disagree with rates")

        def entry(p, a):
            return rate[table[p]] if table[p] is table[a] else Fraction(0)

        rows = _assemble(entry)
    return TransitionKernel.from_exact(cls, rows)


def kernel_from_product_formula(cls, d: int = 4) -> list[list[Fraction]]:
    """Evaluate the closed per-gate S_pa expressions entry by entry (qubits).

    Independent of :func:`kernel`: it uses the delta-function form of the
    second-moment average rather than the listed rates.
    """
    cls = SymmetryClass.parse(cls)
    if d != 4:
        raise ValueError("only the qubit gate (d = 4) is tabulated")
    F = Fraction
    comm = commutation_table()
    tp = transpose_parity_table()
    sp = sympl_parity_table()
    out = [[F(0)] * 16 for _ in range(16)]
    for p in range(16):
        for a in range(16):
            dp, da = int(p == 0), int(a == 0)
            both_id = dp * da
            if cls is SymmetryClass.UNITARY:
                v = both_id + F(1, d * d - 1) * (1 - da) * (1 - dp)
            elif cls in (SymmetryClass.COE, SymmetryClass.CSE):
                sign = -1 if comm[a, p] else 1
                if cls is SymmetryClass.COE:
                    pref, c1, c2 = F(1, d * (d + 1) * (d + 3)), d + 4, 2 * (d + 2)
                else:
                    pref, c1, c2 = F(1, d * (d - 3) * (d - 1)), d - 4, 2 * (d - 2)
                v = both_id + pref * (
                    c1 * (da - 1) * (dp - 1) + c2 * int(a == p) * (1 - dp) + F(2, d) * (1 - sign)
                )
            else:
                table, pref, s = (
                    (tp, F(1, (d - 1) * (d + 2)), 1)
                    if cls is SymmetryClass.ORTHOGONAL
                    else (sp, F(1, (d + 1) * (d - 2)), -1)
                )
                ya, yp = table[a].sign, table[p].sign
                v = both_id + pref * (
                    (da - 1) * (dp - 1) + (da - ya) * (dp - yp) + s * F(1, d) * (1 - ya) * (1 - yp)
                )
            out[a][p] = F(v)
    return out


def apply_gate(k: TransitionKernel, p: int, rng) -> int:
    """Sample the output of one gate whose input is the two-site Pauli ``p``."""
    if p == 0:
        return 0
    u = rng.random()
    return int(np.searchsorted(k.cumulative[p], u, side="right"))
