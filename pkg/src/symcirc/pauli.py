"""Bit-packed Pauli strings on a qubit chain.

Single-site operators are coded as small integers in the order ``I, X, Y, Z``
(codes 0..3).  The symplectic bits of a code are ``x = code in (X, Y)`` and
``z = code in (Y, Z)``.  A two-site operator is the integer
``4 * left + right`` so that index 0 is ``II`` and index 15 is ``ZZ``.

A :class:`PauliString` stores two Python integers used as bit masks, one for
the x components and one for the z components.  Phases are never tracked.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "SiteOp",
    "Parity",
    "EdgeCoords",
    "PauliString",
    "LABELS",
    "TWO_SITE_LABELS",
    "two_site_index",
    "split_two_site",
    "two_site_label",
    "parse_two_site",
    "make_string",
    "symplectic_inner",
    "transpose_parity",
    "sympl_parity",
    "edges",
    "front_links",
    "gate_window",
    "gate_sites",
    "n_gates",
    "commutation_table",
    "transpose_parity_table",
    "sympl_parity_table",
    "single_site_matrix",
    "two_site_matrix",
    "J_SYMPLECTIC",
]

LABELS = "IXYZ"


class SiteOp(enum.IntEnum):
    I = 0
    X = 1
    Y = 2
    Z = 3

    @property
    def xbit(self) -> int:
        return int(self in (SiteOp.X, SiteOp.Y))

    @property
    def zbit(self) -> int:
        return int(self in (SiteOp.Y, SiteOp.Z))

    @classmethod
    def from_bits(cls, x: int, z: int) -> "SiteOp":
        return _FROM_BITS[(x & 1, z & 1)]

    @classmethod
    def parse(cls, label) -> "SiteOp":
        if isinstance(label, SiteOp):
            return label
        if isinstance(label, (int, np.integer)):
            return cls(int(label))
        try:
            return cls[str(label).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown single-site Pauli {label!r}") from None


_FROM_BITS = {(0, 0): SiteOp.I, (1, 0): SiteOp.X, (1, 1): SiteOp.Y, (0, 1): SiteOp.Z}


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1


@dataclass(frozen=True)
class EdgeCoords:
    left_link: int
    right_link: int


def two_site_index(left, right) -> int:
    return 4 * int(SiteOp.parse(left)) + int(SiteOp.parse(right))


def split_two_site(index: int) -> tuple[SiteOp, SiteOp]:
    if not 0 <= index < 16:
        raise ValueError(f"two-site index out of range: {index}")
    return SiteOp(index >> 2), SiteOp(index & 3)


def two_site_label(index: int) -> str:
    a, b = split_two_site(index)
    return a.name + b.name


def parse_two_site(label: str) -> int:
    label = label.strip().upper()
    if len(label) != 2:
        raise ValueError(f"two-site label must have 2 characters: {label!r}")
    return two_site_index(label[0], label[1])


TWO_SITE_LABELS = tuple(two_site_label(i) for i in range(16))


@dataclass(frozen=True)
class PauliString:
    """Pauli string on ``n`` sites stored as x/z bit masks."""

    n: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one site")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits beyond the last site")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for i, ch in enumerate(label):
            op = SiteOp.parse(ch)
            x |= op.xbit << i
            z |= op.zbit << i
        return cls(len(label), x, z)

    @classmethod
    def from_codes(cls, codes) -> "PauliString":
        codes = np.asarray(codes, dtype=np.int64)
        x = z = 0
        for i, c in enumerate(codes):
            op = SiteOp(int(c))
            x |= op.xbit << i
            z |= op.zbit << i
        return cls(len(codes), x, z)

    def __getitem__(self, site: int) -> SiteOp:
        if not 0 <= site < self.n:
            raise IndexError(site)
        return SiteOp.from_bits((self.x_mask >> site) & 1, (self.z_mask >> site) & 1)

    def with_site(self, site: int, op) -> "PauliString":
        op = SiteOp.parse(op)
        bit = 1 << site
        x = (self.x_mask & ~bit) | (op.xbit << site)
        z = (self.z_mask & ~bit) | (op.zbit << site)
        return PauliString(self.n, x, z)

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    def is_identity(self) -> bool:
        return self.support == 0

    def weight(self) -> int:
        return bin(self.support).count("1")

    def codes(self) -> np.ndarray:
        return np.array([int(self[i]) for i in range(self.n)], dtype=np.uint8)

    def label(self) -> str:
        return "".join(self[i].name for i in range(self.n))

    def __str__(self) -> str:
        return self.label()


def make_string(n: int, site: int, op) -> PauliString:
    """Single-site operator ``op`` at ``site`` on an otherwise empty chain."""
    op = SiteOp.parse(op)
    if op is SiteOp.I:
        raise ValueError("initial operator must be a non-identity Pauli")
    if not 0 <= site < n:
        raise ValueError(f"site {site} outside chain of length {n}")
    return PauliString(n).with_site(site, op)


def _bits(index: int) -> tuple[int, int, int, int]:
    a, b = split_two_site(index)
    return a.xbit, a.zbit, b.xbit, b.zbit


def symplectic_inner(a: int, b: int) -> int:
    """0 if the two-site Paulis commute, 1 if they anticommute."""
    xa0, za0, xa1, za1 = _bits(a)
    xb0, zb0, xb1, zb1 = _bits(b)
    return (xa0 * zb0 + za0 * xb0 + xa1 * zb1 + za1 * xb1) % 2


def transpose_parity(p: int) -> Parity:
    a, b = split_two_site(p)
    n_y = (a is SiteOp.Y) + (b is SiteOp.Y)
    return Parity.ODD if n_y % 2 else Parity.EVEN


_SINGLE = {
    SiteOp.I: np.eye(2, dtype=complex),
    SiteOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    SiteOp.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    SiteOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

# iY (x) I, real antisymmetric with J J^T = 1
J_SYMPLECTIC = np.kron(np.array([[0, 1], [-1, 0]]), np.eye(2)).astype(np.int64)
assert np.array_equal(J_SYMPLECTIC @ J_SYMPLECTIC.T, np.eye(4, dtype=np.int64))
assert np.array_equal(J_SYMPLECTIC.T, -J_SYMPLECTIC)


def single_site_matrix(op) -> np.ndarray:
    return _SINGLE[SiteOp.parse(op)].copy()


def two_site_matrix(index: int) -> np.ndarray:
    a, b = split_two_site(index)
    return np.kron(_SINGLE[a], _SINGLE[b])


def _integer_two_site(index: int) -> np.ndarray:
    # -iY is real, so Y is represented by the integer matrix of -iY; the
    # scalar factor cancels in J P^T J^T = +-P.
    a, b = split_two_site(index)
    mats = []
    for op in (a, b):
        m = _SINGLE[op]
        if op is SiteOp.Y:
            m = -1j * m
        mats.append(np.rint(m.real).astype(np.int64))
    return np.kron(mats[0], mats[1])


@lru_cache(maxsize=None)
def sympl_parity_table() -> tuple[Parity, ...]:
    """Parity of each two-site Pauli under ``P -> J P^T J^T`` with ``J = iY (x) I``."""
    out = []
    for idx in range(16):
        p = _integer_two_site(idx)
        conj = J_SYMPLECTIC @ p.T @ J_SYMPLECTIC.T
        if np.array_equal(conj, p):
            out.append(Parity.EVEN)
        elif np.array_equal(conj, -p):
            out.append(Parity.ODD)
        else:  # pragma: no cover - impossible for Pauli operators
            raise AssertionError(f"{two_site_label(idx)} has no definite parity")
    return tuple(out)


def sympl_parity(p: int) -> Parity:
    return sympl_parity_table()[p]


@lru_cache(maxsize=None)
def transpose_parity_table() -> tuple[Parity, ...]:
    return tuple(transpose_parity(i) for i in range(16))


@lru_cache(maxsize=None)
def _commutation_array() -> np.ndarray:
    t = np.array([[symplectic_inner(a, b) for b in range(16)] for a in range(16)], dtype=np.uint8)
    t.setflags(write=False)
    return t


def commutation_table() -> np.ndarray:
    """16x16 table of symplectic inner products (1 = anticommute)."""
    return _commutation_array()


def _extreme_sites(s: PauliString) -> tuple[int, int]:
    sup = s.support
    if sup == 0:
        raise ValueError("identity string has no edges")
    lo = (sup & -sup).bit_length() - 1
    hi = sup.bit_length() - 1
    return lo, hi


def edges(s: PauliString) -> EdgeCoords:
    """Edges in site-anchored link coordinates.

    ``right_link`` is the rightmost non-identity site and ``left_link`` is one
    less than the leftmost non-identity site, i.e. the link just outside the
    left end of the support.
    """
    lo, hi = _extreme_sites(s)
    return EdgeCoords(lo - 1, hi)


def front_links(s: PauliString, next_parity: int) -> EdgeCoords:
    """Links of the gates that hold the two ends of ``s`` in the next layer.

    A gate on link ``l`` acts on sites ``(l, l + 1)``; layers of parity 0 use
    even links.  Between consecutive layers each of these positions changes
    by exactly one.
    """
    lo, hi = _extreme_sites(s)
    p = next_parity & 1
    right = hi if (hi - p) % 2 == 0 else hi - 1
    left = lo - 1 if (lo - 1 - p) % 2 == 0 else lo
    return EdgeCoords(left, right)


def n_gates(n: int, layer_parity: int) -> int:
    return n // 2 if layer_parity % 2 == 0 else (n - 1) // 2


def gate_sites(g: int, layer_parity: int) -> tuple[int, int]:
    first = 2 * g + (layer_parity & 1)
    return first, first + 1


def gate_window(s: PauliString, g: int, layer_parity: int) -> int:
    """Two-site restriction of ``s`` on gate ``g`` of a layer."""
    if not 0 <= g < n_gates(s.n, layer_parity):
        raise ValueError(f"gate {g} out of range for n={s.n}, parity={layer_parity}")
    i, j = gate_sites(g, layer_parity)
    return 4 * int(s[i]) + int(s[j])
