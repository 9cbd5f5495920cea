import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symcirc.pauli import (
    EdgeCoords,
    J_SYMPLECTIC,
    Parity,
    PauliString,
    SiteOp,
    TWO_SITE_LABELS,
    commutation_table,
    edges,
    front_links,
    gate_sites,
    gate_window,
    make_string,
    n_gates,
    parse_two_site,
    split_two_site,
    sympl_parity,
    symplectic_inner,
    transpose_parity,
    two_site_index,
    two_site_matrix,
)

labels = st.text(alphabet="IXYZ", min_size=1, max_size=40)


def test_site_codes_round_trip():
    assert [op.name for op in SiteOp] == ["I", "X", "Y", "Z"]
    for op in SiteOp:
        assert SiteOp.from_bits(op.xbit, op.zbit) is op
        assert SiteOp.parse(op.name) is op
        assert SiteOp.parse(int(op)) is op


def test_two_site_index_bijection():
    seen = set()
    for a, b in itertools.product(SiteOp, SiteOp):
        i = two_site_index(a, b)
        assert split_two_site(i) == (a, b)
        assert parse_two_site(TWO_SITE_LABELS[i]) == i
        seen.add(i)
    assert seen == set(range(16))
    assert TWO_SITE_LABELS[0] == "II" and TWO_SITE_LABELS[15] == "ZZ"


@given(labels)
def test_label_round_trip(label):
    s = PauliString.from_label(label)
    assert s.label() == label
    assert PauliString.from_codes(s.codes()) == s
    assert s.weight() == sum(ch != "I" for ch in label)
    for i, ch in enumerate(label):
        assert (s[i] is SiteOp.I) == (ch == "I")


def test_make_string():
    s = make_string(8, 4, "X")
    assert s.x_mask == 1 << 4 and s.z_mask == 0
    s = make_string(8, 4, "Y")
    assert s.x_mask == 1 << 4 and s.z_mask == 1 << 4
    with pytest.raises(ValueError):
        make_string(8, 4, "I")
    with pytest.raises(ValueError):
        make_string(8, 8, "X")


def test_symplectic_inner_examples():
    XI, ZI, IZ = (parse_two_site(s) for s in ("XI", "ZI", "IZ"))
    XY = parse_two_site("XY")
    assert symplectic_inner(XI, ZI) == 1
    assert symplectic_inner(XI, IZ) == 0
    assert symplectic_inner(XY, XY) == 0


def test_commutation_table_matches_matrices():
    table = commutation_table()
    for a in range(16):
        for b in range(16):
            ma, mb = two_site_matrix(a), two_site_matrix(b)
            anti = np.allclose(ma @ mb, -mb @ ma)
            assert table[a, b] == int(anti)


def test_transpose_parity_examples():
    assert transpose_parity(parse_two_site("YI")) is Parity.ODD
    assert transpose_parity(parse_two_site("YY")) is Parity.EVEN
    assert transpose_parity(0) is Parity.EVEN
    # odd iff an odd number of Y factors
    for i, lab in enumerate(TWO_SITE_LABELS):
        assert (transpose_parity(i) is Parity.ODD) == (lab.count("Y") % 2 == 1)


def test_sympl_parity_examples():
    assert sympl_parity(parse_two_site("XI")) is Parity.ODD
    assert sympl_parity(parse_two_site("IX")) is Parity.EVEN
    assert sympl_parity(0) is Parity.EVEN
    for lab in ("XY", "IX", "ZY"):
        assert sympl_parity(parse_two_site(lab)) is Parity.EVEN
    for lab in ("XZ", "XI", "IY"):
        assert sympl_parity(parse_two_site(lab)) is Parity.ODD


def test_sympl_parity_brute_force():
    J = J_SYMPLECTIC.astype(complex)
    assert np.allclose(J @ J.T, np.eye(4)) and np.allclose(J.T, -J)
    even = []
    for i in range(16):
        p = two_site_matrix(i)
        conj = J @ p.T @ J.T
        sign = 1 if np.allclose(conj, p) else -1
        assert np.allclose(conj, sign * p)
        assert sympl_parity(i).sign == sign
        if sign == 1 and i:
            even.append(TWO_SITE_LABELS[i])
    assert sorted(even) == ["IX", "IZ", "XY", "YY", "ZY"]


def test_edges_examples():
    assert edges(make_string(8, 4, "X")) == EdgeCoords(3, 4)
    assert edges(PauliString.from_label("IIXXXXII")) == EdgeCoords(1, 5)
    with pytest.raises(ValueError):
        edges(PauliString(8))


@given(labels.filter(lambda s: set(s) != {"I"}))
def test_edges_ordered(label):
    e = edges(PauliString.from_label(label))
    assert e.left_link < e.right_link


@given(labels.filter(lambda s: set(s) != {"I"}), st.integers(0, 1))
def test_front_links_are_gate_links(label, parity):
    s = PauliString.from_label(label)
    f = front_links(s, parity)
    e = edges(s)
    # both positions are links of the coming layer and hold the ends
    assert f.left_link % 2 == parity % 2 and f.right_link % 2 == parity % 2
    assert f.right_link in (e.right_link, e.right_link - 1)
    assert f.left_link in (e.left_link, e.left_link + 1)


def test_gate_geometry():
    assert n_gates(8, 0) == 4 and n_gates(8, 1) == 3
    assert gate_sites(2, 0) == (4, 5) and gate_sites(2, 1) == (5, 6)
    s = make_string(8, 4, "X")
    windows = [gate_window(s, g, 0) for g in range(n_gates(8, 0))]
    assert windows == [0, 0, parse_two_site("XI"), 0]
    with pytest.raises(ValueError):
        gate_window(s, 4, 0)
