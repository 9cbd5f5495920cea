"""Theory summaries per class and the velocity table across local dimensions."""
from __future__ import annotations

from fractions import Fraction

from .kernels import SymmetryClass
from .walks import (
    chain_front,
    class_walk,
    closed_form_p,
    closed_form_vb,
    evenodd_chain,
    four_state_front,
    mixing_chain,
    markov_front,
    recipe_probs,
    series_vb,
    persistent_walk,
)

__all__ = ["REFERENCE_VB", "REFERENCE_SERIES", "REFERENCE_D", "theory_report", "repro_table", "format_table"]

F = Fraction

# reference values the exact results are checked against
REFERENCE_VB = {
    SymmetryClass.UNITARY: F(3, 5),
    SymmetryClass.COE: F(153, 305),
    SymmetryClass.CSE: F(11, 41),
    SymmetryClass.ORTHOGONAL: F(23, 39),
    SymmetryClass.SYMPLECTIC: F(7, 15),
}
# large-q coefficients of 1/q**k, as far as they are tabulated
REFERENCE_SERIES = {
    SymmetryClass.UNITARY: [1, 0, -2, 0, 2, 0, -2],
    SymmetryClass.COE: [1, 0, -2, 0, -2, 0, 14],
    SymmetryClass.CSE: [1, 0, -2, 0, -2, 0, -2],
    SymmetryClass.ORTHOGONAL: [1, 0, -2, 0, 0, 6, -4],
    SymmetryClass.SYMPLECTIC: [1, 0, -2, 0, 0, -2, 0, 4],
}
# approximate qubit diffusion constants
REFERENCE_D = {
    SymmetryClass.UNITARY: 0.32,
    SymmetryClass.COE: 0.31,
    SymmetryClass.CSE: 0.22,
    SymmetryClass.ORTHOGONAL: 0.31,
    SymmetryClass.SYMPLECTIC: 0.31,
}


def _num(x: Fraction) -> dict:
    return {"exact": str(x), "value": float(x)}


def _walk(w) -> dict:
    return {k: _num(getattr(w, k)) for k in ("p", "alpha", "v_B", "D0", "D")}


def theory_report(cls, q: int = 2, series: int | None = None) -> dict:
    """Exact drift/diffusion of the edge walk of ``cls`` at local dimension ``q``."""
    cls = SymmetryClass.parse(cls)
    vb = closed_form_vb(cls, q)
    out = {
        "class": cls.value,
        "q": int(q),
        "v_B": _num(vb),
        "p": _num(closed_form_p(cls, q)),
        "walk": _walk(class_walk(cls, q)),
    }
    if cls in (SymmetryClass.COE, SymmetryClass.CSE):
        p1, p2 = recipe_probs(cls, q)
        out["recipe"] = {"p1": _num(p1), "p2": _num(p2), **_walk(persistent_walk(p1, p2))}
        if cls is SymmetryClass.CSE:
            out["walk_note"] = "p2 back-solved from the closed-form p; 'recipe' is the alternative derivation"
    if cls in (SymmetryClass.ORTHOGONAL, SymmetryClass.SYMPLECTIC):
        sides = {}
        for side in ("right", "left"):
            st = evenodd_chain(cls, q, side)
            v, D = chain_front(st.probs)
            sides[side] = {
                "p_e": _num(st.p_e),
                "p_o": _num(st.p_o),
                "p": _num(st.p),
                "continuum": _walk(four_state_front(st.probs)),
                "chain_exact": {"v_B": _num(v), "D": _num(D)},
                "joint": {"->".join(k): str(val) for k, val in st.joint.items()},
            }
        out["edges"] = sides
    if q == 2:
        P, steps, _ = mixing_chain(cls, "right")
        v, D = markov_front(P, steps)
        out["kernel_chain"] = {"v_B": _num(v), "D": _num(D)}
        ref = REFERENCE_VB[cls]
        out["reference_v_B"] = {**_num(ref), "match": vb == ref}
        out["reference_D"] = REFERENCE_D[cls]
    if series is not None:
        coeffs = series_vb(cls, series)
        ref = REFERENCE_SERIES[cls]
        k = min(len(ref), len(coeffs))
        out["series"] = {
            "coefficients": [str(c) for c in coeffs],
            "reference": ref[:k],
            "match": all(coeffs[i] == ref[i] for i in range(k)),
        }
    return out


def repro_table(qs=(2, 3, 4, 5, 6), large_q: int = 100) -> dict:
    """v_B for every class across ``qs``, with reference checks and flags."""
    rows = []
    mismatches = []
    for cls in SymmetryClass:
        coeffs = series_vb(cls, 8)
        ref = REFERENCE_SERIES[cls]
        series_ok = all(coeffs[i] == ref[i] for i in range(len(ref)))
        row = {
            "class": cls.value,
            "v_B": {str(q): _num(closed_form_vb(cls, q)) for q in qs},
            "v_B_large_q": float(closed_form_vb(cls, large_q)),
            "reference_q2": str(REFERENCE_VB[cls]),
            "series": [str(c) for c in coeffs],
            "series_reference": ref,
            "series_match": series_ok,
        }
        q2_ok = closed_form_vb(cls, 2) == REFERENCE_VB[cls]
        row["q2_match"] = q2_ok
        if cls is SymmetryClass.CSE:
            alt = persistent_walk(*recipe_probs(cls, 2)).v_B
            row["alternative_q2"] = {**_num(alt), "flag": "alternative derivation"}
        if not (q2_ok and series_ok):
            mismatches.append(cls.value)
        rows.append(row)
    return {"rows": rows, "mismatches": mismatches}


def format_table(table: dict) -> str:
    """Plain-text rendering of :func:`repro_table`."""
    rows = table["rows"]
    qs = list(rows[0]["v_B"])
    head = f"{'class':<11}" + "".join(f"{'q=' + q:>22}" for q in qs) + "   large-q series"
    lines = [head]
    for r in rows:
        cells = "".join(f"{r['v_B'][q]['exact'] + ' ' + format(r['v_B'][q]['value'], '.4f'):>22}" for q in qs)
        terms = []
        for k, c in enumerate(r["series"]):
            c = Fraction(c)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            terms.append(f"{sign}{abs(c)}" + (f"/q^{k}" if k else ""))
        flag = "" if r["q2_match"] and r["series_match"] else "  MISMATCH"
        lines.append(f"{r['class']:<11}{cells}   {' '.join(terms)}{flag}")
        if "alternative_q2" in r:
            a = r["alternative_q2"]
            lines.append(f"{'':<11}{a['exact'] + ' ' + format(a['value'], '.4f'):>22}   ({a['flag']})")
    return "\n".join(lines)
