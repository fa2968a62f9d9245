"""JSON forms of the symbolic objects.

Indices in JSON are 1-based (``"idx": [1, 2]`` is e_1∧e_2; bracket entries
use ``"i": 1, "j": 2``).  Coefficients are strings in the coefficient
grammar.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebroid import LieAlgebroid
from .differentials import AlmostDifferential, QuasiLieBialgebroid
from .exterior import Frame, Multivector
from .manin import ManinQuasiTriple, PolynomialAction, QuadraticLieAlgebra, QuasiLieBialgebra
from .scalars import Polynomial, VarSet, parse_scalar


class SchemaError(ValueError):
    pass


def _need(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{where}: missing field {key!r}")
    return d[key]


def canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_coef(text, vs: VarSet) -> Polynomial:
    if isinstance(text, bool):
        raise SchemaError("boolean is not a coefficient")
    if isinstance(text, int):
        return Polynomial.constant(vs, text)
    if not isinstance(text, str):
        raise SchemaError(f"coefficient must be a string or integer, got {text!r}")
    return parse_scalar(text, vs)


def rational(x) -> Fraction:
    if isinstance(x, bool):
        raise SchemaError("boolean is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        p = parse_scalar(x, VarSet([]))
        return p.constant_value()
    raise SchemaError(f"rational must be an integer or string, got {x!r}")


def fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- multivectors ----------------------------------------------------------------

def multivector_to_json(P: Multivector) -> dict:
    return {
        "frame": P.frame.kind,
        "degree": P.degree,
        "terms": [{"idx": [i + 1 for i in I], "coef": str(c)} for I, c in P.terms()],
    }


def multivector_from_json(d: dict, frame: Frame) -> Multivector:
    deg = _need(d, "degree", "multivector")
    kind = d.get("frame")
    if kind is not None and kind != frame.kind and kind != list(frame.names):
        raise SchemaError(f"multivector declared on frame {kind!r}, expected {frame.kind!r}")
    terms = {}
    for t in d.get("terms", []):
        idx = tuple(i - 1 for i in _need(t, "idx", "term"))
        if len(idx) != deg:
            raise SchemaError(f"term index {t['idx']} does not have degree {deg}")
        if any(i < 0 or i >= len(frame) for i in idx):
            raise SchemaError(f"term index {t['idx']} out of range")
        c = parse_coef(_need(t, "coef", "term"), frame.varset)
        P = Multivector.monomial(frame, idx, c) if len(set(idx)) == len(idx) else None
        if P is None:
            continue
        for K, v in P.coeffs.items():
            terms[K] = terms[K] + v if K in terms else v
    return Multivector(frame, deg, terms)


# -- algebroids -------------------------------------------------------------------

def algebroid_to_json(A: LieAlgebroid) -> dict:
    params = [v for v in A.varset.names if v not in A.coords]
    out = {
        "base_dim": A.base_dim,
        "rank": A.rank,
        "coords": list(A.coords),
        "frame": list(A.frame.names),
        "anchor": [[str(a) for a in row] for row in A.anchor],
        "brackets": [{"i": i + 1, "j": j + 1, "coefs": [str(c) for c in coefs]}
                     for (i, j), coefs in sorted(A.structure.items())
                     if any(not c.is_zero() for c in coefs)],
    }
    if params:
        out["params"] = params
    return out


def algebroid_from_json(d: dict) -> LieAlgebroid:
    coords = list(_need(d, "coords", "algebroid"))
    names = list(_need(d, "frame", "algebroid"))
    params = list(d.get("params", []))
    n = d.get("base_dim", len(coords))
    s = d.get("rank", len(names))
    if n != len(coords) or s != len(names):
        raise SchemaError("base_dim/rank do not match coords/frame")
    vs = VarSet(coords + params)
    frame = Frame("algebroid-sections", names, vs)
    anchor_raw = _need(d, "anchor", "algebroid")
    if len(anchor_raw) != s or any(len(r) != n for r in anchor_raw):
        raise SchemaError(f"anchor must be {s} rows of {n} entries")
    anchor = [[parse_coef(a, vs) for a in row] for row in anchor_raw]
    br = {}
    for b in d.get("brackets", []):
        i, j = _need(b, "i", "bracket") - 1, _need(b, "j", "bracket") - 1
        if not (0 <= i < s and 0 <= j < s):
            raise SchemaError(f"bracket index out of range: {b}")
        coefs = [parse_coef(c, vs) for c in _need(b, "coefs", "bracket")]
        if len(coefs) != s:
            raise SchemaError(f"bracket ({i + 1},{j + 1}) needs {s} coefficients")
        key = (min(i, j), max(i, j))
        if i > j:
            coefs = [-c for c in coefs]
        if key in br:
            raise SchemaError(f"bracket ({key[0] + 1},{key[1] + 1}) given twice")
        if i != j:
            br[key] = coefs
    return LieAlgebroid(coords, frame, anchor, br)


# -- differentials ----------------------------------------------------------------

def differential_to_json(delta: AlmostDifferential, with_algebroid: bool = True) -> dict:
    out = {
        "degree": delta.degree,
        "delta_x": [multivector_to_json(p) for p in delta.delta_x],
        "delta_e": [multivector_to_json(p) for p in delta.delta_e],
    }
    if with_algebroid:
        out["algebroid"] = algebroid_to_json(delta.algebroid)
    return out


def differential_from_json(d: dict, A: LieAlgebroid | None = None) -> AlmostDifferential:
    if A is None:
        A = algebroid_from_json(_need(d, "algebroid", "differential"))
    k = _need(d, "degree", "differential")
    dx = [multivector_from_json(p, A.frame) for p in _need(d, "delta_x", "differential")]
    de = [multivector_from_json(p, A.frame) for p in _need(d, "delta_e", "differential")]
    if len(dx) != A.base_dim or len(de) != A.rank:
        raise SchemaError(f"need {A.base_dim} delta_x and {A.rank} delta_e entries")
    return AlmostDifferential(A, k, dx, de)


def qlb_to_json(q: QuasiLieBialgebroid) -> dict:
    out = differential_to_json(q.delta)
    out["omega"] = multivector_to_json(q.omega)
    return out


def qlb_from_json(d: dict) -> QuasiLieBialgebroid:
    delta = differential_from_json(d)
    omega = multivector_from_json(_need(d, "omega", "qlb"), delta.algebroid.frame)
    return QuasiLieBialgebroid(delta, omega)


# -- Lie algebras ------------------------------------------------------------------

def quadratic_to_json(g: QuadraticLieAlgebra) -> dict:
    return {
        "dim": g.dim,
        "brackets": [{"i": i + 1, "j": j + 1, "coefs": [fmt_rational(c) for c in v]}
                     for (i, j), v in sorted(g.table.items()) if any(v)],
        "pairing": [[fmt_rational(c) for c in row] for row in g.pairing],
    }


def quadratic_from_json(d: dict) -> QuadraticLieAlgebra:
    dim = _need(d, "dim", "lie algebra")
    br = {}
    for b in d.get("brackets", []):
        i, j = _need(b, "i", "bracket") - 1, _need(b, "j", "bracket") - 1
        if not (0 <= i < dim and 0 <= j < dim):
            raise SchemaError(f"bracket index out of range: {b}")
        br[(i, j)] = [rational(c) for c in _need(b, "coefs", "bracket")]
    pairing = [[rational(c) for c in row] for row in _need(d, "pairing", "lie algebra")]
    return QuadraticLieAlgebra(dim, br, pairing)


def triple_to_json(T: ManinQuasiTriple) -> dict:
    out = quadratic_to_json(T.d)
    out["g_basis"] = [[fmt_rational(c) for c in v] for v in T.g_basis]
    out["h_basis"] = [[fmt_rational(c) for c in v] for v in T.h_basis]
    return out


def triple_from_json(d: dict) -> ManinQuasiTriple:
    g = quadratic_from_json(d)
    E = [[rational(c) for c in v] for v in _need(d, "g_basis", "quasi-triple")]
    H = [[rational(c) for c in v] for v in _need(d, "h_basis", "quasi-triple")]
    return ManinQuasiTriple(g, E, H)


def bialgebra_to_json(b: QuasiLieBialgebra) -> dict:
    m = b.m
    R = range(m)
    return {
        "dim": m,
        "c": [{"i": i + 1, "j": j + 1, "coefs": [fmt_rational(x) for x in b.c[i][j]]}
              for i in R for j in R if i < j and any(b.c[i][j])],
        "F": [{"i": i + 1, "j": j + 1, "k": k + 1, "value": fmt_rational(b.F[i][j][k])}
              for i in R for j in R for k in R if j < k and b.F[i][j][k]],
        "omega": [{"i": i + 1, "j": j + 1, "k": k + 1, "value": fmt_rational(b.omega[i][j][k])}
                  for i in R for j in R for k in R if i < j < k and b.omega[i][j][k]],
    }


def action_from_json(d, algebra: QuadraticLieAlgebra) -> PolynomialAction:
    from .manin import adjoint_action
    if d == "adjoint" or (isinstance(d, dict) and d.get("kind") == "adjoint"):
        coords = d.get("coords") if isinstance(d, dict) else None
        return adjoint_action(algebra, coords)
    coords = list(_need(d, "coords", "action"))
    params = list(d.get("params", []))
    vs = VarSet(coords + params)
    frame = Frame.tangent(vs, coords)
    fields = [multivector_from_json(f, frame) for f in _need(d, "fields", "action")]
    return PolynomialAction(algebra, coords, fields, vs)
