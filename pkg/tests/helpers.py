"""Shared fixtures: small algebroids, quasi-Lie bialgebroids and hypothesis strategies."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from gerstenhaber.algebroid import LieAlgebroid, tangent_algebroid
from gerstenhaber.differentials import AlmostDifferential, QuasiLieBialgebroid, coboundary
from gerstenhaber.algebroid import schouten
from gerstenhaber.exterior import Frame, Multivector
from gerstenhaber.scalars import Polynomial, VarSet, parse_scalar


def sgn(e):
    """(−1)^e for any integer e."""
    return -1 if e % 2 else 1


def P(text, vs):
    return parse_scalar(text, vs)


def so3_action(params=()):
    """so(3) acting on ℝ³ by infinitesimal rotations; [e1,e2] = e3 cyclically."""
    vs = VarSet(["x1", "x2", "x3", *params])
    fr = Frame("algebroid-sections", ["e1", "e2", "e3"], vs)
    anchor = [[P(a, vs) for a in row] for row in
              (("0", "x3", "-x2"), ("-x3", "0", "x1"), ("x2", "-x1", "0"))]
    one, zero = P("1", vs), P("0", vs)
    br = {(0, 1): [zero, zero, one], (0, 2): [zero, -one, zero], (1, 2): [one, zero, zero]}
    return LieAlgebroid(["x1", "x2", "x3"], fr, anchor, br)


def aff1_action(params=()):
    """ax+b algebra on ℝ: e1 ↦ ∂x, e2 ↦ x∂x, [e1,e2] = e1."""
    vs = VarSet(["x", *params])
    fr = Frame("algebroid-sections", ["e1", "e2"], vs)
    anchor = [[P("1", vs)], [P("x", vs)]]
    return LieAlgebroid(["x"], fr, anchor, {(0, 1): [P("1", vs), P("0", vs)]})


def lie_poisson_cotangent(params=()):
    """T*ℝ³ for π = −x3∂12 + x2∂13 − x1∂23: anchor π♯, bracket [dx_i,dx_j] = d π^{ij}."""
    vs = VarSet(["x1", "x2", "x3", *params])
    fr = Frame("algebroid-sections", ["dx1", "dx2", "dx3"], vs)
    pi = {(0, 1): P("-x3", vs), (0, 2): P("x2", vs), (1, 2): P("-x1", vs)}
    zero = P("0", vs)

    def pij(i, j):
        if i == j:
            return zero
        return pi[(i, j)] if i < j else -pi[(j, i)]

    anchor = [[pij(i, j) for j in range(3)] for i in range(3)]
    br = {}
    for i, j in combinations(range(3), 2):
        br[(i, j)] = [pij(i, j).diff(f"x{k + 1}") for k in range(3)]
    return LieAlgebroid(["x1", "x2", "x3"], fr, anchor, br)


def rank_one_on_plane(params=()):
    """Line bundle over ℝ² with anchor e ↦ x1∂2."""
    vs = VarSet(["x1", "x2", *params])
    fr = Frame("algebroid-sections", ["e"], vs)
    return LieAlgebroid(["x1", "x2"], fr, [[P("0", vs), P("x1", vs)]], {})


ALGEBROIDS = {
    "TR2": lambda params=(): tangent_algebroid(2, params),
    "TR3": lambda params=(): tangent_algebroid(3, params),
    "so3-action": so3_action,
    "aff1-action": aff1_action,
    "lie-poisson": lie_poisson_cotangent,
    "line-on-plane": rank_one_on_plane,
}


# -- hypothesis strategies ----------------------------------------------------------

coefficients = st.builds(Fraction, st.integers(-4, 4), st.sampled_from([1, 1, 1, 2, 3]))


@st.composite
def polynomials(draw, vs: VarSet, max_terms=3, max_deg=2, names=None):
    """Random polynomial; ``names`` restricts which variables may appear."""
    allowed = [vs.index(n) for n in (names if names is not None else vs.names)]
    nterms = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(nterms):
        e = [0] * len(vs)
        budget = draw(st.integers(0, max_deg))
        for _ in range(budget):
            if allowed:
                e[draw(st.sampled_from(allowed))] += 1
        e = tuple(e)
        terms[e] = terms.get(e, 0) + draw(coefficients)
    return Polynomial(vs, terms)


@st.composite
def multivectors(draw, frame: Frame, degree: int, max_terms=3, max_deg=2, names=None):
    if degree > len(frame):
        return Multivector.zero(frame, degree)
    idxs = list(combinations(range(len(frame)), degree))
    chosen = draw(st.lists(st.sampled_from(idxs), max_size=max_terms, unique=True))
    coeffs = {I: draw(polynomials(frame.varset, 2, max_deg, names)) for I in chosen}
    return Multivector(frame, degree, coeffs)


@st.composite
def almost_differentials(draw, A: LieAlgebroid, k: int, max_deg=2, names=None):
    if k == 0:
        dx = [Multivector.zero(A.frame, -1) for _ in range(A.base_dim)]
    else:
        dx = [draw(multivectors(A.frame, k - 1, 2, max_deg, names)) for _ in range(A.base_dim)]
    de = [draw(multivectors(A.frame, k, 2, max_deg, names)) for _ in range(A.rank)]
    return AlmostDifferential(A, k, dx, de)


def coboundary_qlb(A: LieAlgebroid, t: Multivector) -> QuasiLieBialgebroid:
    """(ad t, ½⟦t,t⟧), the twist of the zero structure by t."""
    return QuasiLieBialgebroid(coboundary(A, t), schouten(A, t, t).scale(Fraction(1, 2)))


# -- quasi-Lie bialgebroids -----------------------------------------------------------

def tangent_frames(coords, params=()):
    vs = VarSet([*coords, *params])
    T = Frame.tangent(vs, coords)
    return T, T.dual()


def bivector_from_matrix(frame, M):
    n = len(frame)
    return Multivector(frame, 2, {(i, j): parse_scalar(str(M[i][j]).replace("**", "^"), frame.varset)
                                  for i in range(n) for j in range(i + 1, n) if M[i][j] != 0})


def symplectic_r4(sign=-1):
    """π = ∂12 + ∂34 + (x3²+x1x2)∂13 on ℝ⁴ and φ = sign·d(ω), ω_ij = (π^{-1})_ij."""
    import sympy as sp
    x = sp.symbols("x1 x2 x3 x4")
    f = x[2] ** 2 + x[0] * x[1]
    M = sp.zeros(4, 4)
    for (i, j), v in {(0, 1): 1, (2, 3): 1, (0, 2): f}.items():
        M[i, j], M[j, i] = v, -v
    W = sp.simplify(M.inv())
    T, D = tangent_frames(["x1", "x2", "x3", "x4"])
    pi = bivector_from_matrix(T, M.tolist())
    omega = Multivector(D, 2, {(i, j): parse_scalar(str(sp.expand(W[i, j])).replace("**", "^"), D.varset)
                               for i in range(4) for j in range(i + 1, 4) if W[i, j] != 0})
    from gerstenhaber.exterior import exterior_derivative
    return pi, exterior_derivative(omega).scale(sign)


def twisted_r3():
    from gerstenhaber.hamiltonian import twisted_poisson_qlb
    T, D = tangent_frames(["x1", "x2", "x3"])
    pi = Multivector.monomial(T, (0, 1), 1)
    phi = Multivector.monomial(D, (0, 1, 2), 1)
    return twisted_poisson_qlb(pi, phi)[0]


def double_so3_qlb():
    from gerstenhaber.manin import double, extract_qlb, qlb_as_bialgebroid, so3
    return qlb_as_bialgebroid(extract_qlb(double(so3())))


def lie_poisson_transformation():
    """so(3) ⋉ so(3)* acting on ℝ³ by coadjoint rotations and translations."""
    from gerstenhaber.manin import (QuasiLieBialgebra, coadjoint_translation_action, double,
                                    extract_qlb, so3, transformation_qlb)
    c = extract_qlb(double(so3())).c
    zero3 = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    b0 = QuasiLieBialgebra(c, zero3, zero3)
    act = coadjoint_translation_action(b0)
    q, _ = transformation_qlb(b0, act)
    return b0, act, q


def sl2_triple_qlb():
    from gerstenhaber.manin import extract_qlb, qlb_as_bialgebroid, sl2_triple
    return qlb_as_bialgebroid(extract_qlb(sl2_triple()))
