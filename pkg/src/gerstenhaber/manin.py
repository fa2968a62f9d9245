"""Quadratic Lie algebras, Manin quasi-triples and the quasi-Lie bialgebroids they induce."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .algebroid import LieAlgebroid, schouten, tangent_algebroid, validate_algebroid
from .differentials import (AlmostDifferential, QuasiLieBialgebroid, base_field, check_qlb)
from .exterior import Frame, Multivector, components, vector_field
from .report import Report, VerificationError
from .scalars import Polynomial, VarSet

F0 = Fraction(0)


def _vec(v, n):
    v = [Fraction(x) for x in v]
    if len(v) != n:
        raise ValueError(f"vector {v} does not have length {n}")
    return v


def solve(M: Sequence[Sequence], b: Sequence) -> list:
    """Solve M x = b over ℚ (M square, nonsingular) by Gauss-Jordan elimination."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(M, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def inverse(M):
    n = len(M)
    cols = [solve(M, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


class QuadraticLieAlgebra:
    """Lie algebra given by structure constants, with a symmetric pairing.

    ``brackets[(i, j)]`` lists the coordinates of [b_i, b_j]; omitted pairs
    are zero.
    """

    def __init__(self, dim: int, brackets: Mapping[tuple, Sequence], pairing: Sequence[Sequence]):
        self.dim = dim
        table = {}
        for (i, j), v in brackets.items():
            v = _vec(v, dim)
            if i == j:
                if any(v):
                    raise ValueError("[b_i, b_i] must vanish")
                continue
            if i > j:
                i, j, v = j, i, [-x for x in v]
            table[(i, j)] = v
        self.table = table
        self.pairing = [_vec(row, dim) for row in pairing]
        if len(self.pairing) != dim:
            raise ValueError("pairing must be dim x dim")

    def basis_bracket(self, i: int, j: int) -> list:
        if i == j:
            return [F0] * self.dim
        if i < j:
            return list(self.table.get((i, j), [F0] * self.dim))
        return [-x for x in self.table.get((j, i), [F0] * self.dim)]

    def bracket(self, u: Sequence, v: Sequence) -> list:
        out = [F0] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b or i == j:
                    continue
                ab = Fraction(a) * b
                for k, c in enumerate(self.basis_bracket(i, j)):
                    if c:
                        out[k] += ab * c
        return out

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        return sum((Fraction(a) * self.pairing[i][j] * b
                    for i, a in enumerate(u) if a for j, b in enumerate(v) if b), F0)

    def basis(self, i: int) -> list:
        return [Fraction(1) if k == i else F0 for k in range(self.dim)]

    def validate(self) -> Report:
        rep = Report("quadratic-lie-algebra")
        n = self.dim
        B = [self.basis(i) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                rep.add(f"symmetric({i + 1},{j + 1})", self.pairing[i][j] - self.pairing[j][i])
        try:
            inverse(self.pairing)
            rep.add("nondegenerate", 0)
        except ZeroDivisionError:
            rep.add("nondegenerate", "singular")
        for i in range(n):
            for j in range(n):
                for k in range(j, n):
                    r = self.pair(self.bracket(B[i], B[j]), B[k]) + self.pair(B[j], self.bracket(B[i], B[k]))
                    rep.add(f"invariant({i + 1},{j + 1},{k + 1})", r)
        for i, j, k in combinations(range(n), 3):
            jac = [a + b + c for a, b, c in zip(
                self.bracket(B[i], self.bracket(B[j], B[k])),
                self.bracket(B[j], self.bracket(B[k], B[i])),
                self.bracket(B[k], self.bracket(B[i], B[j])))]
            rep.add(f"jacobi({i + 1},{j + 1},{k + 1})", _fmt_vec(jac))
        return rep


def _fmt_vec(v):
    return 0 if not any(v) else "[" + ", ".join(str(x) for x in v) + "]"


class ManinQuasiTriple:
    def __init__(self, d: QuadraticLieAlgebra, g_basis: Sequence[Sequence], h_basis: Sequence[Sequence]):
        if len(g_basis) != len(h_basis) or 2 * len(g_basis) != d.dim:
            raise ValueError("g and h bases must each have dim(d)/2 vectors")
        self.d = d
        self.g_basis = [_vec(v, d.dim) for v in g_basis]
        self.h_basis = [_vec(v, d.dim) for v in h_basis]

    @property
    def m(self) -> int:
        return len(self.g_basis)

    def decompose(self, x):
        """x = Σ a_i e_i + Σ b_i ε^i with a_i = ⟨x, ε^i⟩, b_i = ⟨x, e_i⟩."""
        a = [self.d.pair(x, eps) for eps in self.h_basis]
        b = [self.d.pair(x, e) for e in self.g_basis]
        return a, b


def validate_quasi_triple(T: ManinQuasiTriple) -> Report:
    rep = Report("quasi-triple")
    d, E, H, m = T.d, T.g_basis, T.h_basis, T.m
    rep.extend(d.validate(), "d.")
    for i in range(m):
        for j in range(i, m):
            rep.add(f"isotropic-g({i + 1},{j + 1})", d.pair(E[i], E[j]))
            rep.add(f"isotropic-h({i + 1},{j + 1})", d.pair(H[i], H[j]))
    for i in range(m):
        for j in range(m):
            rep.add(f"dual({i + 1},{j + 1})", d.pair(E[i], H[j]) - (1 if i == j else 0))
    for i in range(m):
        for j in range(i + 1, m):
            _, b = T.decompose(d.bracket(E[i], E[j]))
            rep.add(f"g-closed({i + 1},{j + 1})", _fmt_vec(b))
    h_sub = True
    for i in range(m):
        for j in range(i + 1, m):
            a, _ = T.decompose(d.bracket(H[i], H[j]))
            h_sub = h_sub and not any(a)
    rep.flags["h_is_subalgebra"] = h_sub
    return rep


class QuasiLieBialgebra:
    """(c, F, Ω) on 𝔤 = span(e_1..e_m): c[i][j][k] = c_ij^k, F[i][j][k] = F_i^{jk},
    omega[i][j][k] = Ω^{ijk}."""

    def __init__(self, c, F, omega):
        self.m = len(c)
        self.c = [[[Fraction(x) for x in r] for r in row] for row in c]
        self.F = [[[Fraction(x) for x in r] for r in row] for row in F]
        self.omega = [[[Fraction(x) for x in r] for r in row] for row in omega]

    def __eq__(self, other):
        return (isinstance(other, QuasiLieBialgebra) and self.c == other.c
                and self.F == other.F and self.omega == other.omega)

    def __repr__(self):
        return f"QuasiLieBialgebra(m={self.m})"


class PatternViolation(ValueError):
    pass


def extract_qlb(T: ManinQuasiTriple) -> QuasiLieBialgebra:
    rep = validate_quasi_triple(T)
    if not rep.passed:
        raise VerificationError(rep, "not a Manin quasi-triple")
    d, E, H, m = T.d, T.g_basis, T.h_basis, T.m
    R = range(m)
    c = [[[F0] * m for _ in R] for _ in R]
    F = [[[F0] * m for _ in R] for _ in R]
    om = [[[F0] * m for _ in R] for _ in R]
    for i in R:
        for j in R:
            a, _ = T.decompose(d.bracket(E[i], E[j]))
            c[i][j] = a
    for i in R:
        for j in R:
            a, b = T.decompose(d.bracket(H[i], H[j]))
            for k in R:
                F[k][i][j] = b[k]
                om[i][j][k] = a[k]
    bad = []
    for i in R:
        for j in R:
            a, b = T.decompose(d.bracket(E[i], H[j]))
            for k in R:
                if a[k] != F[i][j][k]:
                    bad.append(f"<[e{i + 1},eps{j + 1}],eps{k + 1}> = {a[k]} but F = {F[i][j][k]}")
                if b[k] != -c[i][k][j]:
                    bad.append(f"<[e{i + 1},eps{j + 1}],e{k + 1}> = {b[k]} but -c = {-c[i][k][j]}")
    for i, j, k in combinations(R, 3):
        v = om[i][j][k]
        for (p, q, r), s in [((j, k, i), 1), ((k, i, j), 1), ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)]:
            if om[p][q][r] != s * v:
                bad.append(f"Omega not alternating at {(i + 1, j + 1, k + 1)}")
    if bad:
        raise PatternViolation("; ".join(bad[:5]))
    b = QuasiLieBialgebra(c, F, om)
    qrep = check_qlb_of_bialgebra(b)
    if not qrep.passed:
        raise VerificationError(qrep, "extracted data fails check_qlb")
    return b


def point_algebroid(c, names=None) -> LieAlgebroid:
    """The Lie algebra with structure constants c as an algebroid over a point."""
    m = len(c)
    vs = VarSet([])
    frame = Frame("algebroid-sections", names or [f"e{i + 1}" for i in range(m)], vs)
    br = {(i, j): c[i][j] for i in range(m) for j in range(i + 1, m) if any(c[i][j])}
    return LieAlgebroid([], frame, [[] for _ in range(m)], br)


def cobracket_sections(A: LieAlgebroid, F) -> list:
    """δe_i = −F(e_i) = −Σ_{j<k} F_i^{jk} e_j∧e_k."""
    m = len(F)
    return [Multivector(A.frame, 2, {(j, k): -F[i][j][k]
                                      for j in range(m) for k in range(j + 1, m)})
            for i in range(m)]


def omega_section(A: LieAlgebroid, om) -> Multivector:
    m = len(om)
    return Multivector(A.frame, 3, {I: om[I[0]][I[1]][I[2]] for I in combinations(range(m), 3)})


def qlb_as_bialgebroid(b: QuasiLieBialgebra) -> QuasiLieBialgebroid:
    A = point_algebroid(b.c)
    delta = AlmostDifferential(A, 2, [], cobracket_sections(A, b.F))
    return QuasiLieBialgebroid(delta, omega_section(A, b.omega))


def bialgebra_of(q: QuasiLieBialgebroid) -> QuasiLieBialgebra:
    """Inverse of :func:`qlb_as_bialgebroid` for structures over a point."""
    A = q.algebroid
    if A.base_dim:
        raise ValueError("base must be a point")
    m = A.rank
    R = range(m)
    c = [[[A.structure_coefs(i, j)[k].constant_value() for k in R] for j in R] for i in R]
    F = [[[-q.delta.delta_e[i].coefficient((j, k)).constant_value() if j != k else F0
           for k in R] for j in R] for i in R]
    om = [[[q.omega.coefficient((i, j, k)).constant_value() if len({i, j, k}) == 3 else F0
            for k in R] for j in R] for i in R]
    return QuasiLieBialgebra(c, F, om)


def check_qlb_of_bialgebra(b: QuasiLieBialgebra) -> Report:
    q = qlb_as_bialgebroid(b)
    return check_qlb(q.delta, q.omega)


def reassemble(b: QuasiLieBialgebra) -> ManinQuasiTriple:
    """𝔡 = 𝔤 ⊕ 𝔤* in the basis (e_1..e_m, ε^1..ε^m) with the canonical pairing."""
    m = b.m
    R = range(m)
    br = {}
    for i in R:
        for j in R:
            if i < j:
                br[(i, j)] = list(b.c[i][j]) + [F0] * m
                br[(m + i, m + j)] = list(b.omega[i][j]) + [b.F[k][i][j] for k in R]
            br[(i, m + j)] = [b.F[i][j][k] for k in R] + [-b.c[i][k][j] for k in R]
    pairing = [[Fraction(1) if abs(i - j) == m else F0 for j in range(2 * m)] for i in range(2 * m)]
    d = QuadraticLieAlgebra(2 * m, br, pairing)
    E = [d.basis(i) for i in R]
    H = [d.basis(m + i) for i in R]
    return ManinQuasiTriple(d, E, H)


def double(g: QuadraticLieAlgebra) -> ManinQuasiTriple:
    """𝔤⊕𝔤 with pairing K ⊕ (−K), diagonal 𝔤 and e_i = (u_i, u_i), ε^i = ½(u^i, −u^i).

    u^i is the K-dual basis; for a K-orthonormal basis with signs this is
    η_i u_i.
    """
    rep = Report("double-input")
    m = g.dim
    for i in range(m):
        for j in range(i + 1, m):
            rep.add(f"symmetric({i + 1},{j + 1})", g.pairing[i][j] - g.pairing[j][i])
    B = [g.basis(i) for i in range(m)]
    for i in range(m):
        for j in range(m):
            for k in range(j, m):
                rep.add(f"invariant({i + 1},{j + 1},{k + 1})",
                        g.pair(g.bracket(B[i], B[j]), B[k]) + g.pair(B[j], g.bracket(B[i], B[k])))
    if not rep.passed:
        raise ValueError("K is not symmetric and ad-invariant:\n" + rep.table())
    try:
        Kinv = inverse(g.pairing)
    except ZeroDivisionError:
        raise ValueError("K is degenerate") from None
    br = {}
    for i in range(m):
        for j in range(i + 1, m):
            v = g.basis_bracket(i, j)
            if any(v):
                br[(i, j)] = v + [F0] * m
                br[(m + i, m + j)] = [F0] * m + v
    pairing = [[F0] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            pairing[i][j] = g.pairing[i][j]
            pairing[m + i][m + j] = -g.pairing[i][j]
    d = QuadraticLieAlgebra(2 * m, br, pairing)
    half = Fraction(1, 2)
    E = [B[i] + B[i] for i in range(m)]
    H = [[half * x for x in Kinv[i]] + [-half * x for x in Kinv[i]] for i in range(m)]
    return ManinQuasiTriple(d, E, H)


def so3() -> QuadraticLieAlgebra:
    """so(3) with [u_1,u_2] = u_3 (cyclic) and K = identity."""
    br = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (2, 0): [0, 1, 0]}
    return QuadraticLieAlgebra(3, br, [[1 if i == j else 0 for j in range(3)] for i in range(3)])


def sl2_triple() -> ManinQuasiTriple:
    """Standard Manin triple of 𝔰𝔩₂ inside 𝔰𝔩₂⊕𝔰𝔩₂ with pairing tr ⊕ (−tr).

    𝔤 is the diagonal (H,H), (E,E), (F,F); 𝔥 is spanned by ¼(H,−H), −(0,F), (E,0).
    """
    # sl2 basis H, E, F: [H,E] = 2E, [H,F] = −2F, [E,F] = H; trace form
    g = QuadraticLieAlgebra(3, {(0, 1): [0, 2, 0], (0, 2): [0, 0, -2], (1, 2): [1, 0, 0]},
                            [[2, 0, 0], [0, 0, 1], [0, 1, 0]])
    T = double(g)
    q = Fraction(1, 4)
    H = [[q, 0, 0, -q, 0, 0], [0, 0, 0, 0, 0, -1], [0, 1, 0, 0, 0, 0]]
    return ManinQuasiTriple(T.d, T.g_basis, H)


# -- actions -------------------------------------------------------------------

class PolynomialAction:
    """Vector fields on ℝⁿ, one per basis element of an acting Lie algebra.

    The convention is that u ↦ u_S is a Lie algebra homomorphism.
    """

    def __init__(self, algebra: QuadraticLieAlgebra, coords: Sequence[str],
                 fields: Sequence[Multivector], varset: VarSet | None = None):
        self.algebra = algebra
        self.coords = tuple(coords)
        params = [] if varset is None else [v for v in varset.names if v not in self.coords]
        self.tangent = tangent_algebroid(self.coords, params)
        self.frame = self.tangent.frame
        if len(fields) != algebra.dim:
            raise ValueError(f"need {algebra.dim} vector fields")
        self.fields = [f.reframe(self.frame) if f.frame != self.frame else f for f in fields]
        for f in self.fields:
            if not f.is_zero() and f.degree != 1:
                raise ValueError("action fields must be vector fields")

    @property
    def varset(self):
        return self.frame.varset

    def field_of(self, u: Sequence) -> Multivector:
        out = Multivector.zero(self.frame, 1)
        for a, X in zip(u, self.fields):
            if a:
                out = out + X.scale(Fraction(a))
        return out

    def rebase(self, vectors: Sequence[Sequence], algebra: QuadraticLieAlgebra) -> "PolynomialAction":
        """The same action for the basis ``vectors`` of the acting algebra."""
        return PolynomialAction(algebra, self.coords, [self.field_of(v) for v in vectors], self.varset)


def validate_action(act: PolynomialAction) -> Report:
    rep = Report("action")
    g = act.algebra
    n = g.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = act.field_of(g.basis_bracket(i, j))
            rhs = schouten(act.tangent, act.fields[i], act.fields[j])
            rep.add(f"hom({i + 1},{j + 1})", lhs - rhs)
    return rep


def adjoint_action(d: QuadraticLieAlgebra, coords: Sequence[str] | None = None) -> PolynomialAction:
    """u_S = −ad_u as a linear vector field on 𝔡 ≅ ℝ^dim.

    The bracket of linear fields y ↦ Ay, y ↦ By is y ↦ (BA − AB)y, so the
    minus sign is what makes u ↦ u_S a homomorphism.
    """
    coords = list(coords) if coords else [f"y{i + 1}" for i in range(d.dim)]
    tan = tangent_algebroid(coords)
    vs = tan.varset
    ys = [Polynomial.variable(vs, c) for c in coords]
    fields = []
    for i in range(d.dim):
        comps = [Polynomial.zero(vs) for _ in range(d.dim)]
        for b in range(d.dim):
            for a, cf in enumerate(d.basis_bracket(i, b)):
                if cf:
                    comps[a] = comps[a] - ys[b].scale(cf)
        fields.append(vector_field(tan.frame, comps))
    return PolynomialAction(d, coords, fields)


def coadjoint_translation_action(b: QuasiLieBialgebra, coords: Sequence[str] | None = None) -> PolynomialAction:
    """Action of 𝔤 ⋉ 𝔤* on 𝔤* ≅ ℝ^m for a bialgebra with F = 0 and Ω = 0.

    (e_i)_S = Σ_{j,k} c_{ik}^j y_j ∂_k (coadjoint), (ε^i)_S = ∂_i (translation).
    """
    m = b.m
    if any(b.F[i][j][k] for i in range(m) for j in range(m) for k in range(m)):
        raise ValueError("translation action needs a vanishing cobracket")
    coords = list(coords) if coords else [f"y{i + 1}" for i in range(m)]
    tan = tangent_algebroid(coords)
    vs = tan.varset
    ys = [Polynomial.variable(vs, c) for c in coords]
    fields = []
    for i in range(m):
        comps = [Polynomial.zero(vs) for _ in range(m)]
        for k in range(m):
            for j in range(m):
                cf = b.c[i][k][j]
                if cf:
                    comps[k] = comps[k] + ys[j].scale(cf)
        fields.append(vector_field(tan.frame, comps))
    for i in range(m):
        fields.append(vector_field(tan.frame, [Polynomial.constant(vs, int(a == i)) for a in range(m)]))
    return PolynomialAction(reassemble(b).d, coords, fields)


def transformation_algebroid(c, act_g: Sequence[Multivector], coords, varset=None) -> LieAlgebroid:
    """𝔤 ⋉ ℝⁿ: constant structure functions c, anchor given by the 𝔤-fields."""
    m = len(c)
    vs = act_g[0].frame.varset if act_g else (varset or VarSet(coords))
    frame = Frame("algebroid-sections", [f"e{i + 1}" for i in range(m)], vs)
    anchor = [components(X) if not X.is_zero() else [Polynomial.zero(vs)] * len(coords) for X in act_g]
    br = {(i, j): c[i][j] for i in range(m) for j in range(i + 1, m) if any(c[i][j])}
    return LieAlgebroid(coords, frame, anchor, br)


def transformation_qlb(b: QuasiLieBialgebra, act: PolynomialAction):
    """δx_j = Σ_i (ε^i)_S(x_j) e_i, δe_i = −F(e_i), Ω from b.

    ``act`` must act by the reassembled double of ``b``: its fields are
    indexed by (e_1..e_m, ε^1..ε^m).  Only the homomorphism property is
    assumed, and check_qlb verifies the result on each input.  Returns
    ``(qlb, report)``.
    """
    m = b.m
    T = reassemble(b)
    if act.algebra.dim != 2 * m:
        raise ValueError("action must be by the double of b (2m fields)")
    act_check = Report("action")
    for i in range(2 * m):
        for j in range(i + 1, 2 * m):
            lhs = act.field_of(T.d.basis_bracket(i, j))
            rhs = schouten(act.tangent, act.fields[i], act.fields[j])
            act_check.add(f"hom({i + 1},{j + 1})", lhs - rhs)
    if not act_check.passed:
        raise VerificationError(act_check, "action is not a homomorphism of the double")
    A = transformation_algebroid(b.c, act.fields[:m], act.coords)
    alg = validate_algebroid(A)
    n = len(act.coords)
    eps = [components(act.fields[m + i]) for i in range(m)]
    dx = [Multivector(A.frame, 1, {(i,): eps[i][j] for i in range(m)}) for j in range(n)]
    delta = AlmostDifferential(A, 2, dx, cobracket_sections(A, b.F))
    q = QuasiLieBialgebroid(delta, omega_section(A, b.omega))
    rep = Report("transformation-qlb")
    rep.extend(alg, "algebroid.")
    rep.extend(check_qlb(delta, q.omega))
    return q, rep


def pi_S(b: QuasiLieBialgebra, act: PolynomialAction) -> dict:
    """Π_S(dx_a, dx_b) = −Σ_i (ε^i)_S^a (e_i)_S^b on all ordered pairs."""
    m = b.m
    n = len(act.coords)
    e = [components(act.fields[i]) for i in range(m)]
    eps = [components(act.fields[m + i]) for i in range(m)]
    zero = Polynomial.zero(act.varset)
    out = {}
    for a in range(n):
        for c in range(n):
            v = zero
            for i in range(m):
                v = v - eps[i][a] * e[i][c]
            out[(a, c)] = v
    return out


def compare_base_field_pi_S(q: QuasiLieBialgebroid, b: QuasiLieBialgebra, act: PolynomialAction) -> Report:
    """base_field(δ) against the ordered-pair table of Π_S."""
    rep = Report("base-field-vs-pi_S")
    table = pi_S(b, act)
    field = base_field(q.delta)
    for (a, c), v in table.items():
        rep.add(f"pi({a + 1},{c + 1})", field.coefficient((a, c)).embed(v.varset) - v
                if a != c else v)
    return rep
