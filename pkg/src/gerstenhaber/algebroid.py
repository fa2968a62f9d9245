"""Lie algebroids over coordinate patches and their Schouten bracket."""

from __future__ import annotations

from typing import Mapping, Sequence

from .exterior import (Frame, FrameMismatch, Multivector, insert, substitute_slot,
                       vector_field, wedge_all, merge_sign)
from .report import Report
from .scalars import Polynomial, VarSet


class LieAlgebroid:
    """Rank-s algebroid over ℝⁿ with polynomial anchor and structure functions.

    ``anchor[i][j]`` is the ∂x_j component of ρ(e_i); ``structure[(i, j)]``
    for i < j is the list of coefficients of ⟦e_i, e_j⟧.  Variables of the
    varset that are not coordinates (e.g. a time parameter) are constants
    for the anchor.
    """

    def __init__(self, coords: Sequence[str], frame: Frame,
                 anchor: Sequence[Sequence[Polynomial]],
                 structure: Mapping[tuple, Sequence[Polynomial]] | None = None):
        vs = frame.varset
        self.coords = tuple(coords)
        for c in self.coords:
            vs.index(c)
        self.frame = frame
        s, n = len(frame), len(self.coords)
        if len(anchor) != s or any(len(row) != n for row in anchor):
            raise ValueError(f"anchor must be a {s}x{n} matrix")
        self.anchor = tuple(tuple(_poly(vs, a) for a in row) for row in anchor)
        table = {}
        for (i, j), coefs in (structure or {}).items():
            if len(coefs) != s:
                raise ValueError(f"bracket [{i},{j}] needs {s} coefficients")
            coefs = [_poly(vs, c) for c in coefs]
            if i == j:
                if any(not c.is_zero() for c in coefs):
                    raise ValueError(f"[e{i},e{i}] must vanish")
                continue
            if i > j:
                i, j = j, i
                coefs = [-c for c in coefs]
            if (i, j) in table:
                raise ValueError(f"bracket ({i},{j}) given twice")
            table[(i, j)] = tuple(coefs)
        self.structure = table
        self.tangent_frame = Frame.tangent(vs, self.coords)
        self._gen_brackets = {}

    @property
    def varset(self) -> VarSet:
        return self.frame.varset

    @property
    def base_dim(self) -> int:
        return len(self.coords)

    @property
    def rank(self) -> int:
        return len(self.frame)

    def structure_coefs(self, i: int, j: int):
        zero = Polynomial.zero(self.varset)
        if i == j:
            return (zero,) * self.rank
        if i < j:
            return self.structure.get((i, j), (zero,) * self.rank)
        return tuple(-c for c in self.structure.get((j, i), (zero,) * self.rank))

    def bracket_generators(self, i: int, j: int) -> Multivector:
        key = (i, j)
        if key not in self._gen_brackets:
            self._gen_brackets[key] = vector_field(self.frame, self.structure_coefs(i, j))
        return self._gen_brackets[key]

    def rho(self, i: int, f: Polynomial) -> Polynomial:
        """ρ(e_i) applied to a function."""
        out = Polynomial.zero(self.varset)
        for a, c in zip(self.anchor[i], self.coords):
            if not a.is_zero():
                out = out + a * f.diff(c)
        return out

    def d_A(self, f: Polynomial) -> list:
        """Components ⟨d_A f, e_i⟩ = ρ(e_i) f."""
        return [self.rho(i, f) for i in range(self.rank)]

    def same(self, other: "LieAlgebroid") -> bool:
        return (self is other or (self.frame == other.frame and self.coords == other.coords
                and self.anchor == other.anchor and self.structure == other.structure))

    def check_member(self, P: Multivector) -> None:
        if P.frame != self.frame:
            raise FrameMismatch(f"multivector over {P.frame}, algebroid frame {self.frame}")

    # conveniences
    def scalar(self, f) -> Multivector:
        return Multivector.scalar(self.frame, f)

    def coordinate(self, i: int) -> Multivector:
        return self.scalar(Polynomial.variable(self.varset, self.coords[i]))

    def generator(self, i: int) -> Multivector:
        return Multivector.generator(self.frame, i)

    def __repr__(self):
        return f"LieAlgebroid(n={self.base_dim}, s={self.rank}, frame={list(self.frame.names)})"


def _poly(vs, c):
    if isinstance(c, Polynomial):
        if c.varset != vs:
            return c.embed(vs)
        return c
    return Polynomial.constant(vs, c)


def tangent_algebroid(n_or_coords, params: Sequence[str] = (), kind: str = "algebroid-sections") -> LieAlgebroid:
    """TM of ℝⁿ: identity anchor, zero brackets; ``params`` are extra constant variables."""
    if isinstance(n_or_coords, int):
        if n_or_coords < 1:
            raise ValueError("dimension must be >= 1")
        coords = [f"x{i + 1}" for i in range(n_or_coords)]
    else:
        coords = list(n_or_coords)
    vs = VarSet(list(coords) + list(params))
    frame = Frame(kind, [f"d/d{c}" for c in coords], vs, coords)
    one = Polynomial.constant(vs, 1)
    zero = Polynomial.zero(vs)
    anchor = [[one if i == j else zero for j in range(len(coords))] for i in range(len(coords))]
    return LieAlgebroid(coords, frame, anchor)


# -- Schouten bracket ---------------------------------------------------------

def _bracket_function(A: LieAlgebroid, g: Polynomial, P: Multivector) -> Multivector:
    """⟦g, P⟧ = −ι_{d_A g} P."""
    if P.degree <= 0:
        return Multivector.zero(A.frame, P.degree - 1)
    return -insert(P, A.d_A(g))


def _bracket_generator(A: LieAlgebroid, j: int, P: Multivector) -> Multivector:
    """⟦e_j, P⟧ by the Leibniz rule on each monomial f e_I."""
    frame = A.frame
    if P.degree < 0:
        return Multivector.zero(frame, -1)
    acc: dict = {}
    for I, f in P.coeffs.items():
        rf = A.rho(j, f)
        if not rf.is_zero():
            acc[I] = acc[I] + rf if I in acc else rf
        for a, i in enumerate(I):
            c = A.bracket_generators(j, i)
            if c.is_zero():
                continue
            for K, v in substitute_slot(frame, I, a, c).coeffs.items():
                v = v * f
                acc[K] = acc[K] + v if K in acc else v
    return Multivector._raw(frame, P.degree, {k: v for k, v in acc.items() if not v.is_zero()})


def schouten(A: LieAlgebroid, P: Multivector, Q: Multivector) -> Multivector:
    """⟦P, Q⟧ on Γ(∧•A), degree p+q−1 (−1 is the zero object)."""
    A.check_member(P)
    A.check_member(Q)
    p, q = P.degree, Q.degree
    deg = p + q - 1
    frame = A.frame
    if p < 0 or q < 0 or deg < 0 or P.is_zero() or Q.is_zero():
        return Multivector.zero(frame, deg)
    # ⟦P, e_j⟧ = −⟦e_j, P⟧, cached per generator
    br_gen = {}
    result: dict = {}
    sign_fn = -1 if p & 1 else 1  # ⟦P, g⟧ = (−1)^p ⟦g, P⟧
    for J, g in Q.coeffs.items():
        # ⟦P, g⟧ ∧ e_J
        if p >= 1:
            Pg = _bracket_function(A, g, P)
            if not Pg.is_zero():
                for K1, v1 in Pg.coeffs.items():
                    s, K = merge_sign(K1, J)
                    if s:
                        v = v1 if s * sign_fn > 0 else -v1
                        result[K] = result[K] + v if K in result else v
        # g Σ_b (−1)^{(p−1)(b−1)} e_{J<b} ∧ ⟦P, e_{j_b}⟧ ∧ e_{J>b}
        for b, jb in enumerate(J):
            if jb not in br_gen:
                br_gen[jb] = -_bracket_generator(A, jb, P)
            PB = br_gen[jb]
            if PB.is_zero():
                continue
            sb = -1 if ((p - 1) * b) & 1 else 1
            for K, v in substitute_slot(frame, J, b, PB).coeffs.items():
                v = v * g
                if sb < 0:
                    v = -v
                result[K] = result[K] + v if K in result else v
    return Multivector._raw(frame, deg, {k: v for k, v in result.items() if not v.is_zero()})


def anchor_push(A: LieAlgebroid, P: Multivector) -> Multivector:
    """ρ(P): replace each e_i by ρ(e_i) on the tangent frame of the base."""
    A.check_member(P)
    T = A.tangent_frame
    if P.degree <= 0:
        return Multivector(T, P.degree, dict(P.coeffs))
    fields = [vector_field(T, row) for row in A.anchor]
    cache = {}
    out = Multivector.zero(T, P.degree)
    for I, c in P.coeffs.items():
        if I not in cache:
            cache[I] = wedge_all(T, (fields[i] for i in I))
        out = out + cache[I].scale(c)
    return out


def validate_algebroid(A: LieAlgebroid) -> Report:
    """Jacobiator on generator triples and the anchor morphism on pairs."""
    rep = Report("validate-algebroid")
    s = A.rank
    e = [A.generator(i) for i in range(s)]
    for i in range(s):
        for j in range(i + 1, s):
            for k in range(j + 1, s):
                jac = (schouten(A, e[i], schouten(A, e[j], e[k]))
                       + schouten(A, e[j], schouten(A, e[k], e[i]))
                       + schouten(A, e[k], schouten(A, e[i], e[j])))
                rep.add(f"jacobi(e{i + 1},e{j + 1},e{k + 1})", jac)
    T = A.tangent_frame
    for i in range(s):
        for j in range(i + 1, s):
            lhs = anchor_push(A, A.bracket_generators(i, j))
            comm = []
            for m in range(A.base_dim):
                comm.append(A.rho(i, A.anchor[j][m]) - A.rho(j, A.anchor[i][m]))
            res = lhs - vector_field(T, comm)
            rep.add(f"anchor(e{i + 1},e{j + 1})", res)
    return rep
