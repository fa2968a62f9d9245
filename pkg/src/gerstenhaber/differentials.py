"""Almost k-differentials, quasi-Lie bialgebroids and twists."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebroid import LieAlgebroid, anchor_push, schouten
from .exterior import Multivector, merge_sign, substitute_slot
from .report import Report, VerificationError


class AlmostDifferential:
    """A degree-k derivation stored by its values on coordinates and frame sections.

    ``delta_x[i]`` ∈ Γ(∧^{k−1}A) is δx_i and ``delta_e[i]`` ∈ Γ(∧^k A) is δe_i.
    Degree -1 occurs only as a commutator of two 0-differentials and is zero.
    """

    def __init__(self, algebroid: LieAlgebroid, degree: int,
                 delta_x: Sequence[Multivector], delta_e: Sequence[Multivector]):
        A = algebroid
        if degree < -1:
            raise ValueError("degree must be >= -1")
        if len(delta_x) != A.base_dim or len(delta_e) != A.rank:
            raise ValueError(f"need {A.base_dim} coordinate images and {A.rank} section images")
        for P, want in [(p, degree - 1) for p in delta_x] + [(p, degree) for p in delta_e]:
            A.check_member(P)
            if not P.is_zero() and P.degree != want:
                raise ValueError(f"image of degree {P.degree}, expected {want}")
        self.algebroid = A
        self.degree = degree
        self.delta_x = tuple(p if not p.is_zero() else Multivector.zero(A.frame, degree - 1)
                             for p in delta_x)
        self.delta_e = tuple(p if not p.is_zero() else Multivector.zero(A.frame, degree)
                             for p in delta_e)

    @classmethod
    def zero(cls, A: LieAlgebroid, degree: int) -> "AlmostDifferential":
        return cls(A, degree, [Multivector.zero(A.frame, degree - 1)] * A.base_dim,
                   [Multivector.zero(A.frame, degree)] * A.rank)

    def of_function(self, f) -> Multivector:
        """δf = Σ_i ∂f/∂x_i δx_i."""
        A = self.algebroid
        out = Multivector.zero(A.frame, self.degree - 1)
        for c, dx in zip(A.coords, self.delta_x):
            if dx.is_zero():
                continue
            df = f.diff(c)
            if not df.is_zero():
                out = out + dx.scale(df)
        return out

    def __call__(self, P: Multivector) -> Multivector:
        return extend(self, P)

    def __add__(self, other: "AlmostDifferential") -> "AlmostDifferential":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return AlmostDifferential(self.algebroid, self.degree,
                                  [a + b for a, b in zip(self.delta_x, other.delta_x)],
                                  [a + b for a, b in zip(self.delta_e, other.delta_e)])

    def __neg__(self):
        return AlmostDifferential(self.algebroid, self.degree,
                                  [-a for a in self.delta_x], [-a for a in self.delta_e])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AlmostDifferential":
        return AlmostDifferential(self.algebroid, self.degree,
                                  [a.scale(c) for a in self.delta_x],
                                  [a.scale(c) for a in self.delta_e])

    def _check(self, other):
        if not self.algebroid.same(other.algebroid):
            raise ValueError("differentials live on different algebroids")

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.delta_x + self.delta_e)

    def __eq__(self, other):
        if not isinstance(other, AlmostDifferential):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.degree == other.degree and self.delta_x == other.delta_x
                and self.delta_e == other.delta_e)

    def __repr__(self):
        return f"AlmostDifferential(degree={self.degree})"


def extend(delta: AlmostDifferential, P: Multivector) -> Multivector:
    """Derivation extension of δ to Γ(∧^p A), degree p+k−1."""
    A = delta.algebroid
    A.check_member(P)
    k = delta.degree
    deg = P.degree + k - 1
    if P.degree < 0 or deg < 0 or P.is_zero():
        return Multivector.zero(A.frame, deg)
    frame = A.frame
    acc: dict = {}

    def add(K, v):
        prev = acc.get(K)
        acc[K] = v if prev is None else prev + v

    for I, f in P.coeffs.items():
        df = delta.of_function(f)
        if not df.is_zero():
            for K, v in df.coeffs.items():
                s, K2 = merge_sign(K, I)
                if s:
                    add(K2, v if s > 0 else -v)
        for a, i in enumerate(I):
            de = delta.delta_e[i]
            if de.is_zero():
                continue
            # (−1)^{(i+1)(k+1)} with 1-based slot i = a+1
            sign = -1 if (a * (k + 1)) & 1 else 1
            for K, v in substitute_slot(frame, I, a, de).coeffs.items():
                v = v * f
                add(K, v if sign > 0 else -v)
    return Multivector._raw(frame, deg, {K: v for K, v in acc.items() if not v.is_zero()})


def is_differential(delta: AlmostDifferential) -> Report:
    """Compatibility of δ with the bracket on generator pairs."""
    A = delta.algebroid
    k = delta.degree
    rep = Report("is-differential")
    e = [A.generator(i) for i in range(A.rank)]
    x = [A.coordinate(i) for i in range(A.base_dim)]
    sgn = Fraction(-1) ** (k - 1)
    for i in range(A.rank):
        for j in range(i + 1, A.rank):
            res = (extend(delta, schouten(A, e[i], e[j]))
                   - schouten(A, delta.delta_e[i], e[j])
                   - schouten(A, e[i], delta.delta_e[j]))
            rep.add(f"d[e{i + 1},e{j + 1}]", res)
    for i in range(A.rank):
        for j in range(A.base_dim):
            res = (extend(delta, schouten(A, e[i], x[j]))
                   - schouten(A, delta.delta_e[i], x[j])
                   - schouten(A, e[i], delta.delta_x[j]))
            rep.add(f"d[e{i + 1},{A.coords[j]}]", res)
    # ⟦δx_i, x_j⟧ + (−1)^{k−1}⟦x_i, δx_j⟧ = δ⟦x_i, x_j⟧ = 0
    for i in range(A.base_dim):
        for j in range(i, A.base_dim):
            res = (schouten(A, delta.delta_x[i], x[j])
                   + schouten(A, x[i], delta.delta_x[j]).scale(sgn))
            rep.add(f"d[{A.coords[i]},{A.coords[j]}]", res)
    return rep


def commutator(d1: AlmostDifferential, d2: AlmostDifferential) -> AlmostDifferential:
    """[δ₁,δ₂] = δ₁∘δ₂ − (−1)^{(k+1)(l+1)} δ₂∘δ₁."""
    d1._check(d2)
    A = d1.algebroid
    k, l = d1.degree, d2.degree
    deg = k + l - 1
    if deg < 0:
        return AlmostDifferential.zero(A, -1)
    s = -1 if ((k + 1) * (l + 1)) & 1 else 1

    def comp(a, b):
        first = extend(d1, b)
        second = extend(d2, a)
        return first - second if s > 0 else first + second

    dx = [comp(a, b) for a, b in zip(d1.delta_x, d2.delta_x)]
    de = [comp(a, b) for a, b in zip(d1.delta_e, d2.delta_e)]
    return AlmostDifferential(A, deg, dx, de)


def compose(d1: AlmostDifferential, d2: AlmostDifferential, P: Multivector) -> Multivector:
    return extend(d1, extend(d2, P))


def coboundary(A: LieAlgebroid, P: Multivector) -> AlmostDifferential:
    """ad(P) = ⟦P, ·⟧."""
    A.check_member(P)
    k = P.degree if not P.is_zero() else max(P.degree, 0)
    dx = [schouten(A, P, A.coordinate(i)) for i in range(A.base_dim)]
    de = [schouten(A, P, A.generator(i)) for i in range(A.rank)]
    return AlmostDifferential(A, k, dx, de)


class QuasiLieBialgebroid:
    """(A, δ, Ω) with δ a 2-differential and Ω ∈ Γ(∧³A)."""

    def __init__(self, delta: AlmostDifferential, omega: Multivector):
        if delta.degree != 2:
            raise ValueError("a quasi-Lie bialgebroid needs a 2-differential")
        A = delta.algebroid
        A.check_member(omega)
        if not omega.is_zero() and omega.degree != 3:
            raise ValueError("omega must have degree 3")
        self.delta = delta
        self.omega = omega if not omega.is_zero() else Multivector.zero(A.frame, 3)

    @property
    def algebroid(self) -> LieAlgebroid:
        return self.delta.algebroid

    def __eq__(self, other):
        if not isinstance(other, QuasiLieBialgebroid):
            return NotImplemented
        return self.delta == other.delta and self.omega == other.omega

    def __repr__(self):
        return f"QuasiLieBialgebroid({self.algebroid!r})"


def check_qlb(delta: AlmostDifferential, omega: Multivector) -> Report:
    A = delta.algebroid
    rep = Report("check-qlb")
    if delta.degree != 2:
        raise ValueError("check_qlb needs a 2-differential")
    rep.extend(is_differential(delta))
    for i in range(A.base_dim):
        xi = A.coordinate(i)
        rep.add(f"dd{A.coords[i]}", extend(delta, delta.delta_x[i]) - schouten(A, omega, xi))
    for i in range(A.rank):
        ei = A.generator(i)
        rep.add(f"dde{i + 1}", extend(delta, delta.delta_e[i]) - schouten(A, omega, ei))
    rep.add("d(omega)", extend(delta, omega))
    return rep


def check_qlb_of(qlb: QuasiLieBialgebroid) -> Report:
    return check_qlb(qlb.delta, qlb.omega)


class NotAlternating(VerificationError):
    pass


def base_field(delta: AlmostDifferential) -> Multivector:
    """The k-vector π_M on the base with π_M(df₁,…,df_k) = (−1)^{k+1}⟨ρ(δf₁), df₂∧…∧df_k⟩."""
    A = delta.algebroid
    k = delta.degree
    if k < 1:
        raise ValueError("base_field needs k >= 1")
    n = A.base_dim
    T = A.tangent_frame
    pushed = [anchor_push(A, dx) for dx in delta.delta_x]
    sign = 1 if (k + 1) % 2 == 0 else -1
    comps = {}
    for I in combinations(range(n), k):
        c = pushed[I[0]].coefficient(I[1:]) if k > 1 else pushed[I[0]].function()
        comps[I] = c if sign > 0 else -c
    field = Multivector(T, k, comps)
    # every slot-first reading must agree with the alternating tensor
    rep = Report("base-field-skew")
    for i in range(n):
        for J in combinations(range(n), k - 1):
            raw = pushed[i].coefficient(J) if k > 1 else pushed[i].function()
            val = raw if sign > 0 else -raw
            rep.add(f"skew({i + 1};{','.join(str(j + 1) for j in J)})",
                    val - field.coefficient((i,) + J))
    if not rep.passed:
        raise NotAlternating(rep, "base field is not alternating; delta is not a differential")
    return field


def twist(qlb: QuasiLieBialgebroid, t: Multivector, verify: bool = True) -> QuasiLieBialgebroid:
    """δ^t = δ + ⟦t,·⟧, Ω^t = Ω + δt + ½⟦t,t⟧."""
    A = qlb.algebroid
    A.check_member(t)
    if not t.is_zero() and t.degree != 2:
        raise ValueError("twist needs a bivector section")
    if t.is_zero():
        return qlb
    delta_t = qlb.delta + coboundary(A, t)
    omega_t = qlb.omega + extend(qlb.delta, t) + schouten(A, t, t).scale(Fraction(1, 2))
    out = QuasiLieBialgebroid(delta_t, omega_t)
    if verify:
        rep = check_qlb(delta_t, omega_t)
        if not rep.passed:
            raise VerificationError(rep, "twisted structure fails check_qlb")
    return out
