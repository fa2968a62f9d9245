"""Linear multivector fields on the total space of A and the lifts of sections.

On the total space the coordinates are (x_1..x_n, v_1..v_s) and the frame
is (∂x_1..∂x_n, ∂v_1..∂v_s); brackets there are taken in the tangent
algebroid of ℝ^{n+s}, with any non-coordinate variables of A (such as a
time parameter) kept as constants.
"""

from __future__ import annotations

from .algebroid import LieAlgebroid, schouten, tangent_algebroid
from .differentials import AlmostDifferential, coboundary
from .exterior import Multivector
from .scalars import Polynomial


class NotLinear(ValueError):
    pass


class TotalSpace:
    def __init__(self, A: LieAlgebroid):
        self.base = A
        taken = set(A.varset.names)
        fibers = []
        for i in range(A.rank):
            name = f"v{i + 1}"
            while name in taken:
                name = "v_" + name
            fibers.append(name)
            taken.add(name)
        params = [v for v in A.varset.names if v not in A.coords]
        self.fibers = tuple(fibers)
        self.params = tuple(params)
        self.tangent = tangent_algebroid(list(A.coords) + fibers, params, kind="tangent-of-total")
        self.frame = self.tangent.frame
        self.varset = self.frame.varset
        self.n = A.base_dim
        self.s = A.rank
        self._v = [Polynomial.variable(self.varset, v) for v in fibers]
        self._fiber_idx = [self.varset.index(v) for v in fibers]

    def fiber(self, i: int) -> Polynomial:
        return self._v[i]

    def bracket(self, X: Multivector, Y: Multivector) -> Multivector:
        return schouten(self.tangent, X, Y)

    def vertical(self, P: Multivector) -> Multivector:
        self.base.check_member(P)
        return P.reframe(self.frame, [self.n + j for j in range(self.s)])

    def v_degrees(self, c: Polynomial) -> set:
        return {sum(e[i] for i in self._fiber_idx) for e in c.terms}


def total_space(A: LieAlgebroid) -> TotalSpace:
    ts = getattr(A, "_total_space", None)
    if ts is None:
        ts = TotalSpace(A)
        A._total_space = ts
    return ts


def vertical_lift(A: LieAlgebroid, P: Multivector) -> Multivector:
    """P^v: e_j ↦ ∂v_j."""
    return total_space(A).vertical(P)


def linear_lift(delta: AlmostDifferential) -> Multivector:
    """π_δ = Σ_i (δx_i)^v ∧ ∂x_i − Σ_i v_i (δe_i)^v."""
    A = delta.algebroid
    T = total_space(A)
    k = delta.degree
    out = Multivector.zero(T.frame, k)
    if k < 0:
        return out
    for i, dx in enumerate(delta.delta_x):
        if not dx.is_zero():
            out = out + T.vertical(dx).wedge(Multivector.generator(T.frame, i))
    for i, de in enumerate(delta.delta_e):
        if not de.is_zero():
            out = out - T.vertical(de).scale(T.fiber(i))
    return out


def almost_differential_of(pi: Multivector, A: LieAlgebroid) -> AlmostDifferential:
    """Inverse of :func:`linear_lift`; rejects fields outside the linear normal form."""
    T = total_space(A)
    if pi.frame != T.frame:
        raise NotLinear("multivector does not live on the total space of this algebroid")
    k = pi.degree
    n, s = T.n, T.s
    vsA = A.varset
    dx = [dict() for _ in range(n)]
    de = [dict() for _ in range(s)]
    sign_a = -1 if (k - 1) & 1 else 1
    for K, c in pi.coeffs.items():
        xs = [j for j in K if j < n]
        vs = tuple(j - n for j in K if j >= n)
        degs = T.v_degrees(c)
        if len(xs) == 1 and degs == {0}:
            i = xs[0]
            dx[i][vs] = c.embed(vsA) if sign_a > 0 else -c.embed(vsA)
        elif not xs and degs == {1}:
            for i in range(s):
                ci = c.diff(T.fibers[i])
                if not ci.is_zero():
                    de[i][vs] = -ci.embed(vsA)
        else:
            raise NotLinear(f"term {K} with coefficient {c} is not of linear form")
    delta = AlmostDifferential(
        A, k,
        [Multivector(A.frame, k - 1, d) for d in dx],
        [Multivector(A.frame, k, d) for d in de])
    if linear_lift(delta) != pi:
        raise NotLinear("round trip through linear_lift failed")
    return delta


def is_linear(pi: Multivector, A: LieAlgebroid) -> bool:
    try:
        almost_differential_of(pi, A)
    except NotLinear:
        return False
    return True


def complete_lift(A: LieAlgebroid, P: Multivector) -> Multivector:
    """P^c = π_{ad(P)}."""
    return linear_lift(coboundary(A, P))


def gauge_lift(A: LieAlgebroid, P: Multivector, t: str = "t") -> Multivector:
    """G(P) = P^c + (∂P/∂t)^v for P polynomial in the parameter ``t``."""
    if t not in A.varset:
        raise ValueError(f"time variable {t!r} missing from the varset")
    if t in A.coords:
        raise ValueError(f"{t!r} is a coordinate, not a parameter")
    return complete_lift(A, P) + vertical_lift(A, P.diff(t))


def lift_bracket(A: LieAlgebroid, X: Multivector, Y: Multivector) -> Multivector:
    """Schouten bracket of multivector fields on the total space."""
    return total_space(A).bracket(X, Y)
