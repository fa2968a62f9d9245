"""Twisted Poisson structures as quasi-Lie bialgebroids, and Hamiltonian-space checks."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .algebroid import LieAlgebroid, schouten, tangent_algebroid, validate_algebroid
from .differentials import AlmostDifferential, QuasiLieBialgebroid, check_qlb, twist
from .exterior import (Frame, Multivector, eval_on_covectors, exterior_derivative, insert,
                       sharp_power, wedge_all)
from .report import Report, VerificationError
from .scalars import Polynomial


class PreconditionFailed(VerificationError):
    pass


def base_tangent(frame: Frame) -> LieAlgebroid:
    """Tangent algebroid whose frame is exactly the given coordinate frame."""
    params = [v for v in frame.varset.names if v not in frame.coords]
    T = tangent_algebroid(frame.coords, params, kind=frame.kind)
    if T.frame != frame:
        T = LieAlgebroid(frame.coords, frame, T.anchor)
    return T


def twisted_poisson_defects(pi: Multivector, phi: Multivector) -> Report:
    """dφ and ½[π,π] − (∧³π♯)(φ)."""
    T = base_tangent(pi.frame)
    rep = Report("twisted-poisson-preconditions")
    rep.add("d(phi)", exterior_derivative(phi))
    lhs = schouten(T, pi, pi).scale(Fraction(1, 2))
    rep.add("1/2[pi,pi] - (wedge^3 pi#)(phi)", lhs - sharp_power(pi, phi))
    return rep


def _components2(pi, n):
    return [[pi.coefficient((i, j)) if i != j else Polynomial.zero(pi.frame.varset)
             for j in range(n)] for i in range(n)]


def twisted_poisson_qlb(pi: Multivector, phi: Multivector):
    """(T*M_{(π,φ)}, δ_{π,φ}, φ).  Returns ``(qlb, report)``; raises
    :class:`PreconditionFailed` carrying the defect when φ is not closed or
    ½[π,π] ≠ (∧³π♯)(φ)."""
    frame = pi.frame
    if frame.coords is None:
        raise ValueError("pi must live on a coordinate tangent frame")
    if not pi.is_zero() and pi.degree != 2:
        raise ValueError("pi must be a bivector")
    if not phi.is_zero() and phi.degree != 3:
        raise ValueError("phi must be a 3-form")
    pre = twisted_poisson_defects(pi, phi)
    if not pre.passed:
        raise PreconditionFailed(pre, "twisted Poisson preconditions fail:\n" + pre.table())
    coords = frame.coords
    n = len(coords)
    vs = frame.varset
    P = _components2(pi, n)
    phic = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                phic[(a, b, c)] = phi.coefficient((a, b, c))
    zero = Polynomial.zero(vs)
    cot = Frame("algebroid-sections", [f"d{c}" for c in coords], vs, coords)
    anchor = [[P[i][j] for j in range(n)] for i in range(n)]
    structure = {}
    for i in range(n):
        for j in range(i + 1, n):
            coefs = []
            for k in range(n):
                v = P[i][j].diff(coords[k])
                for a in range(n):
                    if P[i][a].is_zero():
                        continue
                    for b in range(n):
                        if P[j][b].is_zero() or phic[(a, b, k)].is_zero():
                            continue
                        v = v + P[i][a] * P[j][b] * phic[(a, b, k)]
                coefs.append(v)
            structure[(i, j)] = coefs
    A = LieAlgebroid(coords, cot, anchor, structure)
    one = Polynomial.constant(vs, 1)
    dx = [Multivector(cot, 1, {(i,): one}) for i in range(n)]
    de = []
    for i in range(n):
        terms = {}
        for b in range(n):
            for c in range(b + 1, n):
                v = zero
                for a in range(n):
                    if not P[i][a].is_zero() and not phic[(a, b, c)].is_zero():
                        v = v - P[i][a] * phic[(a, b, c)]
                terms[(b, c)] = v
        de.append(Multivector(cot, 2, terms))
    delta = AlmostDifferential(A, 2, dx, de)
    omega = Multivector(cot, 3, dict(phi.coeffs))
    q = QuasiLieBialgebroid(delta, omega)
    rep = Report("twisted-poisson")
    rep.extend(pre)
    rep.extend(validate_algebroid(A), "algebroid.")
    rep.extend(check_qlb(delta, omega))
    return q, rep


# -- Hamiltonian spaces ---------------------------------------------------------

class HatMap:
    """The induced morphism Γ(∧^k A) → 𝔛^k(X) along J with action fields Ŷ_i."""

    def __init__(self, A: LieAlgebroid, fields: Sequence[Multivector], J: Sequence[Polynomial]):
        if len(fields) != A.rank or len(J) != A.base_dim:
            raise ValueError(f"need {A.rank} action fields and {A.base_dim} components of J")
        self.A = A
        self.frame = fields[0].frame if fields else None
        self.fields = list(fields)
        self.J = list(J)
        vs = self.frame.varset
        self.mapping = {c: j for c, j in zip(A.coords, self.J)}
        for name in A.varset.names:
            if name not in self.mapping and name not in vs:
                raise ValueError(f"variable {name!r} of A has no image on X")
        self._cache = {}

    def pull(self, f: Polynomial) -> Polynomial:
        return f.substitute(self.mapping, self.frame.varset)

    def __call__(self, P: Multivector) -> Multivector:
        self.A.check_member(P)
        out = Multivector.zero(self.frame, P.degree)
        for I, c in P.coeffs.items():
            if I not in self._cache:
                self._cache[I] = wedge_all(self.frame, (self.fields[i] for i in I))
            out = out + self._cache[I].scale(self.pull(c))
        return out


def check_hamiltonian(qlb: QuasiLieBialgebroid, fields: Sequence[Multivector],
                      J: Sequence[Polynomial], Pi_X: Multivector,
                      transformation: dict | None = None) -> Report:
    """Residuals of the infinitesimal Hamiltonian-space equations.

    ``fields`` are the action fields Ŷ_i on X (a coordinate tangent frame),
    ``J`` the components of the moment map.  ``transformation`` may carry
    ``{"b": QuasiLieBialgebra, "act": PolynomialAction}`` when qlb came from
    :func:`transformation_qlb`; the ε-part of the action then enters the
    extra residuals.
    """
    A = qlb.algebroid
    hat = HatMap(A, fields, J)
    TX = base_tangent(hat.frame)
    Xc = TX.coords
    rep = Report("check-hamiltonian")
    if Pi_X.frame != hat.frame:
        raise ValueError("Pi_X must live on the frame of the action fields")
    # anchor compatibility Ŷ_i(J_j) = J*(ρ_i^j)
    for i, Y in enumerate(fields):
        for j, Jj in enumerate(J):
            val = Polynomial.zero(hat.frame.varset)
            for a, name in enumerate(Xc):
                val = val + Y.coefficient((a,)) * Jj.diff(name)
            rep.add(f"anchor(e{i + 1},{A.coords[j]})", val - hat.pull(A.anchor[i][j]))
    for i in range(A.rank):
        for j in range(i + 1, A.rank):
            rep.add(f"action[e{i + 1},e{j + 1}]",
                    schouten(TX, fields[i], fields[j]) - hat(A.bracket_generators(i, j)))
    rep.add("1/2[Pi,Pi] - Omega^",
            schouten(TX, Pi_X, Pi_X).scale(Fraction(1, 2)) - hat(qlb.omega))
    for j, Jj in enumerate(J):
        rep.add(f"[Pi,J*{A.coords[j]}] - delta^",
                schouten(TX, Pi_X, Multivector.scalar(hat.frame, Jj)) - hat(qlb.delta.delta_x[j]))
    for i in range(A.rank):
        rep.add(f"[Pi,Y{i + 1}] - delta^", schouten(TX, Pi_X, fields[i]) - hat(qlb.delta.delta_e[i]))
    if transformation is not None:
        from .manin import pi_S
        b, act = transformation["b"], transformation["act"]
        table = pi_S(b, act)
        dJ = [[Jj.diff(name) for name in Xc] for Jj in J]
        for a in range(len(J)):
            for c in range(len(J)):
                val = _eval2(Pi_X, dJ[a], dJ[c]) - hat.pull(table[(a, c)])
                rep.add(f"mapping({a + 1},{c + 1})", val)
        # Π_X♯(J*dx_j) + (λ(dx_j))_X, with λ(dx_j) = δx_j = Σ_i (ε^i)_S(x_j) e_i
        for j in range(len(J)):
            sharp = insert(Pi_X, dJ[j]) if not Pi_X.is_zero() else Multivector.zero(hat.frame, 1)
            rep.add(f"action3(d{A.coords[j]})", sharp + hat(qlb.delta.delta_x[j]))
    return rep


def _eval2(P: Multivector, xi, eta):
    if P.is_zero():
        return Polynomial.zero(P.frame.varset)
    return eval_on_covectors(P, [xi, eta])


def hamiltonian_twist(qlb: QuasiLieBialgebroid, fields, J, Pi_X: Multivector, t: Multivector):
    """(twist(qlb, t), Π_X + t̂)."""
    hat = HatMap(qlb.algebroid, fields, J)
    return twist(qlb, t), Pi_X + hat(t)
