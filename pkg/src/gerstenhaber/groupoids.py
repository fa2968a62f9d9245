"""Concrete groupoid models in charts, for the pointwise multiplicativity harness.

Matrix-group factors use the left-trivialized exponential chart
z ↦ p·exp(Σ z_i B_i) around each sample point p; a tangent vector p·X then
has chart components coords(X), a right-invariant field X·p has components
coords(Ad_{p⁻¹}X).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm, expm_frechet, logm

from .pointcheck import PointedMultivector, direct_sum, fd_schouten, jacobian


class MatrixGroup:
    """A matrix Lie group with a K-orthonormal-with-signs basis of its Lie algebra.

    ``eta[i] = K(B_i, B_i) = ±1``.  ``bracket_sign`` is the sign relating the
    groupoid's algebroid bracket to the matrix commutator (−1: the algebroid
    bracket of right-invariant fields is minus the commutator).
    """

    def __init__(self, name: str, basis, eta, kappa: float):
        self.name = name
        self.basis = [np.asarray(b, dtype=float) for b in basis]
        self.eta = np.asarray(eta, dtype=float)
        self.kappa = kappa
        self.dim = len(self.basis)
        self.n = self.basis[0].shape[0]
        flat = np.stack([b.ravel() for b in self.basis], axis=1)
        self._pinv = np.linalg.pinv(flat)
        for i, b in enumerate(self.basis):
            for j, c in enumerate(self.basis):
                want = self.eta[i] if i == j else 0.0
                if abs(self.K(b, c) - want) > 1e-12:
                    raise ValueError("basis is not orthonormal with signs")

    def K(self, X, Y) -> float:
        return float(self.kappa * np.trace(X @ Y))

    def hat(self, z):
        return sum(zi * b for zi, b in zip(z, self.basis))

    def coords(self, X) -> np.ndarray:
        return self._pinv @ np.asarray(X).ravel()

    def Ad(self, g, X):
        return g @ X @ np.linalg.inv(g)

    def exp(self, z):
        return expm(self.hat(z))

    def log_chart(self, base, p) -> np.ndarray:
        L = logm(np.linalg.inv(base) @ p)
        return self.coords(np.real(L))

    def dexp_inv(self, z) -> np.ndarray:
        """Chart components of the left-trivialized vector w at p·exp(z): D(z)^{-1} w."""
        X = self.hat(z)
        E = expm(-X)
        D = np.stack([self.coords(E @ expm_frechet(X, b, compute_expm=False)) for b in self.basis], axis=1)
        return np.linalg.inv(D)

    def random(self, rng, scale=1.0):
        return self.exp(rng.normal(size=self.dim) * scale)

    def omega_coeffs(self) -> dict:
        """Ω^{ijk} = ¼K([u^i,u^j]_A, u^k) on i<j<k with u^i = η_i u_i and [·,·]_A = −[·,·]."""
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    ui, uj, uk = (self.eta[a] * self.basis[a] for a in (i, j, k))
                    br = -(ui @ uj - uj @ ui)
                    out[(i, j, k)] = 0.25 * self.K(br, uk)
        return out


def so3() -> MatrixGroup:
    """SO(3) with B_i = −hat(b_i) so that the algebroid bracket is [B_1, B_2]_A = B_3."""
    def hat(w):
        x, y, z = w
        return np.array([[0, -z, y], [z, 0, -x], [-y, x, 0]], dtype=float)
    basis = [-hat(v) for v in np.eye(3)]
    return MatrixGroup("SO3", basis, [1, 1, 1], kappa=-0.5)


def sl2() -> MatrixGroup:
    """SL(2,ℝ) with K = ½ tr and basis H, E+F, E−F (η = 1, 1, −1)."""
    H = np.array([[1, 0], [0, -1]], dtype=float)
    E = np.array([[0, 1], [0, 0]], dtype=float)
    F = np.array([[0, 0], [1, 0]], dtype=float)
    return MatrixGroup("SL2", [H, E + F, E - F], [1, 1, -1], kappa=0.5)


GROUPS = {"SO3": so3, "SL2": sl2}


class PairGroupoid:
    """ℝ^m × ℝ^m ⇒ ℝ^m with (x, y)(y, z) = (x, z) and Π = π ⊕ σπ for a constant k-vector π."""

    def __init__(self, m: int, pi: PointedMultivector, sign: int):
        self.m = m
        self.dim = 2 * m
        self.composable_dim = 3 * m
        self.k = pi.k
        self.Pi = direct_sum([(pi, 1), (pi, sign)])

    def multiply(self, a, b):
        if np.abs(a[self.m:] - b[: self.m]).max() > 1e-9:
            raise ValueError("arrows not composable")
        return np.concatenate([a[: self.m], b[self.m:]])

    def random_composable(self, rng):
        x, y, z = (rng.normal(size=self.m) for _ in range(3))
        return np.concatenate([x, y]), np.concatenate([y, z])

    def composable_param(self, a, b, w):
        m = self.m
        x = a[:m] + w[:m]
        y = a[m:] + w[m:2 * m]
        z = b[m:] + w[2 * m:]
        return np.concatenate([x, y]), np.concatenate([y, z])

    def chart(self, base, arrow):
        return np.asarray(arrow) - np.asarray(base)

    def bivector(self, arrow) -> PointedMultivector:
        return self.Pi


class GxGGroupoid:
    """Transformation groupoid G × G ⇒ G of conjugation, arrows (g, s).

    Default convention: source β(g, s) = s, target α(g, s) = g s g⁻¹, and
    (h, g s g⁻¹)·(g, s) = (hg, s).  ``flip=True`` swaps source and target
    (composition then reads (g, s)·(g', s') = (g' g, s) when s' = g s g⁻¹);
    multiplicativity verdicts are the same under both.  ``scale`` is the
    spread of the exponential coordinates of random elements; noncompact
    groups need it small to keep the charts well conditioned.
    """

    def __init__(self, G: MatrixGroup, flip: bool = False, scale: float = 1.0):
        self.G = G
        self.flip = flip
        self.scale = scale
        self.dim = 2 * G.dim
        self.composable_dim = 3 * G.dim

    def target(self, arrow):
        g, s = arrow
        return s if self.flip else g @ s @ np.linalg.inv(g)

    def source(self, arrow):
        g, s = arrow
        return g @ s @ np.linalg.inv(g) if self.flip else s

    def multiply(self, a, b):
        (h, u), (g, s) = (a, b) if not self.flip else (b, a)
        if np.abs(u - g @ s @ np.linalg.inv(g)).max() > 1e-8:
            raise ValueError("arrows not composable")
        return (h @ g, s)

    def random_composable(self, rng):
        G = self.G
        h, g, s = (G.random(rng, self.scale) for _ in range(3))
        pair = ((h, g @ s @ np.linalg.inv(g)), (g, s))
        return pair if not self.flip else pair[::-1]

    def composable_param(self, a, b, w):
        G = self.G
        m = G.dim
        first, second = (a, b) if not self.flip else (b, a)
        h = first[0] @ G.exp(w[:m])
        g = second[0] @ G.exp(w[m:2 * m])
        s = second[1] @ G.exp(w[2 * m:])
        pair = ((h, g @ s @ np.linalg.inv(g)), (g, s))
        return pair if not self.flip else pair[::-1]

    def chart(self, base, arrow):
        return np.concatenate([self.G.log_chart(base[0], arrow[0]), self.G.log_chart(base[1], arrow[1])])

    def point(self, base, z):
        m = self.G.dim
        return (base[0] @ self.G.exp(z[:m]), base[1] @ self.G.exp(z[m:]))

    # -- invariant fields in left-trivialized components --------------------
    def _block(self, X, factor, p, right: bool):
        G = self.G
        v = np.zeros(self.dim)
        w = G.coords(np.linalg.inv(p) @ X @ p) if right else G.coords(X)
        v[factor * G.dim:(factor + 1) * G.dim] = w
        return v

    def right_invariant(self, arrow, X):
        """The right-invariant field of X: (Xg, 0)."""
        g, s = arrow
        return self._block(X, 0, g, True)

    def left_invariant(self, arrow, X):
        """The left-invariant field of X: (gX, sX − Xs)."""
        G = self.G
        g, s = arrow
        v = np.zeros(self.dim)
        v[: G.dim] = G.coords(X)
        v[G.dim:] = G.coords(X - np.linalg.inv(s) @ X @ s)
        return v

    def bivector(self, arrow) -> PointedMultivector:
        """Π(g, s) = ½ Σ_i η_i (ceV e_i² ∧ Vec e_i² − ceV e_i² ∧ ceV e_i¹ − Vec (Ad_{g⁻¹}e_i)² ∧ Vec e_i¹).

        Superscript 1 is the g factor, 2 the s factor, Vec is right-invariant,
        ceV left-invariant on that factor.
        """
        G = self.G
        g, s = arrow
        ginv = np.linalg.inv(g)
        T = np.zeros((self.dim, self.dim))
        for e, eta in zip(G.basis, G.eta):
            L2 = self._block(e, 1, s, False)
            R2 = self._block(e, 1, s, True)
            L1 = self._block(e, 0, g, False)
            R1 = self._block(e, 0, g, True)
            R2a = self._block(ginv @ e @ g, 1, s, True)
            T += 0.5 * eta * (_w2(L2, R2) - _w2(L2, L1) - _w2(R2a, R1))
        return PointedMultivector(self.dim, 2, T)

    def omega_difference(self, arrow) -> PointedMultivector:
        """Ω⃗ − Ω⃖ with Ω⃗ from right-invariant and Ω⃖ from left-invariant fields."""
        G = self.G
        out = PointedMultivector(self.dim, 3)
        for (i, j, k), c in G.omega_coeffs().items():
            if c == 0:
                continue
            R = [self.right_invariant(arrow, G.basis[a]) for a in (i, j, k)]
            L = [self.left_invariant(arrow, G.basis[a]) for a in (i, j, k)]
            out = out + c * (PointedMultivector.wedge_vectors(R) - PointedMultivector.wedge_vectors(L))
        return out

    def chart_bivector(self, base) -> Callable:
        """z ↦ Π at base·exp(z) in the chart coordinates z."""
        G = self.G
        m = G.dim

        def ev(z):
            z = np.asarray(z, dtype=float)
            arrow = self.point(base, z)
            M = np.zeros((self.dim, self.dim))
            M[:m, :m] = G.dexp_inv(z[:m])
            M[m:, m:] = G.dexp_inv(z[m:])
            return self.bivector(arrow).transform(M)
        return ev


def _w2(a, b):
    return np.outer(a, b) - np.outer(b, a)


@dataclass
class GroupoidChartSample:
    model: object
    a: object
    b: object
    ab: object

    @classmethod
    def draw(cls, model, rng) -> "GroupoidChartSample":
        a, b = model.random_composable(rng)
        return cls(model, a, b, model.multiply(a, b))

    def validate(self, tol: float = 1e-8) -> float:
        prod = self.model.multiply(self.a, self.b)
        return float(np.abs(self.model.chart(self.ab, prod)).max())

    def graph_param(self, w):
        """Chart coordinates of (a', b', a'b') for the composable pair at parameter w."""
        m = self.model
        a2, b2 = m.composable_param(self.a, self.b, w)
        return np.concatenate([m.chart(self.a, a2), m.chart(self.b, b2), m.chart(self.ab, m.multiply(a2, b2))])


def quasi_poisson_residual(model: GxGGroupoid, arrow, h: float = 1e-5, tol: float = 1e-4):
    """½[Π,Π] − (Ω⃗ − Ω⃖) at ``arrow`` via fd_schouten in the chart around it."""
    ev = model.chart_bivector(arrow)
    res = fd_schouten(ev, ev, np.zeros(model.dim), h, tol)
    diff = res.value * 0.5 - model.omega_difference(arrow)
    return float(np.abs(diff.tensor).max()), res


def pushforward(model: GxGGroupoid, arrow, fn, target_base, h: float = 1e-5) -> PointedMultivector:
    """fn_* Π at ``arrow`` in the left-trivialized chart at ``target_base``."""
    base = arrow
    J = jacobian(lambda z: fn_chart(model, fn, base, target_base, z), model.dim, h)
    return model.bivector(arrow).transform(J)


def fn_chart(model, fn, base, target_base, z):
    out = fn(model.point(base, z))
    if isinstance(target_base, tuple):
        return model.chart(target_base, out)
    return model.G.log_chart(target_base, out)


def base_projection_residual(model: GxGGroupoid, rng, h: float = 1e-5) -> float:
    """α_*Π + β_*Π at a common base point p, from arrows with target p and source p."""
    G = model.G
    p = G.random(rng, model.scale)
    g = G.random(rng, model.scale)
    into = (g, np.linalg.inv(g) @ p @ g)  # α(into) = p in the default convention
    out_of = (G.random(rng, model.scale), p)  # β(out_of) = p
    if model.flip:
        into, out_of = out_of, into
    a_push = pushforward(model, into, model.target, p, h)
    b_push = pushforward(model, out_of, model.source, p, h)
    return float(np.abs((a_push + b_push).tensor).max())


def inversion_residual(model: GxGGroupoid, arrow, h: float = 1e-5) -> float:
    """i_*Π − (−1)^{k+1}Π = i_*Π + Π at the inverse arrow (k = 2)."""
    def inv(ar):
        g, s = ar
        if model.flip:
            return (np.linalg.inv(g), g @ s @ np.linalg.inv(g))
        return (np.linalg.inv(g), g @ s @ np.linalg.inv(g))
    target = inv(arrow)
    pushed = pushforward(model, arrow, inv, target, h)
    return float(np.abs((pushed + model.bivector(target)).tensor).max())


def coordinate_change_residual(model: GxGGroupoid, arrow, h: float = 1e-5) -> float:
    """Push Π along (g, s) ↦ (s⁻¹g⁻¹, g) and compare with ½Σ η_i(ceV e_i¹∧Vec e_i² + Vec e_i¹∧ceV e_i²)."""
    G = model.G
    g, s = arrow

    def phi(ar):
        g1, s1 = ar
        return (np.linalg.inv(s1) @ np.linalg.inv(g1), g1)
    target = phi(arrow)
    pushed = pushforward(model, arrow, phi, target, h)
    a, b = target
    T = np.zeros((model.dim, model.dim))
    for e, eta in zip(G.basis, G.eta):
        L1 = model._block(e, 0, a, False)
        R1 = model._block(e, 0, a, True)
        L2 = model._block(e, 1, b, False)
        R2 = model._block(e, 1, b, True)
        T += 0.5 * eta * (_w2(L1, R2) + _w2(R1, L2))
    return float(np.abs(pushed.tensor - T).max())
