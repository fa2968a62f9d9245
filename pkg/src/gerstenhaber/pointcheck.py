"""Floating-point checks at sample points: coisotropy, graph multiplicativity,
finite-difference Schouten brackets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space, orth

from .report import Report

DEFAULT_FD_STEP = 1e-5
DEFAULT_TOL = 1e-6
DEFAULT_FD_TOL = 1e-4


def perm_sign(p: Sequence[int]) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


class PointedMultivector:
    """A k-vector at a point of ℝ^d, stored as its full antisymmetric tensor."""

    def __init__(self, d: int, k: int, tensor: np.ndarray | None = None):
        self.d = d
        self.k = k
        shape = (d,) * k
        self.tensor = np.zeros(shape) if tensor is None else np.asarray(tensor, dtype=float).reshape(shape)

    @classmethod
    def from_components(cls, d: int, k: int, comps: dict) -> "PointedMultivector":
        """Components on increasing multi-indices (any order is sorted with its sign)."""
        T = np.zeros((d,) * k)
        for idx, v in comps.items():
            for p in itertools.permutations(range(k)):
                T[tuple(idx[i] for i in p)] += perm_sign(p) * v
        return cls(d, k, T)

    @classmethod
    def wedge_vectors(cls, vectors: Sequence[np.ndarray]) -> "PointedMultivector":
        """v_1 ∧ … ∧ v_k, normalized so that e_1∧e_2 has component 1 at (0, 1)."""
        k = len(vectors)
        d = len(vectors[0])
        T = np.zeros((d,) * k)
        for p in itertools.permutations(range(k)):
            term = vectors[p[0]]
            for i in p[1:]:
                term = np.multiply.outer(term, vectors[i])
            T += perm_sign(p) * term
        return cls(d, k, T)

    def components(self) -> dict:
        return {I: float(self.tensor[I]) for I in itertools.combinations(range(self.d), self.k)}

    def norm(self) -> float:
        return float(np.abs(self.tensor).max()) if self.tensor.size else 0.0

    def __call__(self, *xis) -> float:
        T = self.tensor
        for xi in xis:
            T = np.tensordot(np.asarray(xi, dtype=float), T, axes=(0, 0))
        return float(T)

    def transform(self, M: np.ndarray) -> "PointedMultivector":
        """Push forward by the linear map M (shape d' × d)."""
        T = self.tensor
        for _ in range(self.k):
            T = np.tensordot(T, M, axes=(0, 1))
        return PointedMultivector(M.shape[0], self.k, T)

    def __add__(self, other):
        return PointedMultivector(self.d, self.k, self.tensor + other.tensor)

    def __sub__(self, other):
        return PointedMultivector(self.d, self.k, self.tensor - other.tensor)

    def __neg__(self):
        return PointedMultivector(self.d, self.k, -self.tensor)

    def __mul__(self, c: float):
        return PointedMultivector(self.d, self.k, c * self.tensor)

    __rmul__ = __mul__


def direct_sum(parts: Sequence[tuple]) -> PointedMultivector:
    """⊕ of (multivector, sign) pairs on the product of their spaces."""
    k = parts[0][0].k
    dims = [p.d for p, _ in parts]
    D = sum(dims)
    T = np.zeros((D,) * k)
    off = 0
    for (P, sign), d in zip(parts, dims):
        if P.k != k:
            raise ValueError("direct sum needs equal degrees")
        sl = tuple(slice(off, off + d) for _ in range(k))
        T[sl] = sign * P.tensor
        off += d
    return PointedMultivector(D, k, T)


class RankDeficient(ValueError):
    pass


class Subspace:
    """Span of the columns of ``basis`` (shape d × r)."""

    def __init__(self, basis, d: int | None = None, rank_tol: float = 1e-10):
        B = np.asarray(basis, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.size == 0:
            B = np.zeros((d if d is not None else B.shape[0], 0))
        self.d = B.shape[0]
        if B.shape[1]:
            sv = np.linalg.svd(B, compute_uv=False)
            if sv.min() <= rank_tol * max(sv.max(), 1.0):
                raise RankDeficient(f"basis of {B.shape[1]} vectors is numerically dependent")
        self.basis = B

    @classmethod
    def span(cls, vectors, d: int) -> "Subspace":
        """Orthonormal basis of the span of possibly dependent vectors."""
        B = np.asarray(vectors, dtype=float).reshape(d, -1)
        return cls(orth(B) if B.shape[1] else np.zeros((d, 0)))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def annihilator(self) -> np.ndarray:
        """Orthonormal basis of W° (columns), as covectors."""
        if self.dim == 0:
            return np.eye(self.d)
        return null_space(self.basis.T)


@dataclass
class CoisotropyResult:
    passed: bool
    max_residual: float
    scale: float

    def __bool__(self):
        return self.passed


def is_coisotropic(Pi: PointedMultivector, W: Subspace, tol: float = DEFAULT_TOL) -> CoisotropyResult:
    if Pi.k > Pi.d:
        raise ValueError("degree exceeds dimension")
    if W.d != Pi.d:
        raise ValueError("subspace and multivector live in different spaces")
    ann = W.annihilator()
    scale = Pi.norm()
    r = ann.shape[1]
    if Pi.k == 0:
        worst = abs(float(Pi.tensor))
        return CoisotropyResult(worst == 0.0, worst, scale)
    if r < Pi.k:
        # k covectors from W° are then dependent
        return CoisotropyResult(True, 0.0, scale)
    T = Pi.tensor
    for _ in range(Pi.k):
        T = np.tensordot(T, ann, axes=(0, 0))
    worst = float(np.abs(T).max())
    return CoisotropyResult(worst <= tol * scale, worst, scale)


def relation_image(R: Subspace, d1: int, C: Subspace) -> Subspace:
    """R(C) = {u | ∃ v ∈ C, (u, v) ∈ R} for R ⊂ V1 × V2."""
    R1 = R.basis[:d1]
    R2 = R.basis[d1:]
    if C.dim == 0:
        M = R2
    else:
        M = np.hstack([R2, -C.basis])
    N = null_space(M)
    if N.shape[1] == 0:
        return Subspace(np.zeros((d1, 0)))
    U = R1 @ N[: R.dim]
    if np.abs(U).max() < 1e-12:
        return Subspace(np.zeros((d1, 0)))
    return Subspace(orth(U, rcond=1e-10))


def compose_relation_check(Pi1: PointedMultivector, Pi2: PointedMultivector,
                           R: Subspace, C: Subspace, tol: float = DEFAULT_TOL) -> Report:
    rep = Report("compose-relation", tolerance=tol)
    both = direct_sum([(Pi1, 1), (Pi2, 1)])
    pre_R = is_coisotropic(both, R, tol)
    pre_C = is_coisotropic(Pi2, C, tol)
    rep.add_numeric("precondition: R coisotropic for Pi1+Pi2", pre_R.max_residual, tol * pre_R.scale)
    rep.add_numeric("precondition: C coisotropic for Pi2", pre_C.max_residual, tol * pre_C.scale)
    rep.flags["precondition_ok"] = bool(pre_R and pre_C)
    img = relation_image(R, Pi1.d, C)
    concl = is_coisotropic(Pi1, img, tol)
    rep.add_numeric("conclusion: R(C) coisotropic for Pi1", concl.max_residual, tol * concl.scale)
    rep.flags["conclusion_ok"] = concl.passed
    return rep


def jacobian(f: Callable[[np.ndarray], np.ndarray], n: int, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of f at 0 ∈ ℝⁿ."""
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((np.asarray(f(e)) - np.asarray(f(-e))) / (2 * h))
    return np.stack(cols, axis=1)


def graph_multiplicativity_check(sample, k: int, tol: float = DEFAULT_TOL,
                                 h: float = DEFAULT_FD_STEP, Pi: Callable | None = None) -> Report:
    """Coisotropy of T_{(g,h,gh)}Λ for Π⊕Π⊕(−1)^{k+1}Π at one composable sample.

    ``sample`` is a :class:`gerstenhaber.groupoids.GroupoidChartSample`.
    """
    model = sample.model
    Pi = Pi or model.bivector
    p = model.composable_dim
    J = jacobian(sample.graph_param, p, h)
    J2 = jacobian(sample.graph_param, p, h / 2)
    rep = Report("graph-multiplicativity", tolerance=tol)
    cond = float(np.linalg.cond(J)) if J.size else 1.0
    rep.flags["jacobian_condition"] = cond
    drift = float(np.abs(J - J2).max())
    rep.add_numeric("jacobian step agreement", drift, DEFAULT_FD_TOL)
    if not math.isfinite(cond) or cond > 1e8:
        rep.add_numeric("chart condition", cond, 1e8)
        return rep
    W = Subspace.span(J, J.shape[0])
    sign = 1 if (k + 1) % 2 == 0 else -1
    big = direct_sum([(Pi(sample.a), 1), (Pi(sample.b), 1), (Pi(sample.ab), sign)])
    res = is_coisotropic(big, W, tol)
    rep.add_numeric("graph coisotropy (relative)", res.max_residual / max(res.scale, 1e-300), tol)
    rep.flags["max_residual"] = res.max_residual
    return rep


@dataclass
class SchoutenFD:
    value: PointedMultivector
    error_estimate: float
    unstable: bool


def _closed_formula(A: np.ndarray, dA: np.ndarray, B: np.ndarray, dB: np.ndarray, k: int, kp: int, d: int):
    """[A,B](dx_I) for all increasing I, derivatives supplied as dX[j] = ∂_j X."""
    deg = k + kp - 1
    out = {}
    pref = 1 if (k + 1) % 2 == 0 else -1
    mid = 1 if (k * kp) % 2 == 0 else -1
    for I in itertools.combinations(range(d), deg):
        total = 0.0
        for S in itertools.combinations(range(deg), kp):
            Sp = [i for i in range(deg) if i not in S]
            eps = perm_sign(Sp + list(S))
            BS = tuple(I[i] for i in S)
            rest = tuple(I[i] for i in Sp)
            grad = dB[(slice(None),) + BS]
            total += eps * float(np.dot(grad, A[(slice(None),) + rest]))
        total2 = 0.0
        for U in itertools.combinations(range(deg), k):
            Up = [i for i in range(deg) if i not in U]
            eps = perm_sign(Up + list(U))
            AU = tuple(I[i] for i in U)
            rest = tuple(I[i] for i in Up)
            grad = dA[(slice(None),) + AU]
            total2 += eps * float(np.dot(grad, B[(slice(None),) + rest]))
        out[I] = pref * (total + mid * total2)
    return out


def _fd_bracket(evalA, evalB, point, h):
    point = np.asarray(point, dtype=float)
    d = len(point)
    A0, B0 = evalA(point), evalB(point)
    k, kp = A0.k, B0.k
    dA = np.zeros((d,) + A0.tensor.shape)
    dB = np.zeros((d,) + B0.tensor.shape)
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        dA[j] = (evalA(point + e).tensor - evalA(point - e).tensor) / (2 * h)
        dB[j] = (evalB(point + e).tensor - evalB(point - e).tensor) / (2 * h)
    comps = _closed_formula(A0.tensor, dA, B0.tensor, dB, k, kp, d)
    return PointedMultivector.from_components(d, k + kp - 1, comps)


def fd_schouten(evalA, evalB, point, h: float = DEFAULT_FD_STEP, tol: float = DEFAULT_FD_TOL) -> SchoutenFD:
    """Schouten bracket of two multivector fields from the closed coordinate formula,
    first derivatives by central differences; Richardson check with h/2."""
    v1 = _fd_bracket(evalA, evalB, point, h)
    v2 = _fd_bracket(evalA, evalB, point, h / 2)
    err = float(np.abs(v1.tensor - v2.tensor).max()) if v1.tensor.size else 0.0
    return SchoutenFD(v2, err, err > 10 * tol)
