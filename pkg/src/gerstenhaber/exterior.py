"""Multivectors with polynomial coefficients over a named frame."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalars import Polynomial, VarSet, VarSetMismatch

FRAME_KINDS = ("algebroid-sections", "tangent-of-base", "tangent-of-total", "dual")


class FrameMismatch(ValueError):
    pass


class Frame:
    """Ordered list of generators plus the varset of allowed coefficients.

    ``coords`` names the coordinate dual to each generator for coordinate
    frames (the tangent and cotangent frames of a chart); it is ``None``
    for abstract section frames.
    """

    __slots__ = ("kind", "names", "varset", "coords", "primal")

    def __init__(self, kind: str, names: Iterable[str], varset: VarSet,
                 coords: Sequence[str] | None = None, primal: "Frame | None" = None):
        if kind not in FRAME_KINDS:
            raise ValueError(f"unknown frame kind {kind!r}")
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        if coords is not None:
            coords = tuple(coords)
            if len(coords) != len(names):
                raise ValueError("coords must pair one-to-one with generators")
            for c in coords:
                varset.index(c)
        if primal is not None and len(primal.names) != len(names):
            raise ValueError("dual frame must have the size of its primal frame")
        self.kind = kind
        self.names = names
        self.varset = varset
        self.coords = coords
        self.primal = primal

    @classmethod
    def tangent(cls, varset: VarSet, coords: Sequence[str], kind="tangent-of-base"):
        return cls(kind, [f"d/d{c}" for c in coords], varset, coords)

    def dual(self) -> "Frame":
        names = [f"d{c}" for c in self.coords] if self.coords else [f"{n}*" for n in self.names]
        return Frame("dual", names, self.varset, self.coords, primal=self)

    def with_varset(self, varset: VarSet) -> "Frame":
        return Frame(self.kind, self.names, varset, self.coords, self.primal)

    def __len__(self):
        return len(self.names)

    def _key(self):
        return (self.kind, self.names, self.varset, self.coords)

    def __eq__(self, other):
        return isinstance(other, Frame) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Frame({self.kind!r}, {list(self.names)!r})"


def sort_sign(indices: Sequence[int]):
    """Sort a tuple of generator positions, tracking the permutation sign.

    Returns ``(sign, sorted_tuple)``; sign is 0 when an index repeats.
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return 0, None
    return sign, tuple(idx)


def merge_sign(I: tuple, J: tuple):
    """Sign and index of e_I ∧ e_J for increasing I, J (sign 0 if they overlap)."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    out = []
    sign = 1
    a = b = 0
    nI, nJ = len(I), len(J)
    while a < nI and b < nJ:
        if I[a] < J[b]:
            out.append(I[a])
            a += 1
        elif I[a] > J[b]:
            out.append(J[b])
            b += 1
            if (nI - a) & 1:
                sign = -sign
        else:
            return 0, None
    out.extend(I[a:])
    out.extend(J[b:])
    return sign, tuple(out)


class Multivector:
    """Homogeneous element of degree ``degree`` of the exterior algebra.

    Degree -1 is the explicit zero object (it arises as ⟦f, g⟧ and as
    δf for 0-differentials).
    """

    __slots__ = ("frame", "degree", "coeffs")

    def __init__(self, frame: Frame, degree: int, coeffs: Mapping | None = None):
        if degree < -1:
            raise ValueError("degree must be >= -1")
        self.frame = frame
        self.degree = degree
        clean = {}
        if coeffs:
            if degree < 0:
                if any(not c.is_zero() for c in coeffs.values()):
                    raise ValueError("degree -1 multivector must be zero")
            else:
                n = len(frame)
                vs = frame.varset
                for idx, c in coeffs.items():
                    idx = tuple(idx)
                    if len(idx) != degree:
                        raise ValueError(f"index {idx} does not have degree {degree}")
                    if any(i < 0 or i >= n for i in idx):
                        raise ValueError(f"index {idx} out of range for frame of size {n}")
                    if not isinstance(c, Polynomial):
                        c = Polynomial.constant(vs, c)
                    elif c.varset != vs:
                        raise VarSetMismatch(f"coefficient over {c.varset}, frame over {vs}")
                    if c.is_zero():
                        continue
                    sign, key = sort_sign(idx)
                    if not sign:
                        continue
                    if sign < 0:
                        c = -c
                    prev = clean.get(key)
                    c = c if prev is None else prev + c
                    if c.is_zero():
                        clean.pop(key, None)
                    else:
                        clean[key] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, frame, degree, coeffs):
        obj = cls.__new__(cls)
        obj.frame = frame
        obj.degree = degree
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, frame: Frame, degree: int) -> "Multivector":
        return cls._raw(frame, max(degree, -1), {})

    @classmethod
    def scalar(cls, frame: Frame, f) -> "Multivector":
        if not isinstance(f, Polynomial):
            f = Polynomial.constant(frame.varset, f)
        return cls._raw(frame, 0, {(): f} if f else {})

    @classmethod
    def generator(cls, frame: Frame, i: int) -> "Multivector":
        return cls._raw(frame, 1, {(i,): Polynomial.constant(frame.varset, 1)})

    @classmethod
    def monomial(cls, frame: Frame, idx: Sequence[int], coef=1) -> "Multivector":
        return cls(frame, len(idx), {tuple(idx): coef})

    # -- inspection ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def function(self) -> Polynomial:
        """The polynomial of a degree-0 (or zero) multivector."""
        if self.degree > 0 and self.coeffs:
            raise ValueError("not a function")
        return self.coeffs.get((), Polynomial.zero(self.frame.varset))

    def coefficient(self, idx: Sequence[int]) -> Polynomial:
        sign, key = sort_sign(idx)
        if not sign or len(idx) != self.degree:
            return Polynomial.zero(self.frame.varset)
        c = self.coeffs.get(key)
        if c is None:
            return Polynomial.zero(self.frame.varset)
        return c if sign > 0 else -c

    def terms(self):
        return sorted(self.coeffs.items())

    # -- linear structure ----------------------------------------------
    def _check(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            raise TypeError(f"expected Multivector, got {type(other).__name__}")
        if other.frame != self.frame:
            raise FrameMismatch(f"{self.frame} vs {other.frame}")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        if not other.coeffs:
            if self.coeffs or self.degree >= other.degree:
                return self
            return other
        if not self.coeffs:
            return other
        if other.degree != self.degree:
            raise ValueError(f"cannot add degrees {self.degree} and {other.degree}")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            prev = out.get(k)
            v = c if prev is None else prev + c
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return Multivector._raw(self.frame, self.degree, out)

    def __neg__(self):
        return Multivector._raw(self.frame, self.degree, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "Multivector":
        """Multiply every coefficient by a rational or a polynomial."""
        if isinstance(f, Polynomial):
            if f.varset != self.frame.varset:
                raise VarSetMismatch(f"{f.varset} vs {self.frame.varset}")
            if f.is_zero():
                return Multivector.zero(self.frame, self.degree)
        elif not f:
            return Multivector.zero(self.frame, self.degree)
        out = {}
        for k, c in self.coeffs.items():
            v = c * f
            if not v.is_zero():
                out[k] = v
        return Multivector._raw(self.frame, self.degree, out)

    def __mul__(self, f):
        if isinstance(f, (int, Fraction, Polynomial)):
            return self.scale(f)
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __xor__(self, other):
        return wedge(self, other)

    def map_coeffs(self, fn) -> "Multivector":
        """Apply ``fn`` to every coefficient (result must stay over the frame's varset)."""
        out = {}
        for k, c in self.coeffs.items():
            v = fn(c)
            if not v.is_zero():
                out[k] = v
        return Multivector._raw(self.frame, self.degree, out)

    def diff(self, name: str) -> "Multivector":
        return self.map_coeffs(lambda c: c.diff(name))

    def reframe(self, frame: Frame, index_map: Sequence[int] | None = None) -> "Multivector":
        """Re-express over ``frame``: coefficients are embedded by variable name,
        generator i goes to ``index_map[i]`` (identity when omitted)."""
        if index_map is None:
            if len(frame) < len(self.frame):
                raise FrameMismatch("target frame too small")
            index_map = range(len(self.frame))
        index_map = list(index_map)
        out = {}
        vs = frame.varset
        for k, c in self.coeffs.items():
            out[tuple(index_map[i] for i in k)] = c.embed(vs)
        return Multivector(frame, self.degree, out)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        if self.frame != other.frame:
            return False
        if not self.coeffs and not other.coeffs:
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, self.degree, frozenset(self.coeffs.items())))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in self.terms():
            mono = "∧".join(self.frame.names[i] for i in k)
            if not mono:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Multivector(deg={self.degree}, {self})"


def wedge(P: Multivector, Q: Multivector) -> Multivector:
    """Exterior product; degree p+q with the shuffle signs."""
    P._check(Q)
    if P.degree < 0 or Q.degree < 0:
        return Multivector.zero(P.frame, -1)
    deg = P.degree + Q.degree
    if deg > len(P.frame):
        return Multivector.zero(P.frame, deg)
    out: dict = {}
    for I, a in P.coeffs.items():
        for J, b in Q.coeffs.items():
            sign, K = merge_sign(I, J)
            if not sign:
                continue
            v = a * b
            if sign < 0:
                v = -v
            prev = out.get(K)
            out[K] = v if prev is None else prev + v
    return Multivector._raw(P.frame, deg, {k: v for k, v in out.items() if not v.is_zero()})


def wedge_all(frame: Frame, factors: Iterable[Multivector]) -> Multivector:
    result = Multivector.scalar(frame, 1)
    for f in factors:
        result = wedge(result, f)
    return result


def substitute_slot(frame: Frame, I: tuple, a: int, Q: Multivector) -> Multivector:
    """e_{I[:a]} ∧ Q ∧ e_{I[a+1:]} for increasing I (0-based slot ``a``)."""
    if Q.degree < 0:
        return Multivector.zero(frame, -1)
    deg = len(I) - 1 + Q.degree
    left, right = I[:a], I[a + 1:]
    out: dict = {}
    for J, c in Q.coeffs.items():
        s1, K = merge_sign(left, J)
        if not s1:
            continue
        s2, K = merge_sign(K, right)
        if not s2:
            continue
        v = c if s1 * s2 > 0 else -c
        prev = out.get(K)
        out[K] = v if prev is None else prev + v
    return Multivector._raw(frame, deg, {k: v for k, v in out.items() if not v.is_zero()})


def insert(P: Multivector, xi: Sequence[Polynomial]) -> Multivector:
    """P(ξ, ·, …, ·): insert a covector (one coefficient per generator) in the first slot."""
    vs = P.frame.varset
    xi = [x if isinstance(x, Polynomial) else Polynomial.constant(vs, x) for x in xi]
    if len(xi) != len(P.frame):
        raise ValueError(f"covector has {len(xi)} entries, frame has {len(P.frame)}")
    if P.degree <= 0:
        return Multivector.zero(P.frame, P.degree - 1)
    out: dict = {}
    for I, c in P.coeffs.items():
        for a, i in enumerate(I):
            x = xi[i]
            if x.is_zero():
                continue
            K = I[:a] + I[a + 1:]
            v = c * x
            if a & 1:
                v = -v
            prev = out.get(K)
            out[K] = v if prev is None else prev + v
    return Multivector._raw(P.frame, P.degree - 1, {k: v for k, v in out.items() if not v.is_zero()})


def eval_on_covectors(P: Multivector, xis: Sequence[Sequence]) -> Polynomial:
    """Σ_I coeff(I)·det[ξ^a(e_{I_b})]."""
    if len(xis) != P.degree:
        raise ValueError(f"degree {P.degree} multivector takes {P.degree} covectors, got {len(xis)}")
    for xi in xis:
        P = insert(P, xi)
    return P.function()


def sharp_power(pi: Multivector, phi: Multivector) -> Multivector:
    """(∧^k π♯)(φ) with π♯(σ) = π(σ, ·)."""
    if pi.degree != 2 and not pi.is_zero():
        raise ValueError("pi must be a bivector")
    tangent = pi.frame
    if phi.frame.kind != "dual" or len(phi.frame) != len(tangent) or phi.frame.varset != tangent.varset:
        raise FrameMismatch("phi must live on the dual of pi's frame")
    if phi.frame.primal is not None and phi.frame.primal != tangent:
        raise FrameMismatch("phi's primal frame is not pi's frame")
    n = len(tangent)
    vs = tangent.varset
    one = Polynomial.constant(vs, 1)
    zero = Polynomial.zero(vs)
    sharps = []
    for a in range(n):
        dxa = [one if b == a else zero for b in range(n)]
        if pi.is_zero():
            sharps.append(Multivector.zero(tangent, 1))
        else:
            sharps.append(insert(pi, dxa))
    result = Multivector.zero(tangent, phi.degree)
    for I, c in phi.coeffs.items():
        result = result + wedge_all(tangent, (sharps[i] for i in I)).scale(c)
    return result


def exterior_derivative(form: Multivector) -> Multivector:
    """de Rham d of a form over a coordinate dual frame."""
    frame = form.frame
    if frame.coords is None:
        raise FrameMismatch("exterior derivative needs a coordinate frame")
    out = Multivector.zero(frame, form.degree + 1)
    for I, c in form.coeffs.items():
        for a, name in enumerate(frame.coords):
            dc = c.diff(name)
            if dc.is_zero():
                continue
            out = out + Multivector.monomial(frame, (a,) + I, dc)
    return out


def vector_field(frame: Frame, components: Sequence) -> Multivector:
    """Degree-1 multivector from its component list."""
    return Multivector(frame, 1, {(i,): c for i, c in enumerate(components)})


def components(X: Multivector) -> list:
    if X.degree not in (1, -1) and not X.is_zero():
        raise ValueError("not a degree-1 multivector")
    return [X.coeffs.get((i,), Polynomial.zero(X.frame.varset)) for i in range(len(X.frame))]
