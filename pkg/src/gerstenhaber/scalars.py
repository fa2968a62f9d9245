"""Exact rational polynomials over a fixed, ordered set of variables.

The coefficient field is :class:`fractions.Fraction`.  Polynomials are
immutable; every constructor canonicalizes (no stored zero coefficients).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class VarSetMismatch(ValueError):
    pass


class UnknownVariable(KeyError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        msg = f"unknown variable {name!r}"
        if position is not None:
            msg += f" at position {position}"
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class ParseError(ValueError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        text = f"{message} at position {position}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class VarSet:
    """Ordered tuple of distinct variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not _IDENT.fullmatch(n):
                raise ValueError(f"invalid identifier {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarSet({list(self.names)!r})"

    def extend(self, names: Iterable[str]) -> "VarSet":
        return VarSet(self.names + tuple(n for n in names if n not in self._index))


def _grlex_key(exps):
    return (sum(exps), exps)


class Polynomial:
    """Sparse multivariate polynomial with :class:`Fraction` coefficients.

    ``terms`` maps exponent tuples (one entry per variable of ``varset``)
    to nonzero coefficients.
    """

    __slots__ = ("varset", "terms", "_hash")

    def __init__(self, varset: VarSet, terms: Mapping[tuple, Scalar] | None = None):
        self.varset = varset
        clean = {}
        if terms:
            n = len(varset)
            for exps, c in terms.items():
                if len(exps) != n:
                    raise ValueError(f"exponent vector {exps} has wrong length for {varset}")
                if c:
                    clean[tuple(exps)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, varset, terms):
        # terms already canonical
        obj = cls.__new__(cls)
        obj.varset = varset
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, varset: VarSet) -> "Polynomial":
        return cls._raw(varset, {})

    @classmethod
    def constant(cls, varset: VarSet, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return cls._raw(varset, {(0,) * len(varset): c} if c else {})

    @classmethod
    def variable(cls, varset: VarSet, name: str) -> "Polynomial":
        i = varset.index(name)
        exps = [0] * len(varset)
        exps[i] = 1
        return cls._raw(varset, {tuple(exps): Fraction(1)})

    # -- inspection ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.varset), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self.varset.index(n) for n in names]
        return max((sum(e[i] for i in idx) for e in self.terms), default=-1)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            used.update(self.varset.names[i] for i, k in enumerate(e) if k)
        return used

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.varset != self.varset:
                raise VarSetMismatch(f"{self.varset} vs {other.varset}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.varset, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.varset, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.varset, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial.zero(self.varset)
        return Polynomial._raw(self.varset, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Polynomial.zero(self.varset)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.varset, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.varset, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to ``name``."""
        i = self.varset.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return Polynomial._raw(self.varset, out)

    def evaluate(self, point: Mapping[str, object]):
        """Value at ``point``; exact when every assigned value is rational."""
        missing = [n for n in self.varset.names if n not in point]
        if missing:
            raise KeyError(f"missing assignment for {missing}")
        vals = [point[n] for n in self.varset.names]
        exact = all(isinstance(v, (int, Fraction)) for v in vals)
        if exact:
            vals = [Fraction(v) for v in vals]
            total = Fraction(0)
        else:
            vals = [float(v) for v in vals]
            total = 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for v, k in zip(vals, e):
                if k:
                    term = term * v ** k
            total += term
        return total

    def embed(self, varset: VarSet) -> "Polynomial":
        """Same polynomial over a varset containing every used variable."""
        if varset == self.varset:
            return self
        idx = []
        for n in self.varset.names:
            idx.append(varset.index(n) if n in varset else None)
        m = len(varset)
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * m
            for i, k in enumerate(e):
                if k:
                    if idx[i] is None:
                        raise VarSetMismatch(
                            f"variable {self.varset.names[i]!r} not in {varset}")
                    e2[idx[i]] = k
            out[tuple(e2)] = c
        return Polynomial._raw(varset, out)

    def substitute(self, mapping: Mapping[str, "Polynomial"], varset: VarSet) -> "Polynomial":
        """Compose: replace each variable by a polynomial over ``varset``.

        Variables absent from ``mapping`` must exist in ``varset`` and are
        carried over unchanged.
        """
        images = []
        for n in self.varset.names:
            if n in mapping:
                p = mapping[n]
                if p.varset != varset:
                    raise VarSetMismatch(f"image of {n} lives over {p.varset}")
                images.append(p)
            else:
                images.append(Polynomial.variable(varset, n))
        powers: dict = {}
        result = Polynomial.zero(varset)
        for e, c in self.terms.items():
            term = Polynomial.constant(varset, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    term = term * powers[key]
            result = result + term
        return result

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.varset == other.varset and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(0,) * len(self.varset): Fraction(other)}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.varset, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- printing ------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                n if p == 1 else f"{n}^{p}"
                for n, p in zip(self.varset.names, e) if p)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = _fmt_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_rational(a)}*{mono}"
            if k == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- parser ------------------------------------------------------------------
#
#   expr     := ['+'|'-'] term (('+'|'-') term)*
#   term     := factor ('*' factor)*
#   factor   := base ('^' uint)?
#   base     := rational | identifier | '(' expr ')'
#   rational := int ('/' uint)?
#
# The optional leading sign is needed so that printed polynomials with a
# negative leading coefficient parse back.

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, varset: VarSet):
        self.tokens = _tokenize(text)
        self.i = 0
        self.varset = varset

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"unexpected {val or 'end of input'!r}", pos, repr(op))

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        result = self.term()
        if sign < 0:
            result = -result
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                result = result + t if val == "+" else result - t
            else:
                return result

    def term(self):
        result = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self):
        base = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", pos)
            if kind != "int":
                raise ParseError(f"unexpected {val or 'end of input'!r}", pos, "unsigned integer exponent")
            return base ** int(val)
        return base

    def base(self):
        kind, val, pos = self.take()
        if kind == "int":
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, p3 = self.take()
                if k3 != "int":
                    raise ParseError(f"unexpected {v3 or 'end of input'!r}", p3, "unsigned integer denominator")
                if int(v3) == 0:
                    raise ParseError("zero denominator", p3)
                return Polynomial.constant(self.varset, Fraction(num, int(v3)))
            return Polynomial.constant(self.varset, num)
        if kind == "ident":
            if val not in self.varset:
                raise UnknownVariable(val, pos)
            return Polynomial.variable(self.varset, val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, "number, identifier or '('")


def parse_scalar(text: str, varset: VarSet) -> Polynomial:
    """Parse a coefficient expression into a canonical polynomial."""
    p = _Parser(text, varset)
    result = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos, "'+', '-', '*', '^' or end of input")
    return result


def arith(op: str, a: Polynomial, b=None) -> Polynomial:
    """Dispatch form of the ring operations (``add``, ``mul``, ``neg``, ``scale``)."""
    if op == "add":
        return a + a._coerce(b)
    if op == "mul":
        return a * a._coerce(b)
    if op == "neg":
        return -a
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")
