"""Sparse multivariate polynomials over named variable blocks.

The whole library trades in these polynomials: objectives and constraints in
the decision variables x, index-set constraints in u, and coupling
polynomials g(x, u) living over both blocks at once.  Terms are stored in a
dict keyed by concatenated exponent tuples; the canonical term order is
graded lexicographic over the concatenation of the blocks, which is also the
order used for moment indexing and SDP assembly downstream.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

COEF_DROP_TOL = 1e-14


class PolynomialError(ValueError):
    """Structural error: incompatible spaces, missing coordinates, bad parse."""


@dataclass(frozen=True)
class VariableSpace:
    """A named block of scalar variables, labelled ``<name><first_index>`` .. ``<name><first_index+dim-1>``."""

    name: str
    dim: int
    first_index: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise PolynomialError(f"space {self.name!r} must have dimension >= 1")

    def labels(self) -> list[str]:
        return [f"{self.name}{self.first_index + i}" for i in range(self.dim)]

    def label(self, i: int) -> str:
        return f"{self.name}{self.first_index + i}"


def grlex_key(exp: tuple[int, ...]) -> tuple:
    """Sort key realizing graded lexicographic order (ascending)."""
    return (sum(exp), tuple(-e for e in exp))


def monomial_exponents(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent tuples in ``n`` variables of total degree <= ``d``, graded lex."""
    if d < 0:
        raise PolynomialError("degree must be nonnegative")
    out = [(0,) * n]
    for deg in range(1, d + 1):
        level = []
        # choose positions with repetition: each combination gives one monomial
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            level.append(tuple(e))
        level.sort(key=grlex_key)
        out.extend(level)
    return out


def basis_size(n: int, d: int) -> int:
    return math.comb(n + d, d)


def _merge_spaces(a: tuple[VariableSpace, ...], b: tuple[VariableSpace, ...]) -> tuple[VariableSpace, ...]:
    names = {s.name: s for s in a}
    merged = list(a)
    for s in b:
        if s.name in names:
            if names[s.name] != s:
                raise PolynomialError(f"conflicting definitions of space {s.name!r}")
        else:
            merged.append(s)
    return tuple(merged)


class Polynomial:
    """Immutable sparse polynomial with float coefficients.

    ``spaces`` is the ordered tuple of variable blocks; term keys are the
    concatenated exponent tuples in that order.  Zero coefficients below
    ``COEF_DROP_TOL`` are dropped by every constructor and operation.
    """

    __slots__ = ("spaces", "terms", "_offsets", "_nvars")

    def __init__(self, spaces: Sequence[VariableSpace], terms: Mapping[tuple[int, ...], float]):
        spaces = tuple(spaces)
        nvars = sum(s.dim for s in spaces)
        clean = {}
        for exp, c in terms.items():
            if len(exp) != nvars:
                raise PolynomialError("exponent tuple length does not match spaces")
            if abs(c) >= COEF_DROP_TOL:
                clean[tuple(exp)] = float(c)
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "terms", clean)
        offs, o = {}, 0
        for s in spaces:
            offs[s.name] = o
            o += s.dim
        object.__setattr__(self, "_offsets", offs)
        object.__setattr__(self, "_nvars", nvars)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, spaces: Sequence[VariableSpace]) -> "Polynomial":
        return cls(spaces, {})

    @classmethod
    def constant(cls, c: float, spaces: Sequence[VariableSpace]) -> "Polynomial":
        n = sum(s.dim for s in spaces)
        return cls(spaces, {(0,) * n: c})

    @classmethod
    def variable(cls, space: VariableSpace, i: int, spaces: Sequence[VariableSpace] | None = None) -> "Polynomial":
        """The monomial for variable ``i`` (0-based within ``space``)."""
        if not 0 <= i < space.dim:
            raise PolynomialError(f"variable index {i} out of range for space {space.name!r}")
        spaces = tuple(spaces) if spaces is not None else (space,)
        off, found = 0, None
        for s in spaces:
            if s.name == space.name:
                found = off
                break
            off += s.dim
        if found is None:
            raise PolynomialError(f"space {space.name!r} not among polynomial spaces")
        n = sum(s.dim for s in spaces)
        e = [0] * n
        e[found + i] = 1
        return cls(spaces, {tuple(e): 1.0})

    # -- structure ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self._nvars

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial by convention."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, space: VariableSpace | str) -> int:
        name = space if isinstance(space, str) else space.name
        if name not in self._offsets:
            return -1 if not self.terms else 0
        off = self._offsets[name]
        dim = next(s.dim for s in self.spaces if s.name == name)
        if not self.terms:
            return -1
        return max(sum(e[off:off + dim]) for e in self.terms)

    def half_degree(self) -> int:
        """ceil(deg/2); used as the localizing-order offset of a constraint."""
        return max(0, (self.degree() + 1) // 2)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], float]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def in_spaces(self, spaces: Sequence[VariableSpace]) -> "Polynomial":
        """Re-embed into a larger ordered space tuple."""
        spaces = tuple(spaces)
        if spaces == self.spaces:
            return self
        pos = []
        off = 0
        offsets = {}
        for s in spaces:
            offsets[s.name] = off
            off += s.dim
        n = off
        for s in self.spaces:
            if s.name not in offsets:
                raise PolynomialError(f"target spaces missing {s.name!r}")
            pos.append(offsets[s.name])
        terms = {}
        for exp, c in self.terms.items():
            e = [0] * n
            i = 0
            for s, p in zip(self.spaces, pos):
                for j in range(s.dim):
                    e[p + j] = exp[i + j]
                i += s.dim
            terms[tuple(e)] = c
        return Polynomial(spaces, terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if self.spaces == other.spaces:
            return self, other
        spaces = _merge_spaces(self.spaces, other.spaces)
        return self.in_spaces(spaces), other.in_spaces(spaces)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(float(other), self.spaces)
        a, b = self._coerce(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(a.spaces, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.spaces, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Polynomial(self.spaces, {e: c * float(other) for e, c in self.terms.items()})
        a, b = self._coerce(other)
        terms: dict[tuple[int, ...], float] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0.0) + c1 * c2
        return Polynomial(a.spaces, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolynomialError("negative power")
        out = Polynomial.constant(1.0, self.spaces)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._coerce(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.spaces, tuple(self.sorted_terms())))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, point: Mapping[str, Sequence[float]]) -> float:
        """Evaluate at ``point`` mapping space name -> coordinate vector.

        Terms are summed in graded lex order, so results are reproducible
        bit-for-bit across calls.
        """
        coords = []
        for s in self.spaces:
            if s.name not in point:
                raise PolynomialError(f"missing coordinates for space {s.name!r}")
            v = point[s.name]
            if len(v) != s.dim:
                raise PolynomialError(f"wrong dimension for space {s.name!r}")
            coords.extend(float(t) for t in v)
        total = 0.0
        for exp, c in self.sorted_terms():
            val = c
            for x, e in zip(coords, exp):
                if e:
                    val *= x ** e
            total += val
        return total

    def gradient(self, space: VariableSpace) -> list["Polynomial"]:
        """Partial derivatives with respect to each variable of ``space``."""
        if space.name not in self._offsets:
            raise PolynomialError(f"space {space.name!r} not among polynomial spaces")
        off = self._offsets[space.name]
        out = []
        for i in range(space.dim):
            terms: dict[tuple[int, ...], float] = {}
            for exp, c in self.terms.items():
                e = exp[off + i]
                if e == 0:
                    continue
                ne = list(exp)
                ne[off + i] = e - 1
                ne = tuple(ne)
                terms[ne] = terms.get(ne, 0.0) + c * e
            out.append(Polynomial(self.spaces, terms))
        return out

    def fix(self, space: VariableSpace, values: Sequence[float]) -> "Polynomial":
        """Substitute numeric values for one block, returning a polynomial in the rest."""
        if space.name not in self._offsets:
            raise PolynomialError(f"space {space.name!r} not among polynomial spaces")
        if len(values) != space.dim:
            raise PolynomialError("wrong number of values")
        off = self._offsets[space.name]
        rest = tuple(s for s in self.spaces if s.name != space.name)
        if not rest:
            raise PolynomialError("cannot fix the only space; use evaluation instead")
        terms: dict[tuple[int, ...], float] = {}
        for exp, c in self.sorted_terms():
            val = c
            for v, e in zip(values, exp[off:off + space.dim]):
                if e:
                    val *= float(v) ** e
            ne = exp[:off] + exp[off + space.dim:]
            terms[ne] = terms.get(ne, 0.0) + val
        return Polynomial(rest, terms)

    # -- rendering ----------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({self.to_string()!r})"

    def to_string(self) -> str:
        return poly_to_string(self)


@dataclass
class SemialgebraicSet:
    """Constraint lists over one variable block: equalities = 0, inequalities >= 0."""

    space: VariableSpace
    equalities: list[Polynomial] = field(default_factory=list)
    inequalities: list[Polynomial] = field(default_factory=list)

    def __post_init__(self):
        for p in list(self.equalities) + list(self.inequalities):
            for s in p.spaces:
                if s.name != self.space.name:
                    raise PolynomialError(
                        f"constraint over {s.name!r} does not belong to set over {self.space.name!r}")

    def members(self) -> list[Polynomial]:
        return list(self.equalities) + list(self.inequalities)

    def contains(self, point: Sequence[float], tol: float = 1e-8) -> bool:
        pt = {self.space.name: point}
        return (all(abs(h(pt)) <= tol for h in self.equalities)
                and all(g(pt) >= -tol for g in self.inequalities))

    def violation(self, point: Sequence[float]) -> float:
        pt = {self.space.name: point}
        v = 0.0
        for h in self.equalities:
            v = max(v, abs(h(pt)))
        for g in self.inequalities:
            v = max(v, -min(0.0, g(pt)))
        return v


# -- text form --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<var>[A-Za-z_]+\d+)"
                    r"|(?P<op>[-+*/^]))")


def poly_to_string(p: Polynomial) -> str:
    """Signed term list, e.g. ``-0.25 + 1 x1^2 u2``."""
    if not p.terms:
        return "0"
    labels = []
    for s in p.spaces:
        labels.extend(s.labels())
    parts = []
    for exp, c in p.sorted_terms():
        mono = " ".join(
            lab if e == 1 else f"{lab}^{e}"
            for lab, e in zip(labels, exp) if e > 0)
        coef = repr(c)
        piece = f"{coef} {mono}".strip() if mono else coef
        if not parts:
            parts.append(piece)
        elif piece.startswith("-"):
            parts.append("- " + piece[1:])
        else:
            parts.append("+ " + piece)
    return " ".join(parts)


def parse_polynomial(text: str, spaces: Sequence[VariableSpace]) -> Polynomial:
    """Parse the grammar emitted by :func:`poly_to_string`.

    Coefficients may be decimal or simple fractions like ``1/3``; ``*`` between
    factors is optional; variables are space-prefixed tokens such as ``x1``,
    ``u0``.  Raises :class:`PolynomialError` at the offending token.
    """
    spaces = tuple(spaces)
    var_index: dict[str, tuple[int, ...]] = {}
    n = sum(s.dim for s in spaces)
    off = 0
    for s in spaces:
        for i in range(s.dim):
            e = [0] * n
            e[off + i] = 1
            var_index[s.label(i)] = tuple(e)
        off += s.dim
    pos = 0
    tokens: list[tuple[str, str]] = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialError(f"parse error at position {pos}: {text[pos:pos+12]!r}")
        pos = m.end()
        for kind in ("num", "var", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    terms: dict[tuple[int, ...], float] = {}
    i = 0

    def flush(sign: float, coef: float, exp: list[int]):
        e = tuple(exp)
        terms[e] = terms.get(e, 0.0) + sign * coef

    sign = 1.0
    while i < len(tokens):
        # read one term
        coef = 1.0
        have_coef = False
        exp = [0] * n
        saw_factor = False
        while i < len(tokens):
            kind, tok = tokens[i]
            if kind == "op" and tok in "+-":
                if saw_factor:
                    break
                if tok == "-":
                    sign = -sign
                i += 1
                continue
            if kind == "op" and tok == "*":
                i += 1
                continue
            if kind == "num":
                val = float(tok)
                i += 1
                if i + 1 < len(tokens) and tokens[i] == ("op", "/") and tokens[i + 1][0] == "num":
                    val /= float(tokens[i + 1][1])
                    i += 2
                coef *= val
                have_coef = True
                saw_factor = True
                continue
            if kind == "var":
                if tok not in var_index:
                    raise PolynomialError(f"unknown variable {tok!r}")
                power = 1
                i += 1
                if i + 1 < len(tokens) and tokens[i] == ("op", "^") and tokens[i + 1][0] == "num":
                    power = int(float(tokens[i + 1][1]))
                    i += 2
                base = var_index[tok]
                for j, e in enumerate(base):
                    exp[j] += e * power
                saw_factor = True
                continue
            raise PolynomialError(f"unexpected token {tok!r}")
        if not saw_factor:
            raise PolynomialError("empty term")
        if not have_coef:
            coef = 1.0
        flush(sign, coef, exp)
        sign = 1.0
    return Polynomial(spaces, terms)
