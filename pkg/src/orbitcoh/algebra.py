"""Finitely presented graded-commutative algebras over GF(2).

An algebra is presented by homogeneous generators and a finite set of
rewrite rules ``lhs -> rhs`` between equal-degree terms.  Coefficients live
in GF(2), so elements are just sets of monomials and graded commutativity
carries no signs.

Monomials are exponent tuples aligned with the generator list.  The
monomial order is degree-lexicographic: compare total degree first, then
exponents with the *last listed* generator most significant.  Listing a
generator earlier therefore makes it smaller; for the Wall presentation
``x`` precedes ``c`` precisely so that ``c^(m+1) -> c^m * x`` rewrites
downward.  Every rule must strictly decrease this order, which makes
rewriting terminate; confluence is *checked*, never assumed.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

Mono = tuple[int, ...]

_FACTOR_RE = re.compile(r"([^\W\d]\w*)(?:\^(\d+))?$", re.UNICODE)


class PresentationError(ValueError):
    """Malformed generators, rules, or element syntax."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


@dataclass(frozen=True)
class RewriteRule:
    lhs: Mono
    rhs: frozenset[Mono]


@dataclass(frozen=True)
class ConfluenceFailure:
    """A non-joinable critical pair: the two normal forms disagree."""

    overlap: Mono
    first: frozenset[Mono]
    second: frozenset[Mono]
    rule_indices: tuple[int, int]


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _mono_divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_div(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


class AlgebraPresentation:
    """A graded-commutative GF(2) algebra with a terminating rewrite system.

    Immutable after construction; per-degree bases and normal forms are
    cached, so instances are cheap to share.
    """

    def __init__(self, generators, relations, name: str = ""):
        gens = tuple(Generator(g.name, g.degree) if isinstance(g, Generator)
                     else Generator(str(g[0]), int(g[1])) for g in generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise PresentationError("generator names must be unique")
        for g in gens:
            if g.degree < 1:
                raise PresentationError(f"generator {g.name} must have degree >= 1")
        self.name = name
        self.generators = gens
        self.gen_index = {g.name: i for i, g in enumerate(gens)}
        self._degrees = tuple(g.degree for g in gens)
        self.rules = tuple(self._validate_rule(lhs, rhs) for lhs, rhs in relations)
        self._nf_cache: dict[Mono, frozenset[Mono]] = {}
        self._basis_cache: dict[int, tuple[Mono, ...]] = {}
        self._basis_index_cache: dict[int, dict[Mono, int]] = {}
        self.top_degree = self._compute_top_degree()

    # -- monomial helpers -------------------------------------------------

    def mono_degree(self, mono: Mono) -> int:
        return sum(e * d for e, d in zip(mono, self._degrees))

    def order_key(self, mono: Mono):
        """Deglex key: degree, then exponents read most-significant first."""
        return (self.mono_degree(mono), tuple(reversed(mono)))

    def unit_mono(self) -> Mono:
        return (0,) * len(self.generators)

    def gen_mono(self, name: str) -> Mono:
        mono = [0] * len(self.generators)
        mono[self.gen_index[name]] = 1
        return tuple(mono)

    def mono_str(self, mono: Mono) -> str:
        parts = []
        for g, e in zip(self.generators, mono):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def _validate_rule(self, lhs, rhs) -> RewriteRule:
        lhs = tuple(int(e) for e in lhs)
        rhs = frozenset(tuple(int(e) for e in m) for m in rhs)
        if len(lhs) != len(self.generators):
            raise PresentationError("rule arity does not match generator count")
        deg = self.mono_degree(lhs)
        if deg < 1:
            raise PresentationError("rule left-hand side must have positive degree")
        for m in rhs:
            if self.mono_degree(m) != deg:
                raise PresentationError(
                    f"rule {self.mono_str(lhs)} has a non-homogeneous right-hand side")
            if self.order_key(m) >= self.order_key(lhs):
                raise PresentationError(
                    f"rule {self.mono_str(lhs)} does not decrease the monomial order")
        return RewriteRule(lhs, rhs)

    def _compute_top_degree(self) -> int | None:
        """Largest degree with a nonzero basis, or None when unbounded.

        Exponent bounds come from pure-power rule left-hand sides; a
        generator without one is unbounded and the algebra is infinite.
        """
        if not self.generators:
            return 0
        bounds = []
        for i, g in enumerate(self.generators):
            powers = [r.lhs[i] for r in self.rules
                      if r.lhs[i] > 0 and all(e == 0 for j, e in enumerate(r.lhs) if j != i)]
            if not powers:
                return None
            bounds.append(min(powers) - 1)
        ceiling = sum(b * g.degree for b, g in zip(bounds, self.generators))
        for q in range(ceiling, -1, -1):
            if self.degree_basis(q):
                return q
        return 0

    # -- rewriting ---------------------------------------------------------

    def _find_rule(self, mono: Mono) -> RewriteRule | None:
        for rule in self.rules:
            if _mono_divides(rule.lhs, mono):
                return rule
        return None

    def reduce_mono(self, mono: Mono) -> frozenset[Mono]:
        """Normal form of a single monomial as a set of monomials."""
        cached = self._nf_cache.get(mono)
        if cached is not None:
            return cached
        rule = self._find_rule(mono)
        if rule is None:
            result = frozenset([mono])
        else:
            quo = _mono_div(mono, rule.lhs)
            acc: set[Mono] = set()
            for rm in rule.rhs:
                acc ^= self.reduce_mono(_mono_mul(quo, rm))
            result = frozenset(acc)
        self._nf_cache[mono] = result
        return result

    def normal_form(self, monos) -> frozenset[Mono]:
        """Normal form of a GF(2) sum of (possibly repeated) monomials."""
        acc: set[Mono] = set()
        for m in monos:
            acc ^= self.reduce_mono(tuple(m))
        return frozenset(acc)

    def reduce_mono_randomized(self, mono: Mono, rng) -> frozenset[Mono]:
        """Normal form of a monomial along a randomized rewrite path.

        Used by the test suite to confirm that all rewrite strategies agree
        on confluent presentations.
        """
        work = [tuple(mono)]
        parity: dict[Mono, int] = {}
        while work:
            cur = work.pop(rng.randrange(len(work)))
            applicable = [r for r in self.rules if _mono_divides(r.lhs, cur)]
            if not applicable:
                parity[cur] = parity.get(cur, 0) ^ 1
                continue
            rule = applicable[rng.randrange(len(applicable))]
            quo = _mono_div(cur, rule.lhs)
            work.extend(_mono_mul(quo, rm) for rm in rule.rhs)
        return frozenset(m for m, p in parity.items() if p)

    def check_confluence(self) -> ConfluenceFailure | None:
        """Resolve every critical pair; None means locally confluent.

        With a terminating system this certifies unique normal forms.
        """
        for i, ri in enumerate(self.rules):
            for j in range(i + 1, len(self.rules)):
                rj = self.rules[j]
                overlap = tuple(max(a, b) for a, b in zip(ri.lhs, rj.lhs))
                via_i = self.normal_form(
                    _mono_mul(_mono_div(overlap, ri.lhs), rm) for rm in ri.rhs)
                via_j = self.normal_form(
                    _mono_mul(_mono_div(overlap, rj.lhs), rm) for rm in rj.rhs)
                if via_i != via_j:
                    return ConfluenceFailure(overlap, via_i, via_j, (i, j))
        return None

    # -- bases and series ----------------------------------------------------

    def degree_basis(self, q: int) -> tuple[Mono, ...]:
        """All normal-form monomials of degree ``q`` in ascending order."""
        if q < 0:
            return ()
        cached = self._basis_cache.get(q)
        if cached is not None:
            return cached
        found: list[Mono] = []
        ngen = len(self.generators)

        def walk(i: int, remaining: int, exps: list[int]):
            if i == ngen:
                if remaining == 0:
                    mono = tuple(exps)
                    if self._find_rule(mono) is None:
                        found.append(mono)
                return
            d = self._degrees[i]
            for e in range(remaining // d + 1):
                exps.append(e)
                walk(i + 1, remaining - e * d, exps)
                exps.pop()

        walk(0, q, [])
        found.sort(key=self.order_key)
        result = tuple(found)
        self._basis_cache[q] = result
        return result

    def basis_index(self, q: int) -> dict[Mono, int]:
        cached = self._basis_index_cache.get(q)
        if cached is None:
            cached = {m: i for i, m in enumerate(self.degree_basis(q))}
            self._basis_index_cache[q] = cached
        return cached

    def poincare_series(self, up_to: int) -> list[int]:
        return [len(self.degree_basis(q)) for q in range(up_to + 1)]

    # -- elements ------------------------------------------------------------

    def zero(self) -> "Element":
        return Element(self, frozenset())

    def unit(self) -> "Element":
        return Element(self, frozenset([self.unit_mono()]))

    def gen(self, name: str) -> "Element":
        if name not in self.gen_index:
            raise PresentationError(f"unknown generator {name!r}")
        return self.element([self.gen_mono(name)])

    def element(self, monos) -> "Element":
        return Element(self, self.normal_form(monos))

    def to_vector(self, elem: "Element", q: int) -> np.ndarray:
        index = self.basis_index(q)
        vec = np.zeros(len(index), dtype=np.uint8)
        for m in elem.terms:
            if self.mono_degree(m) != q:
                raise ValueError("element is not homogeneous of the requested degree")
            vec[index[m]] = 1
        return vec

    def from_vector(self, q: int, vec) -> "Element":
        basis = self.degree_basis(q)
        return Element(self, frozenset(basis[i] for i in np.nonzero(np.asarray(vec))[0]))

    def parse_element(self, text: str) -> "Element":
        text = text.strip()
        if text == "0":
            return self.zero()
        monos = []
        for part in text.split("+"):
            monos.append(self.parse_mono(part))
        return self.element(monos)

    def parse_mono(self, text: str) -> Mono:
        text = text.strip()
        if text == "1":
            return self.unit_mono()
        exps = [0] * len(self.generators)
        for factor in text.split("*"):
            m = _FACTOR_RE.match(factor.strip())
            if not m:
                raise PresentationError(f"cannot parse monomial factor {factor!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            if name not in self.gen_index:
                raise PresentationError(f"unknown generator {name!r}")
            exps[self.gen_index[name]] += power
        return tuple(exps)

    def __repr__(self):
        label = self.name or "presentation"
        return f"AlgebraPresentation({label}: {len(self.generators)} gens, {len(self.rules)} rules)"


class Element:
    """A GF(2) sum of normal-form monomials, homogeneous or zero."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: AlgebraPresentation, terms: frozenset[Mono]):
        degrees = {algebra.mono_degree(m) for m in terms}
        if len(degrees) > 1:
            raise ValueError("element terms must share a single degree")
        self.algebra = algebra
        self.terms = terms

    @property
    def degree(self) -> int | None:
        for m in self.terms:
            return self.algebra.mono_degree(m)
        return None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, self.terms ^ other.terms)

    def __mul__(self, other: "Element") -> "Element":
        self._check(other)
        prods = [_mono_mul(a, b) for a in self.terms for b in other.terms]
        return self.algebra.element(prods)

    def __pow__(self, n: int) -> "Element":
        out = self.algebra.unit()
        for _ in range(n):
            out = out * self
        return out

    def _check(self, other: "Element"):
        if self.algebra is not other.algebra:
            raise ValueError("elements belong to different presentations")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.algebra), self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms, key=self.algebra.order_key, reverse=True)
        return " + ".join(self.algebra.mono_str(m) for m in ordered)

    def __repr__(self):
        return f"Element({self})"


# -- built-in presentations ---------------------------------------------------


def wall_presentation(m: int, n: int) -> AlgebraPresentation:
    """Cohomology of the mapping-torus manifold Q(m, n).

    Generators x, c in degree 1 and d in degree 2, truncated by
    ``x^2 = 0``, ``c^(m+1) = c^m * x`` and ``d^(n+1) = 0``; the top degree
    is ``m + 2n + 1``.
    """
    if m < 0 or n < 0:
        raise PresentationError("wall presentation needs m, n >= 0")
    gens = [("x", 1), ("c", 1), ("d", 2)]
    rules = [
        ((2, 0, 0), ()),
        ((0, m + 1, 0), [(1, m, 0)]),
        ((0, 0, n + 1), ()),
    ]
    pres = AlgebraPresentation(gens, rules, name=f"wall({m},{n})")
    assert pres.top_degree == m + 2 * n + 1
    return pres


def dold_presentation(m: int, n: int) -> AlgebraPresentation:
    """Cohomology of the Dold manifold P(m, n): truncated polynomial ring."""
    if m < 0 or n < 0:
        raise PresentationError("dold presentation needs m, n >= 0")
    gens = [("c", 1), ("d", 2)]
    rules = [((m + 1, 0), ()), ((0, n + 1), ())]
    pres = AlgebraPresentation(gens, rules, name=f"dold({m},{n})")
    assert pres.top_degree == m + 2 * n
    return pres


def sphere_presentation(n: int) -> AlgebraPresentation:
    """Cohomology of the n-sphere: one exterior generator in degree n."""
    if n < 1:
        raise PresentationError("sphere presentation needs n >= 1")
    pres = AlgebraPresentation([("a", n)], [((2,), ())], name=f"sphere({n})")
    assert pres.top_degree == n
    return pres


def base_presentation() -> AlgebraPresentation:
    """Polynomial ring on one degree-1 generator t (classifying-space base)."""
    return AlgebraPresentation([("t", 1)], [], name="F2[t]")


# -- text format ----------------------------------------------------------------

def parse_presentation(text: str, name: str = "") -> AlgebraPresentation:
    """Parse the ``gen``/``rel`` line format.

    One generator per line as ``gen <name> <degree>`` and one relation per
    line as ``rel <monomial> = <polynomial|0>``.  Blank lines and ``#``
    comments are ignored.  The resulting presentation is *not* checked for
    confluence here; callers decide how to handle a failing check.
    """
    gen_lines = []
    rel_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        if fields[0] == "gen":
            parts = line.split()
            if len(parts) != 3:
                raise PresentationError(f"line {lineno}: expected 'gen <name> <degree>'")
            try:
                gen_lines.append((parts[1], int(parts[2])))
            except ValueError:
                raise PresentationError(f"line {lineno}: bad degree {parts[2]!r}") from None
        elif fields[0] == "rel":
            if len(fields) != 2 or "=" not in fields[1]:
                raise PresentationError(f"line {lineno}: expected 'rel <monomial> = <polynomial>'")
            lhs_text, rhs_text = fields[1].split("=", 1)
            rel_lines.append((lineno, lhs_text.strip(), rhs_text.strip()))
        else:
            raise PresentationError(f"line {lineno}: unknown directive {fields[0]!r}")
    skeleton = AlgebraPresentation(gen_lines, [], name=name)
    relations = []
    for lineno, lhs_text, rhs_text in rel_lines:
        try:
            lhs = skeleton.parse_mono(lhs_text)
            rhs_elem = skeleton.parse_element(rhs_text)
        except PresentationError as exc:
            raise PresentationError(f"line {lineno}: {exc}") from None
        relations.append((lhs, rhs_elem.terms))
    return AlgebraPresentation(gen_lines, relations, name=name)


def format_presentation(pres: AlgebraPresentation) -> str:
    """Serialize to the same ``gen``/``rel`` format ``parse_presentation`` reads."""
    lines = [f"gen {g.name} {g.degree}" for g in pres.generators]
    for rule in pres.rules:
        if rule.rhs:
            ordered = sorted(rule.rhs, key=pres.order_key, reverse=True)
            rhs = " + ".join(pres.mono_str(m) for m in ordered)
        else:
            rhs = "0"
        lines.append(f"rel {pres.mono_str(rule.lhs)} = {rhs}")
    return "\n".join(lines) + "\n"
