"""Classification of induced involutions on the cohomology of Q(m, n).

A candidate action is a degree-preserving assignment of images to the ring
generators.  Candidates are filtered cheapest-first: ring-homomorphism and
bijectivity constraints, then involutivity, then the fixed-point
obstruction of Bredon (a middle-degree class ``a`` with ``a * T(a) != 0``
forces a fixed point, so no *free* involution can induce the action).

A surviving candidate is only "not eliminated": no implemented obstruction
kills it.  Realization by an actual free involution is outside the reach of
these cohomological filters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .algebra import AlgebraPresentation, Element, wall_presentation


class ObstructionInapplicable(ValueError):
    """Preconditions of the fixed-point obstruction fail for this input."""


@dataclass(frozen=True)
class EndoCandidate:
    """Generator images of a candidate action, in generator-list order."""

    images: tuple[tuple[str, Element], ...]

    def image(self, name: str) -> Element:
        for gname, elem in self.images:
            if gname == name:
                return elem
        raise KeyError(name)

    def describe(self) -> str:
        return ", ".join(f"{name} -> {elem}" for name, elem in self.images)


@dataclass(frozen=True)
class ObstructionWitness:
    middle_class: Element
    product: Element


@dataclass(frozen=True)
class CandidateRecord:
    candidate: EndoCandidate
    status: str                      # "survives" | "eliminated"
    stage: str | None                # filter that eliminated the candidate
    reason: str | None
    witness: ObstructionWitness | None
    trivial_in_degrees_ge_2: bool | None


@dataclass(frozen=True)
class ActionReport:
    m: int
    n: int
    presentation: AlgebraPresentation
    records: tuple[CandidateRecord, ...]

    def survivors(self) -> tuple[CandidateRecord, ...]:
        return tuple(r for r in self.records if r.status == "survives")

    def _is_identity_or_twist(self, record: CandidateRecord) -> bool:
        pres = self.presentation
        cand = record.candidate
        if cand.image("x") != pres.gen("x") or cand.image("d") != pres.gen("d"):
            return False
        return cand.image("c") in (pres.gen("c"), pres.gen("c") + pres.gen("x"))

    @property
    def classification_complete(self) -> bool:
        """True when every survivor is the identity or the c -> c + x twist."""
        return all(self._is_identity_or_twist(r) for r in self.survivors())

    @property
    def unresolved(self) -> tuple[CandidateRecord, ...]:
        """Survivors beyond the identity/twist pair (undecided cases)."""
        return tuple(r for r in self.survivors()
                     if not self._is_identity_or_twist(r))


def _nonzero_elements(pres: AlgebraPresentation, q: int) -> list[Element]:
    basis = pres.degree_basis(q)
    out = []
    for mask in range(1, 2 ** len(basis)):
        out.append(Element(pres, frozenset(
            m for i, m in enumerate(basis) if mask >> i & 1)))
    return out


def enumerate_candidates(pres: AlgebraPresentation) -> list[EndoCandidate]:
    """All assignments of nonzero equal-degree images to the generators."""
    if pres.top_degree is None:
        raise ValueError("candidate enumeration needs a finite algebra")
    pools = [[(g.name, e) for e in _nonzero_elements(pres, g.degree)]
             for g in pres.generators]
    out = []

    def walk(i, acc):
        if i == len(pools):
            out.append(EndoCandidate(tuple(acc)))
            return
        for item in pools[i]:
            acc.append(item)
            walk(i + 1, acc)
            acc.pop()

    walk(0, [])
    return out


def apply_candidate(pres: AlgebraPresentation, cand: EndoCandidate,
                    elem_or_mono) -> Element:
    """Image of an element (or a raw monomial) under the candidate map."""
    monos = elem_or_mono.terms if isinstance(elem_or_mono, Element) else [tuple(elem_or_mono)]
    total = pres.zero()
    for mono in monos:
        term = pres.unit()
        for (name, img), e in zip(cand.images, mono):
            if e:
                term = term * img ** e
        total = total + term
    return total


def is_ring_endomorphism(pres: AlgebraPresentation,
                         cand: EndoCandidate) -> tuple[bool, str | None]:
    """True when every relation maps to zero and all degree maps are bijective."""
    for rule in pres.rules:
        lhs_img = apply_candidate(pres, cand, rule.lhs)
        rhs_img = apply_candidate(pres, cand, Element(pres, rule.rhs))
        if lhs_img != rhs_img:
            rhs_elem = Element(pres, rule.rhs)
            return False, (
                f"relation {pres.mono_str(rule.lhs)} = {rhs_elem} maps to "
                f"{lhs_img} != {rhs_img}")
    for q in range(1, pres.top_degree + 1):
        basis = pres.degree_basis(q)
        if not basis:
            continue
        cols = [pres.to_vector(apply_candidate(pres, cand, m), q) for m in basis]
        if gf2.rank(np.array(cols, dtype=np.uint8)) < len(basis):
            return False, f"not bijective in degree {q}"
    return True, None


def is_involutive(pres: AlgebraPresentation, cand: EndoCandidate) -> bool:
    """True when the candidate composed with itself fixes every generator."""
    for g in pres.generators:
        twice = apply_candidate(pres, cand, cand.image(g.name))
        if twice != pres.gen(g.name):
            return False
    return True


def bredon_obstruction(pres: AlgebraPresentation, cand: EndoCandidate,
                       l: int) -> ObstructionWitness | None:
    """Search degree-l classes ``a`` with ``a * T(a) != 0``.

    Applicable only when the algebra vanishes above degree 2l and the
    candidate is the identity in degree 2l; a witness certifies that the
    candidate cannot come from a free involution.
    """
    top = pres.top_degree
    if top is None or top > 2 * l:
        raise ObstructionInapplicable(
            f"cohomology does not vanish above degree {2 * l}")
    for mono in pres.degree_basis(2 * l):
        if apply_candidate(pres, cand, mono) != pres.element([mono]):
            raise ObstructionInapplicable(
                f"candidate is not the identity in degree {2 * l}")
    for a in _nonzero_elements(pres, l):
        product = a * apply_candidate(pres, cand, a)
        if product:
            return ObstructionWitness(a, product)
    return None


def is_trivial_in_degrees_ge_2(pres: AlgebraPresentation,
                               cand: EndoCandidate) -> bool:
    for q in range(2, pres.top_degree + 1):
        for mono in pres.degree_basis(q):
            if apply_candidate(pres, cand, mono) != pres.element([mono]):
                return False
    return True


def classify_free_actions(m: int, n: int) -> ActionReport:
    """Filter all candidate actions on H*(Q(m, n)) for odd ``n``.

    The odd-n restriction matches the regime where Q(m, n) bounds and can
    carry a free involution at all.
    """
    if n % 2 == 0:
        raise ValueError("classification requires odd n")
    pres = wall_presentation(m, n)
    top = pres.top_degree
    l = (top + 1) // 2
    records = []
    for cand in enumerate_candidates(pres):
        ok, reason = is_ring_endomorphism(pres, cand)
        if not ok:
            records.append(CandidateRecord(cand, "eliminated",
                                           "ring_endomorphism", reason, None, None))
            continue
        if not is_involutive(pres, cand):
            records.append(CandidateRecord(
                cand, "eliminated", "involutivity",
                "composed with itself, the map is not the identity", None, None))
            continue
        try:
            witness = bredon_obstruction(pres, cand, l)
        except ObstructionInapplicable as exc:
            records.append(CandidateRecord(
                cand, "survives", None, f"fixed-point obstruction inapplicable: {exc}",
                None, is_trivial_in_degrees_ge_2(pres, cand)))
            continue
        if witness is not None:
            records.append(CandidateRecord(
                cand, "eliminated", "fixed_point_obstruction",
                f"a = {witness.middle_class} has a * T(a) = {witness.product} != 0",
                witness, None))
        else:
            records.append(CandidateRecord(
                cand, "survives", None, "no obstruction found (not eliminated)",
                None, is_trivial_in_degrees_ge_2(pres, cand)))
    return ActionReport(m, n, pres, tuple(records))
