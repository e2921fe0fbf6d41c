"""First-quadrant spectral sequence of the Borel fibration over GF(2).

The base is the classifying space of the order-2 group, whose cohomology is
polynomial on one degree-1 class ``t``; with simple coefficients the
starting page is ``E_2^{p,q} = <t^p> (x) H^q(fiber)``.  Differentials are
specified transgressively: each fiber generator either survives every page
(a permanent cocycle) or carries one nonzero differential ``d_r`` into a
row of the base, and everything else follows from base-linearity and the
characteristic-2 Leibniz rule.

A cell keeps three pieces of data, all in E_2 coordinates (vectors over the
fiber basis of its row; the ``t^p`` factor is implicit): the subspace of
classes still alive (``cycles``), the subspace already hit (``boundaries``)
and canonical coset representatives for their quotient.  Turning a page is
subquotient bookkeeping plus three guards that are *checked*, never
assumed: compatibility of the derivation with every fiber relation, square
zero, and representative independence.

Window discipline: columns ``0..p_window`` are computed and cells with
``p + q < p_window`` are exact at every page; the fringe beyond that bound
may be distorted by truncation and is flagged in grid renderings.  The
default window is wide enough that every verdict reads exact cells only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2
from .algebra import AlgebraPresentation, Element, Mono

GREEK_CASE_ZERO = "Z"


class LeibnizInconsistency(Exception):
    """A differential assignment contradicts the fiber's ring relations."""

    def __init__(self, page: int, description: str):
        super().__init__(f"page {page}: {description}")
        self.page = page
        self.description = description


class SpectralModelError(RuntimeError):
    """The transgressive model cannot determine this run (engine refuses to guess)."""


@dataclass(frozen=True)
class TransgressionTarget:
    """A nonzero differential value ``t^page (x) element`` for one generator."""

    page: int
    element: Element

    def render(self, fiber: AlgebraPresentation) -> str:
        if self.element == fiber.unit():
            return f"t^{self.page}"
        body = str(self.element)
        if len(self.element.terms) > 1:
            body = f"({body})"
        return f"t^{self.page}*{body}"


@dataclass(frozen=True)
class DifferentialAssignment:
    """Per-generator differential choices plus a stable case label."""

    fiber: AlgebraPresentation
    choices: tuple[tuple[str, TransgressionTarget | None], ...]
    case_id: str

    def target(self, name: str) -> TransgressionTarget | None:
        for gname, tgt in self.choices:
            if gname == name:
                return tgt
        raise KeyError(name)

    def active_pages(self) -> tuple[int, ...]:
        return tuple(sorted({t.page for _, t in self.choices if t is not None}))

    def active_at(self, r: int) -> dict[str, TransgressionTarget]:
        return {name: t for name, t in self.choices if t is not None and t.page == r}

    def describe(self) -> str:
        parts = []
        for name, tgt in self.choices:
            if tgt is None:
                parts.append(f"{name}: permanent")
            else:
                parts.append(f"d{tgt.page}({name}) = {tgt.render(self.fiber)}")
        return "; ".join(parts)


@dataclass
class Cell:
    """One bigraded spot: alive classes, hit classes, and coset reps."""

    cycles: gf2.Subspace
    boundaries: gf2.Subspace
    reps: np.ndarray     # (dim, ambient) canonical coset representatives

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    @property
    def ambient(self) -> int:
        return self.cycles.ambient_dim


@dataclass
class Page:
    fiber: AlgebraPresentation
    r: int
    p_window: int
    fiber_top: int
    cells: dict[tuple[int, int], Cell]

    def cell(self, p: int, q: int) -> Cell | None:
        return self.cells.get((p, q))

    def dim(self, p: int, q: int) -> int:
        cell = self.cells.get((p, q))
        return cell.dim if cell is not None else 0

    def exact_total_degree(self) -> int:
        """Cells with p + q strictly below this are unaffected by truncation."""
        return self.p_window

    def total_dimension(self, j: int) -> int:
        if j >= self.exact_total_degree():
            raise ValueError(f"total degree {j} lies outside the certified window")
        return sum(self.dim(p, j - p) for p in range(0, j + 1))


@dataclass(frozen=True)
class CaseVerdict:
    assignment: DifferentialAssignment
    outcome: str                 # "survives" | "eliminated"
    reason: str | None           # "leibniz_inconsistent" | "vanishing_violation"
    detail: str | None
    e_infinity: Page | None

    @property
    def case_id(self) -> str:
        return self.assignment.case_id


def build_e2(fiber: AlgebraPresentation, p_window: int) -> Page:
    """Tensor-product starting page over columns ``0..p_window``."""
    if fiber.top_degree is None:
        raise SpectralModelError("the fiber algebra must be finite-dimensional")
    fiber_top = fiber.top_degree
    cells = {}
    for p in range(p_window + 1):
        for q in range(fiber_top + 1):
            ambient = len(fiber.degree_basis(q))
            if ambient == 0:
                continue
            full = gf2.Subspace.full(ambient)
            cells[(p, q)] = Cell(full, gf2.Subspace.zero(ambient),
                                 np.eye(ambient, dtype=np.uint8))
    return Page(fiber, 2, p_window, fiber_top, cells)


# -- assignment enumeration ----------------------------------------------------


def _nonzero_vectors(n: int):
    for mask in range(1, 2 ** n):
        yield [i for i in range(n) if mask >> i & 1]


def _generator_choices(fiber: AlgebraPresentation, gen) -> list[TransgressionTarget | None]:
    choices: list[TransgressionTarget | None] = [None]
    for r in range(2, gen.degree + 2):
        target_q = gen.degree + 1 - r
        basis = fiber.degree_basis(target_q)
        if not basis:
            continue
        for picks in _nonzero_vectors(len(basis)):
            elem = Element(fiber, frozenset(basis[i] for i in picks))
            choices.append(TransgressionTarget(r, elem))
    return choices


def _is_wall_shaped(fiber: AlgebraPresentation) -> bool:
    return [(g.name, g.degree) for g in fiber.generators] == [
        ("x", 1), ("c", 1), ("d", 2)]


def _wall_case_label(fiber: AlgebraPresentation,
                     choices: dict[str, TransgressionTarget | None]) -> str:
    """Single-letter taxonomy for the three-generator mapping-torus fiber.

    The letter records which generators transgress and on which page; the
    numeric suffix indexes the target choice for ``d`` (1..3 for the three
    degree-1 targets on page 2, 4 for the page-3 transgression).
    """
    x_on = choices["x"] is not None
    c_on = choices["c"] is not None
    d_choice = choices["d"]
    if d_choice is None:
        d_key = None
    elif d_choice.page == 3:
        d_key = 4
    else:
        basis = fiber.degree_basis(1)
        mask = sum(1 << i for i, m in enumerate(basis) if m in d_choice.element.terms)
        d_key = mask
    if not x_on and not c_on:
        if d_key is None:
            return GREEK_CASE_ZERO
        if d_key == 4:
            return "A"
        return f"B{d_key}"
    letter = {(True, True): ("C", "D"), (True, False): ("E", "F"),
              (False, True): ("H", "G")}[(x_on, c_on)]
    if d_key is None:
        return letter[0]
    return f"{letter[1]}{d_key}"


def enumerate_assignments(fiber: AlgebraPresentation) -> list[DifferentialAssignment]:
    """Every combination of per-generator differential choices.

    Each generator is either a permanent cocycle or carries one nonzero
    target on one admissible page; first-quadrant bidegrees bound the page
    by ``deg(g) + 1``.
    """
    if fiber.top_degree is None:
        raise SpectralModelError("the fiber algebra must be finite-dimensional")
    pools = [_generator_choices(fiber, g) for g in fiber.generators]
    wall_shaped = _is_wall_shaped(fiber)
    assignments = []
    for combo in itertools.product(*pools):
        choices = tuple((g.name, tgt) for g, tgt in zip(fiber.generators, combo))
        mapping = dict(choices)
        if wall_shaped:
            label = _wall_case_label(fiber, mapping)
        else:
            active = [(name, tgt) for name, tgt in choices if tgt is not None]
            if not active:
                label = GREEK_CASE_ZERO
            else:
                label = "; ".join(
                    f"d{t.page}({name})={t.render(fiber)}" for name, t in active)
        assignments.append(DifferentialAssignment(fiber, choices, label))
    return assignments


# -- the derivation -------------------------------------------------------------


def differential_value(fiber: AlgebraPresentation,
                       active: dict[str, TransgressionTarget],
                       mono: Mono) -> Element:
    """Leibniz value of the page differential on one fiber monomial.

    Returns the fiber component; the base column shift ``t^r`` is implicit.
    Even exponents contribute nothing (characteristic 2), which is what
    kills even powers of every generator on every page.
    """
    total = fiber.zero()
    for name, tgt in active.items():
        idx = fiber.gen_index[name]
        e = mono[idx]
        if e % 2:
            lowered = list(mono)
            lowered[idx] = e - 1
            total = total + fiber.element([tuple(lowered)]) * tgt.element
    return total


def _derivation_matrix(fiber, active, q: int) -> np.ndarray:
    """Matrix of the derivation from row q to row q + 1 - r, E_2 coordinates."""
    r = next(iter(active.values())).page if active else None
    src = fiber.degree_basis(q)
    tgt_q = q + 1 - r if r is not None else -1
    tgt = fiber.degree_basis(tgt_q) if tgt_q >= 0 else ()
    mat = np.zeros((len(tgt), len(src)), dtype=np.uint8)
    if not active or not tgt:
        return mat
    for j, mono in enumerate(src):
        value = differential_value(fiber, active, mono)
        if value:
            mat[:, j] = fiber.to_vector(value, tgt_q)
    return mat


@dataclass
class PageDifferential:
    r: int
    active: dict[str, TransgressionTarget]
    row_matrices: dict[int, np.ndarray]     # q -> derivation matrix on row q

    def apply(self, q: int, vec: np.ndarray) -> np.ndarray:
        mat = self.row_matrices.get(q)
        if mat is None or mat.size == 0:
            tgt_len = mat.shape[0] if mat is not None else 0
            return np.zeros(tgt_len, dtype=np.uint8)
        return (mat @ vec) % 2


def extend_by_leibniz(page: Page, assignment: DifferentialAssignment) -> PageDifferential:
    """Derivation matrices for the current page, with the relation guard.

    For every fiber rewrite rule the two Leibniz evaluations of its sides
    must agree; a mismatch is raised as ``LeibnizInconsistency`` and names
    the violated relation together with the two disagreeing values.
    """
    fiber = page.fiber
    if assignment.fiber is not fiber:
        raise ValueError("assignment belongs to a different fiber")
    r = page.r
    active = assignment.active_at(r)
    if active:
        for rule in fiber.rules:
            lhs_val = differential_value(fiber, active, rule.lhs)
            rhs_val = fiber.zero()
            for mono in rule.rhs:
                rhs_val = rhs_val + differential_value(fiber, active, mono)
            if lhs_val != rhs_val:
                rhs_elem = Element(fiber, rule.rhs)
                raise LeibnizInconsistency(
                    r,
                    f"relation {fiber.mono_str(rule.lhs)} = {rhs_elem} is violated: "
                    f"the differential sends the two sides to t^{r}*({lhs_val}) "
                    f"and t^{r}*({rhs_val})")
        _check_targets_alive(page, active)
    rows = {q: _derivation_matrix(fiber, active, q)
            for q in range(page.fiber_top + 1)}
    return PageDifferential(r, active, rows)


def _cell_class_coords(cell: Cell, vec: np.ndarray) -> np.ndarray:
    """Coordinates of a cycle's class in the cell's coset basis."""
    stacked = (np.vstack([cell.reps, cell.boundaries.basis])
               if cell.dim + cell.boundaries.dim
               else np.zeros((0, cell.ambient), dtype=np.uint8))
    coords = gf2.solve(stacked, vec)
    if coords is None:
        raise SpectralModelError("vector does not represent a class in its cell")
    return coords[: cell.dim]


def _check_targets_alive(page: Page, active: dict[str, TransgressionTarget]):
    fiber = page.fiber
    for name, tgt in active.items():
        gen_deg = fiber.generators[fiber.gen_index[name]].degree
        source = page.cell(0, gen_deg)
        src_vec = fiber.to_vector(fiber.gen(name), gen_deg)
        if source is None or not source.cycles.contains(src_vec) \
                or source.boundaries.contains(src_vec):
            raise SpectralModelError(
                f"generator {name} no longer represents a class on page {page.r}")
        target_cell = page.cell(tgt.page, tgt.element.degree)
        tgt_vec = fiber.to_vector(tgt.element, tgt.element.degree)
        if target_cell is None or not target_cell.cycles.contains(tgt_vec) \
                or target_cell.boundaries.contains(tgt_vec):
            raise SpectralModelError(
                f"declared target {tgt.render(fiber)} for {name} is not a "
                f"nonzero class on page {page.r}")


def turn_page(page: Page, diff: PageDifferential) -> Page:
    """Subquotient pass from page r to page r + 1.

    Checks, in order: images of cycles are cycles, images of boundaries are
    boundaries (representative independence), the square of the
    differential vanishes, and finally image-inside-kernel for every cell.
    """
    if diff.r != page.r:
        raise ValueError("differential was computed for a different page")
    if not diff.active:
        return Page(page.fiber, page.r + 1, page.p_window, page.fiber_top, page.cells)
    r = page.r
    incoming: dict[tuple[int, int], list[np.ndarray]] = {}
    out_kernel: dict[tuple[int, int], gf2.Subspace] = {}
    for pos in sorted(page.cells):
        p, q = pos
        cell = page.cells[pos]
        tgt_pos = (p + r, q + 1 - r)
        tgt_cell = page.cells.get(tgt_pos)
        if tgt_pos[0] > page.p_window or tgt_cell is None:
            # beyond the window or an empty row: nothing to record; when the
            # row is empty the derivation matrix is 0-by-k and images vanish
            out_kernel[pos] = gf2.Subspace.full(cell.dim)
            continue
        coord_cols = []
        raws = []
        for rep in cell.reps:
            raw = diff.apply(q, rep)
            if raw.any() and not tgt_cell.cycles.contains(raw):
                raise SpectralModelError(
                    f"differential image at ({p},{q}) is not a cycle on page {r}")
            _check_square_zero(page, diff, p, q, raw)
            raws.append(raw)
            coord_cols.append(_cell_class_coords(tgt_cell, raw))
        for bnd in cell.boundaries.basis:
            image = diff.apply(q, bnd)
            if image.any() and not tgt_cell.boundaries.contains(image):
                raise SpectralModelError(
                    f"differential at ({p},{q}) is not well defined on cosets")
        mat = (np.array(coord_cols, dtype=np.uint8).T
               if coord_cols else np.zeros((tgt_cell.dim, 0), dtype=np.uint8))
        out_kernel[pos] = gf2.kernel_basis(mat)
        nonzero = [v for v in raws if v.any()]
        if nonzero:
            incoming.setdefault(tgt_pos, []).extend(nonzero)
    new_cells = {}
    for pos in sorted(page.cells):
        cell = page.cells[pos]
        coeffs = out_kernel[pos]
        lifted = [(lam.astype(np.uint8) @ cell.reps) % 2 for lam in coeffs.basis] \
            if cell.dim else []
        cycles = cell.boundaries.add(lifted)
        boundaries = cell.boundaries.add(incoming.get(pos, []))
        if not cycles.contains_subspace(boundaries):
            raise SpectralModelError(
                f"image is not contained in the kernel at {pos} on page {r}")
        reps = gf2.subquotient(cycles, boundaries)
        new_cells[pos] = Cell(cycles, boundaries, reps)
    return Page(page.fiber, r + 1, page.p_window, page.fiber_top, new_cells)


def _check_square_zero(page: Page, diff: PageDifferential, p: int, q: int,
                       raw: np.ndarray):
    if not raw.any():
        return
    second = diff.apply(q + 1 - diff.r, raw)
    if not second.any():
        return
    pos2 = (p + 2 * diff.r, q + 2 - 2 * diff.r)
    if pos2[0] > page.p_window:
        return
    cell2 = page.cells.get(pos2)
    if cell2 is not None and cell2.boundaries.contains(second):
        return
    raise LeibnizInconsistency(
        diff.r,
        f"the differential does not square to zero at ({p},{q})")


# -- running cases ---------------------------------------------------------------


def default_window(fiber: AlgebraPresentation, dim_x: int) -> int:
    return dim_x + fiber.top_degree + 3


def run_case(fiber: AlgebraPresentation, dim_x: int,
             assignment: DifferentialAssignment,
             p_window: int | None = None,
             keep_pages: bool = False) -> CaseVerdict | tuple[CaseVerdict, list[Page]]:
    """Drive one assignment to its limit page and render a verdict.

    Pages are turned from 2 through ``fiber_top + 2``; beyond that every
    differential leaves the first quadrant.  A surviving case must satisfy
    the free-action vanishing bound: the total complex is zero in degrees
    ``dim_x < j <= dim_x + fiber_top``.
    """
    window = p_window if p_window is not None else default_window(fiber, dim_x)
    if window < default_window(fiber, dim_x):
        raise ValueError("window override below the certified default")
    page = build_e2(fiber, window)
    pages = [page]
    verdict = None
    try:
        for r in range(2, fiber.top_degree + 2):
            diff = extend_by_leibniz(page, assignment)
            page = turn_page(page, diff)
            pages.append(page)
    except LeibnizInconsistency as exc:
        verdict = CaseVerdict(assignment, "eliminated", "leibniz_inconsistent",
                              str(exc), None)
    if verdict is None:
        violations = [j for j in range(dim_x + 1, dim_x + fiber.top_degree + 1)
                      if page.total_dimension(j) > 0]
        if violations:
            if len(violations) == fiber.top_degree:
                detail = (f"nonzero classes in every degree "
                          f"{dim_x + 1}..{dim_x + fiber.top_degree}")
            else:
                detail = f"nonzero classes in degrees {violations}"
            verdict = CaseVerdict(assignment, "eliminated", "vanishing_violation",
                                  detail, None)
        else:
            verdict = CaseVerdict(assignment, "survives", None, None, page)
    return (verdict, pages) if keep_pages else verdict


def analyze_all(fiber: AlgebraPresentation, dim_x: int,
                p_window: int | None = None) -> list[CaseVerdict]:
    """Verdict for every enumerated assignment, in enumeration order."""
    return [run_case(fiber, dim_x, a, p_window)
            for a in enumerate_assignments(fiber)]


def page_at(fiber: AlgebraPresentation, dim_x: int,
            assignment: DifferentialAssignment, r: int,
            p_window: int | None = None) -> Page:
    """The page with index ``r`` for one assignment (for grid rendering).

    Raises ``LeibnizInconsistency`` when the case dies before reaching the
    requested page.
    """
    if r < 2:
        raise ValueError("pages start at r = 2")
    last = fiber.top_degree + 2
    if r > last:
        raise ValueError(f"pages stabilize at r = {last}; ask for at most that")
    window = p_window if p_window is not None else default_window(fiber, dim_x)
    page = build_e2(fiber, window)
    while page.r < r:
        diff = extend_by_leibniz(page, assignment)
        page = turn_page(page, diff)
    return page


def format_grid(page: Page, max_q: int | None = None) -> str:
    """Fixed-width dimension grid, q vertical and p horizontal.

    Cells on or beyond the window boundary (``p + q >= p_window``) may be
    window artifacts and are rendered as ``~``.
    """
    top = page.fiber_top if max_q is None else min(max_q, page.fiber_top)
    width = max(len(str(page.p_window)), 2) + 1
    lines = [f"E_{page.r} page (fiber {page.fiber.name or 'custom'}, "
             f"columns 0..{page.p_window})"]
    header = "  q\\p|" + "".join(str(p).rjust(width) for p in range(page.p_window + 1))
    lines.append(header)
    lines.append("  " + "-" * (len(header) - 2))
    for q in range(top, -1, -1):
        row = [str(q).rjust(4) + "|"]
        for p in range(page.p_window + 1):
            if p + q >= page.exact_total_degree():
                row.append("~".rjust(width))
            else:
                row.append(str(page.dim(p, q)).rjust(width))
        lines.append("".join(row))
    lines.append("  ('~' marks the uncertified window fringe)")
    return "\n".join(lines)
