import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitcoh.algebra import (
    AlgebraPresentation,
    PresentationError,
    base_presentation,
    dold_presentation,
    format_presentation,
    parse_presentation,
    sphere_presentation,
    wall_presentation,
)


def exhaustive_reduction_oracle(pres, mono):
    """Breadth-first closure over *every* one-step rewrite order.

    Independent of the engine's reduction strategy: returns the set of all
    fully reduced results reachable from ``mono``.  For a confluent system
    this set has exactly one member.
    """
    from orbitcoh.algebra import _mono_div, _mono_divides, _mono_mul

    def one_steps(state):
        out = []
        monos = sorted(state)
        for m in monos:
            for rule in pres.rules:
                if _mono_divides(rule.lhs, m):
                    quo = _mono_div(m, rule.lhs)
                    nxt = set(state)
                    nxt ^= {m}
                    for rm in rule.rhs:
                        nxt ^= {_mono_mul(quo, rm)}
                    out.append(frozenset(nxt))
        return out

    seen = set()
    frontier = {frozenset([tuple(mono)])}
    finals = set()
    while frontier:
        nxt = set()
        for state in frontier:
            if state in seen:
                continue
            seen.add(state)
            steps = one_steps(state)
            if not steps:
                finals.add(state)
            else:
                nxt.update(steps)
        frontier = nxt - seen
    return finals


class TestNormalForm:
    def test_wall_relation_rewrites_down(self):
        q13 = wall_presentation(1, 3)
        c = q13.gen("c")
        assert str(c * c) == "x*c"

    def test_unit_is_fixed(self):
        q13 = wall_presentation(1, 3)
        assert q13.unit() * q13.unit() == q13.unit()

    def test_cube_of_c_vanishes_all_rewrite_orders(self):
        q13 = wall_presentation(1, 3)
        c3 = q13.parse_mono("c^3")
        finals = exhaustive_reduction_oracle(q13, c3)
        assert finals == {frozenset()}
        assert q13.normal_form([c3]) == frozenset()

    def test_square_of_x_vanishes(self):
        q15 = wall_presentation(1, 5)
        x = q15.gen("x")
        assert not (x * x)

    def test_unit_times_generator(self):
        q13 = wall_presentation(1, 3)
        d = q13.gen("d")
        assert q13.unit() * d == d

    def test_product_with_truncation(self):
        q15 = wall_presentation(1, 5)
        d = q15.gen("d")
        cx = q15.gen("c") * q15.gen("x")
        lhs = (d ** 3) * (cx * d ** 2 + d ** 3)
        assert lhs == cx * d ** 5
        assert str(lhs) == "x*c*d^5"


class TestConfluence:
    def test_wall_presentations_confluent(self):
        assert wall_presentation(1, 3).check_confluence() is None
        assert wall_presentation(2, 3).check_confluence() is None

    def test_dold_presentation_confluent(self):
        assert dold_presentation(1, 3).check_confluence() is None

    def test_conflicting_rules_reported(self):
        bad = AlgebraPresentation(
            [("x", 1), ("c", 1)],
            [((0, 2), [(1, 1)]), ((0, 2), ())],
        )
        failure = bad.check_confluence()
        assert failure is not None
        assert failure.first == frozenset([(1, 1)]) or failure.second == frozenset([(1, 1)])

    @pytest.mark.parametrize("pres_factory", [
        lambda: wall_presentation(1, 3),
        lambda: wall_presentation(2, 5),
        lambda: dold_presentation(2, 2),
        lambda: sphere_presentation(3),
    ])
    def test_randomized_reduction_agrees(self, pres_factory):
        pres = pres_factory()
        rng = random.Random(20240817)
        top = pres.top_degree
        for _ in range(200):
            q = rng.randrange(0, top + 2)
            basis_monos = [
                tuple(rng.randrange(0, 4) for _ in pres.generators)
                for _ in range(rng.randrange(1, 4))
            ]
            expected = pres.normal_form(basis_monos)
            got = frozenset()
            for m in basis_monos:
                got ^= pres.reduce_mono_randomized(m, rng)
            assert got == expected


class TestDegreeBasis:
    def test_q13_degree_three(self):
        q13 = wall_presentation(1, 3)
        basis = q13.degree_basis(3)
        assert [q13.mono_str(m) for m in basis] == ["x*d", "c*d"]

    def test_q13_top_degree(self):
        q13 = wall_presentation(1, 3)
        basis = q13.degree_basis(8)
        assert [q13.mono_str(m) for m in basis] == ["x*c*d^3"]

    def test_q13_above_top_empty(self):
        assert wall_presentation(1, 3).degree_basis(9) == ()

    def test_poincare_series_q13(self):
        # independent oracle: normal forms are x^a c^b d^e with a,b <= 1, e <= 3
        expected = [0] * 9
        for a, b, e in itertools.product(range(2), range(2), range(4)):
            expected[a + b + 2 * e] += 1
        assert wall_presentation(1, 3).poincare_series(8) == expected
        assert expected == [1, 2, 2, 2, 2, 2, 2, 2, 1]

    def test_poincare_series_base(self):
        assert base_presentation().poincare_series(4) == [1, 1, 1, 1, 1]

    def test_dold_total_dimension(self):
        p13 = dold_presentation(1, 3)
        assert sum(p13.poincare_series(p13.top_degree)) == 8

    def test_dold_1_1_dimensions(self):
        assert dold_presentation(1, 1).poincare_series(3) == [1, 1, 1, 1]


class TestBuilders:
    def test_wall_shape(self):
        q13 = wall_presentation(1, 3)
        assert [(g.name, g.degree) for g in q13.generators] == [("x", 1), ("c", 1), ("d", 2)]
        assert q13.top_degree == 8

    def test_sphere_shape(self):
        s2 = sphere_presentation(2)
        assert [(g.name, g.degree) for g in s2.generators] == [("a", 2)]
        assert s2.poincare_series(2) == [1, 0, 1]

    def test_base_is_unbounded(self):
        assert base_presentation().top_degree is None

    def test_wall_m0_degenerates_cleanly(self):
        q03 = wall_presentation(0, 3)
        assert q03.top_degree == 7
        assert sum(q03.poincare_series(7)) == 2 * 1 * 4

    @pytest.mark.parametrize("m", range(4))
    @pytest.mark.parametrize("n", range(8))
    def test_total_dimension_closed_form(self, m, n):
        pres = wall_presentation(m, n)
        assert sum(pres.poincare_series(pres.top_degree)) == 2 * (m + 1) * (n + 1)

    @pytest.mark.parametrize("m", range(4))
    @pytest.mark.parametrize("n", range(8))
    def test_poincare_duality(self, m, n):
        pres = wall_presentation(m, n)
        top = m + 2 * n + 1
        series = pres.poincare_series(top)
        assert series == series[::-1]


@st.composite
def wall_elements(draw, pres):
    q = draw(st.integers(0, pres.top_degree))
    basis = pres.degree_basis(q)
    if not basis:
        return pres.zero()
    mask = draw(st.integers(0, 2 ** len(basis) - 1))
    return pres.element([m for i, m in enumerate(basis) if mask >> i & 1])


class TestRingAxioms:
    q15 = wall_presentation(1, 5)

    @given(st.data())
    @settings(max_examples=120)
    def test_multiplication_associative(self, data):
        a = data.draw(wall_elements(self.q15))
        b = data.draw(wall_elements(self.q15))
        c = data.draw(wall_elements(self.q15))
        assert (a * b) * c == a * (b * c)

    @given(st.data())
    @settings(max_examples=120)
    def test_multiplication_commutative(self, data):
        a = data.draw(wall_elements(self.q15))
        b = data.draw(wall_elements(self.q15))
        assert a * b == b * a

    @given(st.data())
    def test_addition_is_gf2(self, data):
        a = data.draw(wall_elements(self.q15))
        assert not (a + a)


class TestValidation:
    def test_rejects_duplicate_names(self):
        with pytest.raises(PresentationError):
            AlgebraPresentation([("x", 1), ("x", 2)], [])

    def test_rejects_degree_zero_generator(self):
        with pytest.raises(PresentationError):
            AlgebraPresentation([("x", 0)], [])

    def test_rejects_non_homogeneous_rule(self):
        with pytest.raises(PresentationError):
            AlgebraPresentation([("x", 1), ("d", 2)], [((0, 1), [(1, 0)])])

    def test_rejects_order_increasing_rule(self):
        # c^2 -> c*x is fine, but c*x -> c^2 would increase the order
        with pytest.raises(PresentationError):
            AlgebraPresentation([("x", 1), ("c", 1)], [((1, 1), [(0, 2)])])

    def test_element_homogeneity_enforced(self):
        q13 = wall_presentation(1, 3)
        with pytest.raises(ValueError):
            q13.gen("x") + q13.gen("d")


class TestTextFormat:
    def test_roundtrip_wall(self):
        q23 = wall_presentation(2, 3)
        text = format_presentation(q23)
        back = parse_presentation(text)
        assert [(g.name, g.degree) for g in back.generators] == [
            (g.name, g.degree) for g in q23.generators
        ]
        assert set(back.rules) == set(q23.rules)
        assert back.top_degree == q23.top_degree

    def test_parse_relation_polynomial(self):
        text = "gen x 1\ngen c 1\nrel x^2 = 0\nrel c^2 = c*x\n"
        pres = parse_presentation(text)
        c = pres.gen("c")
        assert str(c * c) == "x*c"

    def test_parse_rejects_unknown_generator(self):
        with pytest.raises(PresentationError):
            parse_presentation("gen x 1\nrel y^2 = 0\n")

    def test_parse_rejects_garbage(self):
        with pytest.raises(PresentationError):
            parse_presentation("hello world\n")

    def test_comments_and_blanks_ignored(self):
        text = "# cohomology of a circle\n\ngen a 1\nrel a^2 = 0\n"
        pres = parse_presentation(text)
        assert pres.poincare_series(1) == [1, 1]
