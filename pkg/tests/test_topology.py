import itertools

import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from twistcox.errors import BudgetExceeded, HypothesisFailed, NotAComplex, NotComparable
from twistcox.poset import PosetElement, build_poset, mobius_matrix
from twistcox.topology import (
    ChainComplex,
    MorseMatching,
    OrderComplex,
    interval_homology,
    morse_inequalities_hold,
    morse_matching_caseI,
    morse_matching_collapse,
    morse_matching_suspend,
    order_complex,
    reduced_homology,
    smith_normal_form,
    verify_acyclic,
)

import oracles
from conftest import bruhat


def poset_from_relations(n_by_rank, less):
    """Tiny poset: ``n_by_rank`` lists ranks, ``less`` the strict relations (transitively closed)."""
    elems = [PosetElement((r, i), f"x{i}", "", r, 0) for i, r in enumerate(n_by_rank)]
    return build_poset(elems, lambda a, b: a == b or (a, b) in less)


def complex_from_faces(facets):
    """OrderComplex-shaped object for an arbitrary simplicial complex given by facets."""
    faces = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            faces.update(itertools.combinations(sorted(f), k))
    top = max(len(f) for f in faces)
    simplices = [sorted(f for f in faces if len(f) == d + 1) for d in range(top)]
    return OrderComplex(sorted({v for f in faces for v in f}), simplices)


class TestSmith:
    def test_examples(self):
        assert smith_normal_form([[1, 0], [0, 1]]) == [1, 1]
        assert smith_normal_form([[2, 0], [0, 0]]) == [2]
        assert smith_normal_form([[1, 1], [1, -1]]) == [1, 2]
        assert smith_normal_form([[1, 1], [1, -1]]) == oracles.hand_smith([[1, 1], [1, -1]])

    def test_empty_and_zero(self):
        assert smith_normal_form([]) == []
        assert smith_normal_form([[0, 0], [0, 0]]) == []

    def test_against_sympy(self):
        import random

        rng = random.Random(7)
        for _ in range(60):
            m, n = rng.randint(1, 6), rng.randint(1, 6)
            M = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
            ours = smith_normal_form(M)
            theirs = [abs(int(x)) for x in invariant_factors(Matrix(M), domain=ZZ) if x != 0]
            assert ours == theirs
            assert all(b % a == 0 for a, b in zip(ours, ours[1:]))


class TestHomology:
    def test_empty_complex(self):
        h = reduced_homology(ChainComplex.from_order_complex(OrderComplex([], [])))
        assert h.betti_at(-1) == 1 and h.classify() == "SPHERE(-1)"

    def test_point_and_two_points(self):
        assert reduced_homology(ChainComplex.from_order_complex(complex_from_faces([(0,)]))).classify() == "ACYCLIC"
        h = reduced_homology(ChainComplex.from_order_complex(complex_from_faces([(0,), (1,)])))
        assert h.classify() == "SPHERE(0)"

    def test_circle_and_sphere(self):
        circle = complex_from_faces([(0, 1), (1, 2), (0, 2)])
        assert reduced_homology(ChainComplex.from_order_complex(circle)).classify() == "SPHERE(1)"
        octahedron = complex_from_faces([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])
        assert reduced_homology(ChainComplex.from_order_complex(octahedron)).classify() == "SPHERE(2)"

    def test_projective_plane_torsion(self):
        # six-vertex triangulation of RP^2
        rp2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1), (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
        h = reduced_homology(ChainComplex.from_order_complex(complex_from_faces(rp2)))
        assert h.torsion_at(1) == [2] and h.betti_at(1) == 0 and h.betti_at(2) == 0
        assert h.classify() == "OTHER"
        assert "H~1 = Z^0 + Z/2" in h.lines()

    def test_not_a_complex(self):
        c = ChainComplex([1, 1, 1], [{(0, 0): 1}, {(0, 0): 1}])
        with pytest.raises(NotAComplex):
            reduced_homology(c)

    def test_order_complex_shapes(self):
        p = poset_from_relations([0, 1, 1, 1, 2], {(0, 1), (0, 2), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)})
        oc = order_complex(p, 0, 4)
        assert oc.f_vector() == [3] and oc.dimension == 0
        assert order_complex(p, 0, 1).f_vector() == []
        with pytest.raises(NotComparable):
            order_complex(p, 1, 2)
        with pytest.raises(BudgetExceeded):
            order_complex(bruhat("A5:flip").poset(), 0, 14, max_chains=10)

    def test_a5_top_interval_dimension(self):
        p = bruhat("A5:flip").poset()
        oc = order_complex(p, 0, len(p) - 1)
        assert oc.dimension == 4

    def test_euler_matches_mobius(self):
        p = bruhat("A5:flip").poset()
        mu = mobius_matrix(p)
        for u in range(len(p)):
            for v in range(len(p)):
                if p.less(u, v):
                    oc = order_complex(p, u, v)
                    h = reduced_homology(ChainComplex.from_order_complex(oc))
                    assert oc.reduced_euler_characteristic() == h.euler_characteristic() == mu[u, v]

    def test_rank_two_intervals_in_inv_have_two_points(self):
        for spec in ["A5:flip", "D4:swap", "E6:flip"]:
            p = bruhat(spec).poset("inv")
            for u in range(len(p)):
                for v in range(len(p)):
                    if p.leq[u, v] and p.rank[v] - p.rank[u] == 2:
                        assert len(order_complex(p, u, v).vertices) == 2

    def test_shifted_equal(self):
        s0 = reduced_homology(ChainComplex.from_order_complex(complex_from_faces([(0,), (1,)])))
        empty = reduced_homology(ChainComplex.from_order_complex(OrderComplex([], [])))
        assert s0.shifted_equal(empty, 1) and not s0.shifted_equal(empty, 0)


def iota_index(B, sexpr):
    return B.poset_index(B.find([i - 1 for i in sexpr]))


class TestMorse:
    def test_empty_matching_on_simplex_is_acyclic(self):
        cells = [()] + [c for k in range(1, 4) for c in itertools.combinations(range(3), k)]
        assert verify_acyclic(MorseMatching(cells, {}, cells))

    def test_adversarial_cycle(self):
        # square 0-1-2-3: match vertex 0 up to edge 01, vertex 1 to edge 12, ... closes a cycle
        cells = [(), (0,), (1,), (2,), (3,), (0, 1), (1, 2), (2, 3), (0, 3)]
        partner = {}
        for a, b in [((0,), (0, 1)), ((1,), (1, 2)), ((2,), (2, 3)), ((3,), (0, 3))]:
            partner[a], partner[b] = b, a
        m = MorseMatching(cells, partner, [c for c in cells if c not in partner])
        assert not verify_acyclic(m)

    def test_collapse_example(self):
        B = bruhat("A5:flip")
        p = B.poset()
        # s3 is theta-fixed, so e.s3 = s3 leaves iota
        targets = [v for v in range(1, len(p)) if B.enum.desc[2, p.elements[v].payload]]
        assert targets
        for v in targets:
            m = morse_matching_collapse(B, 0, v, 2)
            assert m.complete and verify_acyclic(m)
            assert interval_homology(p, 0, v).classify() == "ACYCLIC"

    def test_collapse_never_applies_to_a_cover(self):
        # for a cover, v.s = u would force u.s = v in iota, contradicting u.s = u s
        B = bruhat("A5:flip")
        p = B.poset()
        for a, b in p.covers:
            for s in range(5):
                with pytest.raises(HypothesisFailed):
                    morse_matching_collapse(B, a, b, s)

    def test_hypotheses(self):
        B = bruhat("A5:flip")
        top = len(B.poset()) - 1
        assert B.enum.desc[1, B.poset().elements[top].payload]
        with pytest.raises(HypothesisFailed):
            morse_matching_collapse(B, 0, top, 1)  # e.s2 = s4 s2, the theta(s) branch
        with pytest.raises(HypothesisFailed):
            morse_matching_suspend(B, 0, top, 2)  # e.s3 = s3, the plain branch

    def test_suspension_and_case_i(self):
        B = bruhat("A5:flip")
        p = B.poset()
        seen = {"sus": 0, "I": 0}
        for u in range(len(p)):
            for v in range(len(p)):
                if not p.less(u, v):
                    continue
                h = interval_homology(p, u, v)
                for s in range(5):
                    try:
                        m = morse_matching_suspend(B, u, v, s)
                    except HypothesisFailed:
                        pass
                    else:
                        seen["sus"] += 1
                        assert verify_acyclic(m) and m.critical_is_filter() and morse_inequalities_hold(m, h)
                        us = p.index(B.enum.elements[B.enum.act[s, p.elements[u].payload]].sexpr)
                        assert h.shifted_equal(interval_homology(p, us, v), 1)
                    try:
                        m = morse_matching_caseI(B, u, v, s)
                    except HypothesisFailed:
                        continue
                    seen["I"] += 1
                    assert verify_acyclic(m) and m.critical_is_filter() and morse_inequalities_hold(m, h)
        assert seen["sus"] > 0 and seen["I"] > 0
