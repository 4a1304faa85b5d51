import json

import numpy as np
import pytest

from twistcox import TwistedSystem, build_system, resolve_group, resolve_preset
from twistcox.coxeter import bruhat_leq, enumerate_elements, length, longest_element, reduced_word
from twistcox.errors import (
    InfiniteDihedralPair,
    InvalidAutomorphism,
    KBudget,
    NotTwistedInvolution,
    SubwordBudget,
    ThetaNotConjugationByW0,
    TruncationTooSmall,
    UnknownPreset,
)
from twistcox.presets import group_to_dict, parse_theta
from twistcox.twisted import coxeter_element, coxeter_power_upper_bound, find_commuting_partition

import oracles
from conftest import bruhat, twisted


def w(ts, *word):
    return ts.system.element([i - 1 for i in word])


def sx(*word):
    return [i - 1 for i in word]


class TestAutomorphism:
    def test_checks(self):
        s, _ = resolve_preset("A3")
        assert s.check_automorphism((0, 1, 2))
        assert s.check_automorphism((2, 1, 0))
        assert not s.check_automorphism((1, 0, 2))
        a5, _ = resolve_preset("A5")
        assert a5.check_automorphism((4, 3, 2, 1, 0))
        with pytest.raises(InvalidAutomorphism):
            a5.automorphism((1, 0, 2, 3, 4))

    def test_non_involutive_rejected(self):
        s, _ = resolve_preset("affineA2")
        assert not s.check_automorphism((1, 2, 0))

    def test_presets_and_theta_parsing(self):
        s, t = resolve_preset("D4:swap")
        assert t.perm == (1, 0, 2, 3)
        s, t = resolve_preset("affineA2")
        assert t.perm == (0, 2, 1)
        s, t = resolve_preset("square(A2)")
        assert t.perm == (2, 3, 0, 1) and s.finite_type == "A2xA2"
        assert resolve_preset("E6")[1].is_identity
        assert parse_theta("[2, 1, 0]", resolve_preset("A3")[0]).perm == (2, 1, 0)
        with pytest.raises(InvalidAutomorphism):
            resolve_preset("B3:flip")
        with pytest.raises(UnknownPreset):
            resolve_preset("Q7")

    def test_group_file(self, tmp_path):
        s, t = resolve_preset("I2(inf):swap")
        path = tmp_path / "g.json"
        path.write_text(json.dumps(group_to_dict(s, t)))
        s2, t2 = resolve_group(str(path))
        assert s2.matrix == s.matrix and t2 == t
        assert json.loads(path.read_text())["m"] == [[1, 0], [0, 1]]
        _, t3 = resolve_group(str(path), "id")
        assert t3.is_identity

    def test_theta_on_asymmetric_cartan(self):
        # m = 4 gives an asymmetric Cartan pair, so theta must go through words
        ts = twisted("I2(4):swap")
        x = w(ts, 1, 2, 1)
        assert ts.apply_theta(x) == w(ts, 2, 1, 2)
        ts = twisted("F4:flip")
        x = w(ts, 1, 2, 3, 2)
        assert reduced_word(ts.apply_theta(x)) == reduced_word(ts.system.element([3, 2, 1, 2]))


class TestAction:
    def test_identity_theta(self):
        ts = twisted("A2")
        assert ts.twisted_action(ts.system.identity(), 0) == w(ts, 1)

    def test_a2_flip(self):
        ts = twisted("A2:flip")
        assert ts.twisted_action(ts.system.identity(), 0) == w(ts, 2, 1)

    def test_affine_examples(self):
        ts = twisted("affineA2")
        assert ts.twisted_action(ts.system.identity(), 2) == w(ts, 2, 3)
        assert ts.eval_sexpr([]).is_identity
        assert ts.eval_sexpr(sx(2, 1, 3)) == w(ts, 2, 1, 3, 2, 1, 3)

    def test_a5_figure_label(self):
        ts = twisted("A5:flip")
        x = ts.eval_sexpr(sx(2, 3, 1, 2))
        assert ts.is_twisted_identity(x)
        assert ts.canonical_sexpr(x) == tuple(sx(2, 3, 1, 2))

    def test_letters_are_involutions(self):
        for spec in ["A5:flip", "affineA2", "I2(5):swap", "F4:flip"]:
            ts = twisted(spec)
            enum = ts.enumerate_twisted_involutions(max_rank=4)
            for i, te in enumerate(enum.elements):
                for s in ts.system.generators:
                    once = ts.twisted_action(te.element, s)
                    assert ts.twisted_action(once, s) == te.element


class TestPredicates:
    def test_is_twisted_involution(self):
        ts = twisted("affineA2")
        assert ts.is_twisted_involution(ts.system.identity())
        assert ts.is_twisted_involution(w(ts, 2, 3))
        assert not ts.is_twisted_involution(w(ts, 2))
        tid = twisted("A3")
        assert tid.is_twisted_involution(w(tid, 1, 2, 1))

    def test_rho_and_ell_theta(self):
        ts = twisted("affineA2")
        assert ts.rho(ts.system.identity()) == 0
        assert ts.rho(w(ts, 2, 1, 3, 2, 1, 3)) == 3
        assert ts.ell_theta(w(ts, 3, 2, 3)) == 1
        a2 = twisted("A2:flip")
        w0 = longest_element(a2.system, [0, 1])
        assert a2.rho(w0) == 2 and a2.ell_theta(w0) == 1
        assert not a2.is_twisted_identity(w0)
        with pytest.raises(NotTwistedInvolution):
            ts.rho(w(ts, 2))

    def test_ell_theta_of_reflection_is_one_for_identity_theta(self):
        ts = twisted("A3")
        for x in enumerate_elements(ts.system):
            if ts.is_twisted_involution(x) and not x.is_identity:
                te = ts.twisted_element(x)
                # for theta = id, ell_theta is the absolute length of the involution
                p = oracles.perm_of_word(reduced_word(x), 3)
                moved = sum(1 for i, v in enumerate(p) if i != v)
                assert te.ell_theta == moved // 2

    def test_is_twisted_identity(self):
        ts = twisted("affineA2")
        assert ts.is_twisted_identity(ts.system.identity())
        assert ts.is_twisted_identity(w(ts, 2, 3))
        assert not ts.is_twisted_identity(w(ts, 3, 2, 3))

    def test_nof(self):
        assert twisted("A3").has_nof()
        assert not twisted("affineA2").has_nof()
        assert twisted("A5:flip").has_nof()
        assert not twisted("A4:flip").has_nof()
        assert twisted("D4:swap").has_nof() and twisted("I2(4):swap").has_nof()


class TestEnumeration:
    def test_identity_theta_a2(self):
        enum = twisted("A2").enumerate_twisted_involutions()
        assert {tuple(reduced_word(e.element)) for e in enum.elements} == {(), (0,), (1,), (0, 1, 0)}
        assert [enum.elements[i].element.is_identity for i in enum.iota] == [True]

    def test_a5_counts_against_permutation_model(self):
        enum = twisted("A5:flip").enumerate_twisted_involutions()
        assert len(enum) == len(oracles.twisted_involutions_flip(5)) == len(oracles.involutions(5)) == 76
        perms = {oracles.perm_of_word(reduced_word(e.element), 5) for e in enum.elements}
        assert perms == set(oracles.twisted_involutions_flip(5))
        iota = {oracles.perm_of_word(reduced_word(enum.elements[i].element), 5) for i in enum.iota}
        assert iota == set(oracles.twisted_identities_flip(5))

    def test_a5_iota_profile(self):
        ids = twisted("A5:flip").enumerate_twisted_identities()
        assert oracles.count_by([e.rho for e in ids]) == [1, 2, 3, 3, 3, 2, 1]

    def test_d4_identities(self):
        ts = twisted("D4:swap")
        ids = ts.enumerate_twisted_identities()
        chains = [ts.eval_sexpr(sx(*range(2, k + 1))) for k in range(1, 5)]
        assert [e.element for e in ids] == chains
        # s1 and s2 commute, so e.s1 = e.s2 and the canonical label uses 1
        assert [e.sexpr for e in ids] == [(), (0,), (0, 2), (0, 2, 3)]

    def test_affine_truncation(self):
        enum = twisted("affineA2").enumerate_twisted_involutions(max_rank=3)
        assert not enum.complete and enum.truncation_rank == 3
        assert enum.find(sx(2, 1, 3)) is not None
        with pytest.raises(TruncationTooSmall):
            enum.find(sx(2, 1, 3, 2))

    def test_element_invariants(self):
        for spec in ["A5:flip", "E6:flip", "I2(7):swap", "square(A2)"]:
            ts = twisted(spec)
            for te in ts.enumerate_twisted_involutions().elements:
                x = te.element
                assert ts.is_twisted_involution(x)
                assert te.ell_theta == 2 * te.rho - length(x) >= 0
                assert te.ell_theta % 2 == length(x) % 2
                assert ts.eval_sexpr(te.sexpr) == x and len(te.sexpr) == te.rho

    def test_eager_and_lazy_rho_agree(self):
        ts = twisted("affineA2")
        for te in ts.enumerate_twisted_involutions(max_rank=5).elements:
            assert ts.twisted_element(te.element) == te

    def test_rank_steps(self):
        ts = twisted("A5:flip")
        enum = ts.enumerate_twisted_involutions()
        rho = np.array([e.rho for e in enum.elements])
        for s in ts.system.generators:
            step = rho[enum.act[s]] - rho
            assert np.array_equal(step == -1, enum.desc[s])
            assert set(np.unique(step)) <= {-1, 1}


class TestBruhat:
    def test_examples(self):
        ts = twisted("affineA2")
        e = ts.twisted_element(ts.system.identity())
        u = ts.element_from_sexpr(sx(3))
        v = ts.element_from_sexpr(sx(2, 1, 3))
        assert ts.bruhat_leq_twisted(e, v)
        assert ts.bruhat_leq_twisted(u, v)
        assert ts.bruhat_leq_twisted(ts.element_from_sexpr(sx(2)), v)
        assert ts.bruhat_leq_twisted(ts.element_from_sexpr(sx(2, 1)), v)
        assert not ts.bruhat_leq_twisted(v, u)

    def test_matrix_matches_pairwise_and_bruhat(self):
        for spec, r in [("A3:flip", None), ("A5:flip", None), ("affineA2", 5)]:
            B = bruhat(spec, r)
            elems = B.enum.elements
            for a, x in enumerate(elems):
                for b, y in enumerate(elems):
                    want = bool(B.leq[a, b])
                    assert B.ts.bruhat_leq_twisted(x, y) == want
                    assert bruhat_leq(x.element, y.element) == want

    def test_subword_examples(self):
        ts = twisted("A5:flip")
        assert ts.subword_check_bruteforce(ts.twisted_element(ts.system.identity()), sx(2, 3, 1, 2))
        assert ts.subword_check_bruteforce(ts.element_from_sexpr(sx(2)), sx(2, 3, 1, 2))
        aff = twisted("affineA2")
        assert aff.subword_check_bruteforce(aff.element_from_sexpr(sx(2, 3)), sx(2, 1, 3))
        with pytest.raises(SubwordBudget):
            aff.subword_check_bruteforce(aff.element_from_sexpr([]), [0] * 21)

    def test_subword_all_reduced_expressions_a3(self):
        B = bruhat("A3:flip")
        ts = B.ts
        for b, y in enumerate(B.enum.elements):
            exprs = ts.all_reduced_sexprs(y)
            assert y.sexpr in exprs
            for a, x in enumerate(B.enum.elements):
                for expr in exprs:
                    assert ts.subword_check_bruteforce(x, expr) == bool(B.leq[a, b])

    def test_is_full(self):
        B = bruhat("affineA2", 3)
        u, v = B.find(sx(3)), B.find(sx(2, 1, 3))
        assert not B.is_full(u, v)
        assert B.is_full(u, u)
        inside = {B.element(i).element for i in B.interval(u, v, iota_only=False)}
        ts = B.ts
        assert w(ts, 3, 2, 3) in inside and w(ts, 2, 1, 3) in inside
        A = bruhat("A5:flip")
        assert A.is_full(A.find([]), A.find(sx(2)))

    def test_rank_truncation_is_order_ideal(self):
        B = bruhat("affineA2", 4)
        rho = B.rho
        assert not (B.leq & (rho[:, None] > rho[None, :])).any()


class TestFixedSubgroup:
    def test_generators(self):
        ts = twisted("A3")
        assert {tuple(reduced_word(x)) for x in ts.fixed_subgroup_generators()} == {(0,), (1,), (2,)}
        ts = twisted("A5:flip")
        gens = {x for x in ts.fixed_subgroup_generators()}
        assert gens == {w(ts, 1, 5), w(ts, 2, 4), w(ts, 3)}
        ts = twisted("A2:flip")
        assert ts.fixed_subgroup_generators() == [w(ts, 1, 2, 1)]

    def test_infinite_pair(self):
        ts = twisted("I2(inf):swap")
        assert ts.fixed_subgroup_generators() == []
        with pytest.raises(InfiniteDihedralPair):
            ts.fixed_subgroup_generators(require_all_finite=True)

    def test_fixed_elements_a5(self):
        ts = twisted("A5:flip")
        fixed = ts.fixed_subgroup_elements()
        assert len(fixed) == 48
        assert all(ts.apply_theta(x) == x for x in fixed)


class TestIotaMap:
    def test_examples(self):
        ts = twisted("A5:flip")
        assert ts.iota_from_group_element(ts.system.identity()).element.is_identity
        s1 = ts.system.generator(0)
        assert ts.iota_from_group_element(s1).element == ts.system.generator(4) * s1

    def test_coset_invariance_and_image(self):
        ts = twisted("A3:flip")
        fixed = ts.fixed_subgroup_elements()
        images = set()
        for x in enumerate_elements(ts.system):
            img = ts.iota_from_group_element(x)
            assert img.ell_theta == 0
            images.add(img.element)
            for f in fixed:
                assert ts.iota_from_group_element(f * x) == img
        assert len(images) == len(ts.enumerate_twisted_identities())

    def test_dual_model(self):
        assert len(twisted("A1").dual_conjugacy_model()) == 1
        cls = twisted("A3:flip").dual_conjugacy_model()
        perms = {oracles.perm_of_word(reduced_word(x), 3) for x in cls}
        assert perms == set(oracles.fpf_involutions(2))
        assert len(twisted("A5:flip").dual_conjugacy_model()) == 15
        with pytest.raises(ThetaNotConjugationByW0):
            twisted("A3").dual_conjugacy_model()


class TestCoxeterPower:
    def test_affine(self):
        ts = twisted("affineA2")
        S1, S2, S3 = find_commuting_partition(ts)
        assert (S1, S2, S3) == ([1], [2], [0])
        c = coxeter_element(ts.system, S1, S2, S3)
        assert c == w(ts, 2, 1, 3)
        assert ts.apply_theta(c.inverse()) == c
        power = ts.system.identity()
        for k in range(1, 6):
            power = power * c
            assert length(power) == 3 * k
            assert ts.is_twisted_identity(power * power)
        k, bound = coxeter_power_upper_bound(ts, ts.element_from_sexpr(sx(2)), ts.element_from_sexpr(sx(3)))
        assert k == 1 and bound.element == c * c

    def test_k_budget(self):
        ts = twisted("affineA2")
        far = ts.element_from_sexpr(sx(2, 1, 3, 2, 1, 3, 2, 1, 3))
        with pytest.raises(KBudget):
            coxeter_power_upper_bound(ts, far, far, k_max=1)
