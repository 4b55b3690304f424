from fractions import Fraction

import pytest

from growthgap.automaton import accepts, census
from growthgap.exceptions import FiniteIndexSubgroup, InjectivityViolation
from growthgap.extension import gamma_m, monoid_injectivity_check, strict_growth_verdict
from growthgap.freegroup import parse_word
from growthgap.spectral import pf_enclosure, transition_matrix
from growthgap.stallings import build_core, subgroup_automaton

from oracles import all_words, bisect_root

TOL = Fraction(1, 10**9)


def rec(*gens):
    return build_core([parse_word(g) for g in gens], 2)


class TestGammaM:
    def test_cyclic_with_b(self):
        gh = subgroup_automaton(rec("a"))
        gm = gamma_m(gh, ("b",))
        assert gm.n_states == gh.n_states
        assert len(gm.transitions) == len(gh.transitions) + len(gh.accepts)
        a = transition_matrix(gm)
        assert a.is_irreducible()
        enc = pf_enclosure(a, TOL)
        lo, hi = bisect_root(lambda x: x * x - 2 * x - 1, 2, 3)  # 1 + sqrt 2
        assert enc.lower <= lo and hi <= enc.upper

    def test_trivial_subgroup(self):
        gm = gamma_m(subgroup_automaton(rec()), ("a",))
        assert gm.n_states == 1 and gm.transitions == ((0, "a'", 0, 1),)
        enc = pf_enclosure(transition_matrix(gm), TOL)
        assert enc.lower == enc.upper == 1

    def test_long_connector_appends_states(self):
        gh = subgroup_automaton(rec("a"))
        gm = gamma_m(gh, ("b", "a", "b"))
        assert gm.n_states == gh.n_states + 2 * len(gh.accepts)
        assert transition_matrix(gm).is_irreducible()

    def test_cofactor_weight(self):
        gm = gamma_m(subgroup_automaton(rec("a")), ("b",), cofactor_order=2)
        ok, w = accepts(gm, ("a", "b'", "b'", "A"))
        assert ok and w == Fraction(1, 4)
        plain = census(gamma_m(subgroup_automaton(rec("a")), ("b",)), 4)
        halved = census(gm, 4)
        assert halved.per_length[1] == plain.per_length[1] - Fraction(1, 2)

    def test_empty_connector(self):
        with pytest.raises(ValueError):
            gamma_m(subgroup_automaton(rec("a")), ())


class TestInjectivity:
    def test_cyclic_with_b(self):
        r = rec("a")
        gm = gamma_m(subgroup_automaton(r), ("b",))
        report = monoid_injectivity_check(gm, r, ("b",), 4)
        assert report.f_g[-1] == 161
        assert report.f_m == (1, 4, 11, 28, 69)
        assert report.sandwich_holds

    def test_count_by_brute_force(self):
        # L_M for <a> and g = b: words over a, A, b' with no aA or Aa factor
        count = sum(
            1 for w in all_words("aAb", 4)
            if all(w[i] + w[i + 1] not in ("aA", "Aa") for i in range(len(w) - 1))
        )
        assert count == 69

    def test_trivial_subgroup(self):
        r = rec()
        gm = gamma_m(subgroup_automaton(r), ("a",))
        report = monoid_injectivity_check(gm, r, ("a",), 5)
        assert report.words == 6 and report.f_m == tuple(range(1, 7))

    def test_wrong_connector(self):
        r = rec("a")
        gm = gamma_m(subgroup_automaton(r), ("a", "a"))
        with pytest.raises(InjectivityViolation) as exc:
            monoid_injectivity_check(gm, r, ("a", "a"), 4)
        assert exc.value.first != exc.value.second


class TestVerdict:
    def test_cyclic(self):
        v = strict_growth_verdict(rec("a"), 2, TOL)
        assert v.certified and v.chain_certified
        assert v.lambda_H.lower == v.lambda_H.upper == 1
        assert v.margin >= 2 - TOL
        assert v.g_used == ("b",)

    def test_a_squared_b(self):
        r = rec("aa", "b")
        v = strict_growth_verdict(r, 2, TOL)
        assert v.certified and v.lambda_H.upper < 3
        c = census(subgroup_automaton(r), 26).per_length
        ratio = c[26] / c[25]
        assert abs(float(ratio) - float(v.lambda_H.midpoint)) < 0.01

    def test_finite_index(self):
        with pytest.raises(FiniteIndexSubgroup):
            strict_growth_verdict(rec("a", "b"), 2, TOL)

    def test_trivial(self):
        v = strict_growth_verdict(rec(), 2, TOL)
        assert v.certified and not v.chain_certified and v.rho_M is None
        assert v.lambda_H.upper == 1

    def test_rank_one_refused(self):
        with pytest.raises(ValueError):
            strict_growth_verdict(build_core([("a", "a")], 1), 1, TOL)

    def test_to_dict(self):
        d = strict_growth_verdict(rec("aa", "b"), 2, TOL).to_dict()
        assert d["certified"] and d["lambda_G"] == "3" and d["g"]

    def test_extension_strongly_connected(self):
        for gens in (("a",), ("aa", "b"), ("abA",), ("ab", "ba")):
            r = rec(*gens)
            v = strict_growth_verdict(r, 2, TOL)
            gm = gamma_m(subgroup_automaton(r), v.g_used)
            assert transition_matrix(gm).is_irreducible(), gens
            assert v.chain_certified, gens
