import random

import pytest
from hypothesis import given, settings, strategies as st

from growthgap.automaton import census
from growthgap.exceptions import FiniteIndexSubgroup, InvalidWord, NotFound
from growthgap.freegroup import iter_reduced_words, multiply, parse_word, shortlex_automaton
from growthgap.stallings import (
    build_core,
    contains,
    find_free_factor_element,
    fold,
    free_product_certificate,
    join,
    subgroup_automaton,
)

from oracles import free_group_ball, naive_fold_membership, random_reduced_word, subgroup_ball_nielsen


def core(*gens):
    return build_core([parse_word(g) for g in gens], 2)


class TestBuildCore:
    def test_cyclic(self):
        rec = core("a")
        assert (rec.core.n_vertices, len(rec.core.edges), rec.rank) == (1, 1, 1)

    def test_conjugate(self):
        rec = core("abA")
        assert rec.core.n_vertices == 2 and rec.rank == 1
        assert rec.core.edges == ((0, "a", 1), (1, "b", 1))
        assert contains(rec, parse_word("abbA"))
        assert not contains(rec, parse_word("b"))

    def test_whole_group(self):
        rec = core("a", "b")
        assert rec.rank == 2 and rec.finite_index and rec.index == 1

    def test_index_two(self):
        rec = core("aa", "b", "aba")
        assert rec.finite_index and rec.index == 2 and rec.rank == 3

    def test_trivial(self):
        rec = core("aA")
        assert rec.is_trivial and rec.core.n_vertices == 1 and rec.rank == 0

    def test_letter_outside_rank(self):
        with pytest.raises(InvalidWord):
            build_core([("c",)], 2)

    def test_json(self):
        d = core("abA").to_dict()
        assert d["rank"] == 1 and d["basepoint"] == 0 and not d["finite_index"]


class TestContains:
    def test_examples(self):
        assert contains(core("a"), ("a", "a", "a"))
        assert not contains(core("a"), ("b",))
        assert contains(core("b", "abA"), ())

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_products_of_generators_are_members(self, seed):
        rng = random.Random(seed)
        gens = [random_reduced_word(rng, 2, rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
        rec = build_core(gens, 2)
        word = ()
        for _ in range(rng.randint(0, 5)):
            g = rng.choice(gens)
            if rng.random() < 0.5:
                g = tuple(x.swapcase() for x in reversed(g))
            word = multiply(word, g)
        assert contains(rec, word)


class TestSubgroupAutomaton:
    def test_cyclic(self):
        assert census(subgroup_automaton(core("a")), 5).per_length == (1, 2, 2, 2, 2, 2)

    def test_a_squared_b(self):
        c = census(subgroup_automaton(core("aa", "b")), 6)
        # short elements of <a^2, b>: e; b, B; aa, AA, bb, BB
        assert c.per_length[:3] == (1, 2, 4)
        assert c.cumulative[2] == 7
        ball = subgroup_ball_nielsen([("a", "a"), ("b",)], 6)
        assert list(c.per_length) == [sum(1 for w in ball if len(w) == n) for n in range(7)]

    def test_whole_group(self):
        assert census(subgroup_automaton(core("a", "b")), 8) == census(shortlex_automaton(2), 8)

    def test_language_exactly_the_members(self):
        from growthgap.automaton import enumerate_accepted

        rng = random.Random(5)
        for _ in range(15):
            gens = [random_reduced_word(rng, 2, rng.randint(1, 4)) for _ in range(rng.randint(1, 3))]
            member = naive_fold_membership(gens)
            accepted = {w for w, _ in enumerate_accepted(subgroup_automaton(build_core(gens, 2)), 7)}
            assert accepted == {w for w in free_group_ball(2, 7) if member(w)}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_fold_is_confluent(seed):
    rng = random.Random(seed)
    gens = [random_reduced_word(rng, 2, rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
    base = build_core(gens, 2).core
    for _ in range(10):
        order = gens[:]
        rng.shuffle(order)
        # relabel the bouquet vertices at random before folding
        edges, n = [], 1
        for w in order:
            prev = 0
            for k, x in enumerate(w):
                nxt = 0 if k == len(w) - 1 else n
                if nxt:
                    n += 1
                edges.append((prev, x, nxt) if x.islower() else (nxt, x.lower(), prev))
                prev = nxt
        perm = list(range(1, n))
        rng.shuffle(perm)
        relabel = {0: 0, **{i + 1: p for i, p in enumerate(perm)}}
        edges = [(relabel[o], x, relabel[t]) for o, x, t in edges]
        assert fold(n, edges, 0) == base


class TestCertificate:
    def test_free_factor(self):
        cert = free_product_certificate(core("a"), ("b",))
        assert cert.certified and (cert.rank_before, cert.rank_after) == (1, 2)

    def test_commensurable(self):
        cert = free_product_certificate(core("a"), ("a", "a"))
        assert cert.status == "Failed" and cert.rank_after == 1

    def test_conjugates(self):
        cert = free_product_certificate(core("abA"), ("b", "a", "B"))
        assert cert.certified
        assert join(core("abA"), ("b", "a", "B")).rank == 2

    def test_degenerate(self):
        assert free_product_certificate(core("a"), ()).status == "Degenerate"

    def test_not_reduced(self):
        with pytest.raises(InvalidWord):
            free_product_certificate(core("a"), ("b", "B"))

    def test_certified_means_no_relation(self):
        """A certified g admits no short relation between H and g."""
        rng = random.Random(9)
        for _ in range(20):
            gens = [random_reduced_word(rng, 2, rng.randint(1, 3)) for _ in range(rng.randint(1, 2))]
            rec = build_core(gens, 2)
            if rec.finite_index:
                continue
            g = find_free_factor_element(rec)
            # every alternating product h1 g^e1 h2 ... with nontrivial h_i outside <g>-cancellation
            # should be nontrivial; sample products of length 3 in the free product
            hs = [w for w in free_group_ball(2, 4) if w and contains(rec, w)][:6]
            gi = tuple(x.swapcase() for x in reversed(g))
            for h1 in hs:
                for h2 in hs:
                    for e1 in (g, gi):
                        for e2 in (g, gi):
                            assert multiply(h1, e1, h2, e2) != ()


class TestFindFreeFactor:
    def test_cyclic(self):
        assert find_free_factor_element(core("a")) == ("b",)

    def test_finite_index(self):
        with pytest.raises(FiniteIndexSubgroup):
            find_free_factor_element(core("a", "b"))

    def test_squares(self):
        g = find_free_factor_element(core("aa", "bb"))
        assert len(g) <= 3
        assert free_product_certificate(core("aa", "bb"), g).certified

    def test_short_lex_least(self):
        rec = core("aa", "bb")
        g = find_free_factor_element(rec)
        for w in iter_reduced_words(2, len(g), min_len=1):
            if w == g:
                break
            assert not free_product_certificate(rec, w).certified

    def test_not_found(self):
        with pytest.raises(NotFound):
            find_free_factor_element(core("aa", "bb"), max_len=1)
