import math
from fractions import Fraction

import pytest

from growthgap.covers import (
    CSV_HEADER,
    PermCover,
    count_leaves,
    cover_record,
    depth_k_subtrees_are_ktrees,
    find_girth_cover,
    girth,
    graph_girth,
    kth_root_bracket,
    ktree_leaf_bound,
    minimal_ktree,
    nonuniform_experiment,
    puncture,
    rows_to_csv,
)
from growthgap.exceptions import AttemptCapExceeded, Disconnected, LoopAtBasepoint
from growthgap.stallings import contains

from oracles import bisect_root, free_group_ball


def undirected_girth_oracle(cover):
    """Shortest cycle via simple cycles of the doubled digraph, skipping backtracks."""
    n = cover.degree
    pairs = [(u, v) for u, _, v in cover.edges()]
    best = math.inf
    # brute force over closed non-backtracking edge walks of length <= n
    half_edges = [(u, v, i) for i, (u, v) in enumerate(pairs)] + [(v, u, i) for i, (u, v) in enumerate(pairs)]
    out = {}
    for u, v, i in half_edges:
        out.setdefault(u, []).append((v, i))
    for start in range(n):
        stack = [(start, None, 0, frozenset([start]))]
        while stack:
            v, last, d, seen = stack.pop()
            if d >= best:
                continue
            for w, i in out.get(v, []):
                if i == last:
                    continue
                if w == start:
                    best = min(best, d + 1)
                elif w not in seen:
                    stack.append((w, i, d + 1, seen | {w}))
    return best


class TestGirth:
    def test_bouquet(self):
        assert girth(PermCover([[0], [0]])) == 1

    def test_parallel_edges(self):
        assert girth(PermCover([[1, 2, 0], [1, 2, 0]])) == 2

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            girth(PermCover([[1, 0, 3, 2], [1, 0, 3, 2]]))

    def test_forest_is_infinite(self):
        assert graph_girth(3, [(0, 1), (1, 2)]) == math.inf

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            PermCover([[0, 0], [1, 0]])

    @pytest.mark.parametrize("k", [1, 2])
    def test_search_and_verify(self, k):
        c = find_girth_cover(k, seed=k)
        assert c.is_connected()
        assert girth(c) >= 2 * k + 1
        assert undirected_girth_oracle(c) == girth(c)

    def test_deterministic(self):
        assert find_girth_cover(2, seed=4).perms == find_girth_cover(2, seed=4).perms

    def test_attempt_cap(self):
        with pytest.raises(AttemptCapExceeded):
            find_girth_cover(1, seed=0, attempt_cap=0)

    def test_small_cases_against_oracle(self):
        import itertools

        for pa in itertools.permutations(range(4)):
            for pb in ((1, 2, 3, 0), (0, 1, 2, 3), (2, 3, 0, 1)):
                c = PermCover([pa, pb])
                if c.is_connected():
                    assert girth(c) == undirected_girth_oracle(c), (pa, pb)


@pytest.fixture(scope="module")
def cover():
    return find_girth_cover(1, seed=1)


def trace(cover, word):
    """Sheets visited by reading ``word`` from sheet 0, and the a-edges used."""
    inv = [{t: i for i, t in enumerate(p)} for p in cover.perms]
    v, used = 0, set()
    for x in word:
        k = "ab".index(x.lower())
        w = cover.perms[k][v] if x.islower() else inv[k][v]
        if k == 0:
            used.add((v, w) if x.islower() else (w, v))
        v = w
    return v, used


class TestPuncture:
    def test_rank_and_index(self, cover):
        rec = puncture(cover)
        assert rec.rank == cover.degree
        assert not rec.finite_index

    def test_schreier_check(self, cover):
        full = cover_record(cover)
        assert full.finite_index and full.index == cover.degree
        assert full.rank == cover.degree + 1

    def test_surviving_loops(self, cover):
        rec = puncture(cover)
        removed = (0, cover.perms[0][0])
        for w in free_group_ball(2, 6):
            end, used = trace(cover, w)
            if end == 0:
                assert contains(rec, w) == (removed not in used), w

    def test_degree_one_refused(self):
        with pytest.raises(LoopAtBasepoint):
            puncture(PermCover([[0], [0]]))

    def test_depth_k_subtrees(self):
        for k in (1, 2):
            rec = puncture(find_girth_cover(k, seed=k))
            assert depth_k_subtrees_are_ktrees(rec, k)


class TestKTree:
    @pytest.mark.parametrize("k, leaves", [(1, 2), (2, 6), (3, 18)])
    def test_leaf_bound(self, k, leaves):
        assert ktree_leaf_bound(k) == leaves == count_leaves(minimal_ktree(k))

    def test_bad_k(self):
        with pytest.raises(ValueError):
            ktree_leaf_bound(0)


class TestBound:
    @pytest.mark.parametrize("k, approx", [(1, "2"), (2, "2.4494897428"), (3, "2.6207413942")])
    def test_brackets(self, k, approx):
        lo, hi = kth_root_bracket(2 * 3 ** (k - 1), k)
        olo, ohi = bisect_root(lambda x: x**k - 2 * 3 ** (k - 1), 1, 3)
        assert lo <= ohi and olo <= hi
        assert abs(lo - Fraction(approx)) < Fraction(1, 10**9)
        assert hi - lo <= Fraction(1, 10**15)


@pytest.fixture(scope="module")
def rows():
    return nonuniform_experiment(3, Fraction(1, 10**9), seed=7)


class TestExperiment:
    def test_rows_certified(self, rows):
        assert [r.k for r in rows] == [1, 2, 3]
        for r in rows:
            assert r.certified and r.girth >= 2 * r.k + 1
            assert r.delta > 0
            assert r.lambda_lower ** r.k >= 2 * 3 ** (r.k - 1)

    def test_csv(self, rows):
        text = rows_to_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 4 and all(line.endswith("true") for line in lines[1:])

    def test_reproducible(self, rows):
        again = nonuniform_experiment(3, Fraction(1, 10**9), seed=7)
        assert rows_to_csv(again) == rows_to_csv(rows)
