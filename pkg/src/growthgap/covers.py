"""Finite covers of the rank-2 bouquet with large girth, and their punctures.

A degree-N cover is a pair of permutations of ``0..N-1`` (sheet 0 is the
basepoint): sheet ``i`` has an ``a``-edge to ``pi_a[i]`` and a ``b``-edge to
``pi_b[i]``.  Removing the ``a``-edge at the basepoint leaves a graph whose
fundamental group ``H_k`` has infinite index and growth close to 3 when the
girth is large.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ._validation import DEFAULT_TOL, check_tol
from .exceptions import AttemptCapExceeded, Disconnected, LoopAtBasepoint
from .spectral import growth_rate
from .stallings import SubgroupRecord, record_from_graph, subgroup_automaton

LABELS = ("a", "b")


@dataclass(frozen=True)
class PermCover:
    perms: tuple
    degree: int = field(init=False)

    def __post_init__(self):
        perms = tuple(tuple(p) for p in self.perms)
        n = len(perms[0]) if perms else 0
        for p in perms:
            if sorted(p) != list(range(n)):
                raise ValueError("each labelled edge set must be a permutation of the sheets")
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "degree", n)

    @property
    def basepoint(self):
        return 0

    def edges(self):
        return [(i, LABELS[x], p[i]) for x, p in enumerate(self.perms) for i in range(self.degree)]

    def is_connected(self):
        return len(_component(self.degree, self.edges(), 0)) == self.degree

    @cached_property
    def girth(self):
        return girth(self)


def _component(n, edges, root):
    adj = [[] for _ in range(n)]
    for u, _, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {root}
    queue = [root]
    for u in queue:
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def graph_girth(n, pairs):
    """Shortest cycle length of an undirected multigraph (loops count 1).

    Breadth-first search from every vertex, remembering the edge each vertex
    was discovered through so parallel edges are seen as 2-cycles.
    Returns ``math.inf`` for a forest.
    """
    best = math.inf
    adj = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(pairs):
        if u == v:
            return 1
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for root in range(n):
        dist = {root: 0}
        via = {root: -1}
        queue = [root]
        for u in queue:
            if 2 * dist[u] + 1 >= best:
                break
            for v, eid in adj[u]:
                if eid == via[u]:
                    continue
                if v in dist:
                    if via[v] != eid:
                        best = min(best, dist[u] + dist[v] + 1)
                else:
                    dist[v] = dist[u] + 1
                    via[v] = eid
                    queue.append(v)
    return best


def girth(c: PermCover) -> int:
    """Exact girth of the cover graph."""
    if not c.is_connected():
        raise Disconnected("cover graph is disconnected")
    return graph_girth(c.degree, [(u, v) for u, _, v in c.edges()])


class _Repair:
    """Edge-switch repair of short cycles in a permutation cover.

    Edge ``(x, i)`` joins ``i`` to ``perm[x][i]``.  Switching the targets of
    ``(x, i)`` and ``(x, j)`` keeps both maps permutations; a switch is kept
    only if neither new edge lies on a cycle shorter than ``target``, so the
    set of short-cycle edges never grows.
    """

    def __init__(self, perms, target, rng):
        self.perm = [list(p) for p in perms]
        self.inv = [[0] * len(p) for p in perms]
        for x, p in enumerate(self.perm):
            for i, t in enumerate(p):
                self.inv[x][t] = i
        self.n = len(perms[0])
        self.target = target
        self.rng = rng

    def _neighbours(self, w):
        for x in range(len(self.perm)):
            yield self.perm[x][w], (x, w)
            src = self.inv[x][w]
            yield src, (x, src)

    def on_short_cycle(self, edge):
        x, i = edge
        u, v = i, self.perm[x][i]
        if u == v:
            return True
        limit = self.target - 2
        dist = {u: 0}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            if dist[w] >= limit:
                continue
            for nb, eid in self._neighbours(w):
                if eid == edge:
                    continue
                if nb == v:
                    return True
                if nb not in dist:
                    dist[nb] = dist[w] + 1
                    queue.append(nb)
        return False

    def _switch(self, x, i, j):
        p, q = self.perm[x], self.inv[x]
        p[i], p[j] = p[j], p[i]
        q[p[i]], q[p[j]] = i, j

    def run(self, trials=64):
        bad = [(x, i) for x in range(len(self.perm)) for i in range(self.n)]
        bad = [e for e in bad if self.on_short_cycle(e)]
        self.rng.shuffle(bad)
        while bad:
            e = bad.pop()
            if not self.on_short_cycle(e):
                continue
            x, i = e
            for _ in range(trials):
                j = self.rng.randrange(self.n)
                if j == i:
                    continue
                self._switch(x, i, j)
                if not self.on_short_cycle((x, i)) and not self.on_short_cycle((x, j)):
                    break
                self._switch(x, i, j)
            else:
                return None
        return tuple(tuple(p) for p in self.perm)


def find_girth_cover(k, seed=0, attempt_cap=60, tries_per_degree=3, max_degree=4096) -> PermCover:
    """Seeded search for a connected cover with girth at least ``2k + 1``.

    Degrees start at ``2**(2k+1)`` and double after ``tries_per_degree``
    failed attempts.  Each attempt samples random permutations and repairs
    short cycles by edge switches; the girth of the result is recomputed
    exactly before it is returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    target = 2 * k + 1
    rng = random.Random(seed)
    n = 2**target
    best = None
    for attempt in range(attempt_cap):
        if attempt and attempt % tries_per_degree == 0:
            n = min(2 * n, max_degree)
        perms = []
        for _ in LABELS:
            p = list(range(n))
            rng.shuffle(p)
            perms.append(p)
        repaired = _Repair(perms, target, rng).run()
        candidate = PermCover(repaired if repaired is not None else perms)
        if not candidate.is_connected():
            continue
        g = candidate.girth
        if best is None or g > best.girth:
            best = candidate
        if g >= target:
            return candidate
    raise AttemptCapExceeded(
        f"no girth >= {target} cover within {attempt_cap} attempts",
        best_girth=best.girth if best is not None else None,
        best_cover=best,
    )


def cover_record(c: PermCover) -> SubgroupRecord:
    """The finite-index subgroup ``pi_1`` of the whole cover."""
    return record_from_graph(c.degree, c.edges(), 2)


def puncture(c: PermCover) -> SubgroupRecord:
    """Remove the ``a``-edge at the basepoint sheet and return its subgroup."""
    if c.girth < 3:
        raise LoopAtBasepoint(f"cover has girth {c.girth}; puncturing needs girth >= 3")
    removed = (0, "a", c.perms[0][0])
    edges = [e for e in c.edges() if e != removed]
    return record_from_graph(c.degree, edges, 2)


def ktree_leaf_bound(k):
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2 * 3 ** (k - 1)


def minimal_ktree(k):
    """Children lists of the k-tree whose root has 2 children, all others 3."""
    children = {0: []}
    frontier = [0]
    for depth in range(k):
        nxt = []
        for v in frontier:
            for _ in range(2 if v == 0 else 3):
                w = len(children)
                children[w] = []
                children[v].append(w)
                nxt.append(w)
        frontier = nxt
    return children


def count_leaves(children):
    return sum(1 for kids in children.values() if not kids)


def depth_k_subtrees_are_ktrees(rec: SubgroupRecord, k) -> bool:
    """Check every depth-k outward subtree of the core's universal cover.

    A vertex of the universal cover is determined, up to isomorphism of its
    outward subtree, by (core vertex, letter it was entered by); the root is
    the basepoint with no incoming letter.  Each subtree must have all
    leaves at depth k and out-degree 3 everywhere else except at most one
    vertex of out-degree 2.
    """
    adj = rec.core.adjacency()
    inverse = {x: x.upper() if x.islower() else x.lower() for x in "aAbB"}
    starts = [(rec.core.basepoint, None)] + [
        (w, x) for v in range(rec.core.n_vertices) for x, w in adj[v].items()
    ]
    for start in set(starts):
        twos = 0
        level = [start]
        for _ in range(k):
            nxt = []
            for v, last in level:
                kids = [(w, x) for x, w in adj[v].items() if last is None or x != inverse[last]]
                if len(kids) == 2:
                    twos += 1
                elif len(kids) != 3:
                    return False
                nxt.extend(kids)
            level = nxt
        if twos > 1:
            return False
    return True


def kth_root_bracket(value, k, width=Fraction(1, 10**15)):
    """Rationals ``lo <= value**(1/k) <= hi`` with ``hi - lo <= width``."""
    value = Fraction(value)
    if k == 1:
        return value, value
    lo, hi = Fraction(0), max(Fraction(1), value)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if mid**k <= value:
            lo = mid
        else:
            hi = mid
    return lo, hi


def decimal_str(q, digits=12, up=False):
    """Directed decimal rounding of a rational (floor, or ceiling with up)."""
    scale = 10**digits
    n = math.ceil(q * scale) if up else math.floor(q * scale)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // scale}.{n % scale:0{digits}d}"


@dataclass(frozen=True)
class NonUniformRow:
    k: int
    degree: int
    girth: int
    lambda_lower: Fraction
    lambda_upper: Fraction
    bound_lower: Fraction  # rational lower bracket of 3 * (2/3)**(1/k)
    bound_upper: Fraction
    bound_ok: bool  # 3*(2/3)**(1/k) <= lambda_lower, decided exactly
    below_three: bool
    cover_index_ok: bool

    @property
    def certified(self):
        return self.bound_ok and self.below_three and self.cover_index_ok

    @property
    def delta(self):
        return 3 - self.lambda_upper

    def csv_row(self):
        return [
            str(self.k), str(self.degree), str(self.girth),
            decimal_str(self.lambda_lower), decimal_str(self.lambda_upper, up=True),
            decimal_str(self.bound_lower), "true" if self.certified else "false",
        ]


CSV_HEADER = ["k", "degree", "girth", "lambda_lower", "lambda_upper", "bound_lower", "certified"]


def nonuniform_experiment(k_max, tol=DEFAULT_TOL, seed=0, attempt_cap=60):
    """Growth of punctured high-girth covers against the tree lower bound.

    For each ``k <= k_max``: find a cover of girth ``>= 2k+1``, check its
    full subgroup has index N and rank N+1, puncture it, and enclose
    ``lambda_{H_k}``.  The bound ``3*(2/3)**(1/k) <= lower`` is decided
    exactly as ``lower**k >= 2 * 3**(k-1)``.
    """
    tol = check_tol(tol)
    rows = []
    for k in range(1, k_max + 1):
        cover = find_girth_cover(k, seed=seed * 1000 + k, attempt_cap=attempt_cap)
        full = cover_record(cover)
        index_ok = full.finite_index and full.index == cover.degree and full.rank == cover.degree + 1
        rec = puncture(cover)
        report = growth_rate(subgroup_automaton(rec), tol, n_max=0, fit=False)
        lo, hi = report.lambda_lower, report.lambda_upper
        b_lo, b_hi = kth_root_bracket(2 * 3 ** (k - 1), k)
        rows.append(NonUniformRow(
            k, cover.degree, cover.girth, lo, hi, b_lo, b_hi,
            lo**k >= 2 * 3 ** (k - 1), hi < 3, index_ok,
        ))
    return rows


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_row())
    return buf.getvalue()
