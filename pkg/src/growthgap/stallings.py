"""Stallings core graphs of finitely generated subgroups of ``F_r``.

A subgroup is represented by its folded, trimmed, based graph whose edges
carry positive letters.  Reduced words in the subgroup are exactly the
reduced loops at the basepoint, which gives membership, the subgroup
language, rank, and index.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import chain

from ._validation import check_rank
from .automaton import Automaton, prune
from .exceptions import FiniteIndexSubgroup, InvalidWord, NotFound
from .freegroup import (
    alphabet,
    inverse,
    inverse_letter,
    is_reduced,
    iter_reduced_words,
    letters,
    reduce,
)


@dataclass(frozen=True)
class CoreGraph:
    """Folded based graph; ``edges`` are ``(origin, positive letter, terminus)``.

    Vertices are ``0..n_vertices-1`` in canonical order (breadth-first from
    the basepoint ``0``, letters in short-lex order), so two isomorphic based
    graphs compare equal.
    """

    n_vertices: int
    edges: tuple
    basepoint: int = 0

    @property
    def rank(self):
        return len(self.edges) - self.n_vertices + 1

    def adjacency(self):
        """``adj[v][letter] -> w`` over the symmetric alphabet."""
        adj = [dict() for _ in range(self.n_vertices)]
        for o, x, t in self.edges:
            adj[o][x] = t
            adj[t][x.upper()] = o
        return adj

    def degree(self, v):
        return sum((o == v) + (t == v) for o, _, t in self.edges)

    def degrees(self):
        deg = [0] * self.n_vertices
        for o, _, t in self.edges:
            deg[o] += 1
            deg[t] += 1
        return deg

    def to_dict(self):
        return {
            "vertices": list(range(self.n_vertices)),
            "basepoint": self.basepoint,
            "edges": [{"from": o, "label": x, "to": t} for o, x, t in self.edges],
        }


@dataclass(frozen=True)
class SubgroupRecord:
    generators: tuple
    core: CoreGraph
    ambient_rank: int

    @property
    def rank(self):
        return self.core.rank

    @property
    def finite_index(self):
        return all(d == 2 * self.ambient_rank for d in self.core.degrees())

    @property
    def index(self):
        """Index in ``F_r`` when finite, else ``None``."""
        return self.core.n_vertices if self.finite_index else None

    @property
    def is_trivial(self):
        return not self.core.edges

    def to_dict(self):
        out = self.core.to_dict()
        out.update(
            rank=self.rank,
            ambient_rank=self.ambient_rank,
            finite_index=self.finite_index,
            index=self.index,
            generators=[" ".join(w) for w in self.generators],
        )
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class FreeProductCertificate:
    """Outcome of the rank test for ``<H, g> = H * <g>``."""

    status: str  # "Certified" | "Failed" | "Degenerate"
    g: tuple
    rank_before: int
    rank_after: int

    @property
    def certified(self):
        return self.status == "Certified"


# ---------------------------------------------------------------------------
# folding


def _edge(u, x, v):
    """Normalise a signed-letter edge ``u -x-> v`` to a positive-letter edge."""
    return (u, x, v) if x.islower() else (v, x.lower(), u)


def fold(n_vertices, edges, basepoint=0):
    """Fold a labelled graph and trim it to the core at ``basepoint``.

    Same-labelled edge pairs at a vertex are identified (union-find) until
    the graph is deterministic in both directions; then hanging trees are
    removed, except that the basepoint itself is never removed.
    """
    parent = list(range(n_vertices))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    edges = set(edges)
    while True:
        merged = False
        out = {}
        current = set()
        for o, x, t in edges:
            o, t = find(o), find(t)
            current.add((o, x, t))
        for o, x, t in current:
            for key, other in (((o, x), t), ((t, x.upper()), o)):
                key = (find(key[0]), key[1])
                seen = out.get(key)
                if seen is None:
                    out[key] = other
                elif find(seen) != find(other):
                    a, b = find(seen), find(other)
                    parent[max(a, b)] = min(a, b)
                    merged = True
        edges = current
        if not merged:
            break
    edges = {(find(o), x, find(t)) for o, x, t in edges}
    base = find(basepoint)
    return _trim_and_label(edges, base)


def _trim_and_label(edges, base):
    edges = set(edges)
    while True:
        deg = {}
        for o, _, t in edges:
            deg[o] = deg.get(o, 0) + 1
            deg[t] = deg.get(t, 0) + 1
        hair = {v for v, d in deg.items() if d == 1 and v != base}
        if not hair:
            break
        edges = {e for e in edges if e[0] not in hair and e[2] not in hair}

    adj = {}
    for o, x, t in edges:
        adj.setdefault(o, {})[x] = t
        adj.setdefault(t, {})[x.upper()] = o
    order_letters = sorted({x for _, x, _ in edges} | {x.upper() for _, x, _ in edges},
                           key=lambda x: (x.lower(), x.isupper()))
    label = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for x in order_letters:
            w = adj.get(v, {}).get(x)
            if w is not None and w not in label:
                label[w] = len(label)
                queue.append(w)
    canon = sorted(
        (label[o], x, label[t]) for o, x, t in edges if o in label and t in label
    )
    return CoreGraph(len(label), tuple(canon), 0)


def _check_word(w, r):
    ls = set(letters(r))
    for x in w:
        if x not in ls:
            raise InvalidWord(f"letter {x!r} is not in the rank-{r} alphabet")


def _wedge(words, start_index=1):
    """Edges of a bouquet of loops at vertex 0 spelling ``words``."""
    edges = []
    nxt = start_index
    for w in words:
        prev = 0
        for k, x in enumerate(w):
            if k == len(w) - 1:
                v = 0
            else:
                v = nxt
                nxt += 1
            edges.append(_edge(prev, x, v))
            prev = v
    return edges, nxt


def build_core(gens, r) -> SubgroupRecord:
    """Stallings core of the subgroup generated by ``gens`` in ``F_r``.

    Generators are freely reduced first; ones that reduce to the identity
    are dropped.
    """
    check_rank(r)
    words = []
    for w in gens:
        w = tuple(w)
        _check_word(w, r)
        w = reduce(w)
        if w:
            words.append(w)
    edges, n = _wedge(words)
    return SubgroupRecord(tuple(words), fold(n, edges, 0), r)


def record_from_graph(n_vertices, edges, r, basepoint=0) -> SubgroupRecord:
    """Record for the fundamental group of an arbitrary labelled graph.

    Generators are a free basis read off a breadth-first spanning tree.
    """
    check_rank(r)
    core = fold(n_vertices, edges, basepoint)
    return SubgroupRecord(spanning_tree_basis(core), core, r)


def spanning_tree_basis(core: CoreGraph):
    adj = core.adjacency()
    path = {0: ()}
    tree = set()
    queue = deque([0])
    order = sorted(set(chain.from_iterable(adj)), key=lambda x: (x.lower(), x.isupper()))
    while queue:
        v = queue.popleft()
        for x in order:
            w = adj[v].get(x)
            if w is not None and w not in path:
                path[w] = path[v] + (x,)
                tree.add(_edge(v, x, w))
                queue.append(w)
    basis = []
    for o, x, t in core.edges:
        if (o, x, t) in tree:
            continue
        basis.append(reduce(path[o] + (x,) + inverse(path[t])))
    return tuple(basis)


# ---------------------------------------------------------------------------
# membership and languages


def read(core: CoreGraph, word, adj=None):
    """Vertex reached by reading ``word`` from the basepoint, or ``None``."""
    adj = core.adjacency() if adj is None else adj
    v = core.basepoint
    for x in word:
        v = adj[v].get(x)
        if v is None:
            return None
    return v


def contains(rec: SubgroupRecord, word) -> bool:
    return read(rec.core, tuple(word)) == rec.core.basepoint


def subgroup_automaton(rec: SubgroupRecord) -> Automaton:
    """Pruned automaton for the reduced words representing elements of H.

    States are (core vertex, last letter read); a letter is allowed when the
    core has an edge for it and it does not cancel the previous letter.
    Accept states are those sitting at the basepoint.
    """
    alpha = alphabet(rec.ambient_rank)
    adj = rec.core.adjacency()
    start = (rec.core.basepoint, None)
    index = {start: 0}
    order = [start]
    transitions = []
    queue = deque([start])
    while queue:
        node = queue.popleft()
        v, last = node
        for x in alpha.letters:
            if last is not None and x == inverse_letter(last):
                continue
            w = adj[v].get(x)
            if w is None:
                continue
            nxt = (w, x)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            transitions.append((index[node], x, index[nxt], 1))
    accepts = frozenset(i for i, (v, _) in enumerate(order) if v == rec.core.basepoint)
    return prune(Automaton(alpha, len(order), 0, accepts, tuple(transitions)))


# ---------------------------------------------------------------------------
# free factors


def join(rec: SubgroupRecord, g) -> SubgroupRecord:
    """Record for ``<H, g>``, folding a g-loop onto the existing core."""
    g = reduce(tuple(g))
    core = rec.core
    loop, _ = _wedge([g], start_index=core.n_vertices)
    n = core.n_vertices + max(len(g) - 1, 0)
    folded = fold(n, list(core.edges) + loop, core.basepoint)
    gens = rec.generators + ((g,) if g else ())
    return SubgroupRecord(gens, folded, rec.ambient_rank)


def free_product_certificate(rec: SubgroupRecord, g) -> FreeProductCertificate:
    """Certify ``<H, g> = H * <g>`` by a rank jump of exactly one.

    ``<H, g>`` is a quotient of the free group ``H * <g>`` of rank
    ``rank(H) + 1``; equal ranks make the quotient map an isomorphism since
    finitely generated free groups are Hopfian.
    """
    g = tuple(g)
    _check_word(g, rec.ambient_rank)
    if not is_reduced(g):
        raise InvalidWord(f"{' '.join(g)!r} is not freely reduced")
    before = rec.rank
    if not g:
        return FreeProductCertificate("Degenerate", g, before, before)
    after = join(rec, g).rank
    status = "Certified" if after == before + 1 else "Failed"
    return FreeProductCertificate(status, g, before, after)


def find_free_factor_element(rec: SubgroupRecord, max_len=8):
    """Short-lex least ``g`` with a certified free product ``<H, g>``."""
    if rec.finite_index:
        raise FiniteIndexSubgroup(
            f"subgroup has index {rec.index}; no free factor can be added"
        )
    for g in iter_reduced_words(rec.ambient_rank, max_len, min_len=1):
        if free_product_certificate(rec, g).certified:
            return g
    raise NotFound(f"no certified element of length <= {max_len}")
