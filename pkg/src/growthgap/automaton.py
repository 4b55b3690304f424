"""Deterministic weighted finite-state automata over symmetric alphabets.

Weights are exact :class:`fractions.Fraction` values throughout; nothing in
this module touches floating point.  Words are tuples of letter strings.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from ._validation import as_fraction, check_nonnegative_int, fraction_str
from .exceptions import (
    DanglingStateReference,
    InvalidAutomaton,
    NondeterministicTransition,
    NonpositiveWeight,
)

Word = tuple


@dataclass(frozen=True)
class Alphabet:
    """Ordered letters with an inverse pairing and optional primed letters.

    ``primes`` maps a decorated letter such as ``"b'"`` to the undecorated
    letter it stands for when a word is read as a group element.  Primed
    letters have no inverse of their own.
    """

    letters: tuple
    involution: tuple = ()
    primes: tuple = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        if len(set(letters)) != len(letters):
            raise InvalidAutomaton("alphabet letters must be distinct", field="alphabet")
        pairs = tuple(tuple(p) for p in self.involution)
        primes = tuple(sorted(dict(self.primes).items()))
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "involution", pairs)
        object.__setattr__(self, "primes", primes)

        primed = {p for p, _ in primes}
        plain = [x for x in letters if x not in primed]
        inverse = {}
        for x, y in pairs:
            if x == y:
                raise InvalidAutomaton(f"involution fixes letter {x!r}", field="involution")
            if x in inverse or y in inverse:
                raise InvalidAutomaton(f"letter paired twice in involution: {x!r}/{y!r}", field="involution")
            inverse[x], inverse[y] = y, x
        if set(inverse) != set(plain):
            raise InvalidAutomaton(
                "involution must pair every undecorated letter exactly once", field="involution"
            )
        for p, base in primes:
            if p not in letters:
                raise InvalidAutomaton(f"primed letter {p!r} missing from letters", field="primes")
            if base not in inverse:
                raise InvalidAutomaton(f"primed letter {p!r} maps to unknown {base!r}", field="primes")
        object.__setattr__(self, "_inverse", inverse)
        object.__setattr__(self, "_base", dict(primes))
        object.__setattr__(self, "_rank", {x: i for i, x in enumerate(letters)})

    def base(self, letter):
        """Undecorated letter a (possibly primed) letter projects to."""
        return self._base.get(letter, letter)

    def inverse(self, letter):
        return self._inverse[self.base(letter)]

    def order(self, letter):
        return self._rank[letter]

    def __contains__(self, letter):
        return letter in self._rank

    def project(self, word):
        return tuple(self.base(x) for x in word)

    def with_primes(self, extra):
        """Return a copy with additional primed letters appended."""
        primes = dict(self.primes)
        letters = list(self.letters)
        for p, base in extra.items():
            if p in self._rank:
                if primes.get(p) != base:
                    raise InvalidAutomaton(f"letter {p!r} already in alphabet")
                continue
            primes[p] = base
            letters.append(p)
        return Alphabet(tuple(letters), self.involution, tuple(sorted(primes.items())))


@dataclass(frozen=True)
class Automaton:
    """Deterministic automaton with positive rational edge weights.

    Transitions are stored as sorted ``(src, letter, dst, weight)`` tuples; the
    lookup table ``delta[(src, letter)] -> (dst, weight)`` is derived.
    Construction enforces every invariant, so any ``Automaton`` in hand is
    valid.
    """

    alphabet: Alphabet
    n_states: int
    start: int
    accepts: frozenset
    transitions: tuple
    delta: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_states
        if n < 1:
            raise InvalidAutomaton("an automaton needs at least one state")
        if not 0 <= self.start < n:
            raise DanglingStateReference(f"start state {self.start} out of range", field="start")
        accepts = frozenset(self.accepts)
        for s in accepts:
            if not 0 <= s < n:
                raise DanglingStateReference(f"accept state {s} out of range", field="accepts")
        delta = {}
        norm = []
        for i, (src, letter, dst, weight) in enumerate(self.transitions):
            if not (0 <= src < n and 0 <= dst < n):
                raise DanglingStateReference(
                    f"transition {src} -{letter}-> {dst} references a missing state",
                    transition=i,
                )
            if letter not in self.alphabet:
                raise InvalidAutomaton(f"letter {letter!r} not in alphabet", transition=i)
            try:
                weight = as_fraction(weight, "weight")
            except (TypeError, ValueError) as exc:
                raise InvalidAutomaton(str(exc), transition=i) from None
            if weight <= 0:
                raise NonpositiveWeight(
                    f"transition {src} -{letter}-> {dst} has weight {weight}", transition=i
                )
            if (src, letter) in delta:
                raise NondeterministicTransition(
                    f"state {src} has two transitions labelled {letter!r}", transition=i
                )
            delta[(src, letter)] = (dst, weight)
            norm.append((src, letter, dst, weight))
        order = self.alphabet.order
        norm.sort(key=lambda t: (t[0], order(t[1]), t[2]))
        object.__setattr__(self, "accepts", accepts)
        object.__setattr__(self, "transitions", tuple(norm))
        object.__setattr__(self, "delta", delta)

    def out_edges(self, state):
        return [(x, d, w) for s, x, d, w in self.transitions if s == state]

    def adjacency(self):
        """List of ``(letter, dst, weight)`` per state, in letter order."""
        adj = [[] for _ in range(self.n_states)]
        for s, x, d, w in self.transitions:
            adj[s].append((x, d, w))
        return adj

    @property
    def is_empty(self):
        """True when no accept state is reachable from the start."""
        return not _forward(self) & self.accepts

    def to_dict(self):
        return {
            "alphabet": list(self.alphabet.letters),
            "involution": [list(p) for p in self.alphabet.involution],
            "primes": dict(self.alphabet.primes),
            "states": self.n_states,
            "start": self.start,
            "accepts": sorted(self.accepts),
            "transitions": [
                {"from": s, "label": x, "to": d, "weight": fraction_str(w)}
                for s, x, d, w in self.transitions
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class CensusTable:
    """Exact total weight of accepted words, per length ``0..N``."""

    per_length: tuple

    @property
    def cumulative(self):
        out, total = [], Fraction(0)
        for x in self.per_length:
            total += x
            out.append(total)
        return tuple(out)

    @property
    def n_max(self):
        return len(self.per_length) - 1

    def __len__(self):
        return len(self.per_length)


def validate(candidate) -> Automaton:
    """Build an :class:`Automaton` from its JSON-style description.

    Accepts a mapping in the documented file format (or an existing
    ``Automaton``, returned unchanged).  Raises a subclass of
    :class:`~growthgap.exceptions.InvalidAutomaton` on malformed input.
    """
    if isinstance(candidate, Automaton):
        return candidate
    if not isinstance(candidate, Mapping):
        raise InvalidAutomaton("automaton description must be a JSON object")
    try:
        letters = tuple(candidate["alphabet"])
        involution = tuple(tuple(p) for p in candidate.get("involution", ()))
        primes = tuple(sorted(dict(candidate.get("primes", {})).items()))
        states = candidate["states"]
        n = states if isinstance(states, int) else len(states)
        start = candidate.get("start", 0)
        accepts = frozenset(candidate["accepts"])
        raw = candidate.get("transitions", [])
    except KeyError as exc:
        raise InvalidAutomaton(f"missing field {exc.args[0]!r}", field=exc.args[0]) from None
    transitions = []
    for i, t in enumerate(raw):
        try:
            transitions.append((t["from"], t["label"], t["to"], t.get("weight", "1")))
        except (KeyError, TypeError):
            raise InvalidAutomaton(f"transition #{i} is malformed: {t!r}", transition=i) from None
    return Automaton(Alphabet(letters, involution, primes), n, start, accepts, tuple(transitions))


def _locate(text, exc):
    """Best-effort 1-based line number for a validation error in ``text``."""
    lines = text.splitlines()
    if exc.transition is not None:
        seen = -1
        inside = False
        for k, line in enumerate(lines, 1):
            inside = inside or '"transitions"' in line
            if inside:
                seen += line.count('"from"')
                if seen >= exc.transition:
                    return k
    if exc.field is not None:
        for k, line in enumerate(lines, 1):
            if f'"{exc.field}"' in line:
                return k
    return 1


def load(path) -> Automaton:
    """Read and validate an automaton file; errors are prefixed ``path:line:``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidAutomaton(f"{path}:{exc.lineno}: {exc.msg}") from None
    try:
        return validate(data)
    except InvalidAutomaton as exc:
        raise type(exc)(f"{path}:{_locate(text, exc)}: {exc}", exc.field, exc.transition) from None


def _forward(g):
    seen = {g.start}
    todo = [g.start]
    adj = g.adjacency()
    while todo:
        s = todo.pop()
        for _, d, _ in adj[s]:
            if d not in seen:
                seen.add(d)
                todo.append(d)
    return seen


def _backward(g):
    radj = [[] for _ in range(g.n_states)]
    for s, _, d, _ in g.transitions:
        radj[d].append(s)
    seen = set(g.accepts)
    todo = list(seen)
    while todo:
        d = todo.pop()
        for s in radj[d]:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def empty_automaton(alphabet) -> Automaton:
    """The distinguished automaton with empty language: one dead start state."""
    return Automaton(alphabet, 1, 0, frozenset(), ())


def restrict(g, keep) -> Automaton:
    """Induced sub-automaton on the states in ``keep`` (order preserved)."""
    keep = sorted(keep)
    index = {s: i for i, s in enumerate(keep)}
    transitions = tuple(
        (index[s], x, index[d], w)
        for s, x, d, w in g.transitions
        if s in index and d in index
    )
    accepts = frozenset(index[s] for s in g.accepts if s in index)
    return Automaton(g.alphabet, len(keep), index[g.start], accepts, transitions)


def prune(g: Automaton) -> Automaton:
    """Drop every state not on some start-to-accept path.

    An empty language yields :func:`empty_automaton` rather than an error.
    """
    useful = _forward(g) & _backward(g)
    if g.start not in useful:
        return empty_automaton(g.alphabet)
    if len(useful) == g.n_states:
        return g
    return restrict(g, useful)


def accepts(g: Automaton, word: Sequence[str]):
    """Return ``(accepted, weight)``; weight is ``None`` on rejection."""
    state, weight = g.start, Fraction(1)
    for letter in word:
        step = g.delta.get((state, letter))
        if step is None:
            return False, None
        state, w = step
        weight *= w
    if state in g.accepts:
        return True, weight
    return False, None


def census(g: Automaton, n_max: int) -> CensusTable:
    """Total accepted weight of each length ``0..n_max``.

    Propagates the start-state indicator through the transition weights one
    length at a time and reads off the mass sitting on accept states.
    """
    check_nonnegative_int(n_max, "n_max")
    adj = g.adjacency()
    vec = {g.start: Fraction(1)}
    per_length = []
    for n in range(n_max + 1):
        per_length.append(sum((vec.get(s, 0) for s in g.accepts), Fraction(0)))
        if n == n_max:
            break
        nxt = {}
        for s, mass in vec.items():
            for _, d, w in adj[s]:
                nxt[d] = nxt.get(d, 0) + mass * w
        vec = nxt
    return CensusTable(tuple(Fraction(x) for x in per_length))


def enumerate_accepted(g: Automaton, n_max: int) -> Iterator[tuple]:
    """Yield ``(word, weight)`` for every accepted word of length <= n_max.

    Depth-first over the deterministic transition graph, in short-lex order
    within each branch.  Exponential; intended for desk-scale checks.
    """
    adj = g.adjacency()
    stack = [((), g.start, Fraction(1))]
    while stack:
        word, state, weight = stack.pop()
        if state in g.accepts:
            yield word, weight
        if len(word) == n_max:
            continue
        for x, d, w in reversed(adj[state]):
            stack.append((word + (x,), d, weight * w))


def reduced_word_product(g: Automaton) -> Automaton:
    """Restrict ``g`` to freely reduced words.

    Product of ``g`` with a one-letter memory of the last letter read; a
    transition is dropped when it would cancel the previous letter.  Primed
    letters are compared through their base letters.  Only the part reachable
    from the start is built.
    """
    alpha = g.alphabet
    adj = g.adjacency()
    start = (g.start, None)
    index = {start: 0}
    order = [start]
    transitions = []
    todo = deque([start])
    while todo:
        node = todo.popleft()
        q, last = node
        forbidden = alpha.inverse(last) if last is not None else None
        for x, d, w in adj[q]:
            if forbidden is not None and alpha.base(x) == forbidden:
                continue
            nxt = (d, x)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                todo.append(nxt)
            transitions.append((index[node], x, index[nxt], w))
    accepts_ = frozenset(i for i, (q, _) in enumerate(order) if q in g.accepts)
    return Automaton(alpha, len(order), 0, accepts_, tuple(transitions))
