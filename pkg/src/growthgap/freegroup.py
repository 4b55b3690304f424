"""Free groups: reduced words, ball counts, and the short-lex automaton.

Letters of ``F_r`` are ``a, b, c, ...`` with inverses written in upper case,
ordered ``a < A < b < B < ...``.  In text form a word is a space-separated
letter list (``"a b A"``); compact forms such as ``"abA"`` are also parsed.
Because geodesics in a tree are unique, the short-lex language of ``F_r`` is
exactly the set of freely reduced words; no lexicographic pruning is needed.
"""

from __future__ import annotations

from fractions import Fraction

from ._validation import check_nonnegative_int, check_rank
from .automaton import Alphabet, Automaton, CensusTable
from .exceptions import InvalidWord


def letters(r):
    """Symmetric alphabet of ``F_r`` in the fixed short-lex order."""
    check_rank(r)
    out = []
    for i in range(r):
        x = chr(ord("a") + i)
        out += [x, x.upper()]
    return tuple(out)


def positive_letters(r):
    return letters(r)[::2]


def alphabet(r) -> Alphabet:
    ls = letters(r)
    return Alphabet(ls, tuple((ls[i], ls[i + 1]) for i in range(0, len(ls), 2)))


def inverse_letter(x):
    if x.endswith("'"):
        x = x[:-1]
    return x.lower() if x.isupper() else x.upper()


def inverse(word):
    return tuple(inverse_letter(x) for x in reversed(word))


def is_reduced(word):
    return all(word[i + 1] != inverse_letter(word[i]) for i in range(len(word) - 1))


def reduce(word):
    """Freely reduce a word (stack cancellation)."""
    out = []
    for x in word:
        if out and out[-1] == inverse_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(*words):
    return reduce(tuple(x for w in words for x in w))


def parse_word(text, r=None):
    """Parse ``"a b A"`` or ``"abA"`` into a letter tuple (not reduced).

    ``"1"``, ``"e"`` and the empty string denote the identity.  With ``r``
    given, letters outside the rank-``r`` alphabet raise :class:`InvalidWord`.
    """
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    if any(ch.isspace() for ch in text):
        tokens = text.split()
    else:
        tokens = []
        for ch in text:
            if ch == "'":
                if not tokens:
                    raise InvalidWord(f"stray prime in {text!r}")
                tokens[-1] += "'"
            else:
                tokens.append(ch)
    allowed = set(letters(r)) if r is not None else None
    for tok in tokens:
        base = tok.rstrip("'")
        if len(base) != 1 or not base.isalpha():
            raise InvalidWord(f"bad letter {tok!r} in {text!r}")
        if allowed is not None and base not in allowed:
            raise InvalidWord(f"letter {tok!r} is not in the rank-{r} alphabet")
    return tuple(tokens)


def parse_reduced(text, r=None):
    """Parse a word and insist it is already freely reduced."""
    word = parse_word(text, r)
    if not is_reduced(word):
        raise InvalidWord(f"word {text!r} is not freely reduced")
    return word


def format_word(word, sep=" "):
    return sep.join(word) if word else ""


def shortlex_key(word, r):
    order = {x: i for i, x in enumerate(letters(r))}
    return (len(word), tuple(order[x] for x in word))


def iter_reduced_words(r, n_max, min_len=0):
    """All reduced words of length ``min_len..n_max`` in short-lex order."""
    ls = letters(r)
    level = [()]
    for n in range(n_max + 1):
        if n >= min_len:
            yield from level
        if n == n_max:
            break
        level = [
            w + (x,)
            for w in level
            for x in ls
            if not w or x != inverse_letter(w[-1])
        ]


def shortlex_automaton(r) -> Automaton:
    """Automaton for all reduced words: a start state plus one per last letter."""
    alpha = alphabet(r)
    ls = alpha.letters
    state = {x: i + 1 for i, x in enumerate(ls)}
    transitions = [(0, x, state[x], 1) for x in ls]
    for last in ls:
        for x in ls:
            if x != inverse_letter(last):
                transitions.append((state[last], x, state[x], 1))
    return Automaton(alpha, len(ls) + 1, 0, frozenset(range(len(ls) + 1)), tuple(transitions))


def sphere_size(r, n):
    check_rank(r)
    check_nonnegative_int(n)
    return 1 if n == 0 else 2 * r * (2 * r - 1) ** (n - 1)


def ball_size(r, n):
    """Closed form for the number of elements of ``F_r`` of length <= n."""
    check_rank(r)
    check_nonnegative_int(n)
    if r == 1:
        return 2 * n + 1
    return (r * (2 * r - 1) ** n - 1) // (r - 1)


def ball_census(r, n) -> CensusTable:
    """Sphere sizes of ``F_r`` up to radius ``n``, by enumeration.

    The enumerated table is checked against the closed form before it is
    returned; a mismatch is a bug and raises ``AssertionError``.
    """
    check_rank(r)
    check_nonnegative_int(n)
    counts = [0] * (n + 1)
    for w in iter_reduced_words(r, n):
        counts[len(w)] += 1
    table = CensusTable(tuple(Fraction(c) for c in counts))
    for m in range(n + 1):
        if table.cumulative[m] != ball_size(r, m):
            raise AssertionError(f"ball census mismatch at radius {m}")
    return table
