"""Monoid extension automaton and the certified strict growth verdict.

Given the pruned subgroup automaton for ``H`` and a connector ``g`` with
``<H, g> = H * <g>``, every accept state gets an arc back to the start that
spells ``g``.  Its first letter is replaced by a primed copy so the result
stays deterministic, and that first edge carries weight ``1/cofactor_order``.
The extended automaton is strongly connected and strictly dominates the
subgroup automaton, which separates ``lambda_H`` from ``lambda_G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._validation import DEFAULT_TOL, check_rank, check_tol, fraction_str
from .automaton import Automaton, census, enumerate_accepted, prune
from .exceptions import DeterminismClash, EmptyLanguage, FiniteIndexSubgroup, InjectivityViolation
from .freegroup import ball_size, format_word, reduce
from .spectral import SpectralEnclosure, dominates, pf_enclosure, spectral_radius, transition_matrix
from .stallings import SubgroupRecord, find_free_factor_element, subgroup_automaton


def primed(letter):
    return letter + "'"


def gamma_m(gh: Automaton, g, cofactor_order=1) -> Automaton:
    """Attach a primed copy of ``g`` from every accept state to the start.

    States of ``gh`` keep their indices; arc interiors are appended after
    them in accept-state order.
    """
    g = tuple(g)
    if not g:
        raise ValueError("connector word g must be nonempty")
    if cofactor_order < 1 or int(cofactor_order) != cofactor_order:
        raise ValueError("cofactor_order must be a positive integer")
    gh = prune(gh)
    if gh.is_empty:
        raise EmptyLanguage("the subgroup automaton accepts nothing")
    first = primed(g[0])
    if first in gh.alphabet:
        raise DeterminismClash(f"letter {first!r} is already used by the automaton")
    alpha = gh.alphabet.with_primes({first: g[0]})
    weight = Fraction(1, int(cofactor_order))
    transitions = list(gh.transitions)
    n = gh.n_states
    for v in sorted(gh.accepts):
        path = [v] + list(range(n, n + len(g) - 1)) + [gh.start]
        n += len(g) - 1
        for k, x in enumerate(g):
            label, w = (first, weight) if k == 0 else (x, 1)
            transitions.append((path[k], label, path[k + 1], w))
    return Automaton(alpha, n, gh.start, gh.accepts, tuple(transitions))


@dataclass(frozen=True)
class InjectivityReport:
    n: int
    words: int
    f_m: tuple  # weighted cumulative census of L_M, lengths 0..n
    f_g: tuple  # ball sizes of F_r, radii 0..n

    @property
    def sandwich_holds(self):
        return all(m <= g for m, g in zip(self.f_m, self.f_g))


def monoid_injectivity_check(gm: Automaton, rec: SubgroupRecord, g, n) -> InjectivityReport:
    """Check ``L_M -> F_r`` is injective up to length n and ``f_M <= f_G``.

    Every accepted word is projected (primes dropped) and freely reduced;
    two words landing on the same element raise :class:`InjectivityViolation`.
    """
    r = rec.ambient_rank
    seen = {}
    count = 0
    for word, _ in enumerate_accepted(gm, n):
        element = reduce(gm.alphabet.project(word))
        other = seen.get(element)
        if other is not None:
            raise InjectivityViolation(
                f"{format_word(other)!r} and {format_word(word)!r} both give {format_word(element)!r}",
                other,
                word,
            )
        seen[element] = word
        count += 1
    f_m = census(gm, n).cumulative
    f_g = tuple(ball_size(r, m) for m in range(n + 1))
    report = InjectivityReport(n, count, f_m, f_g)
    if not report.sandwich_holds:
        bad = next(m for m in range(n + 1) if f_m[m] > f_g[m])
        raise InjectivityViolation(f"f_M({bad}) = {f_m[bad]} exceeds the ball size {f_g[bad]}")
    return report


@dataclass(frozen=True)
class GrowthVerdict:
    lambda_H: SpectralEnclosure
    rho_M: SpectralEnclosure
    lambda_G: Fraction
    margin: Fraction
    chain_certified: bool
    g_used: tuple
    certified: bool
    rho_M_bound: str = ""
    note: str = ""

    def to_dict(self):
        return {
            "lambda_H": self.lambda_H.to_dict(),
            "rho_M": self.rho_M.to_dict() if self.rho_M is not None else None,
            "lambda_G": fraction_str(self.lambda_G),
            "g": "".join(self.g_used),
            "certified": self.certified,
            "chain_certified": self.chain_certified,
            "margin": fraction_str(self.margin),
            "rho_M_bound": self.rho_M_bound,
            "note": self.note,
        }


def _lambda(enc: SpectralEnclosure) -> SpectralEnclosure:
    one = Fraction(1)
    return SpectralEnclosure(
        max(enc.lower, one), max(enc.upper, one), enc.period, enc.witness_vector,
        enc.iterations, enc.converged, enc.states, enc.maximal_blocks, enc.block_enclosures,
    )


def strict_growth_verdict(rec: SubgroupRecord, r=None, tol=DEFAULT_TOL, cofactor_order=1, max_len=8) -> GrowthVerdict:
    """Certify ``lambda_H < rho_M <= lambda_G = 2r - 1``.

    The first link is a strict domination between the subgroup automaton
    (zero-padded) and its extension; the second holds when every row sum of
    the extension is at most ``2r - 1``, and otherwise by comparing the
    certified upper bound for ``rho_M`` against ``2r - 1``.
    """
    r = rec.ambient_rank if r is None else check_rank(r)
    if r < 2:
        raise ValueError("the growth gap needs rank >= 2")
    tol = check_tol(tol)
    if rec.finite_index:
        raise FiniteIndexSubgroup(f"subgroup has index {rec.index} in F_{r}")
    lambda_g = Fraction(2 * r - 1)
    gh = subgroup_automaton(rec)
    a_h = transition_matrix(gh)

    if rec.is_trivial:
        lam = _lambda(spectral_radius(a_h, tol))
        return GrowthVerdict(lam, None, lambda_g, lambda_g - lam.upper, False, (), True,
                             note="trivial subgroup: lambda_H = 1 < lambda_G directly")

    g = find_free_factor_element(rec, max_len)
    gm = gamma_m(gh, g, cofactor_order)
    a_m = transition_matrix(gm)
    dom = dominates(a_h.padded(gm.n_states), a_m, tol)
    if dom.certified and dom.relation == "StrictlyLess":
        rho_h, rho_m = dom.a, dom.b
    else:
        rho_h, rho_m = spectral_radius(a_h, tol), pf_enclosure(a_m, tol)
    lam_h = _lambda(rho_h)

    if max(a_m.row_sums()) <= lambda_g:
        bound_ok, how = True, "row-sum"
    else:
        bound_ok, how = rho_m.upper <= lambda_g, "collatz-wielandt"
        t = tol
        while not bound_ok and t > Fraction(1, 10**40):
            t /= 1000
            rho_m = pf_enclosure(a_m, t)
            bound_ok = rho_m.upper <= lambda_g
    chain = lam_h.upper < rho_m.lower and bound_ok
    return GrowthVerdict(
        lam_h, rho_m, lambda_g, lambda_g - lam_h.upper, chain, tuple(g), chain,
        how if bound_ok else "uncertified",
        "" if chain else "separation failed at the tolerance floor",
    )
