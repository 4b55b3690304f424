"""Perron-Frobenius analysis of non-negative rational matrices.

The spectral radius of an irreducible block is enclosed with exact
Collatz-Wielandt quotients: for any positive vector ``x``,

    min_i (A x)_i / x_i  <=  rho(A)  <=  max_i (A x)_i / x_i .

Floating-point power iteration on ``A + I`` (the shift kills periodicity and
keeps the Perron vector) only *proposes* ``x``; the quotients are then
recomputed in exact integer arithmetic, so the returned interval is sound
regardless of rounding in the proposal.  When double precision cannot reach
the requested width, iteration continues on a fixed-point integer vector.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce as _fold

import numpy as np
import scipy.sparse as sp

from ._validation import DEFAULT_MAX_ITER, DEFAULT_TOL, check_nonnegative_int, check_tol
from ._validation import fraction_str
from .automaton import Automaton, CensusTable, census, prune
from .exceptions import EmptyLanguage, InsufficientData, NoCycle, NotComparable
from .exceptions import SeparationFailed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransitionMatrix:
    """Sparse non-negative rational square matrix; absent entries are zero."""

    dimension: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in dict(self.entries).items():
            if not (0 <= i < self.dimension and 0 <= j < self.dimension):
                raise ValueError(f"entry ({i}, {j}) outside a {self.dimension}x{self.dimension} matrix")
            v = Fraction(v)
            if v < 0:
                raise ValueError(f"entry ({i}, {j}) is negative")
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    def __hash__(self):
        return hash((self.dimension, frozenset(self.entries.items())))

    @classmethod
    def from_dense(cls, rows):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        return cls(n, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def zeros(cls, n):
        return cls(n, {})

    def __getitem__(self, ij):
        return self.entries.get(ij, Fraction(0))

    def rows(self):
        out = [[] for _ in range(self.dimension)]
        for (i, j), v in sorted(self.entries.items()):
            out[i].append((j, v))
        return out

    def to_dense(self):
        m = [[Fraction(0)] * self.dimension for _ in range(self.dimension)]
        for (i, j), v in self.entries.items():
            m[i][j] = v
        return m

    def to_scipy(self, shift=0.0):
        n = self.dimension
        if self.entries:
            ij = np.array(list(self.entries.keys()), dtype=np.int64)
            vals = np.array([float(v) for v in self.entries.values()])
            m = sp.csr_matrix((vals, (ij[:, 0], ij[:, 1])), shape=(n, n))
        else:
            m = sp.csr_matrix((n, n))
        if shift:
            m = m + shift * sp.identity(n, format="csr")
        return m

    def submatrix(self, states):
        index = {s: k for k, s in enumerate(states)}
        return TransitionMatrix(
            len(states),
            {(index[i], index[j]): v for (i, j), v in self.entries.items() if i in index and j in index},
        )

    def padded(self, n):
        if n < self.dimension:
            raise ValueError("cannot pad to a smaller dimension")
        return TransitionMatrix(n, self.entries)

    def __matmul__(self, other):
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch")
        orows = other.rows()
        out = {}
        for (i, k), v in self.entries.items():
            for j, w in orows[k]:
                out[(i, j)] = out.get((i, j), 0) + v * w
        return TransitionMatrix(self.dimension, out)

    def power(self, k):
        check_nonnegative_int(k, "k")
        result = TransitionMatrix(self.dimension, {(i, i): 1 for i in range(self.dimension)})
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __le__(self, other):
        if self.dimension != other.dimension:
            return False
        return all(v <= other[ij] for ij, v in self.entries.items())

    def row_sums(self):
        sums = [Fraction(0)] * self.dimension
        for (i, _), v in self.entries.items():
            sums[i] += v
        return sums

    def is_irreducible(self):
        if self.dimension == 1:
            return True
        return len(scc_condense(self).blocks) == 1


@dataclass(frozen=True)
class SCCDecomposition:
    """Strongly connected components in topological order (sources first)."""

    blocks: tuple
    permutation: tuple
    dag_edges: frozenset
    maximal_blocks: tuple = ()

    def block_of(self, state):
        for k, b in enumerate(self.blocks):
            if state in b:
                return k
        raise KeyError(state)


@dataclass(frozen=True)
class SpectralEnclosure:
    """Certified rational interval ``[lower, upper]`` around a spectral radius.

    ``witness_vector`` is the positive vector whose Collatz-Wielandt
    quotients gave the bounds; ``states`` names the rows it lives on (a
    block of the original matrix).  ``converged`` is false when the
    iteration cap was hit before the requested width was reached; the bounds
    are still sound.
    """

    lower: Fraction
    upper: Fraction
    period: int = 1
    witness_vector: tuple = ()
    iterations: int = 0
    converged: bool = True
    states: tuple = ()
    maximal_blocks: tuple = ()
    block_enclosures: tuple = ()

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        return (self.lower + self.upper) / 2

    def contains(self, value):
        return self.lower <= value <= self.upper

    def power(self, k):
        return (self.lower**k, self.upper**k)

    def to_dict(self):
        return {"lower": fraction_str(self.lower), "upper": fraction_str(self.upper)}

    def __str__(self):
        return f"[{float(self.lower):.12g}, {float(self.upper):.12g}]"


@dataclass(frozen=True)
class GrowthReport:
    rho: SpectralEnclosure
    lambda_lower: Fraction
    lambda_upper: Fraction
    census_used: CensusTable
    polyfit: object = None

    def to_dict(self):
        decomposition = self.rho.block_enclosures
        return {
            "rho": self.rho.to_dict(),
            "period": self.rho.period,
            "lambda": {"lower": fraction_str(self.lambda_lower), "upper": fraction_str(self.lambda_upper)},
            "blocks": [
                {"states": list(states), **enc.to_dict(), "period": enc.period,
                 "maximal": k in self.rho.maximal_blocks}
                for k, (states, enc) in enumerate(decomposition)
            ],
            "polyfit": self.polyfit.to_list() if self.polyfit is not None else [],
        }


# ---------------------------------------------------------------------------
# combinatorics of the underlying digraph


def transition_matrix(g: Automaton) -> TransitionMatrix:
    """Entry (i, j) is the summed weight of all transitions i -> j."""
    entries = {}
    for s, _, d, w in g.transitions:
        entries[(s, d)] = entries.get((s, d), 0) + w
    return TransitionMatrix(g.n_states, entries)


def matrix_power_count(a: TransitionMatrix, i, j, n):
    """Total weight of length-n paths from i to j, i.e. ``(A^n)[i, j]``."""
    check_nonnegative_int(n)
    rows = a.rows()
    vec = {i: Fraction(1)}
    for _ in range(n):
        nxt = {}
        for s, mass in vec.items():
            for t, w in rows[s]:
                nxt[t] = nxt.get(t, 0) + mass * w
        vec = nxt
    return Fraction(vec.get(j, 0))


def _successors(a):
    succ = [[] for _ in range(a.dimension)]
    for i, j in sorted(a.entries):
        succ[i].append(j)
    return succ


def scc_condense(a: TransitionMatrix) -> SCCDecomposition:
    """Tarjan's algorithm (iterative), blocks returned sources-first."""
    n = a.dimension
    succ = _successors(a)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack, comps = [], []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = succ[v][k]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    comps.reverse()
    where = {}
    for k, c in enumerate(comps):
        for s in c:
            where[s] = k
    dag = frozenset(
        (where[i], where[j]) for i, j in a.entries if where[i] != where[j]
    )
    perm = tuple(s for c in comps for s in c)
    return SCCDecomposition(tuple(comps), perm, dag)


def period(block: TransitionMatrix) -> int:
    """gcd of cycle lengths of an irreducible block, via BFS levels."""
    n = block.dimension
    if not block.entries:
        raise NoCycle("the zero block has no cycles")
    succ = _successors(block)
    level = {0: 0}
    queue = [0]
    for v in queue:
        for w in succ[v]:
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    if len(level) != n:
        raise ValueError("period() needs an irreducible block")
    h = 0
    for i, j in block.entries:
        h = math.gcd(h, level[i] + 1 - level[j])
    return abs(h)


# ---------------------------------------------------------------------------
# certified enclosures


def _integer_rows(block):
    """Rows of ``D*A`` as integer pairs, plus the common denominator ``D``."""
    denom = _fold(math.lcm, (v.denominator for v in block.entries.values()), 1)
    rows = [[] for _ in range(block.dimension)]
    for (i, j), v in sorted(block.entries.items()):
        rows[i].append((j, int(v * denom)))
    return rows, denom


def _cw_bounds(rows, denom, x):
    """Exact min and max of ``(A x)_i / x_i`` for an integer vector ``x > 0``."""
    lo_n = lo_d = hi_n = hi_d = None
    for i, row in enumerate(rows):
        num = sum(c * x[j] for j, c in row)
        if lo_n is None:
            lo_n, lo_d = num, x[i]
            hi_n, hi_d = num, x[i]
            continue
        # cross-multiplied comparisons; Fractions only for the winners
        if num * lo_d < lo_n * x[i]:
            lo_n, lo_d = num, x[i]
        if num * hi_d > hi_n * x[i]:
            hi_n, hi_d = num, x[i]
    return Fraction(lo_n, lo_d * denom), Fraction(hi_n, hi_d * denom)


def _scale_to_int(v, bits):
    v = np.asarray(v, dtype=float)
    top = float(np.max(v))
    out = []
    for t in v / top:
        out.append(max(1, int(round(math.ldexp(float(t), bits)))))
    return out


def _snap(v, max_den=10**6):
    """Small-denominator rational guess at ``v`` (scaled to integers)."""
    v = np.asarray(v, dtype=float)
    fr = [Fraction(float(t)).limit_denominator(max_den) for t in v / np.max(v)]
    if any(f <= 0 for f in fr):
        return None
    den = _fold(math.lcm, (f.denominator for f in fr), 1)
    return [int(f * den) for f in fr]


def _good_enough(lo, hi, tol):
    return hi - lo <= tol * lo


def pf_enclosure(block: TransitionMatrix, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER) -> SpectralEnclosure:
    """Certified enclosure of the Perron-Frobenius eigenvalue of a block.

    ``block`` must be irreducible (the 1x1 zero matrix counts).  The result
    satisfies ``upper - lower <= tol * lower`` unless ``max_iter`` power
    steps were not enough, in which case ``converged`` is ``False``.
    """
    tol = check_tol(tol)
    n = block.dimension
    if n == 1:
        v = block[(0, 0)]
        return SpectralEnclosure(v, v, 1, (Fraction(1),), 0, True, (0,))
    if not block.is_irreducible():
        raise ValueError("pf_enclosure needs an irreducible block")
    h = period(block)
    rows, denom = _integer_rows(block)

    best = None  # (lo, hi, integer vector)

    def consider(x):
        nonlocal best
        lo, hi = _cw_bounds(rows, denom, x)
        if best is None or hi - lo < best[1] - best[0]:
            best = (lo, hi, x)
        return best

    # float proposal
    m = block.to_scipy(shift=1.0)
    v = np.ones(n)
    iters = 0
    float_tol = max(float(tol) / 8, 1e-14)
    stalls, prev_width = 0, math.inf
    while iters < max_iter:
        for _ in range(8):
            v = m @ v
            v /= v.max()
        iters += 8
        av = m @ v
        ratios = av / np.maximum(v, 1e-300)
        width = (ratios.max() - ratios.min()) / ratios.min()
        if width < float_tol:
            break
        if width >= prev_width * 0.999:
            stalls += 1
            if stalls > 50:
                break
        else:
            stalls = 0
        prev_width = width

    snapped = _snap(v)
    if snapped is not None:
        consider(snapped)
    if best is None or not _good_enough(best[0], best[1], tol):
        consider(_scale_to_int(v, 60))
    lo, hi, x = best

    # fixed-point integer refinement when double precision falls short
    if not _good_enough(lo, hi, tol):
        bits = max(64, int(math.log2(1 / tol)) + 40)
        shift_rows = [row + [(i, denom)] for i, row in enumerate(rows)]
        x = [xi << max(0, bits - max(x).bit_length()) for xi in x]
        while iters < max_iter:
            for _ in range(4):
                y = [sum(c * x[j] for j, c in row) for row in shift_rows]
                drop = max(y).bit_length() - bits
                x = [max(1, yi >> drop) for yi in y] if drop > 0 else y
            iters += 4
            lo, hi, x = consider(x)
            if _good_enough(lo, hi, tol):
                break

    lo, hi, x = best
    converged = _good_enough(lo, hi, tol)
    if not converged:
        log.warning("pf_enclosure: iteration cap %d reached, width %s", max_iter, float(hi - lo))
    lo = max(lo, Fraction(0))
    lo, hi = _tidy(lo, hi, tol)
    top = max(x)
    witness = tuple(Fraction(xi, top) for xi in x)
    return SpectralEnclosure(lo, hi, h, witness, iters, converged, tuple(range(n)))


def _tidy(lo, hi, tol):
    """Round the bounds outward to short decimals when that stays within tol."""
    if lo == hi or lo <= 0:
        return lo, hi
    budget = tol * lo - (hi - lo)
    if budget <= 0:
        return lo, hi
    digits = max(1, -math.floor(math.log10(float(budget) / 4)) + 1)
    scale = 10**digits
    lo2 = Fraction(math.floor(lo * scale), scale)
    hi2 = Fraction(math.ceil(hi * scale), scale)
    if lo2 >= 0 and _good_enough(lo2, hi2, tol):
        return lo2, hi2
    return lo, hi


def spectral_radius(a: TransitionMatrix, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER) -> SpectralEnclosure:
    """Enclosure of the spectral radius as the max over diagonal blocks.

    ``block_enclosures`` holds ``(states, enclosure)`` for every block;
    ``maximal_blocks`` lists the blocks that cannot be ruled out as the
    maximiser, and ``period`` is the lcm of their periods.
    """
    tol = check_tol(tol)
    dec = scc_condense(a)
    encs = []
    for states in dec.blocks:
        sub = a.submatrix(states)
        enc = pf_enclosure(sub, tol, max_iter)
        encs.append((states, replace(enc, states=states)))
    lower = max((e.lower for _, e in encs), default=Fraction(0))
    upper = max((e.upper for _, e in encs), default=Fraction(0))
    maximal = tuple(k for k, (_, e) in enumerate(encs) if e.upper >= lower and e.upper > 0)
    h = 1
    for k in maximal:
        h = math.lcm(h, encs[k][1].period)
    if maximal:
        lead = max(maximal, key=lambda k: encs[k][1].lower)
        witness, states = encs[lead][1].witness_vector, encs[lead][0]
    else:
        witness, states = (), ()
    return SpectralEnclosure(
        lower,
        upper,
        h,
        witness,
        sum(e.iterations for _, e in encs),
        all(e.converged for _, e in encs),
        states,
        maximal,
        tuple(encs),
    )


def growth_rate(g: Automaton, tol=DEFAULT_TOL, n_max=30, fit=True, fit_tol=Fraction(1, 10**40)) -> GrowthReport:
    """Exponential growth rate ``max(rho, 1)`` of the language of ``g``.

    The census up to ``n_max`` is attached for cross-validation; with
    ``fit`` the polynomial-times-exponential fit is attached too (computed
    against a tighter enclosure, ``fit_tol``, so rounding in rho does not
    swamp the residuals).
    """
    tol = check_tol(tol)
    g = prune(g)
    if g.is_empty:
        raise EmptyLanguage("automaton accepts no words")
    a = transition_matrix(g)
    rho = spectral_radius(a, tol)
    table = census(g, n_max)
    polyfit = None
    if fit and rho.lower > 0 and len(table) >= 6 * rho.period:
        fine = rho if rho.width == 0 else spectral_radius(a, min(tol, fit_tol))
        polyfit = polyexp_fit(table, fine)
    one = Fraction(1)
    return GrowthReport(rho, max(rho.lower, one), max(rho.upper, one), table, polyfit)


@dataclass(frozen=True)
class DominationResult:
    relation: str  # "Equal" | "StrictlyLess" | "LessOrEqual"
    certified: bool
    a: SpectralEnclosure = None
    b: SpectralEnclosure = None
    tol_used: Fraction = None

    @property
    def separation_failed(self):
        return self.relation == "LessOrEqual" and not self.certified


def dominates(a: TransitionMatrix, b: TransitionMatrix, tol=DEFAULT_TOL, min_tol=Fraction(1, 10**60),
              raise_on_failure=False) -> DominationResult:
    """Compare spectral radii of entrywise-ordered matrices ``a <= b``.

    With ``b`` irreducible and ``a != b`` the strict inequality is certified
    by disjoint enclosures, tightening ``tol`` by 1000x per round down to
    ``min_tol``.  Failing that the result is ``LessOrEqual`` with
    ``certified=False`` (or :class:`SeparationFailed` if asked to raise).
    """
    tol = check_tol(tol)
    if a.dimension != b.dimension or not a <= b:
        raise NotComparable("domination needs a <= b entrywise, same dimension")
    if a.entries == b.entries:
        return DominationResult("Equal", True, tol_used=tol)
    if not b.is_irreducible():
        return DominationResult("LessOrEqual", True, spectral_radius(a, tol), spectral_radius(b, tol), tol)
    t = tol
    while True:
        ea = spectral_radius(a, t)
        eb = pf_enclosure(b, t)
        if ea.upper < eb.lower:
            return DominationResult("StrictlyLess", True, ea, eb, t)
        if t <= min_tol:
            break
        t = max(t / 1000, min_tol)
    if raise_on_failure:
        raise SeparationFailed(f"enclosures still overlap at tol={t}")
    return DominationResult("LessOrEqual", False, ea, eb, t)


# ---------------------------------------------------------------------------
# polynomial-times-exponential census law


@dataclass(frozen=True)
class ResidueFit:
    residue: int
    n_values: tuple
    degree: int  # -1 encodes the zero polynomial
    leading_coefficient: Fraction
    residuals: tuple  # |finite difference of order degree+1|, per window index
    decay_ratio: float
    residual_decreasing: bool

    @property
    def exact(self):
        return all(r == 0 for r in self.residuals)

    def to_dict(self):
        return {
            "residue": self.residue,
            "degree": self.degree,
            "leading_coefficient": float(self.leading_coefficient),
            "decay_ratio": self.decay_ratio,
            "residual_decreasing": self.residual_decreasing,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class PolyExpFit:
    rho_used: Fraction
    period: int
    classes: tuple

    def to_list(self):
        return [c.to_dict() for c in self.classes]

    @property
    def degrees(self):
        return tuple(c.degree for c in self.classes)


def _differences(seq):
    return [b - a for a, b in zip(seq, seq[1:])]


def polyexp_fit(c: CensusTable, rho: SpectralEnclosure, window=(10, None), rel_tol=1e-6, max_degree=4) -> PolyExpFit:
    """Fit ``w(L_n) / rho^n`` by a polynomial on each residue class mod h.

    Degree is the order of the first finite difference that is negligible
    (relative ``rel_tol``) at the end of the census.  The residual of a
    class is the next-order difference, which behaves like ``(tau/rho)^n``;
    ``decay_ratio`` is the largest step-to-step ratio of the residuals over
    ``window`` and ``residual_decreasing`` says whether it is below 1.
    """
    h = rho.period
    if len(c) < 6 * h:
        raise InsufficientData(f"need at least {6 * h} census terms for period {h}, got {len(c)}")
    r = rho.midpoint
    if r <= 0:
        raise InsufficientData("spectral radius is zero; the language is finite")
    lo_n, hi_n = window
    hi_n = c.n_max if hi_n is None else hi_n
    classes = []
    for s in range(h):
        ns = [n for n in range(s, c.n_max + 1, h)]
        y = [c.per_length[n] / r**n for n in ns]
        diffs = [y]
        for _ in range(max_degree + 1):
            diffs.append(_differences(diffs[-1]))
        tail = lambda seq: max((abs(t) for t in seq[-3:]), default=Fraction(0))  # noqa: E731
        if tail(y) == 0:
            degree, lead = -1, Fraction(0)
        else:
            degree = max_degree
            for d in range(max_degree + 1):
                if len(diffs[d + 1]) < 3:
                    degree = d
                    break
                if tail(diffs[d + 1]) <= Fraction(rel_tol) * tail(diffs[d]):
                    degree = d
                    break
            lead = diffs[degree][-1] / (math.factorial(degree) * h**degree)
        order = degree + 1
        res_seq = diffs[order] if order < len(diffs) else []
        picked = [(ns[k], abs(v)) for k, v in enumerate(res_seq) if lo_n <= ns[k] and ns[k + order] <= hi_n]
        residuals = tuple(v for _, v in picked)
        ratios = [float(b / a) for a, b in zip(residuals, residuals[1:]) if a != 0]
        if all(v == 0 for v in residuals):
            decay, decreasing = 0.0, True
        elif any(a == 0 and b != 0 for a, b in zip(residuals, residuals[1:])):
            decay, decreasing = math.inf, False
        else:
            decay = max(ratios) if ratios else math.inf
            decreasing = decay < 1.0
        classes.append(ResidueFit(s, tuple(n for n, _ in picked), degree, lead, residuals, decay, decreasing))
    if all(cl.degree < 0 for cl in classes):
        raise InsufficientData("every residue class fitted the zero polynomial")
    return PolyExpFit(r, h, tuple(classes))
