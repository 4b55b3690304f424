"""Small input-checking helpers shared by the functional API and estimators."""

from fractions import Fraction
from numbers import Rational

DEFAULT_TOL = Fraction(1, 10**9)
DEFAULT_MAX_ITER = 100_000


def as_fraction(value, name="value"):
    """Convert ints, Fractions, floats and decimal/``p/q`` strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"{name} must be a number, got bool")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        # decimal repr, not the binary expansion: 1e-9 means 1/10**9
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {value!r} as a rational") from exc
    raise TypeError(f"{name} must be rational-like, got {type(value).__name__}")


def check_tol(tol):
    tol = as_fraction(tol, "tol")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return tol


def check_rank(r):
    if isinstance(r, bool) or not isinstance(r, int):
        raise TypeError(f"rank must be an int, got {type(r).__name__}")
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    if r > 13:
        raise ValueError("rank > 13 exhausts the single-letter alphabet")
    return r


def check_nonnegative_int(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"{name} must be an int, got {type(n).__name__}")
    if n < 0:
        raise ValueError(f"{name} must be >= 0, got {n}")
    return n


def fraction_str(q):
    """Canonical text form: ``"p/q"`` or an integer string."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
