"""Command-line entry point.

Exit status: 0 certified, 2 uncertified or partial result, 1 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from ._validation import as_fraction, check_tol, fraction_str
from .automaton import load
from .covers import nonuniform_experiment, rows_to_csv
from .exceptions import (
    AttemptCapExceeded,
    FiniteIndexSubgroup,
    GrowthGapError,
    InvalidWord,
    NotFound,
)
from .extension import gamma_m, strict_growth_verdict
from .freegroup import parse_reduced, shortlex_automaton
from .spectral import growth_rate
from .stallings import build_core, find_free_factor_element, subgroup_automaton
from .automaton import census

EXIT_OK, EXIT_INPUT, EXIT_PARTIAL = 0, 1, 2
COMMANDS = ("spectral", "census", "stallings", "verdict", "nonuniform", "gamma-m")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    tol: Fraction = Fraction(1, 10**9)
    n_max: int = 30
    seed: int = 0
    output_format: str = "json"
    rank: int = 2
    gens: str = ""
    g: str = ""
    cofactor_order: int = 1
    k_max: int = 3
    max_len: int = 8

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        self.tol = check_tol(self.tol)
        if self.n_max < 0:
            raise ValueError("--nmax must be >= 0")


def _parse_gens(text, r):
    words = []
    for k, chunk in enumerate(t for t in text.split(",")):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            words.append(parse_reduced(chunk, r))
        except InvalidWord as exc:
            raise InvalidWord(f"--gens item {k + 1} ({chunk!r}): {exc}") from None
    return words


def _automaton(cfg):
    if cfg.inputs:
        return load(cfg.inputs[0])
    return shortlex_automaton(cfg.rank)


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def run(cfg: RunConfig):
    """Execute one command; returns ``(exit_status, report_text)``."""
    if cfg.command == "spectral":
        report = growth_rate(_automaton(cfg), cfg.tol, cfg.n_max)
        status = EXIT_OK if report.rho.converged else EXIT_PARTIAL
        return status, _dump(report.to_dict())

    if cfg.command == "census":
        table = census(_automaton(cfg), cfg.n_max)
        out = {
            "per_length": [fraction_str(x) for x in table.per_length],
            "cumulative": [fraction_str(x) for x in table.cumulative],
        }
        return EXIT_OK, _dump(out)

    if cfg.command == "stallings":
        rec = build_core(_parse_gens(cfg.gens, cfg.rank), cfg.rank)
        return EXIT_OK, _dump(rec.to_dict())

    if cfg.command == "verdict":
        rec = build_core(_parse_gens(cfg.gens, cfg.rank), cfg.rank)
        try:
            verdict = strict_growth_verdict(rec, cfg.rank, cfg.tol, cfg.cofactor_order, cfg.max_len)
        except NotFound as exc:
            return EXIT_PARTIAL, _dump({"certified": False, "error": str(exc)})
        return (EXIT_OK if verdict.certified else EXIT_PARTIAL), _dump(verdict.to_dict())

    if cfg.command == "gamma-m":
        rec = build_core(_parse_gens(cfg.gens, cfg.rank), cfg.rank)
        g = parse_reduced(cfg.g, cfg.rank) if cfg.g else find_free_factor_element(rec, cfg.max_len)
        gm = gamma_m(subgroup_automaton(rec), g, cfg.cofactor_order)
        return EXIT_OK, _dump(gm.to_dict())

    if cfg.command == "nonuniform":
        rows = nonuniform_experiment(cfg.k_max, cfg.tol, cfg.seed)
        status = EXIT_OK if all(r.certified for r in rows) else EXIT_PARTIAL
        if cfg.output_format == "csv":
            return status, rows_to_csv(rows)
        out = [
            {
                "k": r.k, "degree": r.degree, "girth": r.girth,
                "lambda_lower": fraction_str(r.lambda_lower),
                "lambda_upper": fraction_str(r.lambda_upper),
                "bound_lower": fraction_str(r.bound_lower),
                "certified": r.certified,
            }
            for r in rows
        ]
        return status, _dump(out)
    raise AssertionError(cfg.command)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="growthgap",
        description="Certified growth rates of regular languages and free-group subgroups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--tol", default="1e-9", help="relative enclosure width (decimal or p/q)")
        p.add_argument("--format", dest="output_format", choices=("json", "csv"), default=fmt)

    p = sub.add_parser("spectral", help="spectral radius and growth rate of an automaton")
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="PATH")
    p.add_argument("--rank", type=int, default=2, help="use the free-group automaton when no --in")
    p.add_argument("--nmax", dest="n_max", type=int, default=30)
    common(p)

    p = sub.add_parser("census", help="exact word census of an automaton")
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="PATH")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--nmax", dest="n_max", type=int, default=10)
    common(p)

    for name, helptext in (
        ("stallings", "core graph of a subgroup"),
        ("verdict", "certified lambda_H < lambda_G"),
        ("gamma-m", "extension automaton as JSON"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--rank", type=int, default=2)
        p.add_argument("--gens", required=True, help='comma-separated words, e.g. "aa,b"')
        p.add_argument("--cofactor-order", dest="cofactor_order", type=int, default=1)
        p.add_argument("--max-len", dest="max_len", type=int, default=8)
        if name == "gamma-m":
            p.add_argument("--g", default="", help="connector word (default: short-lex search)")
        common(p)

    p = sub.add_parser("nonuniform", help="growth of punctured high-girth covers")
    p.add_argument("--kmax", dest="k_max", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    common(p, fmt="csv")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    opts = vars(args)
    try:
        opts["tol"] = as_fraction(opts["tol"], "--tol")
        cfg = RunConfig(**opts)
        status, text = run(cfg)
    except AttemptCapExceeded as exc:
        print(f"error: {exc} (best girth {exc.best_girth})", file=sys.stderr)
        return EXIT_PARTIAL
    except FiniteIndexSubgroup as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GrowthGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
