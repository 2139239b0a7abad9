"""Command-line front end: ``prop-frattini <command> [options]``.

Every command prints one JSON document carrying a ``schema`` field.  Invalid
requests and violated hypotheses print an error document and exit with
status 2; ``verify`` exits with status 1 when a suite records failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .apartment import fundamental_alcove, panel_exponents, unit_ball_alcove_count
from .frattini import HypothesisError, frattini_levels, generator_count, rank1_levels
from .matrix_verify import SUITES, AdmissibilityError, run_suite
from .root_system import RootSystem, RootSystemError, RootSystemKind, _length_ratio, build
from .valued_datum import DatumError, SplittingData, check_compatible, profile_table

ERROR_SCHEMA = "prop-frattini/error/1"
SU3_SUITES = tuple(s for s in SUITES if s.startswith("su3"))


class UsageError(ValueError):
    """A command-line request that cannot be served."""


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # repeated on every subparser so the flags work before or after the command
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(0), help="master seed (default 0)")
    parser.add_argument("--precision", type=int, default=default(24), help="series precision (default 24)")
    parser.add_argument("--trials", type=int, default=default(1000), help="random trials per model (default 1000)")
    parser.add_argument("--json", action="store_true", default=default(True), help="JSON output (the default)")
    parser.add_argument("--indent", type=int, default=default(2), help="JSON indentation")


def _ramification_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_mutually_exclusive_group()
    g.add_argument("--ramified", dest="ramified", action="store_true", default=None, help="L'/L_d ramified")
    g.add_argument("--unramified", dest="ramified", action="store_false", help="L'/L_d unramified")


def _system_flags(parser: argparse.ArgumentParser, p_required: bool = False) -> None:
    parser.add_argument("--family", required=True, help="A, B, C, D, E6, E7, E8, F4, G2 or BC")
    parser.add_argument("--rank", type=int, help="rank (implied for exceptional families)")
    parser.add_argument("--d", type=int, choices=(1, 2, 3, 6), help="order of the *-action")
    parser.add_argument("--p", type=int, required=p_required, help="residue characteristic")
    parser.add_argument("--m", type=int, default=1, help="|kappa_K| = p^m")
    parser.add_argument("--f", type=int, default=1, help="residue degree of L_d/K")
    _ramification_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prop-frattini", description="Frattini quotients of pro-p Sylow subgroups of quasi-split groups.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    dp = sub.add_parser("dp", help="minimal number of topological generators d(P)")
    _global_flags(dp, suppress=True)
    dp.add_argument("--tag", required=True, help="quasi-split tag such as 1A, 2A, 2D, 2E6, 3D4, 6D4, 1G2")
    dp.add_argument("--n", type=int, help="absolute rank")
    dp.add_argument("--l", type=int, help="relative rank")
    dp.add_argument("--m", type=int, default=1)
    dp.add_argument("--f", type=int, default=1)
    dp.add_argument("--fprime", type=int, help="residue degree f' of L'/L_d")
    dp.add_argument("--p", type=int, required=True, help="residue characteristic")
    _ramification_flags(dp)

    for name, help_ in (
        ("alcove", "walls and vertices of the fundamental alcove"),
        ("values", "sets of values per root class"),
        ("frattini", "levels generating the Frattini subgroup"),
    ):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp, suppress=True)
        _system_flags(sp)
        if name == "frattini":
            sp.add_argument("--rank1-level", type=Fraction, help="rank-one level l (reduced A1 or BC1)")
            sp.add_argument("--improved", action="store_true", help="BC1: use the sharper torus depth")

    ver = sub.add_parser("verify", help="randomized matrix verification suites")
    _global_flags(ver, suppress=True)
    ver.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    ver.add_argument("--p", type=int, help="residue characteristic (default 5)")
    ver.add_argument("--q", type=int, help="residue cardinality; only prime q are modeled")
    g = ver.add_mutually_exclusive_group()
    g.add_argument("--ramified", dest="model", action="store_const", const="ramified")
    g.add_argument("--unramified", dest="model", action="store_const", const="unramified")
    g.add_argument("--base", dest="model", action="store_const", const="base", help="work over F_p((t)) itself")
    ver.add_argument("--timing", action="store_true", help="include wall-clock seconds")

    rs = sub.add_parser("rootsys", help="roots of a root system")
    _global_flags(rs, suppress=True)
    rs.add_argument("--family", required=True)
    rs.add_argument("--rank", type=int)
    return parser


# ---------------------------------------------------------------------------
# helpers


def _kind(family: str, rank: int | None) -> RootSystemKind:
    family = family.upper()
    fixed = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
    if rank is None:
        if family not in fixed:
            raise UsageError(f"--rank is required for family {family}")
        rank = fixed[family]
    return RootSystemKind(family, rank)


def _split(args, sys_: RootSystem) -> SplittingData:
    ram = bool(args.ramified)
    d = args.d
    if d is None:
        if not sys_.is_reduced:
            d = 2
        elif ram:
            d = _length_ratio(sys_)
            if d == 1:
                raise UsageError(f"{sys_.kind.name} is simply laced; a ramified L'/L_d needs --d")
        else:
            d = 1
    split = SplittingData.make(d, ram, e=1, f=args.f, m=args.m, p=args.p)
    check_compatible(sys_, split)
    return split


def _system_args(args) -> tuple[RootSystem, SplittingData]:
    sys_ = build(_kind(args.family, args.rank))
    return sys_, _split(args, sys_)


def _roots_json(sys_: RootSystem) -> list[dict]:
    out = []
    for r in sorted(sys_.positive_roots, key=lambda r: (r.height, r.coeffs)):
        cls = "multipliable" if r.multipliable else "divisible" if r.divisible else r.length_class
        out.append({"root": list(r.coeffs), "height": r.height, "class": cls})
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_dp(args) -> tuple[dict, int]:
    rep = generator_count(args.tag, n=args.n, l=args.l, m=args.m, f=args.f, ramified=args.ramified, fprime=args.fprime, p=args.p)
    return rep.to_json(), 0


def cmd_alcove(args) -> tuple[dict, int]:
    sys_, split = _system_args(args)
    prof = fundamental_alcove(sys_, split)
    out = prof.to_json()
    out["panel_exponents"] = panel_exponents(prof)
    if args.p is not None:
        out["q"] = split.q
        out["unit_ball_alcoves"] = unit_ball_alcove_count(prof, split, split.q)
    return out, 0


def cmd_values(args) -> tuple[dict, int]:
    sys_, split = _system_args(args)
    q = split.q if args.p is not None else None
    return {
        "schema": "prop-frattini/values/1",
        "family": sys_.kind.family,
        "rank": sys_.rank,
        "ramified": split.ramified,
        "d_prime": split.d_prime,
        "q": q,
        "rows": [row.to_json() for row in profile_table(sys_, split, q)],
    }, 0


def cmd_frattini(args) -> tuple[dict, int]:
    kind = _kind(args.family, args.rank)
    if args.rank1_level is not None:
        if kind.rank != 1 or kind.family not in ("A", "BC"):
            raise UsageError("--rank1-level applies to A1 and BC1 only")
        sys_ = build(kind)
        split = _split(args, sys_)
        which = "BC1" if kind.family == "BC" else "reduced"
        return rank1_levels(split, which, args.rank1_level, p=args.p, improved=args.improved).to_json(), 0
    sys_ = build(kind)
    split = _split(args, sys_)
    return frattini_levels(fundamental_alcove(sys_, split), split, args.p).to_json(), 0


def _verify_model(args) -> str:
    if args.model is not None:
        return args.model
    return "unramified" if args.suite in SU3_SUITES else "base"


def cmd_verify(args) -> tuple[dict, int]:
    p = args.p
    if args.q is not None:
        if p is not None and p != args.q:
            raise UsageError("--q disagrees with --p")
        if any(args.q % k == 0 for k in range(2, int(args.q**0.5) + 1)):
            raise UsageError("only prime residue fields are modeled; give q = p")
        p = args.q
    p = 5 if p is None else p
    if args.suite == "all":
        reports = []
        for lemma in SUITES:
            model = args.model or ("unramified" if lemma in SU3_SUITES else "base")
            reports.append(run_suite(lemma, p, model, trials=args.trials, precision=args.precision, seed=args.seed))
        ok = all(r.passed for r in reports)
        return {"schema": "prop-frattini/trial-reports/1", "passed": ok, "reports": [r.to_json(args.timing) for r in reports]}, 0 if ok else 1
    rep = run_suite(args.suite, p, _verify_model(args), trials=args.trials, precision=args.precision, seed=args.seed)
    return rep.to_json(args.timing), 0 if rep.passed else 1


def cmd_rootsys(args) -> tuple[dict, int]:
    sys_ = build(_kind(args.family, args.rank))
    return {
        "schema": "prop-frattini/rootsys/1",
        "name": sys_.kind.name,
        "rank": sys_.rank,
        "reduced": sys_.is_reduced,
        "roots": len(sys_.roots),
        "highest_root": list(sys_.highest.coeffs),
        "positive_roots": _roots_json(sys_),
    }, 0


COMMANDS = {
    "dp": cmd_dp,
    "alcove": cmd_alcove,
    "values": cmd_values,
    "frattini": cmd_frattini,
    "verify": cmd_verify,
    "rootsys": cmd_rootsys,
}

_EXPECTED = (HypothesisError, AdmissibilityError, DatumError, RootSystemError, UsageError)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, status = COMMANDS[args.command](args)
    except _EXPECTED as exc:
        doc = {"schema": ERROR_SCHEMA, "command": args.command, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(doc, indent=args.indent))
        print(f"prop-frattini: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(doc, indent=args.indent))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
