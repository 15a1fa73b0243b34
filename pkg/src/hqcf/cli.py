"""Command-line interface: ``hqcf <command> [options]``.

Exit codes: 0 success, 1 invalid configuration, 2 precision cap reached,
3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from itertools import islice

from hqcf.algebra import AlgebraError, CFWord, PolyT, check_prime, format_poly, parse_poly
from hqcf.contfrac import verify_identities
from hqcf.hyperquad import engine_letters, report_lines, verify_rule_table
from hqcf.solvers import PrecisionCapExceeded, SolveRequest, SolverError, expand_family, predicted
from hqcf.words import WordError, gamma, lambda_word, omega, omega_p

EXIT_OK, EXIT_CONFIG, EXIT_PREC, EXIT_MISMATCH = 0, 1, 2, 3

DEFAULT_RNG_SEED = 1729

FAMILY_NAMES = {
    "baum-sweet": "baum_sweet",
    "mahler": "mahler",
    "general": "general_p",
    "general-p": "general_p",
    "mahlergen": "mahlergen",
}

WORD_FAMILIES = ("gamma", "lambda", "omega", "omega-p")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser, family: bool = False) -> None:
    sp.add_argument("--p", type=int, default=3, help="prime p")
    sp.add_argument("--t", type=int, default=1, help="r = p**t")
    sp.add_argument("--output", choices=("text", "json"), default="text")
    if family:
        sp.add_argument("--family", required=True, choices=sorted(FAMILY_NAMES))
        sp.add_argument("--n", type=int, default=20, help="number of quotients")
        sp.add_argument("--P", dest="P", help="polynomial P (general family), e.g. 2*T^2+T")
        sp.add_argument("--seed", help="comma separated seed letters (mahlergen family)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hqcf", description="Continued fractions of hyperquadratic series over F_p((1/T)).")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("expand", help="certified quotients of the family's series")
    _common(sp, family=True)

    sp = sub.add_parser("predict", help="quotients predicted by the closed-form words")
    _common(sp, family=True)

    sp = sub.add_parser("verify", help="compare series, transition engine and word stream")
    _common(sp, family=True)
    sp.add_argument("--inject-fault", type=int, metavar="I", help="corrupt word-stream letter I (1-based)")

    sp = sub.add_parser("rules", help="closed-form rule table against the generic step")
    _common(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--rng-seed", type=int, default=DEFAULT_RNG_SEED)
    sp.add_argument("--random", action="store_true", help="ignore --rng-seed and draw a fresh seed")

    sp = sub.add_parser("identities", help="tail-transform identities on random instances")
    _common(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--rng-seed", type=int, default=DEFAULT_RNG_SEED)
    sp.add_argument("--random", action="store_true", help="ignore --rng-seed and draw a fresh seed")

    sp = sub.add_parser("words", help="print a recursive word")
    _common(sp)
    sp.add_argument("--family", required=True, choices=WORD_FAMILIES)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--P", dest="P", help="polynomial P for omega-p")
    return ap


# configuration

def _r(args, allow_two: bool = False) -> int:
    try:
        check_prime(args.p)
    except AlgebraError as exc:
        raise ConfigError(str(exc)) from None
    if args.t < 1:
        raise ConfigError("t must be >= 1")
    r = args.p ** args.t
    if r <= 2 and not allow_two:
        raise ConfigError(f"r>2 required (r = {r})")
    return r


def _poly(text: str | None, p: int, what: str) -> PolyT | None:
    if text is None:
        return None
    try:
        return parse_poly(text, p)
    except (ValueError, AlgebraError) as exc:
        raise ConfigError(f"cannot parse {what} {text!r}: {exc}") from None


def _request(args) -> SolveRequest:
    _r(args)
    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    family = FAMILY_NAMES[args.family]
    P = _poly(args.P, args.p, "--P")
    seed = None
    if args.seed is not None:
        seed = CFWord(_poly(s, args.p, "seed letter") for s in args.seed.split(","))
    if family == "general_p" and P is None:
        raise ConfigError("--P is required for the general family")
    if family == "mahlergen" and seed is None:
        raise ConfigError("--seed is required for the mahlergen family")
    try:
        return SolveRequest(family, args.p, args.t, -64 * args.n, P=P, seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _rng(args) -> random.Random:
    return random.Random() if args.random else random.Random(args.rng_seed)


def _emit(args, text: str, payload: dict) -> None:
    if args.output == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# commands

def cmd_expand(args) -> int:
    req = _request(args)
    exp = expand_family(req, args.n)
    letters = exp.letters.to_json()
    text = ", ".join(letters) + f"\ncertified: {len(letters)} (precision T^{exp.target_prec})"
    _emit(args, text, {"family": args.family, "p": args.p, "t": args.t, "certified": len(letters),
                       "target_prec": exp.target_prec, "letters": letters})
    return EXIT_OK


def cmd_predict(args) -> int:
    req = _request(args)
    letters = predicted(req, args.n).to_json()
    _emit(args, ", ".join(letters), {"family": args.family, "p": args.p, "t": args.t, "letters": letters})
    return EXIT_OK


def cmd_verify(args) -> int:
    req = _request(args)
    n = args.n
    series = list(expand_family(req, n).letters)
    engine = list(engine_letters(req.family, req.p, req.r, n, P=req.P, seed=req.seed))
    words = list(predicted(req, n))
    if args.inject_fault is not None:
        i = args.inject_fault
        if not 1 <= i <= len(words):
            raise ConfigError(f"--inject-fault must lie in 1..{len(words)}")
        words[i - 1] = words[i - 1] + 1
    routes = {"series": series, "engine": engine, "words": words}
    size = min(len(v) for v in routes.values())
    first = None
    for i in range(size):
        if not (series[i] == engine[i] == words[i]):
            first = i + 1
            break
    if first is None and size < n:
        first = size + 1
    payload = {"family": args.family, "p": args.p, "t": args.t, "n": n, "agree": first is None}
    if first is None:
        text = f"all three routes agree on {n} quotients"
    else:
        values = {k: (format_poly(v[first - 1]) if first <= len(v) else None) for k, v in routes.items()}
        payload["first_mismatch"] = {"index": first, **values}
        text = f"mismatch at index {first}: " + ", ".join(f"{k}={v}" for k, v in values.items())
    _emit(args, text, payload)
    return EXIT_OK if first is None else EXIT_MISMATCH


def _rule_text(report: list[dict]) -> str:
    lines = []
    for e in report:
        line = f"{e['rule']:<22} {e['passes']}/{e['trials']}"
        if "first_failure" in e:
            line += f"  first failure: {json.dumps(e['first_failure'], sort_keys=True)}"
        lines.append(line)
    ok = sum(e["passes"] == e["trials"] for e in report)
    lines.append(f"{ok}/{len(report)} rows pass")
    return "\n".join(lines)


def cmd_rules(args) -> int:
    _r(args)
    report = verify_rule_table(args.p, args.t, args.trials, _rng(args))
    if args.output == "json":
        print(report_lines(report))
    else:
        print(_rule_text(report))
    return EXIT_OK if all(e["passes"] == e["trials"] for e in report) else EXIT_MISMATCH


def cmd_identities(args) -> int:
    _r(args, allow_two=True)
    report = verify_identities(args.p, args.trials, _rng(args))
    if args.output == "json":
        print(report_lines(report))
    else:
        print(_rule_text(report).replace("rows pass", "identities hold"))
    return EXIT_OK if all(e["passes"] == e["trials"] for e in report) else EXIT_MISMATCH


def cmd_words(args) -> int:
    r = _r(args)
    if args.k < 1:
        raise ConfigError("--k must be >= 1")
    if args.family == "gamma":
        w = gamma(args.k, args.p, r)
    elif args.family == "lambda":
        w = lambda_word(args.k, args.p, r)
    elif args.family == "omega":
        w = omega(args.k, args.p, r)
    else:
        P = _poly(args.P, args.p, "--P")
        if P is None:
            raise ConfigError("--P is required for omega-p")
        w = omega_p(P, args.k, r)
    letters = w.to_json()
    _emit(args, ", ".join(letters), {"family": args.family, "k": args.k, "p": args.p, "t": args.t,
                                     "letters": letters})
    return EXIT_OK


COMMANDS = {
    "expand": cmd_expand,
    "predict": cmd_predict,
    "verify": cmd_verify,
    "rules": cmd_rules,
    "identities": cmd_identities,
    "words": cmd_words,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PrecisionCapExceeded as exc:
        print(f"hqcf: precision cap reached: {exc}", file=sys.stderr)
        return EXIT_PREC
    except (ConfigError, WordError, AlgebraError, ValueError) as exc:
        print(f"hqcf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"hqcf: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
