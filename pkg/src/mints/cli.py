"""Batch front end: classify, prove, refute, check proofs, translate,
encode machine models, simulate them, and crosscheck oracle vs prover.

Exit codes: 0 affirmative, 1 negative, 2 unknown / budget exhausted,
64 usage error, 70 internal error or crosscheck disagreement."""

import argparse
import json
import os
import random
import sys
from itertools import product

from .hierarchy import classify
from .models import (UNKNOWN, BranchingPuzzle, BusMachine, TilingPuzzle,
                     bus_accepts, instruction, load_model, loc_size,
                     s_solvable, solvable_within)
from .monadic import scheme_for, translate, translate_env
from .prover import (UNPROVABLE, Proved, Sigma1Judgment, Unknown,
                     prove_general, prove_sigma1)
from .refuter import PROVABLE, build_soup, soup_to_text, verify_soup
from .syntax import (ParseError, format_problem, parse_environment,
                     parse_formula, parse_problem, print_formula,
                     signature_of)
from .terms import TypeCheckError, is_lnf, parse_term, print_term, typecheck

EX_OK = 0
EX_NEGATIVE = 1
EX_UNKNOWN = 2
EX_USAGE = 64
EX_INTERNAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_source(value: str) -> str:
    # flags accept a file path or the literal text
    if value == "-":
        return sys.stdin.read()
    if os.path.exists(value):
        with open(value) as fh:
            return fh.read()
    return value


def _problem(args):
    """Environment and goal from --env/--goal, or a problem on stdin."""
    if args.env is not None:
        env = parse_environment(_read_source(args.env))
        if args.goal is None:
            raise UsageError("--env requires --goal")
        goal = parse_formula(args.goal)
        signature_of(goal, env.signature())  # arity consistency
        return env, goal
    if args.goal is not None:
        return parse_environment(""), parse_formula(args.goal)
    return parse_problem(sys.stdin.read())


def _emit(args, human: str, payload: dict):
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(human)


# ---------------------------------------------------------------------------
# Commands

def cmd_classify(args):
    f = parse_formula(args.formula)
    c = classify(f)
    _emit(args, f"Pi-level {c.pi_level}, Sigma-level {c.sigma_level}",
          {"pi": c.pi_level, "sigma": c.sigma_level})
    return EX_OK


def cmd_prove(args):
    env, goal = _problem(args)
    if args.monadic:
        scheme = scheme_for(env, goal)
        env, goal = translate_env(env, scheme), translate(goal, scheme)
    sigma1 = args.sigma1
    if not sigma1 and not args.general:
        try:
            Sigma1Judgment(env, goal)
            sigma1 = True
        except ValueError:
            sigma1 = False
    if sigma1:
        r = prove_sigma1(Sigma1Judgment(env, goal))
    else:
        r = prove_general(env, goal, budget=args.budget)
    if isinstance(r, Proved):
        _emit(args, print_term(r.term),
              {"result": "proved", "term": print_term(r.term)})
        return EX_OK
    if isinstance(r, Unknown):
        _emit(args, f"unknown: {r.note}", {"result": "unknown"})
        return EX_UNKNOWN
    _emit(args, "unprovable", {"result": "unprovable"})
    return EX_NEGATIVE


def cmd_refute(args):
    env, goal = _problem(args)
    j = Sigma1Judgment(env, goal)
    s = build_soup(j)
    if s is PROVABLE:
        _emit(args, "provable", {"result": "provable"})
        return EX_NEGATIVE
    assert verify_soup(s, j)
    text = soup_to_text(s, j)
    _emit(args, text.rstrip("\n"),
          {"result": "refuted", "soup": text, "members": len(s)})
    return EX_OK


def cmd_check_proof(args):
    env, goal = _problem(args)
    source = _read_source(args.infile) if args.infile else sys.stdin.read()
    term = parse_term(source)
    try:
        typecheck(env, term, goal)
    except TypeCheckError as exc:
        _emit(args, f"ill-typed: {exc}", {"result": "ill-typed",
                                          "error": str(exc)})
        return EX_NEGATIVE
    lnf = is_lnf(env, term, goal)
    _emit(args, "typechecks" + (" (lnf)" if lnf else ""),
          {"result": "typechecks", "lnf": lnf})
    return EX_OK


def cmd_translate(args):
    if args.formula is not None:
        f = parse_formula(args.formula)
        scheme = scheme_for(parse_environment(""), f)
        _emit(args, print_formula(translate(f, scheme)),
              {"formula": print_formula(translate(f, scheme)),
               "arity": scheme.max_arity})
        return EX_OK
    env, goal = _problem(args)
    scheme = scheme_for(env, goal)
    out = format_problem(translate_env(env, scheme), translate(goal, scheme))
    _emit(args, out, {"problem": out, "arity": scheme.max_arity})
    return EX_OK


def _load_kind(args, cls):
    if not args.infile:
        raise UsageError("--in FILE is required")
    model = load_model(args.infile)
    if not isinstance(model, cls):
        raise UsageError(
            f"model in {args.infile} is a {type(model).__name__}, "
            f"not a {cls.__name__}")
    return model


def cmd_encode(args):
    from .encodings import (encode_branching_sigma1, encode_bus_sigma1,
                            encode_tiling_delta2, encode_tiling_finite_sig)
    if args.kind == "tiling":
        ep = encode_tiling_delta2(_load_kind(args, TilingPuzzle),
                                  prune=args.prune)
    elif args.kind == "tiling-fin":
        word = [t for t in (args.word or "").split(",") if t]
        ep = encode_tiling_finite_sig(_load_kind(args, TilingPuzzle), word,
                                      prune=args.prune)
    elif args.kind == "branching":
        ep = encode_branching_sigma1(_load_kind(args, BranchingPuzzle),
                                     args.s, monadic=args.monadic)
    else:
        ep = encode_bus_sigma1(_load_kind(args, BusMachine))
    if args.monadic and args.kind != "branching":
        raise UsageError("--monadic applies to the branching encoding only")
    text = ep.problem_text()
    _emit(args, text, {"problem": text, "provenance": ep.provenance})
    return EX_OK


def cmd_simulate(args):
    if args.kind == "tiling":
        G = _load_kind(args, TilingPuzzle)
        hit = solvable_within(G, bound=args.budget or 6)
        if hit is None:
            _emit(args, "no OK tile within bound", {"solvable": None})
            return EX_NEGATIVE
        _emit(args, f"OK at (m,n) = {hit}", {"solvable": list(hit)})
        return EX_OK
    if args.kind == "branching":
        G = _load_kind(args, BranchingPuzzle)
        ok = s_solvable(G, args.s)
        _emit(args, f"{args.s}-solvable: {ok}", {"solvable": ok})
        return EX_OK if ok else EX_NEGATIVE
    M = _load_kind(args, BusMachine)
    r = bus_accepts(M, budget=args.budget or 10_000)
    if r is UNKNOWN:
        _emit(args, "unknown: budget exhausted", {"accepts": None})
        return EX_UNKNOWN
    _emit(args, f"accepts: {r}", {"accepts": r})
    return EX_OK if r else EX_NEGATIVE


# ---------------------------------------------------------------------------
# Crosscheck: oracle vs prover on the same models

def _random_bus(rng):
    alphabet = ["a", "b", "c"][: rng.randrange(2, 4)]
    m = rng.randrange(1, 4)
    w0 = "".join(rng.choices(alphabet, k=m))
    w1 = "".join(rng.choices(alphabet, k=m))
    instructions = []
    for _ in range(rng.randrange(1, 5)):
        kind = rng.choice(["simple", "simple", "labeled", "branching"])
        arity = {"simple": 2, "labeled": 4, "branching": 3}[kind]
        switches = list(product(alphabet, repeat=arity))
        sets = [rng.sample(switches, rng.randrange(1, 3)) for _ in range(m)]
        instructions.append(instruction(kind, sets))
    return BusMachine(alphabet, m, w0, w1, instructions)


def _random_branching(rng, ntiles=2):
    tiles = ["E", "OK"] + [f"T{i}" for i in range(ntiles - 1)]
    rules = {}
    for _ in range(rng.randrange(0, 25)):
        rules[tuple(rng.choices(tiles, k=4))] = (rng.choice(tiles),
                                                 rng.choice(tiles))
    default = (rng.choice(tiles), rng.choice(tiles))
    return BranchingPuzzle(tiles, "E", "OK", rules, default)


def _random_tiling(rng, ntiles=3):
    tiles = ["E", "OK"] + [f"T{i}" for i in range(ntiles - 2)]
    rules = {}
    for _ in range(rng.randrange(0, 25)):
        rules[tuple(rng.choices(tiles, k=4))] = rng.choice(tiles)
    return TilingPuzzle(tiles, "E", "OK", rules, rng.choice(tiles))


def tiling_budget(m: int, n: int) -> int:
    """Eliminator budget covering the canonical Start proof for an OK tile
    at (m,n): one eliminator per determined location plus row plumbing."""
    return 6 * loc_size(m, n) + 8


def cmd_crosscheck(args):
    from .encodings import (encode_branching_sigma1, encode_bus_sigma1,
                            encode_tiling_delta2)
    rng = random.Random(args.seed)
    count = args.count
    checked = excluded = 0
    for i in range(count):
        if args.kind == "bus":
            M = _random_bus(rng)
            want = bus_accepts(M, budget=args.budget or 10_000)
            if want is UNKNOWN:
                excluded += 1
                continue
            got = isinstance(
                prove_sigma1(encode_bus_sigma1(M).judgment()), Proved)
            agree = got == want
        elif args.kind == "branching":
            G = _random_branching(rng)
            s = args.s if args.s else 1 + i % 3
            want = s_solvable(G, s)
            agree = True
            for monadic in ((False, True) if args.monadic else (False,)):
                ep = encode_branching_sigma1(G, s, monadic=monadic)
                agree = agree and (
                    isinstance(prove_sigma1(ep.judgment()), Proved) == want)
        else:
            # Delta_2 is undecidable: only the solvable side is checked
            G = _random_tiling(rng)
            hit = solvable_within(G, bound=args.budget or 6)
            if hit is None:
                excluded += 1
                continue
            ep = encode_tiling_delta2(G, prune=True)
            r = prove_general(ep.env, ep.goal, budget=tiling_budget(*hit))
            agree = isinstance(r, Proved)
        if not agree:
            _emit(args, f"disagreement on instance {i}",
                  {"result": "disagreement", "instance": i})
            return EX_INTERNAL
        checked += 1
    _emit(args, f"agreed on {checked} instances ({excluded} excluded)",
          {"result": "agreed", "checked": checked, "excluded": excluded})
    return EX_OK


# ---------------------------------------------------------------------------
# Argument wiring

def _build_parser():
    p = _Parser(prog="mints", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        if "formula" in flags:
            sp.add_argument("--formula")
        if "problem" in flags:
            sp.add_argument("--env")
            sp.add_argument("--goal")
        if "in" in flags:
            sp.add_argument("--in", dest="infile")
        if "budget" in flags:
            sp.add_argument("--budget", type=int, default=None)
        if "s" in flags:
            sp.add_argument("--s", type=int, default=None)
        if "monadic" in flags:
            sp.add_argument("--monadic", action="store_true")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker cap (single-threaded build: accepted "
                             "and ignored)")
        return sp

    sp = common(sub.add_parser("classify"), "formula")
    sp.set_defaults(fn=cmd_classify)

    sp = common(sub.add_parser("prove"), "problem", "budget", "monadic")
    sp.add_argument("--sigma1", action="store_true")
    sp.add_argument("--general", action="store_true")
    sp.set_defaults(fn=cmd_prove, budget=12)

    sp = common(sub.add_parser("refute"), "problem")
    sp.set_defaults(fn=cmd_refute)

    sp = common(sub.add_parser("check-proof"), "problem", "in")
    sp.set_defaults(fn=cmd_check_proof)

    sp = common(sub.add_parser("translate"), "formula", "problem")
    sp.set_defaults(fn=cmd_translate)

    sp = common(sub.add_parser("encode"), "in", "s", "monadic")
    sp.add_argument("kind",
                    choices=["tiling", "tiling-fin", "branching", "bus"])
    sp.add_argument("--word", help="comma-separated row-0 tiles (tiling-fin)")
    sp.add_argument("--prune", action="store_true")
    sp.set_defaults(fn=cmd_encode, s=1)

    sp = common(sub.add_parser("simulate"), "in", "budget", "s")
    sp.add_argument("kind", choices=["tiling", "branching", "bus"])
    sp.set_defaults(fn=cmd_simulate, s=1)

    sp = common(sub.add_parser("crosscheck"), "budget", "s", "monadic")
    sp.add_argument("kind", choices=["tiling", "branching", "bus"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=20)
    sp.set_defaults(fn=cmd_crosscheck)

    return p


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "s", None) is not None and args.s < 1:
            raise UsageError("--s must be at least 1")
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
