"""Reductions from machine models to entailment problems.

Three generators live here:

* `encode_tiling_delta2`: a tiling puzzle becomes an environment over
  Start/Go/Fresh, border markers A (bottom row) and B (leftmost column),
  adjacency H (left-of) and V (below), and one unary predicate per tile.
  One tactic formula per rule window places a tile; the goal is Start and
  the assembled implication chain sits in Sigma_2 and Pi_2 simultaneously.

* `encode_tiling_finite_sig`: same, but the Start formula also seeds row 0
  with a fixed input word of tiles.

* `encode_branching_sigma1`: a branching puzzle with bound s becomes a
  Sigma_1 judgment.  Coordinates up to 2^n - 1 are spelled as n-bit words
  over the two free variables x0 and x1, tile predicates are 2n-ary, and
  the child markers Left/Right are n-ary.  Successor, successor-pair and
  the bound s are compiled into finite pattern families.

* `encode_bus_sigma1`: a bus machine becomes a Sigma_1 judgment whose free
  variables are the alphabet symbols; switch sets turn into small relation
  symbols with one fact per switch, instructions into one universal formula
  each, and acceptance into Bus(w1) |- Bus(w0).

Every emitted formula is easy, so the branching encoding can optionally be
post-composed with the arity-lowering translation.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from itertools import product

from .models import (BRANCHING, LABELED, SIMPLE, BranchingPuzzle, BusMachine,
                     TilingPuzzle, branching_to_json, bus_to_json,
                     tiling_to_json)
from .monadic import TranslationScheme, translate, translate_env
from .syntax import (Atom, Environment, Forall, Formula, Implication,
                     PredicateSymbol, atom, format_problem, implies)

_RESERVED = {"Start", "Go", "Fresh", "A", "B", "H", "V", "Left", "Right",
             "Bus"}
_TILE_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*$")

START = atom("Start")
GO = atom("Go")


@dataclass
class EncodedProblem:
    env: Environment
    goal: Formula
    provenance: dict = field(default_factory=dict)

    @property
    def signature(self) -> dict:
        sig = self.env.signature()
        from .syntax import signature_of
        signature_of(self.goal, sig)
        return sig

    def judgment(self):
        from .prover import Sigma1Judgment
        return Sigma1Judgment(self.env, self.goal)

    def problem_text(self) -> str:
        return format_problem(self.env, self.goal)

    def provenance_json(self) -> str:
        return json.dumps(self.provenance, indent=2, sort_keys=True)


def _model_hash(doc: dict) -> str:
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True).encode()).hexdigest()


def _tile_pred(tile: str, arity: int = 1) -> PredicateSymbol:
    if not _TILE_NAME.match(tile) or tile in _RESERVED - {"E"}:
        raise ValueError(f"tile name {tile!r} cannot be used as a predicate")
    return PredicateSymbol(tile, arity)


# ---------------------------------------------------------------------------
# Tiling puzzles to Delta_2

def _rule_windows(G, prune: bool, seed=()):
    tiles = list(G.tiles)
    if not prune:
        for window in product(tiles, repeat=4):
            yield window, G.rules.get(window, G.default)
        return
    reachable = {G.E, *seed}
    changed = True
    while changed:
        changed = False
        for window in product(sorted(reachable), repeat=4):
            out = G.rules.get(window, G.default)
            if out not in reachable:
                reachable.add(out)
                changed = True
    for window in product(tiles, repeat=4):
        if all(t in reachable for t in window):
            yield window, G.rules.get(window, G.default)


def _tiling_fixed_formulas(G, start_formula: Formula):
    ok = Atom(_tile_pred(G.OK), ("x",))
    return [
        ("F1", start_formula),
        ("F2", Forall("x", Forall("y", implies(
            atom("E", "y"), atom("A", "y"),
            implies(atom("H", "y", "x"), atom("E", "x"), atom("A", "x"), GO),
            atom("Fresh", "x"))))),
        ("F3", Forall("x", Forall("y", implies(
            atom("E", "y"), atom("B", "y"),
            implies(atom("V", "y", "x"), atom("E", "x"), atom("B", "x"), GO),
            atom("Fresh", "x"))))),
        ("F4", Forall("x", Implication(ok, GO))),
        ("F5", Implication(Forall("x", atom("Fresh", "x")), GO)),
    ]


def _rule_formula(window, out):
    K, L, M, N = (Atom(_tile_pred(t), (v,))
                  for t, v in zip(window, ("y", "z", "u", "v")))
    T = Atom(_tile_pred(out), ("x",))
    body = implies(
        K, L, M, N,
        atom("V", "z", "y"), atom("H", "z", "u"), atom("H", "u", "v"),
        implies(T, atom("H", "y", "x"), atom("V", "u", "x"), GO),
        atom("Fresh", "x"))
    for var in ("v", "u", "z", "y", "x"):
        body = Forall(var, body)
    return body


def encode_tiling_delta2(G: TilingPuzzle, prune: bool = False) -> EncodedProblem:
    if G.E != "E":
        raise ValueError("the border tile must be named E")
    start = Implication(
        Forall("x", implies(atom("E", "x"), atom("A", "x"), atom("B", "x"),
                            GO)),
        START)
    decls = _tiling_fixed_formulas(G, start)
    for i, (window, out) in enumerate(_rule_windows(G, prune), 1):
        decls.append((f"R{i}", _rule_formula(window, out)))
    return EncodedProblem(
        Environment(decls), START,
        {"reduction": "tiling-delta2",
         "model_sha256": _model_hash(tiling_to_json(G)),
         "params": {"prune": prune}})


def encode_tiling_finite_sig(G: TilingPuzzle, input: list,
                             prune: bool = False) -> EncodedProblem:
    """As `encode_tiling_delta2` but the Start formula additionally seeds
    row 0 with the given tiles at columns 1..n."""
    if G.E != "E":
        raise ValueError("the border tile must be named E")
    n = len(input)
    xs = [f"x{i}" for i in range(n + 1)]
    parts = [atom("E", xs[0]), atom("B", xs[0])]
    parts += [atom("A", x) for x in xs]
    parts += [Atom(_tile_pred(t), (xs[i + 1],)) for i, t in enumerate(input)]
    parts += [atom("H", xs[i], xs[i + 1]) for i in range(n)]
    body = implies(*parts, GO)
    for x in reversed(xs):
        body = Forall(x, body)
    start = Implication(body, START)
    decls = _tiling_fixed_formulas(G, start)
    for i, (window, out) in enumerate(_rule_windows(G, prune, seed=input), 1):
        decls.append((f"R{i}", _rule_formula(window, out)))
    return EncodedProblem(
        Environment(decls), START,
        {"reduction": "tiling-finite-sig",
         "model_sha256": _model_hash(tiling_to_json(G)),
         "params": {"input": list(input), "prune": prune}})


def assembled_formula(ep: EncodedProblem) -> Formula:
    """The environment folded into one implication chain ending in the goal."""
    out = ep.goal
    for f in reversed(ep.env.formulas()):
        out = Implication(f, out)
    return out


# ---------------------------------------------------------------------------
# Branching puzzles to Sigma_1 (binary coordinates)

def _bit(b) -> str:
    return "x1" if b in (1, "1") else "x0"


def succ_patterns(n: int, prefix: str):
    """(t, t+1) coordinate patterns: t ends 01^(k-1), t+1 ends 10^(k-1)."""
    out = []
    for k in range(1, n + 1):
        zs = [f"{prefix}{i}" for i in range(1, n - k + 1)]
        t = zs + ["x0"] + ["x1"] * (k - 1)
        t1 = zs + ["x1"] + ["x0"] * (k - 1)
        out.append((zs, tuple(t), tuple(t1)))
    return out


def triple_patterns(n: int, prefix: str):
    """(m, m+1, m+2) patterns; together they cover every m with m+2 < 2^n."""
    out = []
    for k in range(2, n + 1):
        zs = [f"{prefix}{i}" for i in range(1, n - k + 1)]
        m = zs + ["x0"] + ["x1"] * (k - 1)
        m1 = zs + ["x1"] + ["x0"] * (k - 1)
        m2 = zs + ["x1"] + ["x0"] * (k - 2) + ["x1"]
        out.append((zs, tuple(m), tuple(m1), tuple(m2)))
    for k in range(1, n):
        zs = [f"{prefix}{i}" for i in range(1, n - k)]
        m = zs + ["x0"] + ["x1"] * (k - 1) + ["x0"]
        m1 = zs + ["x0"] + ["x1"] * (k - 1) + ["x1"]
        m2 = zs + ["x1"] + ["x0"] * (k - 1) + ["x0"]
        out.append((zs, tuple(m), tuple(m1), tuple(m2)))
    return out


def bound_patterns(s: int, n: int, prefix: str):
    """Coordinate patterns jointly matching exactly the values <= s: one per
    1-bit of s (strictly smaller numbers) plus the exact bits of s."""
    bits = format(s, f"0{n}b")
    out = []
    for i in range(n):
        if bits[i] == "1":
            zs = [f"{prefix}{j}" for j in range(1, n - i)]
            pat = [_bit(b) for b in bits[:i]] + ["x0"] + zs
            out.append((zs, tuple(pat)))
    out.append(([], tuple(_bit(b) for b in bits)))
    return out


def _quantify(zs, body):
    for z in reversed(zs):
        body = Forall(z, body)
    return body


def encode_branching_sigma1(G: BranchingPuzzle, s: int,
                            monadic: bool = False) -> EncodedProblem:
    if s < 1:
        raise ValueError("the bound s must be at least 1")
    if G.E != "E":
        raise ValueError("the border tile must be named E")
    n = (2 * s).bit_length()  # n > log2(2s)

    def tile(t, mpat, tpat):
        return Atom(_tile_pred(t, 2 * n), tuple(mpat) + tuple(tpat))

    zero = ("x0",) * n
    decls = [("F1", Implication(Implication(tile(G.E, zero, zero), GO),
                                START))]
    i = 2
    for zs, m, m1 in succ_patterns(n, "z"):
        decls.append((f"F{i}", _quantify(zs, implies(
            tile(G.E, m, zero),
            Implication(tile(G.E, m1, zero), GO),
            GO))))
        i += 1
    for zs, t, t1 in succ_patterns(n, "z"):
        decls.append((f"F{i}", _quantify(zs, implies(
            tile(G.E, zero, t),
            implies(Atom(PredicateSymbol("Left", n), t1),
                    tile(G.E, zero, t1), GO),
            implies(Atom(PredicateSymbol("Right", n), t1),
                    tile(G.E, zero, t1), GO),
            GO))))
        i += 1
    for mzs, mpat in bound_patterns(s, n, "z"):
        for tzs, tpat in bound_patterns(s, n, "y"):
            decls.append((f"F{i}", _quantify(
                mzs + tzs,
                Implication(tile(G.OK, mpat, tpat), GO))))
            i += 1
    r = 1
    for window in product(list(G.tiles), repeat=4):
        T, U = G.rules.get(window, G.default)
        K, L, M, N = window
        for mzs, m, m1, m2 in triple_patterns(n, "m"):
            for tzs, t, t1 in succ_patterns(n, "t"):
                for child, placed in (("Left", T), ("Right", U)):
                    decls.append((f"R{r}", _quantify(mzs + tzs, implies(
                        tile(K, m, t1),
                        tile(L, m, t),
                        tile(M, m1, t),
                        tile(N, m2, t),
                        Atom(PredicateSymbol(child, n), t1),
                        Implication(tile(placed, m1, t1), GO),
                        GO))))
                    r += 1
    env = Environment(decls)
    goal = START
    provenance = {"reduction": "branching-sigma1",
                  "model_sha256": _model_hash(branching_to_json(G)),
                  "params": {"s": s, "n": n, "monadic": monadic}}
    if monadic:
        scheme = TranslationScheme(2 * n, pad_var="x0")
        env = translate_env(env, scheme)
        goal = translate(goal, scheme)
    return EncodedProblem(env, goal, provenance)


# ---------------------------------------------------------------------------
# Bus machines to Sigma_1

_SWITCH_ARITY = {SIMPLE: 2, LABELED: 4, BRANCHING: 3}
_VAR_PATTERN = re.compile(r"[xyzu]\d+$")


def encode_bus_sigma1(M: BusMachine) -> EncodedProblem:
    for a in M.alphabet:
        if _VAR_PATTERN.match(a):
            raise ValueError(
                f"alphabet symbol {a!r} collides with a quantified variable")
    m = M.m
    bus = PredicateSymbol("Bus", m)
    set_pred = {}
    decls = []
    fact_count = 0
    for instr in M.instructions:
        arity = _SWITCH_ARITY[instr.kind]
        for sw_set in instr.sets:
            key = (instr.kind, sw_set)
            if key in set_pred:
                continue
            pred = PredicateSymbol(f"SW{len(set_pred) + 1}", arity)
            set_pred[key] = pred
            for switch in sorted(sw_set):
                fact_count += 1
                decls.append((f"A{fact_count}", Atom(pred, switch)))
    decls.append(("FIN", Atom(bus, tuple(M.w1))))
    xs = [f"x{i}" for i in range(1, m + 1)]
    ys = [f"y{i}" for i in range(1, m + 1)]
    zs = [f"z{i}" for i in range(1, m + 1)]
    us = [f"u{i}" for i in range(1, m + 1)]
    for idx, instr in enumerate(M.instructions, 1):
        preds = [set_pred[(instr.kind, sw_set)] for sw_set in instr.sets]
        if instr.kind == SIMPLE:
            vars_ = xs + ys
            parts = [Atom(p, (x, y)) for p, x, y in zip(preds, xs, ys)]
            parts.append(Atom(bus, tuple(ys)))
        elif instr.kind == LABELED:
            vars_ = xs + ys + zs + us
            parts = [Atom(p, (x, y, z, u))
                     for p, x, y, z, u in zip(preds, xs, ys, zs, us)]
            parts.append(Implication(
                Implication(Atom(bus, tuple(us)), Atom(bus, tuple(zs))),
                Atom(bus, tuple(ys))))
        else:
            vars_ = xs + ys + zs
            parts = [Atom(p, (x, y, z))
                     for p, x, y, z in zip(preds, xs, ys, zs)]
            parts.append(Atom(bus, tuple(zs)))
            parts.append(Atom(bus, tuple(ys)))
        body = implies(*parts, Atom(bus, tuple(xs)))
        decls.append((f"PSI{idx}", _quantify(vars_, body)))
    return EncodedProblem(
        Environment(decls), Atom(bus, tuple(M.w0)),
        {"reduction": "bus-sigma1",
         "model_sha256": _model_hash(bus_to_json(M)),
         "params": {"m": m}})
