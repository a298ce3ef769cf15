"""Machine models and their independent semantics: deterministic tiling
puzzles, branching tiling puzzles, and bus machines.

These simulators are the oracles the encoding tests compare against; they
share no code with the prover.  Grid conventions: all APIs take (column m,
row n), the branching row index being a binary word; borders (m = 0, n = 0,
or the empty word) carry the tile E.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product


class _Unknown:
    def __repr__(self):
        return "Unknown"

    def __bool__(self):
        raise TypeError("Unknown is neither true nor false; compare with 'is'")


UNKNOWN = _Unknown()


class InapplicableInstruction(Exception):
    pass


# ---------------------------------------------------------------------------
# Deterministic tiling puzzles

class TilingPuzzle:
    """G = (T, R, E, OK) with R total via a sparse rule map plus default.
    An optional row0 seed fixes T(i,0) for i = 1..len(row0) (used by the
    finite-signature encoding); unseeded borders are E."""

    def __init__(self, tiles, E, OK, rules, default, row0=()):
        self.tiles = tuple(tiles)
        tile_set = set(self.tiles)
        if E == OK:
            raise ValueError("E and OK must be different tiles")
        for t in (E, OK, default, *row0):
            if t not in tile_set:
                raise ValueError(f"unknown tile {t!r}")
        for key, out in rules.items():
            if len(key) != 4 or any(t not in tile_set for t in key):
                raise ValueError(f"bad rule key {key!r}")
            if out not in tile_set:
                raise ValueError(f"bad rule output {out!r}")
        self.E = E
        self.OK = OK
        self.rules = dict(rules)
        self.default = default
        self.row0 = tuple(row0)
        self._rows = {}

    def R(self, k, l, m, n):
        return self.rules.get((k, l, m, n), self.default)

    def _row(self, n, width):
        row = self._rows.get(n)
        if row is None:
            row = [self.E]
            self._rows[n] = row
        if n == 0:
            while len(row) <= width:
                i = len(row)
                row.append(self.row0[i - 1] if i <= len(self.row0) else self.E)
            return row
        if len(row) <= width:
            prev = self._row(n - 1, width + 1)
            while len(row) <= width:
                m = len(row)
                row.append(self.R(row[m - 1], prev[m - 1], prev[m], prev[m + 1]))
        return row


def tile_at(G: TilingPuzzle, m: int, n: int):
    if m < 0 or n < 0:
        raise ValueError("grid coordinates are naturals")
    return G._row(n, m)[m]


def loc_size(m: int, n: int) -> int:
    """Number of grid locations the recurrence needs to determine T(m,n):
    all (k,l) with 1 <= l <= n and 1 <= k <= m+n-l."""
    return sum(m + n - l for l in range(1, n + 1))


def solvable_within(G: TilingPuzzle, bound: int):
    """First OK location with m,n <= bound, smallest location set first;
    None when no OK tile appears within the bound."""
    candidates = sorted(
        ((m, n) for n in range(1, bound + 1) for m in range(1, bound + 1)),
        key=lambda mn: (loc_size(*mn), mn[1], mn[0]))
    for m, n in candidates:
        if tile_at(G, m, n) == G.OK:
            return (m, n)
    return None


# ---------------------------------------------------------------------------
# Branching puzzles

class BranchingPuzzle:
    """Rule R : T^4 -> T^2; the grid is N x {0,1}*.  Child rows select the
    matching projection: T(m, wi) = pi_i(R(T(m-1,wi), T(m-1,w), T(m,w), T(m+1,w)))."""

    def __init__(self, tiles, E, OK, rules, default):
        self.tiles = tuple(tiles)
        tile_set = set(self.tiles)
        if E == OK:
            raise ValueError("E and OK must be different tiles")
        for key, out in rules.items():
            if len(key) != 4 or any(t not in tile_set for t in key):
                raise ValueError(f"bad rule key {key!r}")
            if len(out) != 2 or any(t not in tile_set for t in out):
                raise ValueError(f"bad rule output {out!r}")
        if len(default) != 2 or any(t not in tile_set for t in default):
            raise ValueError(f"bad default {default!r}")
        self.E = E
        self.OK = OK
        self.rules = dict(rules)
        self.default = tuple(default)
        self._rows = {}

    def R(self, k, l, m, n):
        return self.rules.get((k, l, m, n), self.default)

    def _row(self, w: str, width: int):
        row = self._rows.get(w)
        if row is None:
            row = [self.E]
            self._rows[w] = row
        if w == "":
            while len(row) <= width:
                row.append(self.E)
            return row
        if len(row) <= width:
            parent = self._row(w[:-1], width + 1)
            i = int(w[-1])
            while len(row) <= width:
                m = len(row)
                row.append(self.R(row[m - 1], parent[m - 1],
                                  parent[m], parent[m + 1])[i])
        return row


def btile_at(G: BranchingPuzzle, m: int, w: str):
    if m < 0 or any(c not in "01" for c in w):
        raise ValueError("need m >= 0 and a binary word")
    return G._row(w, m)[m]


def s_solvable(G: BranchingPuzzle, s: int, v: str = "") -> bool:
    """True iff every branch of length s extending v passes an OK tile at
    some (m, w') with m <= s and w' a prefix of the branch at or below v."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if len(v) > s:
        raise ValueError("|v| must be <= s")
    for j in range(len(v) + 1):
        if _column_has_ok(G, s, v[:j]):
            return True
    if len(v) == s:
        return False
    return _rec(G, s, v + "0") and _rec(G, s, v + "1")


def _column_has_ok(G, s, w):
    return any(btile_at(G, m, w) == G.OK for m in range(1, s + 1))


def _rec(G, s, v):
    if _column_has_ok(G, s, v):
        return True
    if len(v) == s:
        return False
    return _rec(G, s, v + "0") and _rec(G, s, v + "1")


# ---------------------------------------------------------------------------
# Bus machines

SIMPLE = "simple"
LABELED = "labeled"
BRANCHING = "branching"

_SWITCH_LEN = {SIMPLE: 2, LABELED: 4, BRANCHING: 3}


@dataclass(frozen=True)
class Instruction:
    kind: str
    sets: tuple  # m frozensets of switch tuples

    def __post_init__(self):
        want = _SWITCH_LEN.get(self.kind)
        if want is None:
            raise ValueError(f"unknown instruction kind {self.kind!r}")
        for s in self.sets:
            for sw in s:
                if len(sw) != want:
                    raise ValueError(
                        f"{self.kind} switch must have {want} parts, got {sw!r}")


def instruction(kind, sets) -> Instruction:
    return Instruction(kind, tuple(frozenset(map(tuple, s)) for s in sets))


@dataclass(frozen=True)
class BusConfiguration:
    word: tuple
    locals: frozenset = frozenset()


class BusMachine:
    def __init__(self, alphabet, m, w0, w1, instructions):
        self.alphabet = tuple(alphabet)
        if m <= 0:
            raise ValueError("bus length must be positive")
        self.m = m
        self.w0 = tuple(w0)
        self.w1 = tuple(w1)
        if len(self.w0) != m or len(self.w1) != m:
            raise ValueError("w0 and w1 must have length m")
        alpha = set(self.alphabet)
        if not (set(self.w0) <= alpha and set(self.w1) <= alpha):
            raise ValueError("words must use alphabet symbols")
        self.instructions = tuple(instructions)
        for instr in self.instructions:
            if len(instr.sets) != m:
                raise ValueError("instruction width must equal the bus length")
            for s in instr.sets:
                for sw in s:
                    if any(sym not in alpha for sym in sw):
                        raise ValueError(f"switch {sw!r} uses unknown symbols")

    def initial(self) -> BusConfiguration:
        return BusConfiguration(self.w0)

    def is_final(self, cfg: BusConfiguration) -> bool:
        return cfg.word == self.w1


def bus_step(cfg: BusConfiguration, instr: Instruction):
    """All outcomes of executing one instruction.  Each outcome is a tuple of
    one (simple/labeled) or two (branching) successor configurations; set
    nondeterminism multiplies outcomes.  Raises when some position has no
    switch matching the current symbol."""
    options = []
    for i, s in enumerate(instr.sets):
        matching = sorted(sw for sw in s if sw[0] == cfg.word[i])
        if not matching:
            raise InapplicableInstruction(
                f"no switch for symbol {cfg.word[i]!r} at position {i}")
        options.append(matching)
    outcomes = []
    for combo in product(*options):
        if instr.kind == SIMPLE:
            word = tuple(sw[1] for sw in combo)
            outcomes.append((BusConfiguration(word, cfg.locals),))
        elif instr.kind == LABELED:
            word = tuple(sw[1] for sw in combo)
            local = Instruction(
                SIMPLE, tuple(frozenset({(sw[2], sw[3])}) for sw in combo))
            outcomes.append(
                (BusConfiguration(word, cfg.locals | {local}),))
        else:
            left = tuple(sw[1] for sw in combo)
            right = tuple(sw[2] for sw in combo)
            outcomes.append((BusConfiguration(left, cfg.locals),
                             BusConfiguration(right, cfg.locals)))
    return outcomes


def successors(M: BusMachine, cfg: BusConfiguration):
    """Outcomes over every applicable instruction, global and local."""
    out = []
    for instr in M.instructions + tuple(sorted(cfg.locals, key=repr)):
        try:
            out.extend(bus_step(cfg, instr))
        except InapplicableInstruction:
            continue
    return out


def bus_accepts(M: BusMachine, budget: int = 10_000):
    """Least-fixpoint eventually-accepting check from <w0, {}>, exploring at
    most budget distinct configurations.  True found within the explored
    region is definitive; False requires exhaustive exploration, otherwise
    the result is UNKNOWN."""
    start = M.initial()
    outcome_map = {}
    queue = [start]
    seen = {start}
    truncated = False
    while queue:
        if len(outcome_map) >= budget:
            truncated = True
            break
        cfg = queue.pop()
        outs = successors(M, cfg)
        outcome_map[cfg] = outs
        for outcome in outs:
            for nxt in outcome:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    accepting = {c for c in seen if M.is_final(c)}
    changed = True
    while changed:
        changed = False
        for cfg, outs in outcome_map.items():
            if cfg in accepting:
                continue
            for outcome in outs:
                if all(n in accepting for n in outcome):
                    accepting.add(cfg)
                    changed = True
                    break
    if start in accepting:
        return True
    if not truncated:
        return False
    return UNKNOWN


# ---------------------------------------------------------------------------
# JSON descriptions

def _word(value):
    if isinstance(value, str):
        return tuple(value)
    return tuple(value)


def tiling_from_json(d: dict) -> TilingPuzzle:
    rules = {(r["k"], r["l"], r["m"], r["n"]): r["out"] for r in d.get("rules", [])}
    return TilingPuzzle(d["tiles"], d["E"], d["OK"], rules, d["default"],
                        row0=d.get("input", ()))


def tiling_to_json(G: TilingPuzzle) -> dict:
    d = {"tiles": list(G.tiles), "E": G.E, "OK": G.OK, "default": G.default,
         "rules": [{"k": k, "l": l, "m": m, "n": n, "out": out}
                   for (k, l, m, n), out in sorted(G.rules.items())]}
    if G.row0:
        d["input"] = list(G.row0)
    return d


def branching_from_json(d: dict) -> BranchingPuzzle:
    rules = {(r["k"], r["l"], r["m"], r["n"]): tuple(r["out"])
             for r in d.get("rules", [])}
    return BranchingPuzzle(d["tiles"], d["E"], d["OK"], rules,
                           tuple(d["default"]))


def branching_to_json(G: BranchingPuzzle) -> dict:
    return {"tiles": list(G.tiles), "E": G.E, "OK": G.OK,
            "default": list(G.default),
            "rules": [{"k": k, "l": l, "m": m, "n": n, "out": list(out)}
                      for (k, l, m, n), out in sorted(G.rules.items())]}


def bus_from_json(d: dict) -> BusMachine:
    instrs = [instruction(i["kind"], i["sets"]) for i in d["instructions"]]
    return BusMachine(d["alphabet"], d["m"], _word(d["w0"]), _word(d["w1"]),
                      instrs)


def bus_to_json(M: BusMachine) -> dict:
    return {"alphabet": list(M.alphabet), "m": M.m,
            "w0": list(M.w0), "w1": list(M.w1),
            "instructions": [
                {"kind": i.kind, "sets": [sorted(map(list, s)) for s in i.sets]}
                for i in M.instructions]}


def load_model(path: str):
    """Dispatch on JSON shape: bus machines have 'alphabet', branching
    puzzles have pair rule outputs, the rest are deterministic tilings."""
    with open(path) as fh:
        d = json.load(fh)
    return model_from_json(d)


def model_from_json(d: dict):
    if "alphabet" in d:
        return bus_from_json(d)
    if isinstance(d.get("default"), (list, tuple)):
        return branching_from_json(d)
    return tiling_from_json(d)
