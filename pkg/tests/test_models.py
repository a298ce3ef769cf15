import json
import os
import random

import pytest

from mints.models import (UNKNOWN, BranchingPuzzle, BusConfiguration,
                          BusMachine, InapplicableInstruction, Instruction,
                          TilingPuzzle, branching_from_json, branching_to_json,
                          btile_at, bus_accepts, bus_from_json, bus_step,
                          bus_to_json, instruction, loc_size, model_from_json,
                          s_solvable, solvable_within, successors, tile_at,
                          tiling_from_json, tiling_to_json)
from tm_compilers import TM, compile_tm_to_tiling, compile_tms_to_branching

DATA = os.path.join(os.path.dirname(__file__), "data")


def constant_puzzle(out):
    return TilingPuzzle(["E", "OK", "T"], "E", "OK", {}, out)


def test_borders_are_e():
    G = constant_puzzle("T")
    assert tile_at(G, 0, 7) == "E"
    assert tile_at(G, 4, 0) == "E"


def test_constant_rule():
    G = constant_puzzle("T")
    assert tile_at(G, 1, 1) == "T"
    assert tile_at(G, 3, 2) == "T"


def test_recurrence_window():
    # tile (2,2) must consult K=(1,2), L=(1,1), M=(2,1), N=(3,1)
    G = TilingPuzzle(["E", "OK", "A", "B"], "E", "OK",
                     {("E", "E", "E", "E"): "A",
                      ("A", "E", "E", "E"): "B",
                      ("B", "E", "E", "E"): "B",
                      ("A", "A", "B", "B"): "OK"},
                     "A")
    assert tile_at(G, 1, 1) == "A"
    assert tile_at(G, 2, 1) == "B"
    assert tile_at(G, 3, 1) == "B"
    assert tile_at(G, 1, 2) == "A"   # K=E(0,2), L=E, M=A, N=B -> default A
    assert tile_at(G, 2, 2) == "OK"


def test_memo_consistency():
    rng = random.Random(5)
    tiles = ["E", "OK", "A", "B"]
    rules = {key: rng.choice(tiles)
             for key in [tuple(rng.choices(tiles, k=4)) for _ in range(30)]}
    G1 = TilingPuzzle(tiles, "E", "OK", rules, "A")
    G2 = TilingPuzzle(tiles, "E", "OK", rules, "A")
    for n in range(6):
        for m in range(6):
            assert tile_at(G1, m, n) == tile_at(G2, m, n)


def test_solvable_within():
    assert solvable_within(constant_puzzle("T"), 6) is None
    assert solvable_within(constant_puzzle("OK"), 6) == (1, 1)


def test_loc_size():
    assert loc_size(1, 1) == 1
    # L(1,2): l=1 -> k <= 2, l=2 -> k <= 1
    assert loc_size(1, 2) == 3
    assert loc_size(2, 1) == 2


def test_validation():
    with pytest.raises(ValueError):
        TilingPuzzle(["E"], "E", "E", {}, "E")
    with pytest.raises(ValueError):
        TilingPuzzle(["E", "OK"], "E", "OK", {("E", "E", "E", "X"): "E"}, "E")


def test_tm_tiling_matches_simulation():
    tm = TM([BLANK_SYM := "*", "1"], ["q0", "q1", "q2", "qa"], "q0", "qa",
            {("q0", "*"): ("q1", "1", "R"),
             ("q0", "1"): ("q0", "1", "R"),
             ("q1", "*"): ("q2", "1", "R"),
             ("q1", "1"): ("q1", "1", "R"),
             ("q2", "*"): ("qa", "1", "R"),
             ("q2", "1"): ("q2", "1", "R")})
    G = compile_tm_to_tiling(tm)
    for n in range(1, 11):
        for m in range(1, 12):
            assert tile_at(G, m, n) == tm.expected_tile(m, n - 1), (m, n)


def test_tm_halting_puzzle_solvable():
    tm = TM(["*", "1"], ["q0", "q1", "q2", "qa"], "q0", "qa",
            {("q0", "*"): ("q1", "1", "R"),
             ("q1", "*"): ("q2", "1", "R"),
             ("q2", "*"): ("qa", "1", "R")})
    G = compile_tm_to_tiling(tm)
    found = solvable_within(G, 8)
    assert found is not None
    assert tile_at(G, *found) == "OK"


# ---------------------------------------------------------------------------
# Branching puzzles

def constant_branching(out0, out1):
    return BranchingPuzzle(["E", "OK", "T"], "E", "OK", {}, (out0, out1))


def test_btile_borders():
    G = constant_branching("T", "T")
    assert btile_at(G, 0, "0110") == "E"
    assert btile_at(G, 3, "") == "E"


def test_btile_projections():
    G = constant_branching("OK", "OK")
    assert btile_at(G, 1, "0") == "OK"
    assert btile_at(G, 1, "1") == "OK"
    G2 = BranchingPuzzle(["E", "OK", "A", "B"], "E", "OK", {}, ("A", "B"))
    assert btile_at(G2, 1, "0") == "A"
    assert btile_at(G2, 1, "1") == "B"


def test_s_solvable_constants():
    assert s_solvable(constant_branching("OK", "OK"), 1)
    assert not s_solvable(constant_branching("T", "T"), 3)


def _leaf_oracle(G, s):
    """Direct reading of s-solvability: every leaf branch must pass OK."""
    for leaf in range(2 ** s):
        w = format(leaf, f"0{s}b")
        if not any(btile_at(G, m, w[:j]) == G.OK
                   for j in range(s + 1) for m in range(1, s + 1)):
            return False
    return True


def random_branching(rng, ntiles=3):
    tiles = ["E", "OK"] + [f"T{i}" for i in range(ntiles - 1)]
    rules = {}
    for _ in range(rng.randrange(0, 25)):
        key = tuple(rng.choices(tiles, k=4))
        rules[key] = (rng.choice(tiles), rng.choice(tiles))
    default = (rng.choice(tiles), rng.choice(tiles))
    return BranchingPuzzle(tiles, "E", "OK", rules, default)


def test_s_solvable_matches_leaf_oracle():
    rng = random.Random(21)
    for _ in range(60):
        G = random_branching(rng)
        for s in (1, 2, 3, 5):
            assert s_solvable(G, s) == _leaf_oracle(G, s)


def test_s_solvable_recursion_clause():
    rng = random.Random(22)
    checked = 0
    for _ in range(200):
        G = random_branching(rng)
        s = 3
        for v in ("", "0", "1", "01"):
            column_ok = any(btile_at(G, m, v[:j]) == G.OK
                            for j in range(len(v) + 1) for m in range(1, s + 1))
            if not column_ok and len(v) < s:
                assert s_solvable(G, s, v) == (
                    s_solvable(G, s, v + "0") and s_solvable(G, s, v + "1"))
                checked += 1
    assert checked > 50


def test_branching_tm_paths():
    shared = {("q0", "*"): ("q1", "1", "R"), ("q1", "*"): ("qa", "1", "R")}
    tm0 = TM(["*", "1"], ["q0", "q1", "qa"], "q0", "qa", shared)
    tm1 = TM(["*", "1"], ["q0", "q1", "qa"], "q0", "qa",
             {("q0", "*"): ("q0", "1", "R"), ("q1", "*"): ("q1", "1", "R")})
    G = compile_tms_to_branching(tm0, tm1)
    # row w evolves from row w[:-1] by the machine named by the last bit,
    # so a path of zeros replays tm0 exactly
    for depth in range(1, 5):
        w = "0" * depth
        for m in range(1, 6):
            assert btile_at(G, m, w) == tm0.expected_tile(m, depth - 1), (m, w)


# ---------------------------------------------------------------------------
# Bus machines

def ex51():
    with open(os.path.join(DATA, "ex51.json")) as fh:
        return bus_from_json(json.load(fh))


def test_ex51_first_step():
    M = ex51()
    cfg = M.initial()
    outs = bus_step(cfg, M.instructions[0])
    assert len(outs) == 1 and len(outs[0]) == 1
    nxt = outs[0][0]
    assert nxt.word == tuple("aaab")
    assert len(nxt.locals) == 1
    local = next(iter(nxt.locals))
    assert local == instruction("simple",
                                [[("c", "c")], [("c", "c")], [("c", "c")], [("c", "d")]])


def test_ex51_unique_run_31_steps():
    M = ex51()
    cfg = M.initial()
    steps = 0
    locals_before_istar = None
    while not M.is_final(cfg):
        outs = successors(M, cfg)
        assert len(outs) == 1 and len(outs[0]) == 1, cfg
        nxt = outs[0][0]
        if cfg.word == tuple("bbbb") and nxt.word == tuple("cccc"):
            locals_before_istar = len(cfg.locals)
        cfg = nxt
        steps += 1
        assert steps <= 40
    assert steps == 31
    assert locals_before_istar == 15


def test_ex51_accepts():
    assert bus_accepts(ex51(), budget=10_000) is True


def test_bus_trivial_cases():
    M = BusMachine(["a", "b"], 2, "aa", "aa", [])
    assert bus_accepts(M, 10) is True
    M2 = BusMachine(["a", "b"], 2, "aa", "bb", [])
    assert bus_accepts(M2, 10) is False


def test_bus_inapplicable():
    M = ex51()
    with pytest.raises(InapplicableInstruction):
        bus_step(BusConfiguration(tuple("dddd")), M.instructions[0])


def test_branching_instruction_step():
    instr = instruction("branching", [[("a", "b", "c")], [("a", "b", "c")]])
    outs = bus_step(BusConfiguration(tuple("aa")), instr)
    assert outs == [(BusConfiguration(tuple("bb")), BusConfiguration(tuple("cc")))]


def test_branching_acceptance_needs_both():
    # one branch reaches w1, the other gets stuck: must not accept
    instr = instruction("branching", [[("a", "b", "c")]])
    M = BusMachine(["a", "b", "c"], 1, "a", "b", [instr])
    assert bus_accepts(M, 100) is False
    # give the c-branch a path home and acceptance flips
    fix = instruction("simple", [[("c", "b")]])
    M2 = BusMachine(["a", "b", "c"], 1, "a", "b", [instr, fix])
    assert bus_accepts(M2, 100) is True


def test_bus_budget_unknown_monotone():
    M = ex51()
    small = bus_accepts(M, budget=3)
    assert small is UNKNOWN or small is True
    assert bus_accepts(M, budget=10_000) is True


def test_locals_grow_monotonically():
    M = ex51()
    cfg = M.initial()
    prev = 0
    for _ in range(31):
        outs = successors(M, cfg)
        cfg = outs[0][0]
        assert len(cfg.locals) >= prev
        prev = len(cfg.locals)


def test_json_roundtrips():
    M = ex51()
    assert bus_from_json(bus_to_json(M)).instructions == M.instructions
    G = TilingPuzzle(["E", "OK", "T"], "E", "OK",
                     {("E", "E", "E", "E"): "T"}, "E", row0=("T",))
    G2 = tiling_from_json(tiling_to_json(G))
    assert G2.rules == G.rules and G2.row0 == G.row0
    B = BranchingPuzzle(["E", "OK"], "E", "OK",
                        {("E", "E", "E", "E"): ("OK", "E")}, ("E", "E"))
    B2 = branching_from_json(branching_to_json(B))
    assert B2.rules == B.rules
    assert isinstance(model_from_json(bus_to_json(M)), BusMachine)
    assert isinstance(model_from_json(branching_to_json(B)), BranchingPuzzle)
    assert isinstance(model_from_json(tiling_to_json(G)), TilingPuzzle)
