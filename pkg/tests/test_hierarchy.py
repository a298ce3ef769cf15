import random

import pytest

from mints.hierarchy import (PI, SIGMA, MintsClass, annotate_polarity,
                             classify, depth, in_class, is_easy)
from mints.syntax import Forall, Implication, atom, parse_formula

PI1_EXAMPLE = "((forall x. P(x)) -> Q) -> Q"
SIGMA2_EXAMPLE = "(forall x. ((forall y. R(y)) -> P(x))) -> Q"
DELTA2_EXAMPLE = "(forall x. P(x)) -> ((forall y. R(y)) -> Q) -> Q"


def test_atoms_are_level_zero():
    assert classify(parse_formula("Q")) == MintsClass(0, 0)
    assert classify(parse_formula("P(x)")) == MintsClass(0, 0)
    assert in_class(parse_formula("P(x)"), 0, SIGMA)
    assert in_class(parse_formula("P(x)"), 0, PI)


def test_pi1_fixture():
    c = classify(parse_formula(PI1_EXAMPLE))
    assert c.pi_level == 1
    assert c.sigma_level == 2
    assert in_class(parse_formula(PI1_EXAMPLE), 1, PI)


def test_sigma2_fixture():
    c = classify(parse_formula(SIGMA2_EXAMPLE))
    assert c.sigma_level == 2
    assert c.pi_level == 3
    assert in_class(parse_formula(SIGMA2_EXAMPLE), 2, SIGMA)


def test_delta2_fixture():
    c = classify(parse_formula(DELTA2_EXAMPLE))
    assert c == MintsClass(2, 2)


def test_quantifier_free_is_level_zero():
    f = parse_formula("(A -> B) -> C -> D")
    assert classify(f) == MintsClass(0, 0)
    assert in_class(f, 0, SIGMA) and in_class(f, 0, PI)


def test_forall_levels():
    f = parse_formula("forall x. P(x)")
    assert classify(f) == MintsClass(2, 1)


def test_invalid_side_rejected():
    with pytest.raises(ValueError):
        in_class(atom("Q"), 0, "Delta")


def test_mints_class_gap_invariant():
    with pytest.raises(ValueError):
        MintsClass(0, 2)


def _random_formula(rng, d, vars):
    preds = [("P", 1), ("Q", 0), ("R", 1), ("H", 2)]
    if d == 0 or rng.random() < 0.3:
        name, arity = rng.choice(preds)
        return atom(name, *rng.choices(vars, k=arity))
    if rng.random() < 0.4:
        v = rng.choice(vars)
        return Forall(v, _random_formula(rng, d - 1, vars))
    return Implication(_random_formula(rng, d - 1, vars),
                       _random_formula(rng, d - 1, vars))


def test_classify_matches_grammar_oracle():
    rng = random.Random(42)
    for _ in range(500):
        f = _random_formula(rng, 5, ["x", "y"])
        c = classify(f)
        bound = depth(f) + 1
        sigma_min = next(n for n in range(bound + 1) if in_class(f, n, SIGMA))
        pi_min = next(n for n in range(bound + 1) if in_class(f, n, PI))
        assert c.sigma_level == sigma_min
        assert c.pi_level == pi_min


def test_membership_monotone():
    rng = random.Random(43)
    for _ in range(200):
        f = _random_formula(rng, 4, ["x", "y"])
        for n in range(depth(f)):
            for side in (SIGMA, PI):
                if in_class(f, n, side):
                    assert in_class(f, n + 1, side)


def test_is_easy():
    assert is_easy(parse_formula("forall x. Ok(x) -> Go"))
    assert not is_easy(parse_formula("forall x y. H(x,y)"))
    assert is_easy(parse_formula("H(x,y)"))  # bare atoms are always easy
    assert is_easy(parse_formula("H(x,y) -> P(x)"))
    assert not is_easy(parse_formula("P(x) -> H(x,y)"))


def test_polarity_annotation_is_diagnostic_only():
    text = annotate_polarity(parse_formula("(forall x. P(x)) -> forall y. Q"))
    lines = text.splitlines()
    assert any(line.startswith("- forall x") for line in lines)
    assert any(line.startswith("+ forall y") for line in lines)
