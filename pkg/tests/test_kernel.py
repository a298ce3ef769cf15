import random

import pytest

from golden import golden_env, golden_formula, golden_goal, golden_term
from mints.syntax import Environment, atom, parse_formula, subst_vars
from mints.terms import (EigenvariableViolation, ObjAbs, ObjApp, ProofAbs,
                         ProofApp, ProofVar, ShapeError, TypeCheckError,
                         contains_obj_abs, count_obj_abs,
                         count_proof_var_uses, head_analysis, is_lnf,
                         is_normal, normalize, parse_term, peel_spine,
                         print_term, subst_obj_in_term, typecheck)


def test_identity_typechecks():
    t = ProofAbs("X", atom("A"), ProofVar("X"))
    assert typecheck(Environment(), t) == parse_formula("A -> A")


def test_unbound_proof_var():
    with pytest.raises(TypeCheckError):
        typecheck(Environment(), ProofVar("X"))


def test_apply_non_implication():
    env = Environment([("X", atom("A")), ("Y", atom("B"))])
    with pytest.raises(TypeCheckError):
        typecheck(env, ProofApp(ProofVar("X"), ProofVar("Y")))


def test_eigenvariable_violation():
    env = Environment([("Y", parse_formula("P(x)"))])
    with pytest.raises(EigenvariableViolation):
        typecheck(env, ObjAbs("x", ProofVar("Y")))


def test_forall_intro_and_elim():
    env = Environment([("Y", parse_formula("forall x. P(x)"))])
    t = ObjApp(ProofVar("Y"), "z")
    assert typecheck(env, t) == parse_formula("P(z)")
    t2 = ObjAbs("w", ObjApp(ProofVar("Y"), "w"))
    assert typecheck(env, t2) == parse_formula("forall w. P(w)")


def test_checking_mode_unannotated():
    t = parse_term("\\X. X")
    with pytest.raises(TypeCheckError):
        typecheck(Environment(), t)  # synthesis needs annotations
    assert typecheck(Environment(), t, parse_formula("A -> A")) == parse_formula("A -> A")
    with pytest.raises(TypeCheckError):
        typecheck(Environment(), t, parse_formula("A -> B"))


def test_annotation_must_match_expected():
    t = parse_term("\\X:B. X")
    with pytest.raises(TypeCheckError):
        typecheck(Environment(), t, parse_formula("A -> A"))


def test_instantiation_with_bound_name_elsewhere():
    # forall-E takes an arbitrary object variable, even one bound nearby
    env = Environment([("Y", parse_formula("forall x. forall y. H(x,y)"))])
    t = ObjApp(ObjApp(ProofVar("Y"), "y"), "y")
    assert typecheck(env, t) == parse_formula("H(y,y)")


def test_subst_obj_in_term():
    t = ObjApp(ProofVar("X"), "x")
    assert subst_obj_in_term(t, {"x": "y"}) == ObjApp(ProofVar("X"), "y")
    t2 = ProofAbs("Z", parse_formula("P(x)"), ProofVar("Z"))
    s2 = subst_obj_in_term(t2, {"x": "y"})
    assert s2.annot == parse_formula("P(y)")
    t3 = ObjAbs("x", ObjApp(ProofVar("X"), "x"))
    assert subst_obj_in_term(t3, {"x": "y"}) == t3  # binder shadows


def test_subst_obj_capture_avoiding():
    t = ObjAbs("x", ObjApp(ObjApp(ProofVar("X"), "x"), "y"))
    s = subst_obj_in_term(t, {"y": "x"})
    assert s == ObjAbs("w", ObjApp(ObjApp(ProofVar("X"), "w"), "x"))


def test_is_normal():
    assert is_normal(parse_term("X Y (\\Z. Z)"))
    assert not is_normal(parse_term("(\\X:A. X) Y"))
    assert not is_normal(ObjApp(ObjAbs("x", ProofVar("X")), "y"))


def test_normalize_simple():
    t = parse_term("(\\X:A. X) Y")
    assert normalize(t) == ProofVar("Y")
    t2 = ObjApp(ObjAbs("x", ProofApp(ProofVar("X"), ObjApp(ProofVar("Y"), "x"))), "z")
    assert normalize(t2) == parse_term("X (Y z)")


def test_normalize_idempotent_and_preserves_type():
    env = Environment([("Y", parse_formula("A -> A")), ("Z", atom("A"))])
    t = ProofApp(ProofAbs("X", parse_formula("A -> A"),
                          ProofApp(ProofVar("X"), ProofApp(ProofVar("X"), ProofVar("Z")))),
                 ProofVar("Y"))
    before = typecheck(env, t)
    n = normalize(t)
    assert normalize(n) == n
    assert typecheck(env, n) == before


def test_eta_short_term_is_not_lnf():
    env = Environment([("X", parse_formula("A -> B")), ("Z", atom("A"))])
    assert not is_lnf(env, ProofVar("X"), parse_formula("A -> B"))
    eta_long = ProofAbs("W", atom("A"), ProofApp(ProofVar("X"), ProofVar("W")))
    assert is_lnf(env, eta_long, parse_formula("A -> B"))


def test_is_lnf_distinguishes_type_errors():
    env = Environment([("X", parse_formula("A -> B"))])
    with pytest.raises(TypeCheckError):
        is_lnf(env, ProofVar("W"), parse_formula("A -> B"))


def test_head_analysis():
    env = Environment([("X", parse_formula("forall y. A -> B(y)")), ("Z", atom("A"))])
    t = ProofApp(ObjApp(ProofVar("X"), "y"), ProofVar("Z"))
    name, spine = head_analysis(env, t)
    assert name == "X"
    assert spine == [("obj", "y"), ("proof", ProofVar("Z"))]
    name, spine = head_analysis(Environment([("X", atom("A"))]), ProofVar("X"))
    assert (name, spine) == ("X", [])
    with pytest.raises(ShapeError):
        peel_spine(parse_term("\\X:A. X"))


def test_parse_print_roundtrip():
    texts = [
        "\\X:A -> B. \\Y:A. X Y",
        "\\x. \\Y:P(x). Y",
        "X y (\\Z:A. Z) W",
        "\\X:forall x. P(x) -> Q. X z",
        "(\\X:A. X) Y",
    ]
    for s in texts:
        t = parse_term(s)
        assert parse_term(print_term(t)) == t


def test_term_alpha_equivalence():
    assert parse_term("\\X:A. X") == parse_term("\\Y:A. Y")
    assert parse_term("\\x. Z x") == parse_term("\\y. Z y")
    assert parse_term("\\x. Z x") != parse_term("\\x. Z w")


# ---------------------------------------------------------------------------
# The worked example: shortest normal proof over the eight-string driver

def test_golden_term_typechecks():
    env = golden_env()
    assert typecheck(env, golden_term(), golden_goal()) == golden_goal()


def test_golden_term_is_normal_lnf():
    env = golden_env()
    t = golden_term()
    assert is_normal(t)
    assert is_lnf(env, t, golden_goal())


def test_golden_term_counts():
    t = golden_term()
    assert count_proof_var_uses(t, "X1") == 4
    assert count_proof_var_uses(t, "X2") == 2
    assert count_proof_var_uses(t, "X3") == 1
    assert count_proof_var_uses(t, "Y") == 1
    assert count_obj_abs(t) == 8


def test_golden_abstracted_form():
    body = golden_term()
    env = golden_env()
    t = body
    for name, _ in reversed(env.decls):
        t = ProofAbs(name, None, t)
    assert typecheck(Environment(), t, golden_formula()) == golden_formula()


def test_golden_roundtrip():
    assert parse_term(print_term(golden_term())) == golden_term()


# ---------------------------------------------------------------------------
# Random well-typed terms for property checks (generator shared with the
# acceptance suite via conftest helpers)

from genterms import generate_derivable  # noqa: E402


def test_substitution_lemma_random():
    rng = random.Random(11)
    for _ in range(200):
        env, term, formula = generate_derivable(rng)
        assert typecheck(env, term, formula) == formula
        fvs = env.free_vars() | formula.free_vars() | {"x", "y"}
        src = rng.choice(sorted(fvs))
        dst = rng.choice(sorted(fvs))
        env2 = Environment([(n, subst_vars(f, {src: dst})) for n, f in env.decls])
        assert typecheck(env2, subst_obj_in_term(term, {src: dst})) \
            == subst_vars(formula, {src: dst})


def test_subject_reduction_random():
    rng = random.Random(12)
    for _ in range(150):
        env, term, formula = generate_derivable(rng)
        # build a redex around the derivable term and reduce it back
        wrapper = ProofApp(ProofAbs("Q0", formula, ProofVar("Q0")), term)
        n = normalize(wrapper)
        assert typecheck(env, n, formula) == formula
