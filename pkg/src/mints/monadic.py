"""Arity-lowering translation.

Atoms of arity 0 or 1 are kept; an n-ary atom P(x1..xn) becomes
M1(x1) -> ... -> Mn(xn) -> p where the Mi are fresh unary marker predicates
and p is a fresh nullary stand-in for P.  Implication and quantification
translate homomorphically, so the result mentions only nullary and unary
predicates while preserving free variables and provability of easy
judgments.  Predicates of intermediate arity 2..n-1 are first padded to
arity n by repeating a distinguished pad variable in the final positions.

The fresh nullary keeps the predicate's name with a "$0" suffix (identifiers
starting lowercase lex as object variables here, so the case is kept).
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (Atom, Environment, Forall, Formula, Implication,
                     PredicateSymbol, signature_of)


@dataclass(frozen=True)
class TranslationScheme:
    max_arity: int
    pad_var: str = "x0"

    def __post_init__(self):
        if self.max_arity < 2:
            raise ValueError("max_arity must be at least 2")

    def marker(self, i: int) -> PredicateSymbol:
        if not 1 <= i <= self.max_arity:
            raise ValueError(f"marker index {i} out of range")
        return PredicateSymbol(f"M{i}", 1)

    def nullary(self, pred: PredicateSymbol) -> PredicateSymbol:
        return PredicateSymbol(f"{pred.name}$0", 0)


def scheme_for(env: Environment, *goals: Formula,
               pad_var: str = "x0") -> TranslationScheme:
    """Scheme whose arity is the largest one used (at least 2)."""
    sig = env.signature()
    for g in goals:
        signature_of(g, sig)
    n = max([2] + list(sig.values()))
    return TranslationScheme(n, pad_var)


def _check_freshness(sig: dict, scheme: TranslationScheme):
    for name in sig:
        if name.endswith("$0"):
            raise ValueError(f"source predicate {name!r} collides with a "
                             "translation nullary")
    for i in range(1, scheme.max_arity + 1):
        if f"M{i}" in sig:
            raise ValueError(f"source predicate M{i} collides with a marker")


def translate(f: Formula, scheme: TranslationScheme) -> Formula:
    _check_freshness(signature_of(f), scheme)
    return _translate(f, scheme)


def _translate(f: Formula, scheme: TranslationScheme) -> Formula:
    n = scheme.max_arity
    if isinstance(f, Atom):
        k = len(f.args)
        if k <= 1:
            return f
        if k > n:
            raise ValueError(
                f"predicate {f.pred.name} has arity {k} > scheme arity {n}")
        args = f.args + (scheme.pad_var,) * (n - k)
        out = Atom(scheme.nullary(f.pred))
        for i in range(n, 0, -1):
            out = Implication(Atom(scheme.marker(i), (args[i - 1],)), out)
        return out
    if isinstance(f, Implication):
        return Implication(_translate(f.antecedent, scheme),
                           _translate(f.consequent, scheme))
    return Forall(f.var, _translate(f.body, scheme))


def translate_env(env: Environment, scheme: TranslationScheme) -> Environment:
    _check_freshness(env.signature(), scheme)
    return Environment((name, _translate(f, scheme)) for name, f in env)
