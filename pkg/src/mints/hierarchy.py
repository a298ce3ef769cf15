"""Mints-hierarchy classification and the easy-formula predicate.

Two implementations of class membership live here on purpose: `in_class`
reads the defining grammar literally and serves as the test oracle, while
`classify` computes the minimal levels by a closed-form recurrence and is the
fast path.  `Sigma` and `Pi` name the two sides of the hierarchy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Atom, Forall, Formula, Implication, target

SIGMA = "Sigma"
PI = "Pi"


@dataclass(frozen=True)
class MintsClass:
    sigma_level: int
    pi_level: int

    def __post_init__(self):
        if abs(self.sigma_level - self.pi_level) > 1:
            raise ValueError("sigma and pi levels can differ by at most 1")


def in_class(f: Formula, n: int, side: str) -> bool:
    """Literal grammar membership: Sigma_{n+1} ::= a | Pi_n | Pi_{n+1} -> Sigma_{n+1};
    Pi_{n+1} ::= a | Sigma_n | Sigma_{n+1} -> Pi_{n+1} | forall x. Pi_{n+1};
    level 0 on both sides is the quantifier-free formulas."""
    if side not in (SIGMA, PI):
        raise ValueError(f"side must be {SIGMA!r} or {PI!r}")
    return _member(f, n, side)


def _member(f: Formula, n: int, side: str) -> bool:
    key = (f.canon(), n, side)
    cache = _member_cache
    hit = cache.get(key)
    if hit is not None:
        return hit
    if n == 0:
        result = _quantifier_free(f)
    elif isinstance(f, Atom):
        result = True
    elif side == SIGMA:
        result = (_member(f, n - 1, PI)
                  or (isinstance(f, Implication)
                      and _member(f.antecedent, n, PI)
                      and _member(f.consequent, n, SIGMA)))
    else:
        if isinstance(f, Forall):
            result = _member(f.body, n, PI)
        else:
            result = (_member(f, n - 1, SIGMA)
                      or (isinstance(f, Implication)
                          and _member(f.antecedent, n, SIGMA)
                          and _member(f.consequent, n, PI)))
    cache[key] = result
    return result


_member_cache: dict = {}


def _quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Forall):
        return False
    return _quantifier_free(f.antecedent) and _quantifier_free(f.consequent)


def classify(f: Formula) -> MintsClass:
    """Minimal levels (least n with membership on each side)."""
    s, p = _levels(f)
    return MintsClass(sigma_level=s, pi_level=p)


def _levels(f: Formula):
    if _quantifier_free(f):
        return 0, 0
    if isinstance(f, Forall):
        _, p_body = _levels(f.body)
        p = max(1, p_body)
        return p + 1, p
    s_a, p_a = _levels(f.antecedent)
    s_c, p_c = _levels(f.consequent)
    p0 = max(1, s_a, p_c)
    s0 = max(1, p_a, s_c)
    return min(s0, p0 + 1), min(p0, s0 + 1)


def depth(f: Formula) -> int:
    """Connective nesting depth; atoms have depth 1."""
    if isinstance(f, Atom):
        return 1
    if isinstance(f, Forall):
        return 1 + depth(f.body)
    return 1 + max(depth(f.antecedent), depth(f.consequent))


def is_easy(f: Formula) -> bool:
    """Atoms are easy; otherwise the target must be nullary or unary and all
    implication/quantifier parts must be easy themselves."""
    if isinstance(f, Atom):
        return True
    if target(f).arity > 1:
        return False
    if isinstance(f, Forall):
        return is_easy(f.body)
    return is_easy(f.antecedent) and is_easy(f.consequent)


def annotate_polarity(f: Formula) -> str:
    """Diagnostic: list quantifier occurrences with their polarity (+ when the
    quantifier is positive, - when it sits under an odd number of antecedents).
    Purely informational; classification never consults this."""
    lines = []

    def walk(g: Formula, positive: bool, path: str):
        if isinstance(g, Atom):
            return
        if isinstance(g, Forall):
            sign = "+" if positive else "-"
            lines.append(f"{sign} forall {g.var} at {path or 'root'}")
            walk(g.body, positive, path + "Q")
            return
        walk(g.antecedent, not positive, path + "L")
        walk(g.consequent, positive, path + "R")

    walk(f, True, "")
    return "\n".join(lines)
