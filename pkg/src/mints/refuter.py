"""Refutation soups for Sigma_1 judgments.

A question of a judgment Gamma |- a is a declaration X whose head atom can be
instantiated to a by a total map S of its quantified variables into the pool
W; an answer picks one premise block sigma_j = tau_1 -> ... -> a_j of the
instantiated declaration and asks Gamma, tau_1[S], ..., tau_r[S] |- a_j[S].
A soup is a nonempty set of judgments containing the target and closed under
answering: every question of every member has an answer in the soup.  Soups
exist exactly for unprovable judgments, so `build_soup` doubles as an
independent refutation certificate for the prover.

Judgments with a non-atomic Sigma_1 goal are normalized first: the goal's
premises join the environment and the goal becomes its head atom, which
changes neither provability nor refutability.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .prover import (UNPROVABLE, Sigma1Judgment, Sigma1Prover, VariablePool,
                     decompose, decompose_sigma1)
from .syntax import (Atom, Environment, Forall, Formula, format_problem,
                     parse_problem, subst_vars)


class _Provable:
    def __repr__(self):
        return "Provable"

    def __bool__(self):
        return False


PROVABLE = _Provable()


@dataclass(frozen=True)
class Question:
    proof_var: str
    subst: tuple  # (variable, pool value) pairs in binder order


@dataclass(frozen=True)
class Soup:
    judgments: tuple  # Sigma1Judgment members, insertion order, j0 first

    def __post_init__(self):
        if not self.judgments:
            raise ValueError("a soup is a nonempty set of judgments")

    def __len__(self):
        return len(self.judgments)

    def __iter__(self):
        return iter(self.judgments)


def normalize_judgment(j: Sigma1Judgment) -> Sigma1Judgment:
    """Move the goal's premises into the environment; goal becomes its head."""
    premises, head = decompose_sigma1(j.goal)
    if not premises:
        return j
    env = _extend_env(j.env, premises)
    return Sigma1Judgment(env, head)


def _extend_env(env: Environment, formulas) -> Environment:
    present = set(env.formulas())
    used = set(env.names())
    decls = []
    n = 0
    for f in formulas:
        if f in present:
            continue
        present.add(f)
        while True:
            n += 1
            name = f"H{n}"
            if name not in used:
                break
        used.add(name)
        decls.append((name, f))
    return env.extend(decls) if decls else env


def _binder_names(f: Formula):
    names = []
    while not isinstance(f, Atom):
        if isinstance(f, Forall):
            names.append(f.var)
            f = f.body
        else:
            f = f.consequent
    return names


def questions(j: Sigma1Judgment):
    """All (X, S) with the head of Gamma(X) matching the goal under S, in
    declaration order then lexicographic order of assignments over W."""
    j = normalize_judgment(j)
    goal = j.goal
    W = VariablePool.for_judgment(j.env, goal).vars
    out = []
    for name, f in j.env:
        d = decompose(f)
        if d.head.pred != goal.pred:
            continue
        placeholders = [ph for kind, ph in d.spine if kind == "var"]
        binders = _binder_names(f)
        # shadowed binder names would collide as keys; fall back to position
        keys = [b if binders.count(b) == 1 else f"${i}"
                for i, b in enumerate(binders)]
        head_map = {}
        ok = True
        for pv, gv in zip(d.head.args, goal.args):
            if pv.startswith("$"):
                if head_map.get(pv, gv) != gv:
                    ok = False
                    break
                head_map[pv] = gv
            elif pv != gv:
                ok = False
                break
        if not ok:
            continue
        free = [ph for ph in placeholders if ph not in head_map]
        for assign in product(W, repeat=len(free)):
            S = dict(head_map)
            S.update(zip(free, assign))
            subst = tuple((keys[i], S[ph])
                          for i, ph in enumerate(placeholders))
            out.append(Question(name, subst))
    return out


def _question_blocks(q: Question, j: Sigma1Judgment):
    """Instantiated premise blocks of the questioned declaration, each as
    (antecedent formulas, head atom)."""
    d = decompose(j.env.lookup(q.proof_var))
    placeholders = [ph for kind, ph in d.spine if kind == "var"]
    if len(placeholders) != len(q.subst):
        raise ValueError("substitution does not cover the quantifier spine")
    S = {ph: val for ph, (_, val) in zip(placeholders, q.subst)}
    blocks = []
    for sigma in d.premises:
        inst = subst_vars(sigma, S)
        taus, head = decompose_sigma1(inst)
        blocks.append((taus, head))
    return blocks


def answer(q: Question, j: Sigma1Judgment, j_index: int) -> Sigma1Judgment:
    """The judgment asked by premise block j_index (1-based) of question q."""
    j = normalize_judgment(j)
    blocks = _question_blocks(q, j)
    if not 1 <= j_index <= len(blocks):
        raise IndexError(f"block index {j_index} out of range 1..{len(blocks)}")
    taus, head = blocks[j_index - 1]
    return Sigma1Judgment(_extend_env(j.env, taus), head)


def build_soup(j0: Sigma1Judgment):
    """Soup containing j0, or PROVABLE.  Every added member is an answer the
    prover reports unprovable, so by construction the result never coexists
    with a proof of j0."""
    z0 = normalize_judgment(j0)
    prover = Sigma1Prover(z0.env, VariablePool.for_judgment(z0.env, z0.goal))
    base = frozenset(z0.env.formulas())

    def key_of(j):
        return (frozenset(j.env.formulas()), j.goal)

    members = [z0]
    keys = {key_of(z0)}
    i = 0
    while i < len(members):
        z = members[i]
        for q in questions(z):
            blocks = _question_blocks(q, z)
            chosen = None
            for jx, (taus, head) in enumerate(blocks, 1):
                extra = [f for f in z.env.formulas() if f not in base] + list(taus)
                if prover.prove_goal(head, extra=extra) is UNPROVABLE:
                    chosen = jx
                    break
            if chosen is None:
                # every block provable: z itself is provable (only possible
                # for the target, members are chosen unprovable)
                assert i == 0, "builder added a provable member"
                return PROVABLE
            a = answer(q, z, chosen)
            k = key_of(a)
            if k not in keys:
                keys.add(k)
                members.append(a)
        i += 1
    return Soup(tuple(members))


def verify_soup(s: Soup, j0: Sigma1Judgment) -> bool:
    """Closure check by full question enumeration, independent of the
    builder; answers are accepted liberally (any member with the asked goal
    and at least the asked hypotheses)."""
    z0 = normalize_judgment(j0)
    members = [normalize_judgment(z) for z in s]
    sets = [(frozenset(z.env.formulas()), z.goal) for z in members]
    if (frozenset(z0.env.formulas()), z0.goal) not in sets:
        return False
    for z, (fs, goal) in zip(members, sets):
        if goal in fs:
            return False
        for q in questions(z):
            blocks = _question_blocks(q, z)
            found = False
            for taus, head in blocks:
                want = fs | frozenset(taus)
                for fs2, goal2 in sets:
                    if goal2 == head and fs2 >= want:
                        found = True
                        break
                if found:
                    break
            if not found:
                return False
    return True


# ---------------------------------------------------------------------------
# Serialization

def soup_to_text(s: Soup, j0: Sigma1Judgment) -> str:
    lines = ["j0: " + format_problem(j0.env, j0.goal, one_line=True)]
    for z in s:
        lines.append(format_problem(z.env, z.goal, one_line=True))
    return "\n".join(lines) + "\n"


def soup_from_text(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("j0:"):
        raise ValueError("soup text must start with a 'j0:' header line")
    env0, goal0 = parse_problem(lines[0][3:].strip())
    j0 = Sigma1Judgment(env0, goal0)
    members = []
    for ln in lines[1:]:
        env, goal = parse_problem(ln)
        members.append(Sigma1Judgment(env, goal))
    return Soup(tuple(members)), j0
