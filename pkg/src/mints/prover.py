"""Proof search.

`prove_sigma1` decides judgments with a Pi_1 environment and a Sigma_1 goal:
it searches long-normal-form eliminators over the finite pool W of object
variables (free variables of the judgment, or a designated x0), so it always
terminates and never answers Unknown.  `prove_general` is a budgeted
iterative-deepening search for arbitrary (forall, ->) judgments; the budget
counts eliminator applications along a path, introductions are free.

Both searches memoize judgments as (context-as-set, goal) pairs.  Failures
discovered while an ancestor occurrence of the same judgment is in progress
are used locally but not cached (the usual tabling taint discipline), since
they assume the ancestor fails.  The general search additionally renames
eigenvariables canonically (colour refinement over the context) so that
isomorphic contexts share memo entries.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import product

from .hierarchy import classify
from .syntax import (Atom, Environment, Forall, Formula, Implication,
                     fresh_var, subst_vars)
from .terms import (ObjAbs, ObjApp, ProofAbs, ProofApp, ProofVar,
                    subst_obj_in_term, subst_proof_var)


@dataclass(frozen=True)
class Proved:
    term: object


class _Unprovable:
    def __repr__(self):
        return "Unprovable"

    def __bool__(self):
        return False


UNPROVABLE = _Unprovable()


@dataclass(frozen=True)
class Unknown:
    note: str = "budget exhausted"

    def __bool__(self):
        return False


def _ensure_stack(limit: int = 100_000):
    # context-growing searches recurse once per added hypothesis
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


@dataclass(frozen=True)
class VariablePool:
    vars: tuple

    @classmethod
    def for_judgment(cls, env: Environment, goal: Formula) -> "VariablePool":
        fvs = env.free_vars() | goal.free_vars()
        return cls(tuple(sorted(fvs)) if fvs else ("x0",))


@dataclass(frozen=True)
class Sigma1Judgment:
    env: Environment
    goal: Formula

    def __post_init__(self):
        if classify(self.goal).sigma_level > 1:
            raise ValueError(f"goal is not Sigma_1: {self.goal}")
        for name, f in self.env:
            if classify(f).pi_level > 1:
                raise ValueError(f"declaration {name} is not Pi_1: {f}")

    def pool(self) -> VariablePool:
        return VariablePool.for_judgment(self.env, self.goal)


# ---------------------------------------------------------------------------
# Decomposition

@dataclass(frozen=True)
class Decomp:
    """Quantifier/implication spine of a declaration: items are
    ("var", placeholder) or ("prem", formula); placeholders "$i" stand for
    the peeled quantified variables and also occur in premises and head."""
    spine: tuple
    premises: tuple
    premise_vars: tuple  # per premise, its placeholders in order of first use
    head: Atom
    # per premise, the predicate its proof must find declared in the context
    # (the premise's target, unless one of its own antecedents supplies it)
    required_preds: tuple = ()


_decomp_cache: dict = {}


_inst_cache: dict = {}


def _instantiate_premise(prem, pvars, S):
    """Interned instantiation of a spine premise; repeated assignments then
    share one formula object (and its cached hash)."""
    key = (prem, tuple(S.get(v, v) for v in pvars))
    inst = _inst_cache.get(key)
    if inst is None:
        inst = subst_vars(prem, S)
        _inst_cache[key] = inst
    return inst


def decompose(f: Formula) -> Decomp:
    cached = _decomp_cache.get(f)
    if cached is not None:
        return cached
    items = []
    count = 0
    g = f
    while True:
        if isinstance(g, Forall):
            ph = f"${count}"
            count += 1
            items.append(("var", ph))
            g = subst_vars(g.body, {g.var: ph})
        elif isinstance(g, Implication):
            items.append(("prem", g.antecedent))
            g = g.consequent
        else:
            break
    placeholders = {ph for kind, ph in items if kind == "var"}
    premises = tuple(p for kind, p in items if kind == "prem")
    premise_vars = tuple(
        tuple(v for v in _var_order(p) if v in placeholders) for p in premises)
    required = tuple(p for p in map(_required_pred, premises) if p is not None)
    d = Decomp(tuple(items), premises, premise_vars, g, required)
    _decomp_cache[f] = d
    return d


def _target_pred(f: Formula) -> str:
    while not isinstance(f, Atom):
        f = f.body if isinstance(f, Forall) else f.consequent
    return f.pred.name


def _required_pred(p: Formula):
    antecedents = []
    g = p
    while not isinstance(g, Atom):
        if isinstance(g, Forall):
            g = g.body
        else:
            antecedents.append(g.antecedent)
            g = g.consequent
    head = g.pred.name
    if any(_target_pred(a) == head for a in antecedents):
        return None
    return head


def _var_order(f: Formula):
    seen = []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            for v in g.args:
                if v not in seen:
                    seen.append(v)
        elif isinstance(g, Implication):
            stack.append(g.consequent)
            stack.append(g.antecedent)
        else:
            stack.append(g.body)
    return seen


# per-formula caches for canonical judgment keys; formulas are shared
# heavily across search states, so these hit almost always
_canon_repr_cache: dict = {}
_var_order_cache: dict = {}
_rename_cache: dict = {}


def _canon_repr(f: Formula) -> str:
    s = _canon_repr_cache.get(f)
    if s is None:
        s = repr(f.canon())
        _canon_repr_cache[f] = s
    return s


def _var_order_of(f: Formula) -> tuple:
    o = _var_order_cache.get(f)
    if o is None:
        o = tuple(_var_order(f))
        _var_order_cache[f] = o
    return o


def _rename(f: Formula, varmap: dict) -> Formula:
    relevant = tuple(sorted((v, varmap[v]) for v in f.free_vars()
                            if v in varmap))
    if not relevant:
        return f
    key = (f, relevant)
    g = _rename_cache.get(key)
    if g is None:
        g = subst_vars(f, dict(relevant))
        _rename_cache[key] = g
    return g


def decompose_sigma1(goal: Formula):
    """Premise list and head atom of a Sigma_1 goal."""
    if classify(goal).sigma_level > 1:
        raise ValueError(f"not a Sigma_1 formula: {goal}")
    premises = []
    while isinstance(goal, Implication):
        premises.append(goal.antecedent)
        goal = goal.consequent
    assert isinstance(goal, Atom)
    return premises, goal


def decompose_pi1(f: Formula):
    """Blocks (vars, sigma) of a Pi_1 formula, plus its head atom; trailing
    quantifiers with no premise yield a final (vars, None) block."""
    if classify(f).pi_level > 1:
        raise ValueError(f"not a Pi_1 formula: {f}")
    blocks = []
    vars = []
    while True:
        if isinstance(f, Forall):
            vars.append(f.var)
            f = f.body
        elif isinstance(f, Implication):
            blocks.append((tuple(vars), f.antecedent))
            vars = []
            f = f.consequent
        else:
            if vars:
                blocks.append((tuple(vars), None))
            return blocks, f


# ---------------------------------------------------------------------------
# Contexts: interned, indexed sets of declarations over a fixed base

class _Context:
    __slots__ = ("added", "key", "fvs", "_base_names", "_added_names",
                 "_base_by_target", "_added_by_target", "_pred_sig",
                 "_viable", "_facts", "atom_set", "nonatom_preds",
                 "_chain_sigs")

    def __init__(self, new_decls, added, key, parent=None):
        self.added = added   # tuple of (name, formula) beyond the base
        self.key = key       # frozenset of the added formulas
        if parent is None:
            names, by_target = {}, {}
            fvs = frozenset()
            for entry in new_decls:
                name, f, d = entry
                names.setdefault(f, name)
                by_target.setdefault(d.head.pred.name, []).append(entry)
                fvs |= f.free_vars()
            self._base_names = names
            self._base_by_target = by_target
            self._added_names = {}
            self._added_by_target = {}
            self._viable = {}    # shared by all extensions of this base
            self.atom_set = frozenset()
            self.nonatom_preds = frozenset()
        else:
            # the base indexes are shared; only the small added part is new
            self._base_names = parent._base_names
            self._base_by_target = parent._base_by_target
            names = dict(parent._added_names)
            by_target = dict(parent._added_by_target)
            fvs = parent.fvs
            atoms, nonatoms = set(), set()
            for entry in new_decls:
                name, f, d = entry
                names.setdefault(f, name)
                p = d.head.pred.name
                by_target[p] = by_target.get(p, []) + [entry]
                fvs |= f.free_vars()
                (atoms if isinstance(f, Atom) else nonatoms).add(f)
            self._added_names = names
            self._added_by_target = by_target
            self._viable = parent._viable
            self.atom_set = parent.atom_set | atoms
            self.nonatom_preds = parent.nonatom_preds | {
                _target_pred(f) for f in nonatoms}
        self.fvs = fvs
        self._pred_sig = frozenset(self._added_by_target)
        self._facts = {}
        self._chain_sigs = {}

    def chain_sig(self, pred_name):
        """The added non-atomic declarations targeting the predicate."""
        sig = self._chain_sigs.get(pred_name)
        if sig is None:
            sig = frozenset(f for _, f, _ in
                            self._added_by_target.get(pred_name, ())
                            if not isinstance(f, Atom))
            self._chain_sigs[pred_name] = sig
        return sig

    def name_of(self, formula):
        name = self._added_names.get(formula)
        return self._base_names.get(formula) if name is None else name

    def decls_for(self, pred_name):
        base = self._base_by_target.get(pred_name, [])
        extra = self._added_by_target.get(pred_name)
        return base if extra is None else base + extra

    def has_pred(self, pred_name):
        return (pred_name in self._added_by_target
                or pred_name in self._base_by_target)

    def viable_decls(self, pred_name):
        """Declarations for the predicate minus those with a premise whose
        required predicate is undeclared (such a premise cannot be proved).
        The filtered base portion depends only on which predicates are
        present, so it is shared across contexts with equal signatures."""
        cache_key = (pred_name, self._pred_sig)
        base = self._viable.get(cache_key)
        if base is None:
            base = [e for e in self._base_by_target.get(pred_name, [])
                    if all(self.has_pred(p) for p in e[2].required_preds)]
            self._viable[cache_key] = base
        extra = self._added_by_target.get(pred_name)
        if extra is None:
            return base
        extra = [e for e in extra
                 if all(self.has_pred(p) for p in e[2].required_preds)]
        return base + extra

    def facts_for(self, pred_name):
        """Closed atoms declared for the predicate, or None if any of its
        declarations is not a closed atom."""
        hit = self._facts.get(pred_name, False)
        if hit is False:
            decls = self.decls_for(pred_name)
            if all(not d.spine for _, _, d in decls):
                hit = [f for _, f, _ in decls]
            else:
                hit = None
            self._facts[pred_name] = hit
        return hit


class _ContextFactory:
    def __init__(self, base_env: Environment):
        self._interned = {}
        self._names = {}
        self._used_names = set(base_env.names())
        self._counter = 0
        decls = tuple((name, f, decompose(f)) for name, f in base_env.decls)
        for name, f, _ in decls:
            self._names.setdefault(f, name)
        self._base_set = frozenset(f for _, f, _ in decls)
        self.base = _Context(decls, (), frozenset())
        self._interned[frozenset()] = self.base

    def name_for(self, formula: Formula) -> str:
        name = self._names.get(formula)
        if name is None:
            while True:
                self._counter += 1
                name = f"H{self._counter}"
                if name not in self._used_names:
                    break
            self._used_names.add(name)
            self._names[formula] = name
        return name

    def extend(self, ctx: _Context, formulas) -> _Context:
        new = [f for f in formulas
               if f not in self._base_set and f not in ctx.key]
        if not new:
            return ctx
        # dedupe while preserving order
        uniq = []
        for f in new:
            if f not in uniq:
                uniq.append(f)
        key = ctx.key | frozenset(uniq)
        hit = self._interned.get(key)
        if hit is not None:
            return hit
        new_added = tuple((self.name_for(f), f) for f in uniq)
        new_decls = tuple((name, f, decompose(f)) for name, f in new_added)
        out = _Context(new_decls, ctx.added + new_added, key, parent=ctx)
        self._interned[key] = out
        return out


# ---------------------------------------------------------------------------
# Sigma_1 decision procedure

class Sigma1Prover:
    """Decides Sigma_1 judgments sharing one base environment and pool; the
    memo persists across calls, which the refuter relies on."""

    def __init__(self, env: Environment, pool: VariablePool):
        _ensure_stack()
        self.factory = _ContextFactory(env)
        self.W = tuple(sorted(pool.vars))
        self.memo = {}
        self.path = set()
        # conditional failures: key -> set of in-progress ancestor keys the
        # failure assumed unprovable, plus the reverse index; once every
        # assumption itself fails the entry is promoted to the memo
        self.pending = {}
        self.dependents = {}
        self.premise_memo = {}

    def prove_goal(self, goal: Formula, extra=()):
        """Result for (base env + extra formulas) |- goal."""
        premises, head = decompose_sigma1(goal)
        ctx = self.factory.extend(self.factory.base, tuple(extra))
        binder_names = [self.factory.name_for(p) for p in premises]
        ctx = self.factory.extend(ctx, premises)
        term, _ = self._decide(ctx, head)
        assert not self.path
        if term is None:
            return UNPROVABLE
        for name, p in zip(reversed(binder_names), reversed(premises)):
            term = ProofAbs(name, p, term)
        return Proved(term)

    def _decide(self, ctx: _Context, goal: Atom):
        key = (ctx.key, goal)
        if key in self.memo:
            return self.memo[key], frozenset()
        if key in self.path:
            return None, frozenset([key])
        # fast path: the goal atom is itself declared
        name = ctx.name_of(goal)
        if name is not None:
            term = ProofVar(name)
            self.memo[key] = term
            return term, frozenset()
        self.path.add(key)
        taints = set()
        found = None
        for decl_name, formula, decomp in ctx.viable_decls(goal.pred.name):
            S0 = _match_head(decomp.head, goal)
            if S0 is None:
                continue
            r, t = self._spine(ctx, decomp, S0, 0, [])
            taints |= t
            if r is not None:
                S, proofs = r
                found = _build_spine(decl_name, decomp, S, proofs, self.W[0])
                break
        self.path.discard(key)
        taints.discard(key)
        if found is not None:
            self.memo[key] = found
            self._settle_proved(key)
            return found, frozenset()
        if not taints:
            self.memo[key] = None
            self._settle_failed(key)
            return None, frozenset()
        self.pending[key] = set(taints)
        for t in taints:
            self.dependents.setdefault(t, set()).add(key)
        return None, frozenset(taints)

    def _settle_failed(self, key):
        stack = [key]
        while stack:
            k = stack.pop()
            for p in self.dependents.pop(k, ()):
                assumed = self.pending.get(p)
                if assumed is None:
                    continue
                assumed.discard(k)
                if not assumed:
                    del self.pending[p]
                    self.memo.setdefault(p, None)
                    stack.append(p)

    def _settle_proved(self, key):
        # failures parked on this key assumed it unprovable; drop them
        for p in self.dependents.pop(key, ()):
            self.pending.pop(p, None)

    def _spine(self, ctx, decomp, S, i, proofs):
        if i == len(decomp.premises):
            return (S, list(proofs)), frozenset()
        prem = decomp.premises[i]
        unbound = [v for v in decomp.premise_vars[i] if v not in S]
        taints = set()
        for S2 in _assignments(ctx, prem, unbound, S, self.W):
            inst = _instantiate_premise(prem, decomp.premise_vars[i], S2)
            sub, t = self._premise(ctx, inst)
            taints |= t
            if sub is None:
                continue
            r, t2 = self._spine(ctx, decomp, S2, i + 1, proofs + [sub])
            taints |= t2
            if r is not None:
                return r, frozenset()
        return None, frozenset(taints)

    def _premise(self, ctx, sigma: Formula):
        """Proof of a fully instantiated Sigma_1 premise in ctx."""
        sub_premises = []
        g = sigma
        while isinstance(g, Implication):
            sub_premises.append(g.antecedent)
            g = g.consequent
        if sub_premises and isinstance(g, Atom):
            # the flat decision only reads the context's added atoms, its
            # chains for the head predicate, and which predicates gained a
            # non-atomic declaration, so key on those instead of the context
            key = (sigma, ctx.atom_set, ctx.nonatom_preds,
                   ctx.chain_sig(g.pred.name))
            hit = self.premise_memo.get(key, False)
            if hit is not False:
                return hit, frozenset()
            term, handled = self._premise_flat(ctx, sub_premises, g)
            if handled:
                self.premise_memo[key] = term
                return term, frozenset()
        binder_names = [self.factory.name_for(p) for p in sub_premises]
        ctx2 = self.factory.extend(ctx, sub_premises)
        term, taints = self._decide(ctx2, g)
        if term is None:
            return None, taints
        for name, p in zip(reversed(binder_names), reversed(sub_premises)):
            term = ProofAbs(name, p, term)
        return term, frozenset()

    def _premise_flat(self, ctx, sub_premises, g: Atom):
        """Decide an atomic-antecedent chain without building the extended
        context.  Applicable when the head can only follow from ground,
        quantifier-free declarations whose premises are all facts; then
        provability reduces to set lookups against ctx plus the antecedents.
        Returns (term or None, handled); handled False defers to the full
        search."""
        for a in sub_premises:
            if not isinstance(a, Atom):
                return None, False
        for a in sub_premises:
            if ctx.facts_for(a.pred.name) is None:
                return None, False
        names = {}
        for a in sub_premises:
            names.setdefault(a, self.factory.name_for(a))

        def find(b):
            name = names.get(b)
            if name is None:
                name = ctx.name_of(b)
            return None if name is None else ProofVar(name)

        core = find(g)
        if core is None:
            for decl_name, f, d in ctx.decls_for(g.pred.name):
                if any(kind == "var" for kind, _ in d.spine):
                    return None, False
                if d.head != g:
                    continue
                proofs = []
                for p in d.premises:
                    if not isinstance(p, Atom):
                        return None, False
                    pv = find(p)
                    if pv is None:
                        if ctx.facts_for(p.pred.name) is None:
                            return None, False
                        proofs = None
                        break
                    proofs.append(pv)
                if proofs is not None:
                    core = _build_spine(decl_name, d, {}, proofs, self.W[0])
                    break
        if core is None:
            return None, True
        term = core
        for a in reversed(sub_premises):
            term = ProofAbs(names[a], a, term)
        return term, True


def _assignments(ctx, prem, unbound, S, pool):
    """Candidate substitutions for a premise's unbound spine variables.

    In general every map into the pool is a candidate.  When the premise is
    an atom whose predicate is declared only by closed atoms, a proof can
    only be one of those hypotheses, so matching against them enumerates the
    viable assignments directly (a large saving on fact-heavy contexts)."""
    if not unbound:
        yield S
        return
    if isinstance(prem, Atom):
        facts = ctx.facts_for(prem.pred.name)
        if facts is not None:
            unbound_set = set(unbound)
            seen = set()
            for fact in facts:
                S2 = dict(S)
                ok = True
                for pv, fv in zip(prem.args, fact.args):
                    if pv in unbound_set:
                        if S2.get(pv, fv) != fv:
                            ok = False
                            break
                        S2[pv] = fv
                    elif S2.get(pv, pv) != fv:
                        ok = False
                        break
                if ok:
                    key = tuple(S2.get(v) for v in unbound)
                    if key not in seen:
                        seen.add(key)
                        yield S2
            return
    for assignment in product(pool, repeat=len(unbound)):
        S2 = dict(S)
        S2.update(zip(unbound, assignment))
        yield S2


def _match_head(pattern: Atom, goal: Atom):
    S = {}
    for pv, gv in zip(pattern.args, goal.args):
        if pv.startswith("$"):
            if S.get(pv, gv) != gv:
                return None
            S[pv] = gv
        elif pv != gv:
            return None
    return S


def _build_spine(name, decomp, S, proofs, filler):
    term = ProofVar(name)
    pi = 0
    for kind, item in decomp.spine:
        if kind == "var":
            term = ObjApp(term, S.get(item, filler))
        else:
            term = ProofApp(term, proofs[pi])
            pi += 1
    return term


def prove_sigma1(j: Sigma1Judgment):
    """Proved(lnf term without object abstractions) or UNPROVABLE."""
    prover = Sigma1Prover(j.env, j.pool())
    return prover.prove_goal(j.goal)


def minimize_free_vars(env: Environment, term, goal: Formula):
    """Rename object variables outside W to the least pool variable."""
    W = VariablePool.for_judgment(env, goal).vars
    extras = sorted(term.free_obj_vars() - set(W))
    if not extras:
        return term
    return subst_obj_in_term(term, {v: W[0] for v in extras})


# ---------------------------------------------------------------------------
# General budgeted search

_INF = float("inf")


class GeneralProver:
    def __init__(self, env: Environment, goal: Formula, budget: int):
        _ensure_stack()
        self.factory = _ContextFactory(env)
        self.goal = goal
        self.budget = budget
        self.rigid = frozenset(env.free_vars()) | goal.free_vars() | {"x0"}
        self.memo = {}
        self.path = set()
        self.cutoff = False
        self._canon_cache = {}

    def run(self):
        for depth in range(1, self.budget + 1):
            self.cutoff = False
            term, _ = self._search(self.factory.base, self.goal, depth)
            if term is not None:
                return Proved(term)
            if not self.cutoff:
                return UNPROVABLE
        return Unknown()

    # -- search -------------------------------------------------------------

    def _search(self, ctx, goal, depth):
        if isinstance(goal, Forall):
            eigen = fresh_var("x", ctx.fvs | goal.free_vars() | self.rigid)
            body = subst_vars(goal.body, {goal.var: eigen})
            sub, taints = self._search(ctx, body, depth)
            return (None if sub is None else ObjAbs(eigen, sub)), taints
        if isinstance(goal, Implication):
            name = self.factory.name_for(goal.antecedent)
            ctx2 = self.factory.extend(ctx, [goal.antecedent])
            sub, taints = self._search(ctx2, goal.consequent, depth)
            return (None if sub is None
                    else ProofAbs(name, goal.antecedent, sub)), taints
        return self._search_atom(ctx, goal, depth)

    def _search_atom(self, ctx, goal, depth):
        name = ctx.name_of(goal)
        if name is not None:
            return ProofVar(name), frozenset()
        if depth <= 0:
            self.cutoff = True
            return None, frozenset()
        ckey, varmap, hyp_names = self._canonical(ctx, goal)
        entry = self.memo.get(ckey)
        if entry is not None:
            status, payload = entry
            if status == "proved":
                return self._instantiate(payload, varmap, hyp_names), frozenset()
            if payload >= depth:
                if payload != _INF:
                    self.cutoff = True
                return None, frozenset()
        if ckey in self.path:
            return None, frozenset([ckey])
        self.path.add(ckey)
        outer_cutoff = self.cutoff
        self.cutoff = False
        pool = tuple(sorted(ctx.fvs | goal.free_vars() | {"x0"}))
        taints = set()
        found = None
        for decl_name, formula, decomp in ctx.viable_decls(goal.pred.name):
            S0 = _match_head(decomp.head, goal)
            if S0 is None:
                continue
            r, t = self._spine(ctx, decomp, S0, 0, [], depth, pool)
            taints |= t
            if r is not None:
                S, proofs = r
                found = _build_spine(decl_name, decomp, S, proofs, pool[0])
                break
        self.path.discard(ckey)
        taints.discard(ckey)
        my_cutoff = self.cutoff
        self.cutoff = outer_cutoff or my_cutoff
        if found is not None:
            self.memo[ckey] = ("proved",
                               self._canonical_term(found, varmap, hyp_names))
            return found, frozenset()
        if not taints:
            failed_to = depth if my_cutoff else _INF
            old = self.memo.get(ckey)
            if old is None or (old[0] == "failed" and old[1] < failed_to):
                self.memo[ckey] = ("failed", failed_to)
        return None, frozenset(taints)

    def _spine(self, ctx, decomp, S, i, proofs, depth, pool):
        if i == len(decomp.premises):
            return (S, list(proofs)), frozenset()
        prem = decomp.premises[i]
        unbound = [v for v in decomp.premise_vars[i] if v not in S]
        taints = set()
        for S2 in _assignments(ctx, prem, unbound, S, pool):
            inst = _instantiate_premise(prem, decomp.premise_vars[i], S2)
            sub, t = self._search(ctx, inst, depth - 1)
            taints |= t
            if sub is None:
                continue
            r, t2 = self._spine(ctx, decomp, S2, i + 1, proofs + [sub],
                                depth, pool)
            taints |= t2
            if r is not None:
                return r, frozenset()
        return None, frozenset(taints)

    # -- canonical judgment keys --------------------------------------------

    def _canonical(self, ctx, goal):
        """Key for (ctx.added, goal) invariant under renaming of
        non-rigid (eigen) variables, plus the renaming used.  Contexts are
        interned, so the result is cached per (context, goal); iterative
        deepening revisits the same states once per depth."""
        cached = self._canon_cache.get((ctx.key, goal))
        if cached is not None:
            return cached
        out = self._canonical_uncached(ctx, goal)
        self._canon_cache[(ctx.key, goal)] = out
        return out

    def _canonical_uncached(self, ctx, goal):
        renameable = sorted((ctx.fvs | goal.free_vars()) - self.rigid)
        varmap = {}
        if renameable:
            rset = set(renameable)
            items = [("h", f) for _, f in ctx.added] + [("g", goal)]
            occ = {v: [] for v in renameable}
            shapes = []
            for tag, f in items:
                order = [v for v in _var_order_of(f) if v in rset]
                shape = (tag, _canon_repr(f))
                shapes.append((shape, order))
                for pos, v in enumerate(order):
                    occ[v].append((shape, pos))
            # colour refinement: start from occurrence positions, then fold in
            # the colours of co-occurring variables
            colors = {v: tuple(sorted(occ[v])) for v in renameable}
            for _ in range(2):
                colors = {
                    v: (colors[v], tuple(sorted(
                        (shape, pos, tuple(colors[u] for u in order))
                        for shape, order in shapes
                        for pos, u2 in enumerate(order) if u2 == v)))
                    for v in renameable}
            ranked = sorted(renameable, key=lambda v: (colors[v], v))
            varmap = {v: f"_c{i}" for i, v in enumerate(ranked)}
        renamed = sorted(((_rename(f, varmap), name)
                          for name, f in ctx.added),
                         key=lambda p: _canon_repr(p[0]))
        hyp_names = [name for _, name in renamed]
        key = (tuple(f.canon() for f, _ in renamed),
               _rename(goal, varmap).canon())
        return key, varmap, hyp_names

    def _canonical_term(self, term, varmap, hyp_names):
        for i, name in enumerate(hyp_names):
            term = subst_proof_var(term, name, ProofVar(f"#h{i}"))
        return subst_obj_in_term(term, varmap)

    def _instantiate(self, term_c, varmap, hyp_names):
        term = term_c
        for i, name in enumerate(hyp_names):
            term = subst_proof_var(term, f"#h{i}", ProofVar(name))
        inverse = {c: v for v, c in varmap.items()}
        return subst_obj_in_term(term, inverse)


def prove_general(env: Environment, goal: Formula, budget: int = 12):
    """Iterative-deepening lnf search; Proved / UNPROVABLE (search space
    exhausted below the budget) / Unknown (budget hit)."""
    return GeneralProver(env, goal, budget).run()
