"""Proof terms and their typing rules.

Two-sorted lambda terms: proof abstraction/application and object
abstraction/application.  Typing follows the five rules (Ax, ->I, ->E,
forall-I with the eigenvariable condition, forall-E with an arbitrary object
variable).  Terms compare equal up to alpha-conversion of both binder kinds.

Text format: "\\X:phi. M" (annotated proof abstraction), "\\x. M" (object
abstraction), juxtaposition for both application kinds; the argument sort is
resolved lexically (lowercase identifier = object variable).
"""

from __future__ import annotations

from .syntax import (Environment, Formula, Forall, Implication, ParseError,
                     _FormulaParser, _Lexer, _is_pred_name, fresh_var,
                     print_formula, subst_vars)


class TypeCheckError(Exception):
    pass


class EigenvariableViolation(TypeCheckError):
    pass


class ShapeError(Exception):
    pass


class FuelExhausted(Exception):
    pass


_MISSING = object()


class ProofTerm:
    __slots__ = ("_canon", "_fov", "_fpv", "_hash")

    def canon(self):
        c = getattr(self, "_canon", _MISSING)
        if c is _MISSING:
            c = self._compute_canon({}, {}, 0)
            object.__setattr__(self, "_canon", c)
        return c

    def free_obj_vars(self) -> frozenset:
        v = getattr(self, "_fov", _MISSING)
        if v is _MISSING:
            v = self._compute_fov()
            object.__setattr__(self, "_fov", v)
        return v

    def free_proof_vars(self) -> frozenset:
        v = getattr(self, "_fpv", _MISSING)
        if v is _MISSING:
            v = self._compute_fpv()
            object.__setattr__(self, "_fpv", v)
        return v

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ProofTerm):
            return NotImplemented
        return self.canon() == other.canon()

    def __hash__(self):
        h = getattr(self, "_hash", _MISSING)
        if h is _MISSING:
            h = hash(self.canon())
            object.__setattr__(self, "_hash", h)
        return h

    def __setattr__(self, name, value):
        raise AttributeError("ProofTerm instances are immutable")

    def __repr__(self):
        return f"<ProofTerm {print_term(self)}>"

    def __str__(self):
        return print_term(self)


class ProofVar(ProofTerm):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _compute_canon(self, penv, oenv, depth):
        return ("pv", penv.get(self.name, self.name))

    def _compute_fov(self):
        return frozenset()

    def _compute_fpv(self):
        return frozenset([self.name])


class ProofAbs(ProofTerm):
    __slots__ = ("var", "annot", "body")

    def __init__(self, var: str, annot, body: ProofTerm):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "annot", annot)
        object.__setattr__(self, "body", body)

    def _compute_canon(self, penv, oenv, depth):
        annot_c = None
        if self.annot is not None:
            annot_c = self.annot._compute_canon(
                {k: v for k, v in oenv.items()}, depth)
        penv = dict(penv)
        penv[self.var] = depth
        return ("pabs", annot_c, self.body._compute_canon(penv, oenv, depth + 1))

    def _compute_fov(self):
        fov = self.body.free_obj_vars()
        if self.annot is not None:
            fov = fov | self.annot.free_vars()
        return fov

    def _compute_fpv(self):
        return self.body.free_proof_vars() - {self.var}


class ObjAbs(ProofTerm):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: ProofTerm):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _compute_canon(self, penv, oenv, depth):
        oenv = dict(oenv)
        oenv[self.var] = depth
        return ("oabs", self.body._compute_canon(penv, oenv, depth + 1))

    def _compute_fov(self):
        return self.body.free_obj_vars() - {self.var}

    def _compute_fpv(self):
        return self.body.free_proof_vars()


class ProofApp(ProofTerm):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: ProofTerm, arg: ProofTerm):
        object.__setattr__(self, "fun", fun)
        object.__setattr__(self, "arg", arg)

    def _compute_canon(self, penv, oenv, depth):
        return ("papp", self.fun._compute_canon(penv, oenv, depth),
                self.arg._compute_canon(penv, oenv, depth))

    def _compute_fov(self):
        return self.fun.free_obj_vars() | self.arg.free_obj_vars()

    def _compute_fpv(self):
        return self.fun.free_proof_vars() | self.arg.free_proof_vars()


class ObjApp(ProofTerm):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: ProofTerm, arg: str):
        object.__setattr__(self, "fun", fun)
        object.__setattr__(self, "arg", arg)

    def _compute_canon(self, penv, oenv, depth):
        return ("oapp", self.fun._compute_canon(penv, oenv, depth),
                oenv.get(self.arg, self.arg))

    def _compute_fov(self):
        return self.fun.free_obj_vars() | {self.arg}

    def _compute_fpv(self):
        return self.fun.free_proof_vars()


# Atom canon needs an env of bound-variable depths; Formula._compute_canon
# already takes one, so ProofAbs above reuses it for annotations.


def proof_apps(head: ProofTerm, *args) -> ProofTerm:
    """Spine builder: strings become object applications, terms proof ones."""
    for a in args:
        head = ObjApp(head, a) if isinstance(a, str) else ProofApp(head, a)
    return head


# ---------------------------------------------------------------------------
# Typing

def typecheck(env: Environment, term: ProofTerm, expected=None) -> Formula:
    """Returns the formula assigned by the typing rules, or raises
    TypeCheckError.  `expected` is required to check terms containing
    un-annotated proof abstractions."""
    bind = dict(env.decls)
    if len(bind) != len(env.decls):
        raise TypeCheckError("duplicate declaration names")
    fvs = env.free_vars()
    if expected is None:
        return _synth(bind, fvs, term)
    _check(bind, fvs, term, expected)
    return expected


def _synth(bind, fvs, t) -> Formula:
    if isinstance(t, ProofVar):
        f = bind.get(t.name)
        if f is None:
            raise TypeCheckError(f"unbound proof variable {t.name}")
        return f
    if isinstance(t, ProofAbs):
        if t.annot is None:
            raise TypeCheckError(
                f"un-annotated abstraction \\{t.var} needs an expected formula")
        bind2 = dict(bind)
        bind2[t.var] = t.annot
        body = _synth(bind2, fvs | t.annot.free_vars(), t.body)
        return Implication(t.annot, body)
    if isinstance(t, ObjAbs):
        if t.var in fvs:
            raise EigenvariableViolation(
                f"eigenvariable violation: {t.var} free in the environment")
        return Forall(t.var, _synth(bind, fvs, t.body))
    if isinstance(t, ProofApp):
        ft = _synth(bind, fvs, t.fun)
        if not isinstance(ft, Implication):
            raise TypeCheckError(
                f"applying a term of non-implication type {print_formula(ft)}")
        _check(bind, fvs, t.arg, ft.antecedent)
        return ft.consequent
    if isinstance(t, ObjApp):
        ft = _synth(bind, fvs, t.fun)
        if not isinstance(ft, Forall):
            raise TypeCheckError(
                f"instantiating a term of non-universal type {print_formula(ft)}")
        return subst_vars(ft.body, {ft.var: t.arg})
    raise TypeCheckError(f"not a proof term: {t!r}")


def _check(bind, fvs, t, expected: Formula):
    if isinstance(t, ProofAbs):
        if not isinstance(expected, Implication):
            raise TypeCheckError(
                f"abstraction cannot have type {print_formula(expected)}")
        if t.annot is not None and t.annot != expected.antecedent:
            raise TypeCheckError(
                f"annotation {print_formula(t.annot)} does not match "
                f"expected antecedent {print_formula(expected.antecedent)}")
        annot = t.annot if t.annot is not None else expected.antecedent
        bind2 = dict(bind)
        bind2[t.var] = annot
        _check(bind2, fvs | annot.free_vars(), t.body, expected.consequent)
        return
    if isinstance(t, ObjAbs):
        if not isinstance(expected, Forall):
            raise TypeCheckError(
                f"object abstraction cannot have type {print_formula(expected)}")
        if t.var in fvs:
            raise EigenvariableViolation(
                f"eigenvariable violation: {t.var} free in the environment")
        if t.var != expected.var and t.var in expected.body.free_vars():
            raise TypeCheckError(
                f"binder {t.var} clashes with the expected formula")
        _check(bind, fvs, t.body,
               subst_vars(expected.body, {expected.var: t.var}))
        return
    got = _synth(bind, fvs, t)
    if got != expected:
        raise TypeCheckError(
            f"expected {print_formula(expected)}, got {print_formula(got)}")


# ---------------------------------------------------------------------------
# Substitution

def subst_obj_in_term(term: ProofTerm, mapping: dict) -> ProofTerm:
    """Simultaneous renaming of free object variables, including inside
    annotations; binders are alpha-renamed when they would capture."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return term
    return _subst_obj(term, mapping)


def _subst_obj(t, mapping):
    if isinstance(t, ProofVar):
        return t
    if isinstance(t, ProofAbs):
        annot = None if t.annot is None else subst_vars(t.annot, mapping)
        return ProofAbs(t.var, annot, _subst_obj(t.body, mapping))
    if isinstance(t, ObjAbs):
        mapping = {k: v for k, v in mapping.items()
                   if k != t.var and k in t.body.free_obj_vars()}
        if not mapping:
            return t
        var, body = t.var, t.body
        if var in mapping.values():
            new = fresh_var(var, body.free_obj_vars()
                            | set(mapping) | set(mapping.values()))
            body = _subst_obj(body, {var: new})
            var = new
        return ObjAbs(var, _subst_obj(body, mapping))
    if isinstance(t, ProofApp):
        return ProofApp(_subst_obj(t.fun, mapping), _subst_obj(t.arg, mapping))
    assert isinstance(t, ObjApp)
    return ObjApp(_subst_obj(t.fun, mapping), mapping.get(t.arg, t.arg))


def subst_proof_var(term: ProofTerm, name: str, repl: ProofTerm) -> ProofTerm:
    """Capture-avoiding substitution of a proof term for a free proof
    variable (the ->I beta step)."""
    if name not in term.free_proof_vars():
        return term
    if isinstance(term, ProofVar):
        return repl
    if isinstance(term, ProofAbs):
        var, body = term.var, term.body
        if var == name:
            return term
        if var in repl.free_proof_vars():
            new = _fresh_proof_var(var, body.free_proof_vars()
                                   | repl.free_proof_vars())
            body = subst_proof_var(body, var, ProofVar(new))
            var = new
        return ProofAbs(var, term.annot, subst_proof_var(body, name, repl))
    if isinstance(term, ObjAbs):
        var, body = term.var, term.body
        if var in repl.free_obj_vars():
            new = fresh_var(var, body.free_obj_vars() | repl.free_obj_vars())
            body = _subst_obj(body, {var: new})
            var = new
        return ObjAbs(var, subst_proof_var(body, name, repl))
    if isinstance(term, ProofApp):
        return ProofApp(subst_proof_var(term.fun, name, repl),
                        subst_proof_var(term.arg, name, repl))
    assert isinstance(term, ObjApp)
    return ObjApp(subst_proof_var(term.fun, name, repl), term.arg)


def _fresh_proof_var(base: str, avoid) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Normalization

def is_normal(term: ProofTerm) -> bool:
    """True iff the term contains no redex of either kind."""
    if isinstance(term, ProofApp):
        if isinstance(term.fun, ProofAbs):
            return False
        return is_normal(term.fun) and is_normal(term.arg)
    if isinstance(term, ObjApp):
        if isinstance(term.fun, ObjAbs):
            return False
        return is_normal(term.fun)
    if isinstance(term, (ProofAbs, ObjAbs)):
        return is_normal(term.body)
    return True


def _contract_leftmost(t):
    """One leftmost-outermost beta step, or None if t is normal."""
    if isinstance(t, ProofApp):
        if isinstance(t.fun, ProofAbs):
            return subst_proof_var(t.fun.body, t.fun.var, t.arg)
        r = _contract_leftmost(t.fun)
        if r is not None:
            return ProofApp(r, t.arg)
        r = _contract_leftmost(t.arg)
        if r is not None:
            return ProofApp(t.fun, r)
        return None
    if isinstance(t, ObjApp):
        if isinstance(t.fun, ObjAbs):
            return _subst_obj(t.fun.body, {t.fun.var: t.arg}) \
                if t.fun.var != t.arg else t.fun.body
        r = _contract_leftmost(t.fun)
        if r is not None:
            return ObjApp(r, t.arg)
        return None
    if isinstance(t, ProofAbs):
        r = _contract_leftmost(t.body)
        return None if r is None else ProofAbs(t.var, t.annot, r)
    if isinstance(t, ObjAbs):
        r = _contract_leftmost(t.body)
        return None if r is None else ObjAbs(t.var, r)
    return None


def normalize(term: ProofTerm, fuel: int = 100_000) -> ProofTerm:
    """Leftmost-outermost reduction to beta-normal form.  Typed terms always
    terminate; the fuel bound guards against kernel bugs."""
    while True:
        r = _contract_leftmost(term)
        if r is None:
            return term
        term = r
        fuel -= 1
        if fuel < 0:
            raise FuelExhausted("normalization fuel exhausted")


# ---------------------------------------------------------------------------
# Long normal forms

def peel_spine(term: ProofTerm):
    """Decompose an eliminator X D1 ... Dn into its head name and spine of
    ("obj", var) / ("proof", term) items; raises ShapeError otherwise."""
    spine = []
    while True:
        if isinstance(term, ProofApp):
            spine.append(("proof", term.arg))
            term = term.fun
        elif isinstance(term, ObjApp):
            spine.append(("obj", term.arg))
            term = term.fun
        elif isinstance(term, ProofVar):
            spine.reverse()
            return term.name, spine
        else:
            raise ShapeError("not an eliminator headed by a proof variable")


def head_analysis(env: Environment, term: ProofTerm):
    """Head variable and spine of an atomic-type lnf; the head must be
    declared in env."""
    name, spine = peel_spine(term)
    if name not in env:
        raise TypeCheckError(f"unbound proof variable {name}")
    return name, spine


def is_lnf(env: Environment, term: ProofTerm, formula=None) -> bool:
    """Long normal form check.  Typechecking failures raise TypeCheckError;
    a well-typed term that is not an lnf returns False."""
    formula = typecheck(env, term, formula)
    return _lnf_shape(dict(env.decls), term, formula)


def _lnf_shape(bind, t, f) -> bool:
    if isinstance(f, Forall):
        if not isinstance(t, ObjAbs):
            return False
        return _lnf_shape(bind, t.body, subst_vars(f.body, {f.var: t.var}))
    if isinstance(f, Implication):
        if not isinstance(t, ProofAbs):
            return False
        bind2 = dict(bind)
        bind2[t.var] = f.antecedent
        return _lnf_shape(bind2, t.body, f.consequent)
    # atomic type: must be a fully applied head variable
    try:
        name, spine = peel_spine(t)
    except ShapeError:
        return False
    ht = bind.get(name)
    if ht is None:
        return False
    for kind, arg in spine:
        if kind == "obj":
            if not isinstance(ht, Forall):
                return False
            ht = subst_vars(ht.body, {ht.var: arg})
        else:
            if not isinstance(ht, Implication):
                return False
            if not _lnf_shape(bind, arg, ht.antecedent):
                return False
            ht = ht.consequent
    return not isinstance(ht, (Forall, Implication))


# ---------------------------------------------------------------------------
# Parsing and printing

def parse_term(text: str, signature=None) -> ProofTerm:
    lx = _Lexer(text)
    sig = dict(signature) if signature else {}
    fp = _FormulaParser(lx, sig, strict_sig=signature is not None)
    t = _parse_term(lx, fp)
    tok = lx.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return t


def _parse_term(lx, fp) -> ProofTerm:
    if lx.peek()[0] == "\\":
        lx.next()
        kind, name, pos = lx.next()
        if kind != "ident":
            raise ParseError(f"expected binder name, got {name!r}", pos)
        if name == "forall":
            raise ParseError("'forall' is reserved", pos)
        if _is_pred_name(name):
            annot = None
            if lx.peek()[0] == ":":
                lx.next()
                annot = fp.formula()
            lx.expect(".")
            return ProofAbs(name, annot, _parse_term(lx, fp))
        lx.expect(".")
        return ObjAbs(name, _parse_term(lx, fp))
    return _parse_app(lx, fp)


def _parse_app(lx, fp) -> ProofTerm:
    kind, value, pos = lx.peek()
    if kind == "(":
        lx.next()
        head = _parse_term(lx, fp)
        lx.expect(")")
    elif kind == "ident" and _is_pred_name(value):
        lx.next()
        head = ProofVar(value)
    else:
        raise ParseError(f"expected proof term, got {value!r}", pos)
    while True:
        kind, value, pos = lx.peek()
        if kind == "ident":
            lx.next()
            if value == "forall":
                raise ParseError("'forall' is reserved", pos)
            if _is_pred_name(value):
                head = ProofApp(head, ProofVar(value))
            else:
                head = ObjApp(head, value)
        elif kind == "(":
            lx.next()
            arg = _parse_term(lx, fp)
            lx.expect(")")
            head = ProofApp(head, arg)
        else:
            return head


def print_term(t: ProofTerm) -> str:
    parts = []
    _print_term(t, parts, atomic=False)
    return "".join(parts)


def _print_term(t, out, atomic: bool):
    # atomic=True means the position requires a head/argument form, so
    # abstractions must be parenthesized.
    if isinstance(t, ProofVar):
        out.append(t.name)
        return
    if isinstance(t, (ProofAbs, ObjAbs)):
        if atomic:
            out.append("(")
        if isinstance(t, ProofAbs):
            if t.annot is not None:
                out.append(f"\\{t.var}:{print_formula(t.annot)}. ")
            else:
                out.append(f"\\{t.var}. ")
        else:
            out.append(f"\\{t.var}. ")
        _print_term(t.body, out, atomic=False)
        if atomic:
            out.append(")")
        return
    if isinstance(t, ProofApp):
        _print_term(t.fun, out, atomic=True)
        out.append(" ")
        if isinstance(t.arg, ProofVar):
            _print_term(t.arg, out, atomic=True)
        else:
            out.append("(")
            _print_term(t.arg, out, atomic=False)
            out.append(")")
        return
    assert isinstance(t, ObjApp)
    _print_term(t.fun, out, atomic=True)
    out.append(f" {t.arg}")


def count_proof_var_uses(term: ProofTerm, name: str) -> int:
    """Free occurrences of a proof variable."""
    if isinstance(term, ProofVar):
        return 1 if term.name == name else 0
    if isinstance(term, ProofAbs):
        if term.var == name:
            return 0
        return count_proof_var_uses(term.body, name)
    if isinstance(term, ObjAbs):
        return count_proof_var_uses(term.body, name)
    if isinstance(term, ProofApp):
        return (count_proof_var_uses(term.fun, name)
                + count_proof_var_uses(term.arg, name))
    return count_proof_var_uses(term.fun, name)


def count_obj_abs(term: ProofTerm) -> int:
    if isinstance(term, ObjAbs):
        return 1 + count_obj_abs(term.body)
    if isinstance(term, ProofAbs):
        return count_obj_abs(term.body)
    if isinstance(term, ProofApp):
        return count_obj_abs(term.fun) + count_obj_abs(term.arg)
    if isinstance(term, ObjApp):
        return count_obj_abs(term.fun)
    return 0


def contains_obj_abs(term: ProofTerm) -> bool:
    return count_obj_abs(term) > 0
