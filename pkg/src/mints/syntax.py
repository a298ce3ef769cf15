"""Formulas of the (forall, ->) fragment: AST, parsing, printing, substitution.

Object variables are plain strings starting with a lowercase letter; predicate
names start with an uppercase letter.  Formulas compare equal up to
alpha-conversion (bound variable names are irrelevant for == and hash).
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class ArityError(ParseError):
    pass


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("empty predicate name")
        if self.arity < 0:
            raise ValueError("negative arity")


_MISSING = object()


class Formula:
    """Base class; instances are immutable and hash/compare via a canonical
    de Bruijn form, so alpha-equivalent formulas are interchangeable."""

    __slots__ = ("_canon", "_fvs", "_hash")

    def canon(self):
        c = getattr(self, "_canon", _MISSING)
        if c is _MISSING:
            c = self._compute_canon({}, 0)
            object.__setattr__(self, "_canon", c)
        return c

    def _compute_canon(self, env, depth):
        raise NotImplementedError

    def free_vars(self) -> frozenset:
        f = getattr(self, "_fvs", _MISSING)
        if f is _MISSING:
            f = self._compute_fvs()
            object.__setattr__(self, "_fvs", f)
        return f

    def _compute_fvs(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self.canon() == other.canon()

    def __hash__(self):
        h = getattr(self, "_hash", _MISSING)
        if h is _MISSING:
            h = hash(self.canon())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"<Formula {print_formula(self)}>"

    def __str__(self):
        return print_formula(self)


class Atom(Formula):
    __slots__ = ("pred", "args")

    def __init__(self, pred: PredicateSymbol, args=()):
        args = tuple(args)
        if len(args) != pred.arity:
            raise ValueError(
                f"atom {pred.name} expects {pred.arity} args, got {len(args)}")
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", args)

    def _compute_canon(self, env, depth):
        return ("a", self.pred.name,
                tuple(env.get(v, v) for v in self.args))

    def _compute_fvs(self):
        return frozenset(self.args)

    def __setattr__(self, name, value):
        raise AttributeError("Formula instances are immutable")


class Implication(Formula):
    __slots__ = ("antecedent", "consequent")

    def __init__(self, antecedent: Formula, consequent: Formula):
        object.__setattr__(self, "antecedent", antecedent)
        object.__setattr__(self, "consequent", consequent)

    def _compute_canon(self, env, depth):
        return ("i", self.antecedent._compute_canon(env, depth),
                self.consequent._compute_canon(env, depth))

    def _compute_fvs(self):
        return self.antecedent.free_vars() | self.consequent.free_vars()

    def __setattr__(self, name, value):
        raise AttributeError("Formula instances are immutable")


class Forall(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _compute_canon(self, env, depth):
        env = dict(env)
        env[self.var] = depth
        return ("q", self.body._compute_canon(env, depth + 1))

    def _compute_fvs(self):
        return self.body.free_vars() - {self.var}

    def __setattr__(self, name, value):
        raise AttributeError("Formula instances are immutable")


def atom(name: str, *args: str) -> Atom:
    return Atom(PredicateSymbol(name, len(args)), args)


def implies(*formulas: Formula) -> Formula:
    """Right-nested implication chain: implies(a, b, c) = a -> (b -> c)."""
    if not formulas:
        raise ValueError("need at least one formula")
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = Implication(f, result)
    return result


def forall(vars, body: Formula) -> Formula:
    if isinstance(vars, str):
        vars = [vars]
    for v in reversed(list(vars)):
        body = Forall(v, body)
    return body


def free_vars(f: Formula) -> frozenset:
    return f.free_vars()


def fresh_var(base: str, avoid) -> str:
    """base + numeric suffix, first one not colliding with avoid."""
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def subst_vars(f: Formula, mapping: dict) -> Formula:
    """Capture-avoiding simultaneous renaming of free object variables."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    return _subst(f, mapping)


def _subst(f: Formula, mapping: dict) -> Formula:
    if isinstance(f, Atom):
        if any(v in mapping for v in f.args):
            return Atom(f.pred, tuple(mapping.get(v, v) for v in f.args))
        return f
    if isinstance(f, Implication):
        return Implication(_subst(f.antecedent, mapping),
                           _subst(f.consequent, mapping))
    assert isinstance(f, Forall)
    mapping = {k: v for k, v in mapping.items()
               if k != f.var and k in f.body.free_vars()}
    if not mapping:
        return f
    var, body = f.var, f.body
    if var in mapping.values():
        new = fresh_var(var, body.free_vars() | set(mapping) | set(mapping.values()))
        body = _subst(body, {var: new})
        var = new
    return Forall(var, _subst(body, mapping))


def target(f: Formula) -> PredicateSymbol:
    while True:
        if isinstance(f, Atom):
            return f.pred
        if isinstance(f, Implication):
            f = f.consequent
        else:
            f = f.body


def signature_of(f: Formula, sig=None) -> dict:
    """Predicate name -> arity for every atom in f; raises on conflicts."""
    if sig is None:
        sig = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            known = sig.get(g.pred.name)
            if known is None:
                sig[g.pred.name] = g.pred.arity
            elif known != g.pred.arity:
                raise ValueError(
                    f"predicate {g.pred.name} used with arities {known} and {g.pred.arity}")
        elif isinstance(g, Implication):
            stack.append(g.antecedent)
            stack.append(g.consequent)
        else:
            stack.append(g.body)
    return sig


# ---------------------------------------------------------------------------
# Lexer / parser

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789'$")


class _Lexer:
    """Tokens: IDENT, '->', '(', ')', ',', '.', ':', ';', '|-', '\\'."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._lex()
        self.i = 0

    def _lex(self):
        text, n = self.text, len(self.text)
        p = 0
        while p < n:
            c = text[p]
            if c.isspace():
                p += 1
                continue
            if c in _IDENT_START:
                start = p
                while p < n and text[p] in _IDENT_CONT:
                    p += 1
                self.tokens.append(("ident", text[start:p], start))
                continue
            if c == "-" and p + 1 < n and text[p + 1] == ">":
                self.tokens.append(("->", "->", p))
                p += 2
                continue
            if c == "|" and p + 1 < n and text[p + 1] == "-":
                self.tokens.append(("|-", "|-", p))
                p += 2
                continue
            if c in "(),.:;\\":
                self.tokens.append((c, c, p))
                p += 1
                continue
            raise ParseError(f"unexpected character {c!r}", p)
        self.tokens.append(("eof", "", n))

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        if t[0] != "eof":
            self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, got {t[1]!r}", t[2])
        return t


def _is_pred_name(name: str) -> bool:
    return name[0].isupper()


class _FormulaParser:
    def __init__(self, lexer: _Lexer, sig, strict_sig: bool):
        self.lx = lexer
        self.sig = sig
        self.strict = strict_sig

    def formula(self) -> Formula:
        kind, value, pos = self.lx.peek()
        if kind == "ident" and value == "forall":
            self.lx.next()
            vars = []
            while True:
                kind, value, pos = self.lx.peek()
                if kind != "ident":
                    break
                if _is_pred_name(value) or value == "forall":
                    raise ParseError(
                        f"expected object variable after forall, got {value!r}", pos)
                vars.append(value)
                self.lx.next()
            if not vars:
                raise ParseError("forall needs at least one variable", pos)
            self.lx.expect(".")
            return forall(vars, self.formula())
        left = self.app()
        if self.lx.peek()[0] == "->":
            self.lx.next()
            return Implication(left, self.formula())
        return left

    def app(self) -> Formula:
        kind, value, pos = self.lx.next()
        if kind == "(":
            f = self.formula()
            self.lx.expect(")")
            return f
        if kind != "ident":
            raise ParseError(f"expected formula, got {value!r}", pos)
        if value == "forall":
            raise ParseError("forall not allowed here; parenthesize", pos)
        if not _is_pred_name(value):
            if self.lx.peek()[0] == "(":
                raise ParseError(
                    f"object variable {value!r} used as predicate", pos)
            raise ParseError(
                f"expected predicate (uppercase), got variable {value!r}", pos)
        args = []
        if self.lx.peek()[0] == "(":
            self.lx.next()
            while True:
                kind2, v2, p2 = self.lx.next()
                if kind2 != "ident" or _is_pred_name(v2):
                    raise ParseError(f"expected object variable, got {v2!r}", p2)
                args.append(v2)
                kind2, v2, p2 = self.lx.next()
                if kind2 == ")":
                    break
                if kind2 != ",":
                    raise ParseError(f"expected ',' or ')', got {v2!r}", p2)
        arity = len(args)
        known = self.sig.get(value)
        if known is not None and known != arity:
            raise ArityError(
                f"predicate {value} has arity {known}, used with {arity}", pos)
        if known is None:
            if self.strict:
                raise ArityError(f"predicate {value} not in signature", pos)
            self.sig[value] = arity
        return Atom(PredicateSymbol(value, arity), args)


def parse_formula(text: str, signature=None) -> Formula:
    """Parse a formula; with an explicit signature, arities are enforced and
    unknown predicates rejected."""
    lx = _Lexer(text)
    strict = signature is not None
    sig = dict(signature) if signature else {}
    p = _FormulaParser(lx, sig, strict)
    f = p.formula()
    t = lx.peek()
    if t[0] != "eof":
        raise ParseError(f"trailing input {t[1]!r}", t[2])
    return f


def print_formula(f: Formula) -> str:
    parts = []
    _print(f, parts, top=True)
    return "".join(parts)


def _print(f: Formula, out: list, top: bool):
    # top means no enclosing context that would bind tighter: implication
    # chains and forall bodies extend to the right without parentheses.
    if isinstance(f, Atom):
        if f.args:
            out.append(f"{f.pred.name}({','.join(f.args)})")
        else:
            out.append(f.pred.name)
    elif isinstance(f, Implication):
        if not top:
            out.append("(")
        _print(f.antecedent, out, top=False)
        out.append(" -> ")
        _print(f.consequent, out, top=True)
        if not top:
            out.append(")")
    else:
        if not top:
            out.append("(")
        vars = []
        while isinstance(f, Forall):
            vars.append(f.var)
            f = f.body
        out.append("forall " + " ".join(vars) + ". ")
        _print(f, out, top=True)
        if not top:
            out.append(")")


# ---------------------------------------------------------------------------
# Environments

class Environment:
    """Ordered declarations (name : formula) with pairwise-distinct names."""

    __slots__ = ("decls", "_by_name", "_fvs")

    def __init__(self, decls=()):
        decls = tuple(decls)
        by_name = {}
        for name, f in decls:
            if name in by_name:
                raise ValueError(f"duplicate declaration name {name!r}")
            by_name[name] = f
        self.decls = decls
        self._by_name = by_name
        self._fvs = None

    def __iter__(self):
        return iter(self.decls)

    def __len__(self):
        return len(self.decls)

    def __contains__(self, name):
        return name in self._by_name

    def lookup(self, name: str) -> Formula:
        return self._by_name[name]

    def get(self, name: str):
        return self._by_name.get(name)

    def names(self):
        return [name for name, _ in self.decls]

    def formulas(self):
        return [f for _, f in self.decls]

    def extend(self, decls) -> "Environment":
        return Environment(self.decls + tuple(decls))

    def free_vars(self) -> frozenset:
        if self._fvs is None:
            fvs = frozenset()
            for _, f in self.decls:
                fvs |= f.free_vars()
            self._fvs = fvs
        return self._fvs

    def signature(self) -> dict:
        sig = {}
        for _, f in self.decls:
            signature_of(f, sig)
        return sig

    def __eq__(self, other):
        if not isinstance(other, Environment):
            return NotImplemented
        return self.decls == other.decls

    def __hash__(self):
        return hash(self.decls)

    def __repr__(self):
        return f"<Environment of {len(self.decls)} decls>"


def parse_environment(text: str, signature=None) -> Environment:
    """One declaration per line, "X : formula"; blank and '#' lines skipped."""
    decls = []
    sig = dict(signature) if signature else None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'name : formula'", 0)
        name = name.strip()
        if not name or not _is_pred_name(name):
            raise ParseError(
                f"line {lineno}: proof variable name must be uppercase, got {name!r}", 0)
        decls.append((name, parse_formula(rest, sig)))
    return Environment(decls)


def format_environment(env: Environment) -> str:
    return "\n".join(f"{name} : {print_formula(f)}" for name, f in env.decls)


def parse_problem(text: str, signature=None):
    """Environment plus goal.  Multi-line: declaration lines, then a line
    "|- goal".  Single-line: "X : f; Y : g |- goal"."""
    if "\n" not in text.strip() and "|-" in text:
        head, sep, goal_text = text.partition("|-")
        if not sep:
            raise ParseError("expected '|-' before the goal", 0)
        lines = [part for part in head.split(";") if part.strip()]
        env = parse_environment("\n".join(lines), signature)
        return env, parse_formula(goal_text, signature)
    env_lines = []
    goal_text = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("|-"):
            goal_text = stripped[2:]
        else:
            env_lines.append(line)
    if goal_text is None:
        raise ParseError("missing goal line '|- formula'", 0)
    env = parse_environment("\n".join(env_lines), signature)
    return env, parse_formula(goal_text, signature)


def format_problem(env: Environment, goal: Formula, one_line=False) -> str:
    if one_line:
        decls = "; ".join(f"{n} : {print_formula(f)}" for n, f in env.decls)
        if decls:
            return f"{decls} |- {print_formula(goal)}"
        return f"|- {print_formula(goal)}"
    body = format_environment(env)
    goal_line = f"|- {print_formula(goal)}"
    return f"{body}\n{goal_line}" if body else goal_line
