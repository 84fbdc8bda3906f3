"""Reader and writer for the legacy TPDB text format, plus family templates."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .terms import App, FunctionSymbol, Rule, Term, TermError, TRS, Var, make_trs, variables

log = logging.getLogger(__name__)

_COMMENT = re.compile(r"\(\s*COMMENT\b", re.IGNORECASE)
ID_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_'+*-.^@")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


@dataclass
class Token:
    kind: str  # "id", "(", ")", ",", ";", "->", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "(" and _COMMENT.match(text, i):
            depth, start = 0, (line, col)
            while True:
                if i >= n:
                    raise ParseError("unterminated comment", *start)
                c = text[i]
                depth += {"(": 1, ")": -1}.get(c, 0)
                i, col = i + 1, col + 1
                if c == "\n":
                    line, col = line + 1, 1
                if depth == 0:
                    break
            continue
        if ch in "(),;":
            toks.append(Token(ch, ch, line, col))
            i, col = i + 1, col + 1
            continue
        if text.startswith("->", i):
            toks.append(Token("->", "->", line, col))
            i, col = i + 2, col + 2
            continue
        if ch in ID_CHARS:
            j = i
            while j < n and text[j] in ID_CHARS and not text.startswith("->", j):
                j += 1
            toks.append(Token("id", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return tok

    def skip_block(self):
        depth = 1
        while depth:
            tok = self.next()
            if tok.kind == "eof":
                raise ParseError("unterminated section", tok.line, tok.col)
            depth += {"(": 1, ")": -1}.get(tok.kind, 0)

    # raw terms are (name, args-or-None, token, split) where split is the
    # number of arguments before a ';' (predicative notation) or None
    def raw_term(self):
        tok = self.expect("id")
        if self.peek().kind != "(":
            return (tok.text, None, tok, None)
        self.next()
        args = []
        split = None
        while self.peek().kind != ")":
            if self.peek().kind == ";":
                if split is not None:
                    t = self.peek()
                    raise ParseError("more than one ';' in an argument list", t.line, t.col)
                split = len(args)
                self.next()
                continue
            if args and split != len(args):
                self.expect(",")
            args.append(self.raw_term())
        self.expect(")")
        return (tok.text, args, tok, split)


def _build(raw, var_names, implicit_vars: bool) -> Term:
    name, args, tok, split = raw
    if split is not None:
        raise ParseError("';' is not allowed in rules", tok.line, tok.col)
    if args is None and (name in var_names or (implicit_vars and name not in var_names)):
        return Var(name)
    if name in var_names:
        raise ParseError(f"variable {name} applied to arguments", tok.line, tok.col)
    built = [_build(a, var_names, implicit_vars) for a in (args or [])]
    return App(FunctionSymbol(name, len(built)), built)


def parse_trs(text: str) -> TRS:
    """Parse a TRS in the legacy TPDB format.

    Without a VAR section, bare identifiers are variables and constants
    must be written with parentheses.
    """
    p = _Parser(text)
    var_names: set[str] = set()
    have_var_section = False
    raw_rules = []
    extra_defined: list[str] = []
    while p.peek().kind != "eof":
        p.expect("(")
        head = p.expect("id")
        section = head.text.upper()
        if section == "VAR":
            have_var_section = True
            while p.peek().kind == "id":
                var_names.add(p.next().text)
            p.expect(")")
        elif section == "RULES":
            while p.peek().kind != ")":
                lhs = p.raw_term()
                p.expect("->")
                rhs = p.raw_term()
                raw_rules.append((lhs, rhs))
            p.expect(")")
        elif section == "DEFINED":
            while p.peek().kind == "id":
                extra_defined.append(p.next().text)
            p.expect(")")
        else:
            log.warning("ignoring section %s", head.text)
            p.skip_block()

    rules = []
    seen = set()
    for lhs, rhs in raw_rules:
        tok = lhs[2]
        try:
            rule = Rule(_build(lhs, var_names, not have_var_section),
                        _build(rhs, var_names, not have_var_section))
        except TermError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
        if rule in seen:
            log.warning("duplicate rule %s", rule)
        seen.add(rule)
        rules.append(rule)
    try:
        return make_trs(rules, extra_defined)
    except TermError as e:
        raise ParseError(str(e)) from None


def parse_term(text: str, trs: TRS, safe=None) -> Term:
    """Parse a term over the signature of trs; unknown bare identifiers are variables.

    Argument lists may be written `f(normal; safe)`. With a safe mapping the
    two groups fill the normal and safe positions in order; without one the
    separator acts like a comma.
    """
    p = _Parser(text)
    raw = p.raw_term()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return _resolve(raw, trs, safe)


def _resolve(raw, trs: TRS, safe=None) -> Term:
    name, args, tok, split = raw
    if name not in trs.signature:
        if args is None:
            return Var(name)
        raise ParseError(f"unknown symbol {name}", tok.line, tok.col)
    f = trs.signature[name]
    kids = [_resolve(a, trs, safe) for a in args or []]
    if split is not None and safe is not None and len(kids) == f.arity:
        normal = [i for i in range(1, f.arity + 1) if not safe.is_safe(f, i)]
        if split != len(normal):
            raise ParseError(f"{name} has {len(normal)} normal argument(s), found {split} before ';'",
                             tok.line, tok.col)
        order = normal + [i for i in range(1, f.arity + 1) if safe.is_safe(f, i)]
        placed: list = [None] * f.arity
        for k, i in enumerate(order):
            placed[i - 1] = kids[k]
        kids = placed
    try:
        return App(f, kids)
    except TermError as e:
        raise ParseError(str(e), tok.line, tok.col) from None


def format_trs(trs: TRS) -> str:
    names = set()
    for r in trs.rules:
        names |= variables(r.lhs)
    lines = [f"(VAR {' '.join(sorted(names))})".replace("(VAR )", "(VAR)")]
    extra = [f.name for f in trs.defined if not trs.rules_for(f.name)]
    if extra:
        lines.append(f"(DEFINED {' '.join(sorted(extra))})")
    lines.append("(RULES")
    lines.extend(f"  {r.lhs} -> {r.rhs}" for r in trs.rules)
    lines.append(")")
    return "\n".join(lines) + "\n"


# -- parameterised families ----------------------------------------------

class Family:
    """A term template where `sym^@n(t)` stands for n applications of sym."""

    def __init__(self, template: str, trs: TRS):
        self.label = template
        self.trs = trs
        p = _Parser(template)
        self.raw = p.raw_term()
        if p.peek().kind != "eof":
            raise ParseError("trailing input in template")
        self(0)  # validate eagerly

    def __call__(self, n: int) -> Term:
        return self._inst(self.raw, n)

    def _inst(self, raw, n: int) -> Term:
        name, args, tok, _ = raw
        if name.endswith("^@n"):
            base = name[:-3]
            f = self.trs.signature.get(base)
            if f is None or f.arity != 1 or not args or len(args) != 1:
                raise ParseError(f"{base}^@n needs a unary symbol and one argument", tok.line, tok.col)
            t = self._inst(args[0], n)
            for _ in range(n):
                t = App(f, [t])
            return t
        if name not in self.trs.signature:
            if args is None:
                return Var(name)
            raise ParseError(f"unknown symbol {name}", tok.line, tok.col)
        try:
            return App(self.trs.signature[name], [self._inst(a, n) for a in args or []])
        except TermError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
