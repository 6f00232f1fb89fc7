"""Problem-file language: lexer, recursive-descent parser, elaboration and printing.

Example::

    vars x y z;
    degree D=8; torder K=3;
    poly f = x^3 + y^2;
    form w = 2*x^2*dy - 3*x*y*dx;
    family Omega = d(f) + t^1 * w;
    task normalize(Omega, f);

``*`` is the wedge product (functions act as scalars), ``d(...)`` the
exterior derivative, ``dx`` the differential of the declared variable ``x``
and ``t`` the deformation parameter.  Expressions are kept as syntax trees
until elaboration, which works at a degree high enough that nothing is
truncated before the final cut to ``D``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .forms import FormDegreeError, PForm, TForm, exterior_d, wedge
from .ring import Jet, TPoly

DEFAULT_DEGREE = 10
DEFAULT_TORDER = 4
MAX_EXPONENT = 1000

TASKS = (
    "check-integrability",
    "decompose-relative",
    "decompose-invariant",
    "normalize",
    "embed-qh",
    "certify",
    "analyze-singularity",
    "theorem3",
)
KEYWORDS = {"vars", "degree", "torder", "poly", "form", "family", "task"}
RESERVED = {"t", "d"}


class DSLError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass
class Token:
    kind: str  # NUM, IDENT, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"\s+|#[^\n]*|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;=])")


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", line, col)
        if m.lastgroup == "num":
            tokens.append(Token("NUM", m.group(), line, col))
        elif m.lastgroup == "ident":
            tokens.append(Token("IDENT", m.group(), line, col))
        elif m.lastgroup == "op":
            tokens.append(Token("OP", m.group(), line, col))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- syntax tree -------------------------------------------------------------
@dataclass
class Node:
    op: str
    args: tuple
    line: int = 0
    col: int = 0


@dataclass
class Definition:
    kind: str
    name: str
    expr: Node
    line: int
    col: int


@dataclass
class ProblemFile:
    variables: List[str] = field(default_factory=list)
    degree: Optional[int] = None
    torder: Optional[int] = None
    definitions: Dict[str, Definition] = field(default_factory=dict)
    task: Optional[str] = None
    task_args: List[object] = field(default_factory=list)
    task_pos: Tuple[int, int] = (0, 0)

    @property
    def D(self) -> int:
        return self.degree if self.degree is not None else DEFAULT_DEGREE

    @property
    def K(self) -> int:
        return self.torder if self.torder is not None else DEFAULT_TORDER


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        got = tok.text or "end of input"
        raise DSLError(f"{msg} (found {got!r})", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("OP", "IDENT"):
            self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "IDENT":
            self.error("expected an identifier")
        return self.advance()

    def number(self) -> int:
        if self.tok.kind != "NUM":
            self.error("expected an integer")
        return int(self.advance().text)

    # -- statements ---------------------------------------------------------
    def problem(self) -> ProblemFile:
        pf = ProblemFile()
        while self.tok.kind != "EOF":
            self.statement(pf)
        return pf

    def statement(self, pf: ProblemFile):
        head = self.ident()
        kw = head.text
        if kw == "vars":
            if pf.variables:
                self.error("variables already declared", head)
            while self.tok.kind == "IDENT":
                v = self.advance()
                if v.text in RESERVED or v.text in KEYWORDS:
                    self.error(f"{v.text!r} cannot be a variable name", v)
                if v.text in pf.variables:
                    self.error(f"duplicate variable {v.text!r}", v)
                pf.variables.append(v.text)
            if not pf.variables:
                self.error("expected at least one variable")
            for v in pf.variables:
                if "d" + v in pf.variables:
                    raise DSLError(f"variable name d{v} clashes with the differential of {v}", head.line, head.col)
        elif kw in ("degree", "torder"):
            if self.tok.kind == "IDENT":
                self.advance()
                self.expect("=")
            numtok = self.tok
            value = self.number()
            if value <= 0:
                self.error(f"{kw} must be positive", numtok)
            if kw == "degree":
                pf.degree = value
            else:
                pf.torder = value
        elif kw in ("poly", "form", "family"):
            name = self.ident()
            if name.text in RESERVED or name.text in KEYWORDS:
                self.error(f"{name.text!r} is reserved", name)
            if name.text in pf.definitions:
                self.error(f"{name.text!r} already defined", name)
            self.expect("=")
            expr = self.expr()
            pf.definitions[name.text] = Definition(kw, name.text, expr, name.line, name.col)
        elif kw == "task":
            if pf.task is not None:
                self.error("only one task per file", head)
            parts = [self.ident().text]
            while self.tok.text == "-":
                self.advance()
                parts.append(self.ident().text)
            name = "-".join(parts)
            if name not in TASKS:
                raise DSLError(f"unknown task {name!r}", head.line, head.col)
            pf.task, pf.task_pos = name, (head.line, head.col)
            self.expect("(")
            args: List[object] = []
            if self.tok.text != ")":
                while True:
                    if self.tok.kind == "NUM":
                        args.append(self.number())
                    else:
                        args.append(self.ident().text)
                    if self.tok.text != ",":
                        break
                    self.advance()
            self.expect(")")
            pf.task_args = args
        else:
            self.error("expected a declaration, definition or task", head)
        self.expect(";")

    # -- expressions --------------------------------------------------------
    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "OP":
            op = self.advance()
            rhs = self.term()
            node = Node("add" if op.text == "+" else "sub", (node, rhs), op.line, op.col)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "OP":
            op = self.advance()
            rhs = self.unary()
            node = Node("mul" if op.text == "*" else "div", (node, rhs), op.line, op.col)
        return node

    def unary(self) -> Node:
        if self.tok.text == "-" and self.tok.kind == "OP":
            op = self.advance()
            return Node("neg", (self.unary(),), op.line, op.col)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.text == "^":
            op = self.advance()
            if self.tok.text == "(":
                self.advance()
                if self.tok.text == "-":
                    self.error("negative exponent")
                k = self.number()
                self.expect(")")
            else:
                if self.tok.text == "-":
                    self.error("negative exponent")
                k = self.number()
            if k > MAX_EXPONENT:
                raise DSLError(f"exponent overflow: {k} > {MAX_EXPONENT}", op.line, op.col)
            base = Node("pow", (base, k), op.line, op.col)
            if self.tok.text == "^":
                self.error("chained exponents need parentheses")
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "NUM":
            self.advance()
            return Node("num", (Fraction(int(tok.text)),), tok.line, tok.col)
        if tok.kind == "IDENT":
            self.advance()
            if tok.text == "d" and self.tok.text == "(":
                self.advance()
                inner = self.expr()
                self.expect(")")
                return Node("d", (inner,), tok.line, tok.col)
            return Node("name", (tok.text,), tok.line, tok.col)
        if tok.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.error("expected an expression")


def parse_problem(text: str) -> ProblemFile:
    pf = Parser(text).problem()
    if not pf.variables:
        raise DSLError("missing 'vars' declaration")
    if pf.task is None:
        raise DSLError("missing 'task' directive")
    return pf


def parse_expression(text: str) -> Node:
    p = Parser(text)
    node = p.expr()
    if p.tok.kind != "EOF":
        p.error("trailing input")
    return node


# -- elaboration -------------------------------------------------------------
class Value:
    """t-polynomial of p-forms during elaboration: ``{t_power: PForm}``."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Dict[int, PForm]):
        self.p = p
        self.terms = {k: v for k, v in terms.items() if v}

    def has_t(self) -> bool:
        return any(k > 0 for k in self.terms)


class Elaborator:
    def __init__(self, variables: List[str], D: int, K: int, definitions: Dict[str, Definition] | None = None):
        self.vars = list(variables)
        self.n = len(self.vars)
        self.D, self.K = D, K
        self.defs = definitions or {}
        self._cache: Dict[str, Value] = {}
        self._ub: Dict[str, Tuple[int, int]] = {}
        self._active: set = set()

    # upper bound on polynomial degree and on nesting of d, to pick a lossless working degree
    def bounds(self, node: Node) -> Tuple[int, int]:
        op, a = node.op, node.args
        if op == "num":
            return 0, 0
        if op == "name":
            name = a[0]
            if name in self.vars:
                return 1, 0
            if name == "t" or (name.startswith("d") and name[1:] in self.vars):
                return 0, 0
            if name in self.defs:
                if name not in self._ub:
                    if name in self._active:
                        raise DSLError(f"circular definition of {name!r}", node.line, node.col)
                    self._active.add(name)
                    self._ub[name] = self.bounds(self.defs[name].expr)
                    self._active.discard(name)
                return self._ub[name]
            raise DSLError(f"unknown identifier {name!r}", node.line, node.col)
        if op in ("add", "sub"):
            (d1, n1), (d2, n2) = self.bounds(a[0]), self.bounds(a[1])
            return max(d1, d2), max(n1, n2)
        if op in ("mul", "div"):
            (d1, n1), (d2, n2) = self.bounds(a[0]), self.bounds(a[1])
            return d1 + d2, max(n1, n2)
        if op == "neg":
            return self.bounds(a[0])
        if op == "pow":
            d1, n1 = self.bounds(a[0])
            return d1 * a[1], n1
        if op == "d":
            d1, n1 = self.bounds(a[0])
            return max(d1 - 1, 0), n1 + 1
        raise AssertionError(op)

    def evaluate(self, node: Node) -> Value:
        deg, depth = self.bounds(node)
        if deg > 10 * MAX_EXPONENT:
            raise DSLError(f"exponent overflow: expression degree up to {deg}", node.line, node.col)
        # truncation commutes with + and *, and each nested d consumes one degree
        self.work = self.D + depth
        self._cache = {}
        v = self._eval(node)
        return Value(v.p, {k: f.truncate(self.D) for k, f in v.terms.items()})

    def _const(self, c) -> Value:
        return Value(0, {0: PForm.function(Jet.const(self.n, self.work, c))})

    def _eval(self, node: Node) -> Value:
        op, a = node.op, node.args
        n, W = self.n, self.work
        if op == "num":
            return self._const(a[0])
        if op == "name":
            name = a[0]
            if name in self.vars:
                return Value(0, {0: PForm.function(Jet.var(n, W, self.vars.index(name)))})
            if name == "t":
                return Value(0, {1: PForm.function(Jet.one(n, W))}) if self.K >= 1 else Value(0, {})
            if name.startswith("d") and name[1:] in self.vars:
                return Value(1, {0: PForm.basis(n, W, (self.vars.index(name[1:]),))})
            if name in self.defs:
                if name not in self._cache:
                    self._cache[name] = self._eval(self.defs[name].expr)
                return self._cache[name]
            raise DSLError(f"unknown identifier {name!r}", node.line, node.col)
        if op in ("add", "sub"):
            x, y = self._eval(a[0]), self._eval(a[1])
            if x.p != y.p and x.terms and y.terms:
                raise DSLError(f"cannot add a {x.p}-form and a {y.p}-form", node.line, node.col)
            p = x.p if x.terms else y.p
            out = dict(x.terms)
            for k, v in y.terms.items():
                v = v if op == "add" else -v
                out[k] = out[k] + v if k in out else v
            return Value(p, out)
        if op == "neg":
            x = self._eval(a[0])
            return Value(x.p, {k: -v for k, v in x.terms.items()})
        if op == "mul":
            return self._mul(self._eval(a[0]), self._eval(a[1]), node)
        if op == "div":
            x, y = self._eval(a[0]), self._eval(a[1])
            c = _as_constant(y)
            if c is None:
                raise DSLError("division is only by nonzero constants", node.line, node.col)
            return Value(x.p, {k: v.scale(1 / c) for k, v in x.terms.items()})
        if op == "pow":
            x = self._eval(a[0])
            if x.p != 0:
                raise DSLError("only functions can be raised to a power", node.line, node.col)
            result, base, k = self._const(1), x, a[1]
            while k:
                if k & 1:
                    result = self._mul(result, base, node)
                k >>= 1
                if k:
                    base = self._mul(base, base, node)
            return result
        if op == "d":
            x = self._eval(a[0])
            if x.p >= 3:
                raise DSLError("d of a 3-form is not supported", node.line, node.col)
            return Value(x.p + 1, {k: exterior_d(v) for k, v in x.terms.items()})
        raise AssertionError(op)

    def _mul(self, x: Value, y: Value, node: Node) -> Value:
        p = x.p + y.p
        if p > 3:
            raise DSLError("wedge product of degree above 3", node.line, node.col)
        out: Dict[int, PForm] = {}
        for i, u in x.terms.items():
            for j, v in y.terms.items():
                if i + j > self.K:
                    continue
                try:
                    w = wedge(u, v)
                except FormDegreeError as exc:
                    raise DSLError(str(exc), node.line, node.col)
                out[i + j] = out[i + j] + w if i + j in out else w
        return Value(p, out)


def _as_constant(v: Value):
    if v.p != 0 or v.has_t():
        return None
    if not v.terms:
        return None
    j = v.terms[0].function_part()
    if set(j.terms) != {(0,) * j.n}:
        return None
    return j.constant()


def value_to_jet(v: Value, n: int, D: int) -> Jet:
    if v.p != 0:
        raise DSLError(f"expected a function, got a {v.p}-form")
    if v.has_t():
        raise DSLError("expected a function independent of t")
    return v.terms[0].function_part() if 0 in v.terms else Jet.zero(n, D)


def value_to_pform(v: Value, p: int, n: int, D: int) -> PForm:
    if v.terms and v.p != p:
        raise DSLError(f"expected a {p}-form, got a {v.p}-form")
    if v.has_t():
        raise DSLError("expected a form independent of t")
    return v.terms.get(0, PForm.zero(p, n, D))


def value_to_tform(v: Value, p: int, n: int, D: int, K: int) -> TForm:
    if v.terms and v.p != p:
        raise DSLError(f"expected a {p}-form, got a {v.p}-form")
    return TForm(v.terms.get(j, PForm.zero(p, n, D)) for j in range(K + 1))


def value_to_tpoly(v: Value, n: int, D: int, K: int) -> TPoly:
    if v.terms and v.p != 0:
        raise DSLError(f"expected a function, got a {v.p}-form")
    return TPoly(v.terms[j].function_part() if j in v.terms else Jet.zero(n, D) for j in range(K + 1))


# -- printing ----------------------------------------------------------------
def _print_key(e):
    return (sum(e), tuple(-x for x in e))


def format_monomial(e, names) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_jet(j: Jet, names) -> str:
    """Canonical text: ascending degree, lexicographic within a degree."""
    out = []
    for e, c in sorted(j.terms.items(), key=lambda kv: _print_key(kv[0])):
        mono = format_monomial(e, names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(out) or "0"


def format_form(a: PForm, names) -> str:
    if a.p == 0:
        return format_jet(a.function_part(), names)
    parts = []
    for idx, c in a.items():
        basis = "*".join("d" + names[i] for i in idx)
        parts.append(f"({format_jet(c, names)})*{basis}")
    return " + ".join(parts) or "0"


def _t_prefix(j: int) -> str:
    return "" if j == 0 else ("t*" if j == 1 else f"t^{j}*")


def format_tform(a: TForm, names) -> str:
    parts = []
    for j, c in enumerate(a.coeffs):
        if c:
            body = format_form(c, names)
            parts.append(f"{_t_prefix(j)}({body})" if j else body)
    return " + ".join(parts) or "0"


def format_tpoly(F: TPoly, names) -> str:
    parts = []
    for j, c in enumerate(F.coeffs):
        if c:
            body = format_jet(c, names)
            parts.append(f"{_t_prefix(j)}({body})" if j else f"({body})")
    return " + ".join(parts) or "0"
