"""Small arithmetic expression language for user-defined b(k) field components.

Grammar (whitespace-insensitive):

    expr   := term  (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds tighter than unary '-'
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Variables are kx, ky, kz plus any declared parameter name; the function set
is sin, cos, sqrt, abs.  Numbers accept decimal and scientific notation.
There is no implicit multiplication: a letter directly after a number is a
lex error.  All errors carry a 0-based byte offset into the source string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError, LexError, UnknownIdentifierError

RESERVED_VARS = ("kx", "ky", "kz")
FUNCTIONS = ("sin", "cos", "sqrt", "abs")

_FUNC_IMPL = {"sin": np.sin, "cos": np.cos, "sqrt": np.sqrt, "abs": np.abs}


class TokenKind(Enum):
    NUMBER = "number"
    IDENT = "identifier"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    CARET = "^"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    END = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    position: int

    def describe(self) -> str:
        if self.kind in (TokenKind.NUMBER, TokenKind.IDENT):
            return f"{self.kind.value} '{self.lexeme}'"
        return f"'{self.lexeme}'" if self.lexeme else self.kind.value


_SINGLE_CHAR = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "^": TokenKind.CARET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
}


def tokenize(source: str) -> list[Token]:
    """Split an expression source string into tokens.

    Raises LexError (with byte offset) on any character outside the grammar's
    alphabet, on malformed numbers, and on a letter directly following a
    number ("2kx" is rejected rather than read as implicit multiplication).
    """
    tokens: list[Token] = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c in _SINGLE_CHAR:
            tokens.append(Token(_SINGLE_CHAR[c], c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            start = i
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
                else:
                    raise LexError("malformed exponent in number", i)
            if i < n and (source[i].isalpha() or source[i] == "_"):
                raise LexError("letter directly after a number (no implicit multiplication)", i)
            lexeme = source[start:i]
            try:
                value = float(lexeme)
            except ValueError:
                raise LexError(f"malformed number '{lexeme}'", start) from None
            if not np.isfinite(value):
                raise LexError(f"number '{lexeme}' is not finite", start)
            tokens.append(Token(TokenKind.NUMBER, lexeme, start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(Token(TokenKind.IDENT, source[start:i], start))
            continue
        raise LexError(f"illegal character {c!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------

Expr = Union["Const", "Var", "Unary", "Binary", "Call"]


@dataclass(frozen=True)
class Const:
    value: float
    position: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    position: int = 0


@dataclass(frozen=True)
class Unary:
    operand: Expr
    position: int = 0


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: Expr
    right: Expr
    position: int = 0


@dataclass(frozen=True)
class Call:
    fn: str
    arg: Expr
    position: int = 0


class _Parser:
    def __init__(self, tokens: list[Token], length: int):
        self.tokens = tokens
        self.pos = 0
        self.end = Token(TokenKind.END, "", length)

    def peek(self) -> Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.end

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind: TokenKind) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise ExprSyntaxError(f"expected {kind.value}, found {tok.describe()}", tok.position)
        return self.advance()

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind in (TokenKind.PLUS, TokenKind.MINUS):
            op = self.advance()
            node = Binary(op.lexeme, node, self.term(), op.position)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind in (TokenKind.STAR, TokenKind.SLASH):
            op = self.advance()
            node = Binary(op.lexeme, node, self.unary(), op.position)
        return node

    def unary(self) -> Expr:
        if self.peek().kind is TokenKind.MINUS:
            op = self.advance()
            return Unary(self.unary(), op.position)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind is TokenKind.CARET:
            op = self.advance()
            # exponent at unary level: kx^-2 parses, and a^b^c == a^(b^c)
            return Binary("^", base, self.unary(), op.position)
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return Const(float(tok.lexeme), tok.position)
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if self.peek().kind is TokenKind.LPAREN:
                if tok.lexeme not in FUNCTIONS:
                    raise ExprSyntaxError(
                        f"unknown function '{tok.lexeme}' (expected one of {', '.join(FUNCTIONS)})",
                        tok.position,
                    )
                self.advance()
                arg = self.expr()
                self.expect(TokenKind.RPAREN)
                return Call(tok.lexeme, arg, tok.position)
            return Var(tok.lexeme, tok.position)
        if tok.kind is TokenKind.LPAREN:
            self.advance()
            node = self.expr()
            self.expect(TokenKind.RPAREN)
            return node
        raise ExprSyntaxError(f"expected a value, found {tok.describe()}", tok.position)


def parse_expr(tokens: list[Token], source_length: int | None = None) -> Expr:
    """Parse a token list into an expression tree; the full input must be consumed."""
    if source_length is None:
        source_length = tokens[-1].position + len(tokens[-1].lexeme) if tokens else 0
    parser = _Parser(tokens, source_length)
    node = parser.expr()
    trailing = parser.peek()
    if trailing.kind is not TokenKind.END:
        raise ExprSyntaxError(f"expected end of input, found {trailing.describe()}", trailing.position)
    return node


def parse_source(source: str) -> Expr:
    """Tokenize and parse a source string in one step."""
    return parse_expr(tokenize(source), len(source))


def _pow(base, exponent, position):
    exponent = np.asarray(exponent)
    if exponent.ndim == 0 and float(exponent) == int(float(exponent)):
        # integer exponent: repeated multiplication, valid for any base sign
        n = int(float(exponent))
        invert = n < 0
        n = abs(n)
        result = np.ones_like(np.asarray(base, dtype=float))
        acc = np.asarray(base, dtype=float)
        while n:
            if n & 1:
                result = result * acc
            acc = acc * acc
            n >>= 1
        if invert:
            if np.any(result == 0.0):
                raise ExprEvalError("zero raised to a negative power", position)
            return 1.0 / result
        return result
    if np.any(np.asarray(base) <= 0.0):
        raise ExprEvalError("non-integer power of a non-positive base", position)
    return np.exp(exponent * np.log(base))


def eval_expr(expr: Expr, env: dict):
    """Evaluate an expression tree against an environment of numbers or arrays.

    ``env`` maps kx/ky/kz and parameter names to floats or numpy arrays of a
    common broadcastable shape.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise UnknownIdentifierError(expr.name, expr.position) from None
    if isinstance(expr, Unary):
        return -eval_expr(expr.operand, env)
    if isinstance(expr, Binary):
        left = eval_expr(expr.left, env)
        if expr.op == "^":
            return _pow(left, eval_expr(expr.right, env), expr.position)
        right = eval_expr(expr.right, env)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if np.any(np.asarray(right) == 0.0):
            raise ExprEvalError("division by zero", expr.position)
        return left / right
    if isinstance(expr, Call):
        arg = eval_expr(expr.arg, env)
        if expr.fn == "sqrt" and np.any(np.asarray(arg) < 0.0):
            raise ExprEvalError("sqrt of a negative value", expr.position)
        return _FUNC_IMPL[expr.fn](arg)
    raise TypeError(f"not an expression node: {expr!r}")


def expr_variables(expr: Expr) -> set[str]:
    """Collect every variable name referenced by an expression tree."""
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Unary):
        return expr_variables(expr.operand)
    if isinstance(expr, Binary):
        return expr_variables(expr.left) | expr_variables(expr.right)
    if isinstance(expr, Call):
        return expr_variables(expr.arg)
    return set()


# precedence levels used by the minimal-parenthesis printer
_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        if expr.op in "+-":
            return _PREC_ADD
        if expr.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(expr, Unary):
        return _PREC_UNARY
    return _PREC_ATOM


def expr_to_source(expr: Expr) -> str:
    """Render a tree back to source with the minimal parentheses the grammar needs."""
    if isinstance(expr, Const):
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Unary):
        inner = expr_to_source(expr.operand)
        if _prec(expr.operand) < _PREC_UNARY:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(expr, Call):
        return f"{expr.fn}({expr_to_source(expr.arg)})"
    if isinstance(expr, Binary):
        lhs, rhs = expr_to_source(expr.left), expr_to_source(expr.right)
        mine = _prec(expr)
        if expr.op == "^":
            # right-associative; a Unary exponent needs no parens by the grammar
            if _prec(expr.left) <= mine:
                lhs = f"({lhs})"
            if _prec(expr.right) < _PREC_UNARY:
                rhs = f"({rhs})"
            return f"{lhs}^{rhs}"
        if _prec(expr.left) < mine:
            lhs = f"({lhs})"
        if _prec(expr.right) <= mine:
            rhs = f"({rhs})"
        return f"{lhs} {expr.op} {rhs}"
    raise TypeError(f"not an expression node: {expr!r}")


@dataclass(frozen=True)
class FieldSpec:
    """Three parsed component expressions plus their parameter values."""

    bx: Expr
    by: Expr
    bz: Expr
    params: dict = field(default_factory=dict)
    name: str = "custom"

    def component_exprs(self):
        return (("bx", self.bx), ("by", self.by), ("bz", self.bz))

    def evaluate(self, kx, ky, kz):
        """Evaluate all three components; scalars broadcast against array inputs."""
        env = dict(self.params)
        env.update(kx=kx, ky=ky, kz=kz)
        out = []
        for label, expr in self.component_exprs():
            try:
                out.append(eval_expr(expr, env))
            except ExprEvalError as err:
                if err.component is None:
                    err.component = label
                raise
        return out


def parse_field_spec(document: dict) -> FieldSpec:
    """Build a FieldSpec from a configuration mapping.

    Expected keys: "bx", "by", "bz" (expression strings, required), "params"
    (mapping of parameter name to number, optional), "name" (optional).
    Every variable in every component must resolve against kx/ky/kz or the
    declared parameters; violations raise with the failing component attached.
    """
    if not isinstance(document, dict):
        raise ExprSyntaxError("field spec document must be a mapping")
    unknown = set(document) - {"bx", "by", "bz", "params", "name"}
    if unknown:
        raise ExprSyntaxError(f"unrecognized field spec keys: {', '.join(sorted(unknown))}")

    params = document.get("params", {})
    if not isinstance(params, dict):
        raise ExprSyntaxError("'params' must be a mapping of names to numbers")
    clean_params = {}
    for key, value in params.items():
        if not isinstance(key, str) or not key or not parse_ident_ok(key):
            raise ExprSyntaxError(f"invalid parameter name {key!r}")
        if key in RESERVED_VARS:
            raise ExprSyntaxError(f"parameter name '{key}' shadows a wavevector component")
        if not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ExprSyntaxError(f"parameter '{key}' must be a finite number")
        clean_params[key] = float(value)

    known = set(RESERVED_VARS) | set(clean_params)
    exprs = {}
    for label in ("bx", "by", "bz"):
        source = document.get(label)
        if not isinstance(source, str):
            raise ExprSyntaxError(f"missing or non-string component '{label}'", component=label)
        try:
            tree = parse_source(source)
        except (LexError, ExprSyntaxError) as err:
            err.component = label
            raise
        for name in sorted(expr_variables(tree)):
            if name not in known:
                raise UnknownIdentifierError(name, component=label)
        exprs[label] = tree

    name = document.get("name", "custom")
    if not isinstance(name, str):
        raise ExprSyntaxError("'name' must be a string")
    return FieldSpec(exprs["bx"], exprs["by"], exprs["bz"], clean_params, name)


def parse_ident_ok(name: str) -> bool:
    return (name[0].isalpha() or name[0] == "_") and all(c.isalnum() or c == "_" for c in name)
