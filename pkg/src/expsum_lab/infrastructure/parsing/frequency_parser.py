"""Frequency expression parser.

Grammar::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := ("+" | "-") unary | atom
    atom  := INTEGER | DECIMAL | "sqrt" "(" ["-"] INTEGER ")" | "(" expr ")"

Products and quotients must have a scalar (surd-free) factor on at least one
side of ``*`` and a scalar divisor, so every value is a rational combination
of square roots. A decimal literal anywhere makes the value approximate.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import sympy

from expsum_lab.domain.errors import FrequencyDomainError, FrequencySyntaxError
from expsum_lab.domain.value_objects.frequency import Frequency, FrequencyEntry

_TOKEN = re.compile(
    r"\s*(?:(?P<decimal>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<integer>\d+)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/()]))"
)


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def is_decimal(self) -> bool:
        return not self.text.isdigit()


@dataclass(frozen=True)
class Sqrt:
    radicand: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Num, Sqrt, Neg, BinOp]

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise FrequencySyntaxError(f"Unexpected character {text[pos]!r}", pos, text)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _expect(self, text: str) -> _Token:
        token = self.current
        if token.text != text:
            found = token.text or "end of input"
            raise FrequencySyntaxError(f"Expected {text!r}, found {found!r}", token.position, self.text)
        return self._advance()

    def parse(self) -> Node:
        if self.current.kind == "end":
            raise FrequencySyntaxError("Empty expression", 0, self.text)
        node = self._expr()
        if self.current.kind != "end":
            raise FrequencySyntaxError(
                f"Unexpected {self.current.text!r}", self.current.position, self.text
            )
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self.current.text in ("+", "-"):
            op = self._advance().text
            node = BinOp(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self.current.text in ("*", "/"):
            token = self._advance()
            right = self._unary()
            if token.text == "*" and not (_is_scalar(node) or _is_scalar(right)):
                raise FrequencySyntaxError(
                    "Product of two surds is outside the grammar", token.position, self.text
                )
            if token.text == "/" and not _is_scalar(right):
                raise FrequencySyntaxError("Divisor must be a scalar", token.position, self.text)
            node = BinOp(token.text, node, right)
        return node

    def _unary(self) -> Node:
        if self.current.text in ("+", "-"):
            op = self._advance().text
            operand = self._unary()
            return Neg(operand) if op == "-" else operand
        return self._atom()

    def _atom(self) -> Node:
        token = self.current
        if token.kind in ("integer", "decimal"):
            self._advance()
            return Num(token.text)
        if token.kind == "name":
            if token.text != "sqrt":
                raise FrequencySyntaxError(f"Unknown name {token.text!r}", token.position, self.text)
            self._advance()
            self._expect("(")
            sign = 1
            if self.current.text == "-":
                self._advance()
                sign = -1
            arg = self.current
            if arg.kind != "integer":
                raise FrequencySyntaxError("sqrt takes an integer argument", arg.position, self.text)
            self._advance()
            self._expect(")")
            radicand = sign * int(arg.text)
            if radicand < 0:
                raise FrequencyDomainError(
                    f"sqrt of a negative integer at position {arg.position}",
                    position=arg.position,
                    text=self.text,
                )
            return Sqrt(radicand)
        if token.text == "(":
            self._advance()
            node = self._expr()
            self._expect(")")
            return node
        found = token.text or "end of input"
        raise FrequencySyntaxError(f"Unexpected {found!r}", token.position, self.text)


def _is_scalar(node: Node) -> bool:
    if isinstance(node, Num):
        return True
    if isinstance(node, Sqrt):
        return sympy.sqrt(node.radicand).is_Rational is True
    if isinstance(node, Neg):
        return _is_scalar(node.operand)
    return _is_scalar(node.left) and _is_scalar(node.right)


def parse_tree(text: str) -> Node:
    """Parse a frequency expression into its token tree."""
    if not text or not text.strip():
        raise FrequencySyntaxError("Empty expression", 0, text)
    return _Parser(text).parse()


def _precedence(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return 3
    return 4


def format_tree(node: Node) -> str:
    """Print a token tree; ``parse_tree(format_tree(t)) == t``."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Sqrt):
        return f"sqrt({node.radicand})"
    if isinstance(node, Neg):
        inner = format_tree(node.operand)
        if _precedence(node.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    prec = _PRECEDENCE[node.op]
    left = format_tree(node.left)
    if _precedence(node.left) < prec:
        left = f"({left})"
    right = format_tree(node.right)
    if _precedence(node.right) <= prec:
        right = f"({right})"
    return f"{left}{node.op}{right}"


def _has_decimal(node: Node) -> bool:
    if isinstance(node, Num):
        return node.is_decimal
    if isinstance(node, Sqrt):
        return False
    if isinstance(node, Neg):
        return _has_decimal(node.operand)
    return _has_decimal(node.left) or _has_decimal(node.right)


def _evaluate(node: Node) -> sympy.Expr:
    if isinstance(node, Num):
        if node.is_decimal:
            return sympy.Float(node.text, 30)
        return sympy.Integer(int(node.text))
    if isinstance(node, Sqrt):
        return sympy.sqrt(node.radicand)
    if isinstance(node, Neg):
        return -_evaluate(node.operand)
    left, right = _evaluate(node.left), _evaluate(node.right)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right == 0:
        raise FrequencyDomainError("Division by zero", text=format_tree(node))
    return left / right


def parse_frequency_expr(text: str) -> FrequencyEntry:
    """Parse one coordinate: exact with token tree, or decimal tagged approximate."""
    tree = parse_tree(text)
    value = sympy.expand(_evaluate(tree))
    if _has_decimal(tree):
        return FrequencyEntry(text=text.strip(), approx=float(value), exact=None)
    return FrequencyEntry(text=text.strip(), approx=float(value), exact=value)


def parse_frequency(value: str | int | float | list[str | int | float]) -> Frequency:
    """Parse a frequency from config input: one expression or a list of them."""
    items = value if isinstance(value, list) else [value]
    entries: list[FrequencyEntry] = []
    for item in items:
        if isinstance(item, bool):
            raise FrequencySyntaxError("Boolean is not a frequency", 0, str(item))
        if isinstance(item, int):
            entries.append(FrequencyEntry.from_value(item))
        elif isinstance(item, float):
            entries.append(FrequencyEntry.from_value(item))
        else:
            entries.append(parse_frequency_expr(str(item)))
    return Frequency(tuple(entries))


def to_fraction(entry: FrequencyEntry) -> Fraction | None:
    """Rational value of an exact entry, None otherwise."""
    if entry.exact is None or not entry.exact.is_Rational:
        return None
    return Fraction(int(entry.exact.p), int(entry.exact.q))
