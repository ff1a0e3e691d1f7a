"""Compound entropy expressions.

Surface grammar, tightest binding first::

    comma  ","   joint variable list
    colon  ":"   mutual information
    bar    "|"   conditioning

All three operators are left-associative and parentheses group as usual.
Expansion maps an expression to a region of the Boolean algebra generated
by its variables (comma is union, colon intersection, bar difference) and
rewrites the measure of that region as an integer combination of joint
entropies by inclusion-exclusion.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .errors import DomainError, EmptyExpression, ExpressionSyntaxError


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Comma:
    left: "EntropyExpr"
    right: "EntropyExpr"


@dataclass(frozen=True)
class Colon:
    left: "EntropyExpr"
    right: "EntropyExpr"


@dataclass(frozen=True)
class Bar:
    left: "EntropyExpr"
    right: "EntropyExpr"


EntropyExpr = Union[Atom, Comma, Colon, Bar]

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[,:|()]))")
# Lower number binds more loosely.
_BINARY = {"|": (1, Bar), ":": (2, Colon), ",": (3, Comma)}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", start)
        tok = m.group("id") or m.group("op")
        tokens.append((tok, m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expression(self, min_prec: int = 1) -> EntropyExpr:
        left = self.primary()
        while True:
            tok, _ = self.peek()
            if tok not in _BINARY or _BINARY[tok][0] < min_prec:
                return left
            prec, node = _BINARY[tok]
            self.take()
            right = self.expression(prec + 1)
            left = node(left, right)

    def primary(self) -> EntropyExpr:
        tok, pos = self.take()
        if tok == "(":
            inner = self.expression()
            close, cpos = self.take()
            if close != ")":
                raise ExpressionSyntaxError("expected ')'", cpos)
            return inner
        if tok and (tok[0].isalpha() or tok[0] == "_"):
            return Atom(tok)
        what = repr(tok) if tok else "end of input"
        raise ExpressionSyntaxError(f"expected a variable or '(' but found {what}", pos)


def parse(text: str) -> EntropyExpr:
    if not text or not text.strip():
        raise EmptyExpression("empty entropy expression")
    p = _Parser(text)
    expr = p.expression()
    tok, pos = p.peek()
    if tok:
        raise ExpressionSyntaxError(f"unexpected {tok!r}", pos)
    return expr


def variables(expr: EntropyExpr) -> tuple[str, ...]:
    """Distinct atom names in order of first appearance."""
    seen: dict[str, None] = {}

    def walk(e):
        if isinstance(e, Atom):
            seen.setdefault(e.name)
        else:
            walk(e.left)
            walk(e.right)

    walk(expr)
    return tuple(seen)


@dataclass(frozen=True)
class SignedJointSum:
    """``sum(coef * H(atoms))`` with integer coefficients and merged terms."""

    terms: tuple[tuple[int, frozenset[str]], ...]
    order: tuple[str, ...] = ()

    def _names(self, atoms: frozenset[str]) -> list[str]:
        rank = {n: i for i, n in enumerate(self.order)}
        return sorted(atoms, key=lambda n: (rank.get(n, len(rank)), n))

    def as_dict(self) -> dict[frozenset[str], int]:
        return {atoms: c for c, atoms in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, atoms in self.terms:
            sign = "+" if c > 0 else "-"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign}{mag}H({','.join(self._names(atoms))})")
        return " ".join(parts)


def _region(expr: EntropyExpr, index: dict[str, int], cells: list[int]) -> frozenset[int]:
    # A cell is a nonempty bitmask of variables; variable v covers the cells with bit v set.
    if isinstance(expr, Atom):
        bit = 1 << index[expr.name]
        return frozenset(c for c in cells if c & bit)
    left = _region(expr.left, index, cells)
    right = _region(expr.right, index, cells)
    if isinstance(expr, Comma):
        return left | right
    if isinstance(expr, Colon):
        return left & right
    return left - right


def expand(expr: EntropyExpr | str) -> SignedJointSum:
    if isinstance(expr, str):
        expr = parse(expr)
    if expr is None:
        raise EmptyExpression("nothing to expand")
    names = variables(expr)
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    full = (1 << n) - 1
    cells = list(range(1, full + 1))
    coeffs: dict[int, int] = {}
    for cell in _region(expr, index, cells):
        # measure(cell S) = -sum_{U subset of S} (-1)^{|S|-|U|} H(V - U)
        size = bin(cell).count("1")
        sub = cell
        while True:
            rest = full & ~sub
            if rest:
                sign = -1 if (size - bin(sub).count("1")) % 2 == 0 else 1
                coeffs[rest] = coeffs.get(rest, 0) + sign
            if sub == 0:
                break
            sub = (sub - 1) & cell
    terms = []
    for mask, c in coeffs.items():
        if c:
            atoms = frozenset(names[i] for i in range(n) if mask >> i & 1)
            terms.append((c, atoms))
    rank = lambda t: (len(t[1]), sorted(index[a] for a in t[1]))
    terms.sort(key=lambda t: (-1 if t[0] > 0 else 1,) + rank(t))
    return SignedJointSum(tuple(terms), names)


def evaluate(total: SignedJointSum, joint: Callable[[frozenset[str]], float]) -> float:
    return float(sum(c * joint(atoms) for c, atoms in total.terms))


def shannon_entropy(p: Iterable[float] | np.ndarray) -> float:
    """Base-2 entropy of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p}")
    return shannon_entropy((p, 1.0 - p))


def marginal_entropy_fn(joint: np.ndarray, names: Iterable[str]):
    """Callback computing ``H`` of marginals of a joint table whose axes are ``names``."""
    names = list(names)

    def h(atoms: frozenset[str]) -> float:
        drop = tuple(i for i, n in enumerate(names) if n not in atoms)
        return shannon_entropy(joint.sum(axis=drop) if drop else joint)

    return h


__all__ = [
    "Atom",
    "Bar",
    "Colon",
    "Comma",
    "EntropyExpr",
    "SignedJointSum",
    "binary_entropy",
    "evaluate",
    "expand",
    "marginal_entropy_fn",
    "parse",
    "shannon_entropy",
    "variables",
]
