"""Formula ASTs, the concrete grammar, and quantifier rank.

The AST keeps exactly five constructors: truth, relational atoms on the
variables x1..xk, negation, binary conjunction, and quantifier application.
The derived connectives |, ->, <-> and the constant false are desugared by
the parser:

    (p | q)    ~>  !(!p & !q)
    (p -> q)   ~>  !(p & !q)
    (p <-> q)  ~>  (!(p & !q) & !(q & !p))
    false      ~>  !true

Grammar:

    formula := "true" | "false" | atom | "!" formula
             | "(" formula op formula ")" | quant formula
    op      := "&" | "|" | "->" | "<->"
    atom    := IDENT "(" var ("," var)* ")"
    var     := "x" DIGITS
    quant   := "dia[" IDENT "]" | "dia>=" INT "[" IDENT "]" | "all" | "some"
             | "cyc[" IDENT "]" | "inf[" IDENT "]" | "reach[" IDENT "]"
             | "ex>=" INT "[" var "]"
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .quantifiers import QuantifierDef, QuantifierError
from .structures import Signature


class FormulaError(ValueError):
    """A formula failed signature or well-formedness checks."""


class FormulaParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Atom:
    relation: str
    variables: tuple[int, ...]  # 1-based indices into x1..xk


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    quantifier: QuantifierDef
    sub: "Formula"


Formula = Union[Top, Atom, Not, And, Quant]

TOP = Top()
FALSE = Not(TOP)


def conj_all(formulas: Iterable[Formula]) -> Formula:
    """Right-nested conjunction of a list; the empty conjunction is true."""
    items = list(formulas)
    if not items:
        return TOP
    result = items[-1]
    for f in reversed(items[:-1]):
        result = And(f, result)
    return result


def disj_all(formulas: Iterable[Formula]) -> Formula:
    """Right-nested (desugared) disjunction; the empty disjunction is false."""
    items = list(formulas)
    if not items:
        return FALSE
    result = items[-1]
    for f in reversed(items[:-1]):
        result = Not(And(Not(f), Not(result)))
    return result


def _children(formula: Formula) -> tuple[Formula, ...]:
    if isinstance(formula, Not):
        return (formula.sub,)
    if isinstance(formula, And):
        return (formula.left, formula.right)
    if isinstance(formula, Quant):
        return (formula.sub,)
    if isinstance(formula, (Top, Atom)):
        return ()
    raise TypeError(f"not a formula: {formula!r}")


def subformulas(formula: Formula) -> list[Formula]:
    """Distinct subformula objects in evaluation (post-) order.

    Iterative and sharing-aware: characteristic formulae are DAGs with heavy
    node reuse, where naive recursion would revisit shared nodes
    exponentially often and overflow the stack.
    """
    seen: set[int] = set()
    out: list[Formula] = []
    stack: list[tuple[Formula, bool]] = [(formula, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(_children(node)):
            if id(child) not in seen:
                stack.append((child, False))
    return out


def quantifier_rank(formula: Formula) -> int:
    ranks: dict[int, int] = {}
    for node in subformulas(formula):
        if isinstance(node, (Top, Atom)):
            ranks[id(node)] = 0
        elif isinstance(node, Not):
            ranks[id(node)] = ranks[id(node.sub)]
        elif isinstance(node, And):
            ranks[id(node)] = max(ranks[id(node.left)], ranks[id(node.right)])
        else:
            ranks[id(node)] = 1 + ranks[id(node.sub)]
    return ranks[id(formula)]


def print_formula(formula: Formula) -> str:
    """Canonical concrete syntax; parse_formula(print_formula(f)) == f."""
    parts: dict[int, str] = {}
    for node in subformulas(formula):
        if isinstance(node, Top):
            parts[id(node)] = "true"
        elif isinstance(node, Atom):
            args = ",".join(f"x{i}" for i in node.variables)
            parts[id(node)] = f"{node.relation}({args})"
        elif isinstance(node, Not):
            parts[id(node)] = "!" + parts[id(node.sub)]
        elif isinstance(node, And):
            parts[id(node)] = f"({parts[id(node.left)]} & {parts[id(node.right)]})"
        else:
            parts[id(node)] = f"{node.quantifier.name} {parts[id(node.sub)]}"
    return parts[id(formula)]


_QUANT_HEADS = ("dia", "cyc", "inf", "reach", "ex", "all", "some")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def try_literal(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect_literal(self, literal: str):
        if not self.try_literal(literal):
            raise FormulaParseError(f"expected {literal!r}", self.pos)

    def peek_word(self) -> str | None:
        self.skip_ws()
        i = self.pos
        if i >= len(self.text) or not (self.text[i].isalpha() or self.text[i] == "_"):
            return None
        j = i
        while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
            j += 1
        return self.text[i:j]

    def take_word(self) -> str:
        word = self.peek_word()
        if word is None:
            raise FormulaParseError("expected an identifier", self.pos)
        self.pos += len(word)
        return word

    def take_int(self) -> int:
        self.skip_ws()
        i = self.pos
        while i < len(self.text) and self.text[i].isdigit():
            i += 1
        if i == self.pos:
            raise FormulaParseError("expected an integer", self.pos)
        value = int(self.text[self.pos:i])
        self.pos = i
        return value


class _Parser:
    def __init__(self, text: str, k: int, signature: Signature):
        self.sc = _Scanner(text)
        self.k = k
        self.signature = signature

    def parse(self) -> Formula:
        formula = self.formula()
        if not self.sc.eof():
            raise FormulaParseError(f"unexpected trailing input {self.sc.text[self.sc.pos:]!r}", self.sc.pos)
        return formula

    def formula(self) -> Formula:
        sc = self.sc
        if sc.try_literal("("):
            left = self.formula()
            sc.skip_ws()
            for op in ("<->", "->", "&", "|"):
                if sc.try_literal(op):
                    break
            else:
                raise FormulaParseError("expected a binary operator (&, |, ->, <->)", sc.pos)
            right = self.formula()
            sc.expect_literal(")")
            if op == "&":
                return And(left, right)
            if op == "|":
                return Not(And(Not(left), Not(right)))
            if op == "->":
                return Not(And(left, Not(right)))
            return And(Not(And(left, Not(right))), Not(And(right, Not(left))))
        if sc.try_literal("!"):
            return Not(self.formula())
        word = sc.peek_word()
        if word is None:
            raise FormulaParseError("expected a formula", sc.pos)
        if word == "true":
            sc.take_word()
            return TOP
        if word == "false":
            sc.take_word()
            return FALSE
        if word in _QUANT_HEADS:
            quantifier = self.quantifier(word)
            return Quant(quantifier, self.formula())
        return self.atom()

    def quantifier(self, head: str) -> QuantifierDef:
        sc = self.sc
        at = sc.pos
        sc.take_word()
        try:
            if head in ("all", "some"):
                q = QuantifierDef(head, self.k)
            elif head == "ex":
                sc.expect_literal(">=")
                n = sc.take_int()
                sc.expect_literal("[")
                var = self.variable()
                sc.expect_literal("]")
                q = QuantifierDef("ex_ge", self.k, n=n, var_index=var)
            elif head == "dia" and sc.try_literal(">="):
                n = sc.take_int()
                sc.expect_literal("[")
                rel = sc.take_word()
                sc.expect_literal("]")
                q = QuantifierDef("dia_ge", self.k, relation=rel, n=n)
            else:
                sc.expect_literal("[")
                rel = sc.take_word()
                sc.expect_literal("]")
                q = QuantifierDef(head, self.k, relation=rel)
        except QuantifierError as exc:
            raise FormulaParseError(str(exc), at) from exc
        for name, arity in q.sigma.items():
            if name not in self.signature or self.signature.arity(name) != arity:
                raise FormulaParseError(
                    f"quantifier signature not contained: {q.name} needs {name!r} of arity {arity}", at
                )
        return q

    def variable(self) -> int:
        sc = self.sc
        at = sc.pos
        word = sc.take_word()
        if not (word.startswith("x") and word[1:].isdigit()):
            raise FormulaParseError(f"expected a variable such as x1, got {word!r}", at)
        index = int(word[1:])
        if not 1 <= index <= self.k:
            raise FormulaParseError(f"variable x{index} out of range for k={self.k}", at)
        return index

    def atom(self) -> Formula:
        sc = self.sc
        at = sc.pos
        name = sc.take_word()
        if name not in self.signature:
            raise FormulaParseError(f"unknown relation {name!r}", at)
        sc.expect_literal("(")
        variables = [self.variable()]
        while sc.try_literal(","):
            variables.append(self.variable())
        sc.expect_literal(")")
        arity = self.signature.arity(name)
        if len(variables) != arity:
            raise FormulaParseError(
                f"relation {name!r} has arity {arity}, got {len(variables)} argument(s)", at
            )
        return Atom(name, tuple(variables))


def parse_formula(text: str, k: int, signature: Signature) -> Formula:
    """Parse the concrete syntax against a signature and variable budget k."""
    if not isinstance(k, int) or k < 1:
        raise FormulaError(f"k must be a positive integer, got {k!r}")
    return _Parser(text, k, signature).parse()


def parse_formula_lines(text: str, k: int, signature: Signature) -> list[Formula]:
    """Parse a formula file: one formula per line, '#' starts a comment."""
    formulas = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            formulas.append(parse_formula(line, k, signature))
    return formulas


def validate_formula(formula: Formula, k: int, signature: Signature) -> None:
    """Check a programmatically built AST against a signature and k."""
    for node in subformulas(formula):
        if isinstance(node, Atom):
            if node.relation not in signature:
                raise FormulaError(f"unknown relation {node.relation!r}")
            if len(node.variables) != signature.arity(node.relation):
                raise FormulaError(f"relation {node.relation!r}: arity mismatch")
            if any(not 1 <= v <= k for v in node.variables):
                raise FormulaError(f"variable index out of range for k={k}")
        elif isinstance(node, Quant):
            if node.quantifier.k != k:
                raise FormulaError(
                    f"quantifier {node.quantifier.name} built for k={node.quantifier.k}, not {k}"
                )
            for name, arity in node.quantifier.sigma.items():
                if name not in signature or signature.arity(name) != arity:
                    raise FormulaError(f"quantifier signature not contained: {node.quantifier.name}")
