"""Tokenizer and recursive-descent parser for ``.olap`` algebra programs.

Grammar (keywords are case-insensitive)::

    program    := { statement (NEWLINE | ';') }
    statement  := IDENT '=' op '(' IDENT ',' args ')'
    args       := roleref ',' IDENT          -- ROLLUP, DRILLDOWN
                | name                       -- SLICE (role or measure)
                | condition                  -- DICE
    roleref    := IDENT [ '.' IDENT ]        -- role[.hierarchy]
    condition  := conj { OR conj }
    conj       := neg { AND neg }
    neg        := NOT neg | '(' condition ')' | TRUE | comparison
    comparison := operand CMP operand [ CMP operand ]
    operand    := path | STRING | NUMBER
    path       := name { '.' name }

A ``#`` starts a comment to end of line, except inside parentheses where
``#name`` is a measure reference.  Newlines inside parentheses are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from ..errors import AlgebraError
from .ast import DICE, DRILLDOWN, OPERATORS, ROLLUP, SLICE, Program, Statement
from .conditions import FLIP, And, Comparison, Condition, Not, Or, TrueCondition

_CMP_ALIASES = {"=": "=", "==": "=", "!=": "!=", "<>": "!=", "≠": "!=", "<": "<", "<=": "<=", "≤": "<=",
                ">": ">", ">=": ">=", "≥": ">="}
_WORD_OPS = {"AND": "AND", "OR": "OR", "NOT": "NOT", "&&": "AND", "||": "OR", "!": "NOT",
             "∧": "AND", "∨": "OR", "¬": "NOT"}
_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT = re.compile(r"#?[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")
_PUNCT = sorted(list(_CMP_ALIASES) + ["&&", "||", "!", "∧", "∨", "¬", "(", ")", ",", ".", ";"],
                key=len, reverse=True)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT STRING NUMBER CMP BOOL PUNCT NEWLINE EOF
    value: object
    line: int
    col: int


def _syntax(msg: str, line: int, col: int) -> AlgebraError:
    return AlgebraError("E_SYNTAX", msg, line, col)


def tokenize(text: str, depth: int = 0) -> list[Token]:
    """Split ``text`` into tokens; ``depth`` is the initial parenthesis depth."""
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            if depth == 0:
                toks.append(Token("NEWLINE", "\n", line, col))
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            nxt = text[i + 1] if i + 1 < n else ""
            if depth == 0 or not _IDENT_START.match(nxt):
                while i < n and text[i] != "\n":
                    i += 1
                continue
        start_col = col
        if ch == '"':
            j, buf = i + 1, []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise _syntax("unterminated string literal", line, start_col)
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                    buf.append({"n": "\n", "t": "\t"}.get(text[j], text[j]))
                else:
                    buf.append(text[j])
                j += 1
            if j >= n:
                raise _syntax("unterminated string literal", line, start_col)
            toks.append(Token("STRING", "".join(buf), line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m and (ch != "-" or not toks or toks[-1].kind in ("CMP", "BOOL", "PUNCT")):
            raw = m.group(0)
            value = Decimal(raw) if any(c in raw for c in ".eE") else int(raw)
            toks.append(Token("NUMBER", value, line, start_col))
            i, col = m.end(), col + len(raw)
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            kind = "BOOL" if word.upper() in ("AND", "OR", "NOT") else "IDENT"
            toks.append(Token(kind, word.upper() if kind == "BOOL" else word, line, start_col))
            i, col = m.end(), col + len(word)
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                if p in _CMP_ALIASES:
                    toks.append(Token("CMP", _CMP_ALIASES[p], line, start_col))
                elif p in _WORD_OPS:
                    toks.append(Token("BOOL", _WORD_OPS[p], line, start_col))
                else:
                    if p == "(":
                        depth += 1
                    elif p == ")":
                        depth = max(0, depth - 1)
                    toks.append(Token("PUNCT", p, line, start_col))
                i, col = i + len(p), col + len(p)
                break
        else:
            raise _syntax(f"unexpected character {ch!r}", line, start_col)
    toks.append(Token("EOF", None, line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str) -> AlgebraError:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.value)
        return _syntax(f"{msg}, found {found}", t.line, t.col)

    def expect_punct(self, p: str) -> Token:
        if self.tok.kind != "PUNCT" or self.tok.value != p:
            raise self.error(f"expected {p!r}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "IDENT":
            raise self.error(f"expected {what}")
        return self.advance().value

    def at_punct(self, p: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.value == p

    # statements

    def program(self) -> Program:
        stmts = []
        while True:
            while self.tok.kind == "NEWLINE" or self.at_punct(";"):
                self.advance()
            if self.tok.kind == "EOF":
                break
            stmts.append(self.statement())
            if self.tok.kind not in ("NEWLINE", "EOF") and not self.at_punct(";"):
                raise self.error("expected end of statement")
        return Program(tuple(stmts))

    def statement(self) -> Statement:
        start = self.tok
        name = self.expect_ident("binding name")
        if self.tok.kind != "CMP" or self.tok.value != "=":
            raise self.error("expected '='")
        self.advance()
        op_tok = self.tok
        op = self.expect_ident("operator").upper()
        if op not in OPERATORS:
            raise _syntax(f"unknown operator {op_tok.value!r}", op_tok.line, op_tok.col)
        self.expect_punct("(")
        source = self.expect_ident("source cube or binding")
        self.expect_punct(",")
        pos = (start.line, start.col)
        if op in (ROLLUP, DRILLDOWN):
            role = self.expect_ident("dimension role")
            hierarchy = None
            if self.at_punct("."):
                self.advance()
                hierarchy = self.expect_ident("hierarchy")
            self.expect_punct(",")
            level = self.expect_ident("level")
            st = Statement(name, op, source, role=role, hierarchy=hierarchy, level=level, pos=pos)
        elif op == SLICE:
            st = Statement(name, op, source, target=self.expect_ident("dimension role or measure"), pos=pos)
        else:
            st = Statement(name, DICE, source, condition=self.condition(), pos=pos)
        self.expect_punct(")")
        return st

    # conditions

    def condition(self) -> Condition:
        left = self.conjunction()
        while self.tok.kind == "BOOL" and self.tok.value == "OR":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Condition:
        left = self.negation()
        while self.tok.kind == "BOOL" and self.tok.value == "AND":
            self.advance()
            left = And(left, self.negation())
        return left

    def negation(self) -> Condition:
        if self.tok.kind == "BOOL" and self.tok.value == "NOT":
            self.advance()
            return Not(self.negation())
        if self.at_punct("("):
            self.advance()
            inner = self.condition()
            self.expect_punct(")")
            return inner
        if self.tok.kind == "IDENT" and self.tok.value.upper() == "TRUE" and not self._next_is_cmp_or_dot():
            self.advance()
            return TrueCondition()
        return self.comparison()

    def _next_is_cmp_or_dot(self) -> bool:
        nxt = self.toks[self.i + 1]
        return nxt.kind == "CMP" or (nxt.kind == "PUNCT" and nxt.value == ".")

    def operand(self):
        t = self.tok
        if t.kind in ("STRING", "NUMBER"):
            self.advance()
            return ("lit", t.value, t)
        if t.kind == "IDENT":
            parts = [self.advance().value]
            while self.at_punct("."):
                self.advance()
                parts.append(self.expect_ident("path segment"))
            return ("path", tuple(parts), t)
        raise self.error("expected attribute path, measure or literal")

    def comparison(self) -> Condition:
        first = self.operand()
        if self.tok.kind != "CMP":
            raise self.error("expected comparison operator")
        op1 = self.advance().value
        second = self.operand()
        if self.tok.kind == "CMP":
            op2_tok = self.advance()
            third = self.operand()
            if first[0] != "lit" or second[0] != "path" or third[0] != "lit":
                raise _syntax("range comparison must read literal op path op literal", op2_tok.line, op2_tok.col)
            lo = _make(second, FLIP[op1], first)
            hi = _make(second, op2_tok.value, third)
            return And(lo, hi)
        if first[0] == "path" and second[0] == "lit":
            return _make(first, op1, second)
        if first[0] == "lit" and second[0] == "path":
            return _make(second, FLIP[op1], first)
        t = first[2]
        raise _syntax("comparison needs one path and one literal", t.line, t.col)


def _make(path, op, lit) -> Comparison:
    t = path[2]
    return Comparison(path[1], op, lit[1], pos=(t.line, t.col))


def parse_program(text: str) -> Program:
    return _Parser(tokenize(text)).program()


def parse_condition(text: str) -> Condition:
    # start at depth 1 so '#name' reads as a measure reference
    p = _Parser(tokenize(text, depth=1))
    cond = p.condition()
    if p.tok.kind != "EOF":
        raise p.error("unexpected trailing input")
    return cond
