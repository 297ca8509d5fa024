"""Abstract SPARQL query representation and deterministic text rendering.

An ``AbstractQuery`` has the parts the generation algorithms manipulate:
query type, result format, graph patterns, sub-queries, filter and group-by,
plus the FROM graphs.  ``render`` turns it into SPARQL 1.1 text with a
sorted prefix block holding only the prefixes the body uses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping, Union

from ..errors import CompileError
from ..qb4olap.namespaces import STANDARD_PREFIXES

SELECT = "SELECT"
CONSTRUCT = "CONSTRUCT"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Iri:
    value: str


@dataclass(frozen=True)
class Lit:
    value: Union[str, int, Decimal, bool]


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # "&&" or "||"
    operands: tuple["Expr", ...]


@dataclass(frozen=True)
class NotExpr:
    operand: "Expr"


@dataclass(frozen=True)
class Cast:
    datatype: Iri
    expr: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Agg:
    func: str
    expr: "Expr"


Term = Union[Var, Iri, Lit]
Expr = Union[Var, Iri, Lit, Cmp, BoolOp, NotExpr, Cast, Call, Agg]


@dataclass(frozen=True)
class Triple:
    s: Term
    p: Term
    o: Term


@dataclass(frozen=True)
class Bind:
    expr: Expr
    var: Var


@dataclass(frozen=True)
class Projection:
    expr: Expr
    var: Var


@dataclass
class AbstractQuery:
    query_type: str
    result_format: list = field(default_factory=list)  # Var/Projection for SELECT, Triple for CONSTRUCT
    gr_patterns: list = field(default_factory=list)  # Triple or Bind
    sub_queries: list["AbstractQuery"] = field(default_factory=list)
    filter: Expr | None = None
    group_by: list[Var] = field(default_factory=list)
    from_graphs: list[Iri] = field(default_factory=list)

    def add_filter(self, expr: Expr) -> None:
        self.filter = expr if self.filter is None else BoolOp("&&", (self.filter, expr))


class VarGen:
    """Fresh variable names, readable when a hint is given."""

    def __init__(self):
        self.counter = 0
        self.used: set[str] = set()

    def new(self, hint: str = "v") -> Var:
        base = re.sub(r"[^A-Za-z0-9_]", "", hint) or "v"
        if base[0].isdigit():
            base = "v" + base
        name, n = base, 1
        while name in self.used:
            n += 1
            name = f"{base}{n}"
        self.used.add(name)
        self.counter += 1
        return Var(name)


def camel(*parts: str) -> str:
    words = [w for p in parts for w in re.split(r"[^A-Za-z0-9]+", p) if w]
    if not words:
        return "v"
    return words[0][0].lower() + words[0][1:] + "".join(w[0].upper() + w[1:] for w in words[1:])


def fold(e: Expr) -> Expr:
    """Simplify boolean operators over constant operands."""
    if isinstance(e, NotExpr):
        inner = fold(e.operand)
        return Lit(not inner.value) if isinstance(inner, Lit) and isinstance(inner.value, bool) else NotExpr(inner)
    if isinstance(e, BoolOp):
        absorbing = e.op == "||"  # true absorbs ||, false absorbs &&
        rest = []
        for x in map(fold, e.operands):
            if isinstance(x, Lit) and isinstance(x.value, bool):
                if x.value == absorbing:
                    return Lit(absorbing)
                continue
            rest.append(x)
        if not rest:
            return Lit(not absorbing)
        return rest[0] if len(rest) == 1 else BoolOp(e.op, tuple(rest))
    return e


# rendering

_PN_LOCAL = re.compile(r"^[A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")


def _escape(s: str) -> str:
    return (s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            .replace("\r", "\\r").replace("\t", "\\t"))


def format_decimal(d: Decimal) -> str:
    text = format(d, "f")
    return text if "." in text else text + ".0"


class _Renderer:
    def __init__(self, prefixes: Mapping[str, str]):
        self.ns = sorted(prefixes.items(), key=lambda x: (-len(x[1]), x[0]))
        self.used: dict[str, str] = {}

    def iri(self, value: str) -> str:
        for p, n in self.ns:
            if value.startswith(n) and _PN_LOCAL.match(value[len(n):]):
                self.used[p] = n
                return f"{p}:{value[len(n):]}"
        return f"<{value}>"

    def term(self, t) -> str:
        if isinstance(t, Var):
            return "?" + t.name
        if isinstance(t, Iri):
            return self.iri(t.value)
        if isinstance(t, Lit):
            v = t.value
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, int):
                return str(v)
            if isinstance(v, Decimal):
                return format_decimal(v)
            if isinstance(v, str):
                return f'"{_escape(v)}"'
        raise CompileError("E_MALFORMED", f"cannot render term {t!r}")

    def expr(self, e, parent: int = 0) -> str:
        if isinstance(e, (Var, Iri, Lit)):
            return self.term(e)
        if isinstance(e, Cmp):
            text = f"{self.expr(e.left, 4)} {e.op} {self.expr(e.right, 4)}"
            return f"({text})" if parent > 3 else text
        if isinstance(e, BoolOp):
            prec = 1 if e.op == "||" else 2
            text = f" {e.op} ".join(self.expr(x, prec + 1) for x in e.operands)
            return f"({text})" if parent > prec else text
        if isinstance(e, NotExpr):
            return f"!({self.expr(e.operand)})"
        if isinstance(e, Cast):
            return f"{self.iri(e.datatype.value)}({self.expr(e.expr)})"
        if isinstance(e, Call):
            return f"{e.name}({', '.join(self.expr(a) for a in e.args)})"
        if isinstance(e, Agg):
            return f"{e.func}({self.expr(e.expr)})"
        raise CompileError("E_MALFORMED", f"cannot render expression {e!r}")

    def triple(self, t: Triple) -> str:
        p = "a" if t.p == Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type") else self.term(t.p)
        return f"{self.term(t.s)} {p} {self.term(t.o)} ."

    def where(self, q: AbstractQuery, pad: str) -> list[str]:
        lines = []
        inner = pad + "  "
        for sq in q.sub_queries:
            lines.append(inner + "{")
            lines += self.select(sq, inner + "  ")
            lines.append(inner + "}")
        for pat in q.gr_patterns:
            if isinstance(pat, Triple):
                lines.append(inner + self.triple(pat))
            elif isinstance(pat, Bind):
                lines.append(f"{inner}BIND ({self.expr(pat.expr)} AS {self.term(pat.var)})")
            else:
                raise CompileError("E_MALFORMED", f"unexpected graph pattern {pat!r}")
        flt = fold(q.filter) if q.filter is not None else None
        if flt == Lit(False):
            # rdflib ignores a FILTER whose whole expression is a constant
            lines.append(f"{inner}FILTER (!(true))")
        elif flt is not None and flt != Lit(True):
            lines.append(f"{inner}FILTER ({self.expr(flt)})")
        return [pad + "WHERE {"] + lines + [pad + "}"]

    def select(self, q: AbstractQuery, pad: str) -> list[str]:
        items = []
        for r in q.result_format:
            if isinstance(r, Var):
                items.append(self.term(r))
            elif isinstance(r, Projection):
                items.append(f"({self.expr(r.expr)} AS {self.term(r.var)})")
            else:
                raise CompileError("E_MALFORMED", f"SELECT cannot project {r!r}")
        lines = [f"{pad}SELECT {' '.join(items)}"]
        lines += [f"{pad}FROM {self.term(g)}" for g in q.from_graphs]
        lines += self.where(q, pad)
        if q.group_by:
            lines.append(f"{pad}GROUP BY {' '.join(self.term(v) for v in q.group_by)}")
        return lines

    def construct(self, q: AbstractQuery) -> list[str]:
        lines = ["CONSTRUCT {"]
        for t in q.result_format:
            if not isinstance(t, Triple):
                raise CompileError("E_MALFORMED", f"CONSTRUCT template holds a non-triple {t!r}")
            lines.append("  " + self.triple(t))
        lines.append("}")
        lines += [f"FROM {self.term(g)}" for g in q.from_graphs]
        lines += self.where(q, "")
        if q.group_by:
            lines.append(f"GROUP BY {' '.join(self.term(v) for v in q.group_by)}")
        return lines


def _vars(x) -> set[str]:
    if isinstance(x, Var):
        return {x.name}
    if isinstance(x, (Triple,)):
        return _vars(x.s) | _vars(x.p) | _vars(x.o)
    if isinstance(x, (Cmp,)):
        return _vars(x.left) | _vars(x.right)
    if isinstance(x, BoolOp):
        return set().union(*(_vars(o) for o in x.operands))
    if isinstance(x, (NotExpr,)):
        return _vars(x.operand)
    if isinstance(x, (Cast, Agg)):
        return _vars(x.expr)
    if isinstance(x, Call):
        return set().union(set(), *(_vars(a) for a in x.args))
    if isinstance(x, (Bind, Projection)):
        return _vars(x.expr) | {x.var.name}
    return set()


def _bound(q: AbstractQuery) -> set[str]:
    """Variables visible in q's WHERE clause."""
    out: set[str] = set()
    for p in q.gr_patterns:
        out |= _vars(p) if isinstance(p, Triple) else {p.var.name}
    for sq in q.sub_queries:
        out |= _projected(sq)
    return out


def _projected(q: AbstractQuery) -> set[str]:
    return {r.name if isinstance(r, Var) else r.var.name for r in q.result_format}


def check(q: AbstractQuery) -> None:
    """Raise E_MALFORMED unless the query meets the structural invariants."""
    if q.query_type not in (SELECT, CONSTRUCT):
        raise CompileError("E_MALFORMED", f"unknown query type {q.query_type!r}")
    bound = _bound(q)
    if q.query_type == CONSTRUCT:
        if not all(isinstance(t, Triple) for t in q.result_format):
            raise CompileError("E_MALFORMED", "CONSTRUCT result format must hold triple templates")
        free = set().union(set(), *(_vars(t) for t in q.result_format)) - bound
    else:
        if not all(isinstance(r, (Var, Projection)) for r in q.result_format):
            raise CompileError("E_MALFORMED", "SELECT result format must hold variables or projections")
        free = {r.name for r in q.result_format if isinstance(r, Var)} - bound
        if q.group_by:
            plain = {r.name for r in q.result_format if isinstance(r, Var)}
            if plain != {v.name for v in q.group_by}:
                raise CompileError("E_MALFORMED", "GROUP BY must list exactly the projected plain variables")
    free |= {v.name for v in q.group_by} - bound
    if free:
        raise CompileError("E_MALFORMED", f"unbound variables: {', '.join(sorted(free))}")
    for sq in q.sub_queries:
        if sq.query_type != SELECT:
            raise CompileError("E_MALFORMED", "sub-queries must be SELECT queries")
        check(sq)


def render(q: AbstractQuery, prefixes: Mapping[str, str] | None = None) -> str:
    """SPARQL 1.1 text for ``q``; deterministic for equal inputs."""
    check(q)
    table = dict(STANDARD_PREFIXES)
    table.update(prefixes or {})
    r = _Renderer(table)
    body = r.construct(q) if q.query_type == CONSTRUCT else r.select(q, "")
    head = [f"PREFIX {p}: <{n}>" for p, n in sorted(r.used.items())]
    return "\n".join(head + ([""] if head else []) + body) + "\n"
