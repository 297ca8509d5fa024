"""Turtle reading (via rdflib) and deterministic Turtle writing.

The writer produces byte-identical output for isomorphic graphs: prefixes
and subjects are sorted, blank nodes get labels derived from their content,
and a blank node used exactly once as an object is written inline as
``[ ... ]``.
"""

from __future__ import annotations

import hashlib
import re
from collections import defaultdict
from typing import Mapping

from rdflib import RDF, XSD, BNode, Graph, Literal, URIRef
from rdflib.plugins.parsers.notation3 import BadSyntax

from ..errors import MappingError
from .namespaces import STANDARD_PREFIXES

_PN_LOCAL = re.compile(r"^([A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")
_PN_PREFIX = re.compile(r"^([A-Za-z]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")
_DECIMAL = re.compile(r"^[+-]?\d*\.\d+$")


def parse_turtle(text: str, base: str | None = None) -> Graph:
    g = Graph(bind_namespaces="none")
    try:
        g.parse(data=text, format="turtle", publicID=base)
    except BadSyntax as exc:
        raise MappingError("E_TURTLE", f"line {exc.lines + 1}: {exc.message}") from None
    except Exception as exc:  # rdflib raises assorted types for bad input
        raise MappingError("E_TURTLE", str(exc)) from None
    return g


def _escape(s: str) -> str:
    return (s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            .replace("\r", "\\r").replace("\t", "\\t"))


class _Writer:
    def __init__(self, g: Graph, prefixes: Mapping[str, str]):
        self.g = g
        # longest namespace first so the most specific prefix wins
        self.ns = sorted(((p, n) for p, n in prefixes.items() if _PN_PREFIX.match(p)),
                         key=lambda x: (-len(x[1]), x[0]))
        self.used: set[str] = set()
        self.labels = self._canonical_labels()

    # blank-node canonicalisation

    def _canonical_labels(self) -> dict[BNode, str]:
        bnodes = {t for t in self.g.subjects() if isinstance(t, BNode)}
        bnodes |= {t for t in self.g.objects() if isinstance(t, BNode)}
        sig: dict[BNode, str] = {}

        def signature(b: BNode, stack: frozenset) -> str:
            if b in sig:
                return sig[b]
            if b in stack:
                return "cycle"
            parts = []
            for p, o in self.g.predicate_objects(b):
                o_text = signature(o, stack | {b}) if isinstance(o, BNode) else o.n3()
                parts.append(f"{p.n3()} {o_text}")
            for s, p in self.g.subject_predicates(b):
                s_text = "[]" if isinstance(s, BNode) else s.n3()
                parts.append(f"^{p.n3()} {s_text}")
            out = hashlib.sha1("\n".join(sorted(parts)).encode("utf-8")).hexdigest()[:12]
            sig[b] = out
            return out

        for b in bnodes:
            signature(b, frozenset())
        labels: dict[BNode, str] = {}
        seen: dict[str, int] = defaultdict(int)
        for b in sorted(bnodes, key=lambda x: sig[x]):
            n = seen[sig[b]]
            seen[sig[b]] += 1
            labels[b] = f"b{sig[b]}" + (f"_{n}" if n else "")
        return labels

    # terms

    def iri(self, u: URIRef) -> str:
        s = str(u)
        if u == RDF.type:
            return "a"
        for prefix, ns in self.ns:
            if s.startswith(ns) and _PN_LOCAL.match(s[len(ns):]):
                self.used.add(prefix)
                return f"{prefix}:{s[len(ns):]}"
        return f"<{s}>"

    def literal(self, lit: Literal) -> str:
        lex = str(lit)
        if lit.language:
            return f'"{_escape(lex)}"@{lit.language}'
        dt = lit.datatype
        if dt == XSD.integer and _INTEGER.match(lex):
            return lex
        if dt == XSD.decimal and _DECIMAL.match(lex):
            return lex
        if dt == XSD.boolean and lex in ("true", "false"):
            return lex
        if dt is None or dt == XSD.string:
            return f'"{_escape(lex)}"'
        return f'"{_escape(lex)}"^^{self.iri(dt)}'

    def term(self, t, inline: set, indent: int) -> str:
        if isinstance(t, URIRef):
            return self.iri(t)
        if isinstance(t, Literal):
            return self.literal(t)
        if t in inline:
            return self.block(t, inline, indent + 1, nested=True)
        return "_:" + self.labels[t]

    def block(self, s, inline: set, indent: int, nested: bool = False) -> str:
        pad = "    " * indent
        groups: dict = defaultdict(list)
        for p, o in self.g.predicate_objects(s):
            groups[p].append(o)
        preds = sorted(groups, key=lambda p: (p != RDF.type, str(p)))
        lines = []
        for p in preds:
            objs = sorted(self.term(o, inline, indent) for o in groups[p])
            lines.append(f"{self.iri(p)} {', '.join(objs)}")
        if nested:
            if not lines:
                return "[]"
            body = f" ;\n{pad}".join(lines)
            return f"[\n{pad}{body}\n{'    ' * (indent - 1)}]"
        return f" ;\n{pad}".join(lines)

    def write(self) -> str:
        refs: dict[BNode, int] = defaultdict(int)
        for o in self.g.objects():
            if isinstance(o, BNode):
                refs[o] += 1
        inline = {b for b, n in refs.items() if n == 1}
        subjects = set(self.g.subjects())
        while True:
            top = [s for s in subjects if not (isinstance(s, BNode) and s in inline)]
            reached, stack = set(), list(top)
            while stack:
                for o in self.g.objects(stack.pop()):
                    if o in inline and o not in reached:
                        reached.add(o)
                        stack.append(o)
            stranded = {b for b in inline if b in subjects and b not in reached}
            if not stranded:
                break
            # blank-node cycles: promote one member to a labelled subject
            inline.discard(min(stranded, key=lambda b: self.labels[b]))
        iris = sorted((s for s in top if isinstance(s, URIRef)), key=str)
        blanks = sorted((s for s in top if isinstance(s, BNode)), key=lambda b: self.labels[b])
        chunks = []
        for s in iris + blanks:
            head = self.iri(s) if isinstance(s, URIRef) else "_:" + self.labels[s]
            chunks.append(f"{head}\n    {self.block(s, inline, 1)} .\n")
        header = "".join(f"@prefix {p}: <{n}> .\n" for p, n in sorted(self.ns) if p in self.used)
        return header + ("\n" if header and chunks else "") + "\n".join(chunks)


def serialize_turtle(g: Graph, prefixes: Mapping[str, str] | None = None) -> str:
    """Deterministic Turtle text for ``g``.

    Prefixes come from ``prefixes`` (default: the standard vocabularies) plus
    any bound in ``g``; only those actually used are written.
    """
    table = dict(STANDARD_PREFIXES)
    for p, n in g.namespaces():
        if p and p not in table:
            table[p] = str(n)
    table.update(prefixes or {})
    return _Writer(g, table).write()
