"""Parser and serializer for the weighted-formula program DSL.

Sections: `types:`, `predicates:` (observable/hidden), `soft:`, `hard:`,
`weights:` (one `formula-id | plus-binding | value` line per learned entry).
Variables start lowercase, constants start uppercase or are integers or
quoted strings; a `+` prefix marks per-grounding weight expansion.
"""
from __future__ import annotations

import re

from ..errors import ParseError
from .model import (
    Atom,
    Builtin,
    BUILTIN_OPS,
    Const,
    Formula,
    Literal,
    MlnProgram,
    Signature,
    SoftFormula,
    Var,
)

_SECTIONS = ("types", "predicates", "soft", "hard", "weights")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>=>)|(?P<op>!=|<=|>=|<|>|=)|(?P<punct>[(),&!+])"
    r"|(?P<num>-?\d+)|(?P<quoted>'[^']*'|\"[^\"]*\")|(?P<ident>\w+))"
)


class _Tokens:
    def __init__(self, text: str, line: int):
        self.text = text
        self.line = line
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                if text[pos:].strip():
                    raise ParseError(f"unexpected character {text[pos]!r}",
                                     line=line, column=pos + 1)
                break
            for kind in ("arrow", "op", "punct", "num", "quoted", "ident"):
                val = m.group(kind)
                if val is not None:
                    self.items.append((kind, val, m.start(kind) + 1))
                    break
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tkind, tval, col = self.next()
        if tkind != kind or (value is not None and tval != value):
            raise ParseError(
                f"expected {value or kind}, got {tval!r}", line=self.line, column=col
            )
        return tval

    def done(self) -> bool:
        return self.i >= len(self.items)


def _parse_term(toks: _Tokens):
    kind, val, col = toks.next()
    if kind == "punct" and val == "+":
        kind, val, col = toks.next()
        if kind != "ident" or not val[0].islower():
            raise ParseError("'+' must mark a variable", line=toks.line, column=col)
        return Var(val, plus=True)
    if kind == "num":
        return Const(int(val))
    if kind == "quoted":
        return Const(val[1:-1])
    if kind == "ident":
        if val[0].islower():
            return Var(val)
        return Const(val)
    raise ParseError(f"expected term, got {val!r}", line=toks.line, column=col)


def _parse_atom(toks: _Tokens) -> Atom:
    kind, name, col = toks.next()
    if kind != "ident":
        raise ParseError(f"expected predicate name, got {name!r}", line=toks.line, column=col)
    toks.expect("punct", "(")
    args = [_parse_term(toks)]
    while True:
        kind, val, col = toks.peek()
        if kind == "punct" and val == ",":
            toks.next()
            args.append(_parse_term(toks))
        elif kind == "punct" and val == ")":
            toks.next()
            break
        else:
            raise ParseError(f"expected ',' or ')', got {val!r}", line=toks.line, column=col)
    return Atom(name, tuple(args))


def _parse_conjunct(toks: _Tokens):
    kind, val, _ = toks.peek()
    if kind == "punct" and val == "!":
        toks.next()
        return Literal(_parse_atom(toks), positive=False)
    # lookahead: `term op term` builtin vs `pred(...)` literal
    save = toks.i
    try:
        lhs = _parse_term(toks)
        kind, val, _ = toks.peek()
        if kind == "op":
            toks.next()
            rhs = _parse_term(toks)
            if val not in BUILTIN_OPS:
                raise ParseError(f"unknown operator {val!r}", line=toks.line)
            return Builtin(val, lhs, rhs)
    except ParseError:
        pass
    toks.i = save
    return Literal(_parse_atom(toks))


def parse_formula(text: str, line: int = 0) -> Formula:
    toks = _Tokens(text, line)
    items = [_parse_conjunct(toks)]
    while True:
        kind, val, col = toks.peek()
        if kind == "punct" and val == "&":
            toks.next()
            items.append(_parse_conjunct(toks))
        elif kind == "arrow":
            toks.next()
            head = _parse_conjunct(toks)
            if not isinstance(head, Literal):
                raise ParseError("formula head must be a literal", line=line, column=col)
            if not toks.done():
                raise ParseError("trailing tokens after head", line=line,
                                 column=toks.peek()[2])
            return Formula(tuple(items), head)
        elif kind is None:
            if len(items) == 1 and isinstance(items[0], Literal):
                return Formula((), items[0])
            raise ParseError("expected '=>'", line=line, column=col)
        else:
            raise ParseError(f"expected '&' or '=>', got {val!r}", line=line, column=col)


def _parse_weight_binding(text: str, line: int) -> tuple:
    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if re.fullmatch(r"-?\d+", chunk):
            values.append(int(chunk))
        elif chunk[0] in "'\"" and chunk[-1] == chunk[0]:
            values.append(chunk[1:-1])
        else:
            values.append(chunk)
    return tuple(values)


def parse_program(text: str) -> MlnProgram:
    sections: dict[str, list[tuple[int, str]]] = {name: [] for name in _SECTIONS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.match(r"^(\w+):(.*)$", line)
        if m and m.group(1) in _SECTIONS:
            current = m.group(1)
            rest = m.group(2).strip()
            if rest:
                sections[current].append((lineno, rest))
            continue
        if current is None:
            raise ParseError(f"content before any section header: {line!r}", line=lineno)
        sections[current].append((lineno, line))

    constants: dict[str, tuple] = {}
    for lineno, line in sections["types"]:
        name, eq, rest = line.partition("=")
        if not eq:
            raise ParseError("type line must be 'name = c1, c2, ...'", line=lineno)
        values = _parse_weight_binding(rest, lineno)
        constants[name.strip()] = values

    observables: dict[str, tuple[str, ...]] = {}
    hiddens: dict[str, tuple[str, ...]] = {}
    for lineno, line in sections["predicates"]:
        m = re.match(r"^(observable|hidden)\s+(\w+)\s*\(([^)]*)\)$", line)
        if not m:
            raise ParseError("predicate line must be 'observable|hidden name(type,...)'",
                             line=lineno)
        argtypes = tuple(t.strip() for t in m.group(3).split(",") if t.strip())
        target = observables if m.group(1) == "observable" else hiddens
        target[m.group(2)] = argtypes

    soft: list[SoftFormula] = []
    for lineno, line in sections["soft"]:
        m = re.match(r"^(\w+)\s*:\s*(.*)$", line)
        if m:
            fid, body = m.group(1), m.group(2)
        else:
            fid, body = f"s{len(soft) + 1}", line
        soft.append(SoftFormula(fid, parse_formula(body, lineno)))

    hard = tuple(parse_formula(line, lineno) for lineno, line in sections["hard"])

    weights: dict[str, dict[tuple, float]] = {}
    for lineno, line in sections["weights"]:
        parts = line.split("|")
        if len(parts) != 3:
            raise ParseError("weight line must be 'formula-id | binding | value'", line=lineno)
        fid = parts[0].strip()
        binding = _parse_weight_binding(parts[1], lineno)
        try:
            value = float(parts[2].strip())
        except ValueError:
            raise ParseError(f"bad weight value {parts[2].strip()!r}", line=lineno) from None
        weights.setdefault(fid, {})[binding] = value

    soft = [
        SoftFormula(sf.id, sf.formula, weights.get(sf.id, {}))
        for sf in soft
    ]
    unknown = set(weights) - {sf.id for sf in soft}
    if unknown:
        raise ParseError(f"weights for unknown soft formulae: {sorted(unknown)}")

    sig = Signature(observables, hiddens, constants)
    return MlnProgram(sig, tuple(soft), hard)


def _format_const(value) -> str:
    if isinstance(value, int):
        return str(value)
    if re.fullmatch(r"[A-Z]\w*", str(value)):
        return str(value)
    return f"'{value}'"


def serialize_program(program: MlnProgram) -> str:
    lines = ["types:"]
    for typ, values in program.signature.constants.items():
        lines.append(f"  {typ} = {', '.join(_format_const(v) for v in values)}")
    lines.append("predicates:")
    for pred, argtypes in program.signature.observables.items():
        lines.append(f"  observable {pred}({', '.join(argtypes)})")
    for pred, argtypes in program.signature.hiddens.items():
        lines.append(f"  hidden {pred}({', '.join(argtypes)})")
    lines.append("soft:")
    for sf in program.soft:
        lines.append(f"  {sf.id}: {sf.formula}")
    lines.append("hard:")
    for f in program.hard:
        lines.append(f"  {f}")
    weight_lines = []
    for sf in program.soft:
        for binding in sorted(sf.weights, key=lambda b: tuple(map(str, b))):
            bind = ", ".join(_format_const(v) for v in binding)
            weight_lines.append(f"  {sf.id} | {bind} | {sf.weights[binding]!r}")
    if weight_lines:
        lines.append("weights:")
        lines.extend(weight_lines)
    return "\n".join(lines) + "\n"
