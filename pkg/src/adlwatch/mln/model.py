"""Typed function-free formulas, signatures and weighted programs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import TypeCheckError

# constants are plain ints (time points) or strings; this key makes mixed
# domains sortable deterministically
def const_key(value):
    if isinstance(value, bool):
        return (1, 0, str(value))
    if isinstance(value, int):
        return (0, value, "")
    return (1, 0, str(value))


@dataclass(frozen=True)
class Var:
    name: str
    plus: bool = False

    def __str__(self):
        return ("+" if self.plus else "") + self.name


@dataclass(frozen=True)
class Const:
    value: Union[int, str]

    def __str__(self):
        return str(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]

    def __str__(self):
        return f"{self.pred}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self):
        return ("" if self.positive else "!") + str(self.atom)


BUILTIN_OPS = ("!=", "<=", ">=", "<", ">", "=")


@dataclass(frozen=True)
class Builtin:
    op: str
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} {self.op} {self.rhs}"

    def holds(self, lhs_value, rhs_value) -> bool:
        kl, kr = const_key(lhs_value), const_key(rhs_value)
        if self.op == "=":
            return kl == kr
        if self.op == "!=":
            return kl != kr
        if self.op == "<":
            return kl < kr
        if self.op == "<=":
            return kl <= kr
        if self.op == ">":
            return kl > kr
        if self.op == ">=":
            return kl >= kr
        raise ValueError(self.op)


@dataclass(frozen=True)
class Formula:
    """Implication `body => head`: conjunctive body of literals and built-ins,
    single (possibly negated) head literal. Equivalent to one clause."""

    body: tuple[Union[Literal, Builtin], ...]
    head: Literal

    def literals(self) -> list[Literal]:
        return [item for item in self.body if isinstance(item, Literal)] + [self.head]

    def builtins(self) -> list[Builtin]:
        return [item for item in self.body if isinstance(item, Builtin)]

    def clause_literals(self) -> list[Literal]:
        """The disjunctive-clause view: negated body literals plus the head."""
        out = []
        for item in self.body:
            if isinstance(item, Literal):
                out.append(Literal(item.atom, not item.positive))
        out.append(self.head)
        return out

    def plus_vars(self) -> tuple[str, ...]:
        seen: list[str] = []
        for lit in self.literals():
            for arg in lit.atom.args:
                if isinstance(arg, Var) and arg.plus and arg.name not in seen:
                    seen.append(arg.name)
        return tuple(seen)

    def variables(self) -> list[str]:
        seen: list[str] = []
        for lit in self.literals():
            for arg in lit.atom.args:
                if isinstance(arg, Var) and arg.name not in seen:
                    seen.append(arg.name)
        for b in self.builtins():
            for arg in (b.lhs, b.rhs):
                if isinstance(arg, Var) and arg.name not in seen:
                    seen.append(arg.name)
        return seen

    def __str__(self):
        body = " & ".join(str(x) for x in self.body)
        return f"{body} => {self.head}" if body else str(self.head)


@dataclass(frozen=True)
class SoftFormula:
    id: str
    formula: Formula
    weights: dict[tuple, float] = field(default_factory=dict)

    def weight_for(self, binding: tuple) -> float:
        # unseen plus-bindings default to the zero prior mean
        return self.weights.get(binding, 0.0)

    def validate(self):
        for binding, w in self.weights.items():
            if not math.isfinite(w):
                raise TypeCheckError(f"soft formula {self.id}: non-finite weight for {binding}")


@dataclass(frozen=True)
class Signature:
    observables: dict[str, tuple[str, ...]]
    hiddens: dict[str, tuple[str, ...]]
    constants: dict[str, tuple]

    def __post_init__(self):
        dup = set(self.observables) & set(self.hiddens)
        if dup:
            raise TypeCheckError(f"predicates both observable and hidden: {sorted(dup)}")
        owner: dict = {}
        for typ, values in self.constants.items():
            for v in values:
                if v in owner and owner[v] != typ:
                    raise TypeCheckError(
                        f"constant {v!r} declared in types {owner[v]} and {typ}"
                    )
                owner[v] = typ
        for pred, argtypes in {**self.observables, **self.hiddens}.items():
            for i, t in enumerate(argtypes):
                if t not in self.constants:
                    raise TypeCheckError(f"predicate {pred}: unknown type {t!r} at arg {i}")

    def pred_types(self, pred: str) -> tuple[str, ...]:
        if pred in self.observables:
            return self.observables[pred]
        if pred in self.hiddens:
            return self.hiddens[pred]
        raise TypeCheckError(f"unknown predicate {pred!r}")

    def is_observable(self, pred: str) -> bool:
        return pred in self.observables

    def type_of_constant(self, value) -> Optional[str]:
        for typ, values in self.constants.items():
            if value in values:
                return typ
        return None

    def with_constants(self, extra: dict[str, set]) -> "Signature":
        merged = {}
        for typ in self.constants:
            values = list(self.constants[typ])
            for v in sorted(extra.get(typ, ()), key=const_key):
                if v not in self.constants[typ]:
                    values.append(v)
            merged[typ] = tuple(sorted(values, key=const_key))
        return Signature(self.observables, self.hiddens, merged)


def typecheck_formula(formula: Formula, sig: Signature) -> dict[str, str]:
    """Infer variable types from predicate signatures; raise on conflicts."""
    var_types: dict[str, str] = {}
    for lit in formula.literals():
        atom = lit.atom
        argtypes = sig.pred_types(atom.pred)
        if len(argtypes) != len(atom.args):
            raise TypeCheckError(
                f"predicate {atom.pred} expects {len(argtypes)} args, got {len(atom.args)}"
            )
        for i, (term, typ) in enumerate(zip(atom.args, argtypes)):
            if isinstance(term, Var):
                prev = var_types.get(term.name)
                if prev is not None and prev != typ:
                    raise TypeCheckError(
                        f"variable {term.name} used as {prev} and as {typ} "
                        f"(predicate {atom.pred}, arg {i})"
                    )
                var_types[term.name] = typ
            else:
                declared = sig.type_of_constant(term.value)
                if declared is not None and declared != typ:
                    raise TypeCheckError(
                        f"constant {term.value!r} of type {declared} used where "
                        f"{typ} expected (predicate {atom.pred}, arg {i})"
                    )
    for b in formula.builtins():
        for term in (b.lhs, b.rhs):
            if isinstance(term, Var) and term.name not in var_types:
                raise TypeCheckError(
                    f"built-in variable {term.name} does not occur in any atom"
                )
    return var_types


@dataclass(frozen=True)
class MlnProgram:
    signature: Signature
    soft: tuple[SoftFormula, ...]
    hard: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "soft", tuple(self.soft))
        object.__setattr__(self, "hard", tuple(self.hard))
        for sf in self.soft:
            typecheck_formula(sf.formula, self.signature)
            sf.validate()
        for f in self.hard:
            typecheck_formula(f, self.signature)

    def with_weights(self, tables: dict[str, dict[tuple, float]]) -> "MlnProgram":
        new_soft = tuple(
            SoftFormula(sf.id, sf.formula, dict(tables.get(sf.id, sf.weights)))
            for sf in self.soft
        )
        return MlnProgram(self.signature, new_soft, self.hard)
