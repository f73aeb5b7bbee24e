"""Grounding: expand a typed program against evidence into a propositional
network of weighted and hard clauses over hidden ground atoms.

Closed-world simplification: groundings whose clause is already satisfied by
the observable evidence are dropped; false observable literals are removed.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from ..errors import CapacityError, TypeCheckError
from .model import (
    Builtin,
    Const,
    Formula,
    Literal,
    MlnProgram,
    Signature,
    SoftFormula,
    Var,
    const_key,
    typecheck_formula,
)

GroundAtom = tuple  # (pred, (arg, ...))

DEFAULT_CLAUSE_BUDGET = 10 ** 6


@dataclass(frozen=True)
class SoftGroundClause:
    lits: tuple[int, ...]  # +i / -i over 1-based atom indices
    weight: float
    formula_id: str
    binding: tuple


@dataclass(frozen=True)
class HardGroundClause:
    lits: tuple[int, ...]
    origin: str  # textual form of the source formula


@dataclass(frozen=True)
class GroundNetwork:
    atoms: tuple[GroundAtom, ...]
    evidence: frozenset
    soft: tuple[SoftGroundClause, ...]
    hard: tuple[HardGroundClause, ...]

    @property
    def atom_index(self) -> dict:
        idx = self.__dict__.get("_atom_index")
        if idx is None:
            idx = {a: i for i, a in enumerate(self.atoms)}
            self.__dict__["_atom_index"] = idx
        return idx

    def reweighted(self, tables: dict[str, dict[tuple, float]]) -> "GroundNetwork":
        """Same structure with soft-clause weights re-resolved from tables."""
        soft = tuple(
            SoftGroundClause(c.lits, tables.get(c.formula_id, {}).get(c.binding, 0.0),
                             c.formula_id, c.binding)
            for c in self.soft
        )
        return GroundNetwork(self.atoms, self.evidence, soft, self.hard)


def clause_true(lits: Iterable[int], assignment) -> bool:
    for lit in lits:
        if (assignment[lit - 1] if lit > 0 else not assignment[-lit - 1]):
            return True
    return False


def objective(net: GroundNetwork, assignment) -> float:
    return sum(c.weight for c in net.soft if clause_true(c.lits, assignment))


def hard_violations(net: GroundNetwork, assignment) -> list[int]:
    return [i for i, c in enumerate(net.hard) if not clause_true(c.lits, assignment)]


def _check_evidence(sig: Signature, evidence) -> tuple[frozenset, Signature]:
    extra: dict[str, set] = {}
    seen = set()
    for atom in evidence:
        pred, args = atom
        if not sig.is_observable(pred):
            raise TypeCheckError(f"evidence atom for non-observable predicate {pred!r}")
        argtypes = sig.pred_types(pred)
        if len(args) != len(argtypes):
            raise TypeCheckError(
                f"evidence atom {pred}{args!r}: expected {len(argtypes)} args"
            )
        for value, typ in zip(args, argtypes):
            declared = sig.type_of_constant(value)
            if declared is None:
                extra.setdefault(typ, set()).add(value)
            elif declared != typ:
                raise TypeCheckError(
                    f"evidence constant {value!r} has type {declared}, expected {typ}"
                )
        seen.add((pred, tuple(args)))
    return frozenset(seen), sig.with_constants(extra)


class _Grounder:
    def __init__(self, sig: Signature, evidence: frozenset, budget: int):
        self.sig = sig
        self.evidence = evidence
        self.budget = budget
        self.count = 0
        # per-predicate tuples, plus per (pred, argpos, value) buckets for joins
        self.by_pred: dict[str, list[tuple]] = {}
        self.pos_index: dict = {}
        for pred, args in sorted(evidence, key=lambda a: (a[0], tuple(map(const_key, a[1])))):
            self.by_pred.setdefault(pred, []).append(args)
            for i, v in enumerate(args):
                self.pos_index.setdefault((pred, i, v), []).append(args)

    def groundings(self, formula: Formula):
        """Yield complete variable bindings for the formula, join-driven by the
        positive observable body literals and pruned by built-ins."""
        var_types = typecheck_formula(formula, self.sig)
        join_lits = [
            item for item in formula.body
            if isinstance(item, Literal) and item.positive
            and self.sig.is_observable(item.atom.pred)
        ]
        builtins = formula.builtins()

        def ready_builtins(binding, pending):
            still = []
            for b in pending:
                vals = []
                for term in (b.lhs, b.rhs):
                    if isinstance(term, Var):
                        if term.name not in binding:
                            vals = None
                            break
                        vals.append(binding[term.name])
                    else:
                        vals.append(term.value)
                if vals is None:
                    still.append(b)
                elif not b.holds(vals[0], vals[1]):
                    return None
            return still

        def extend(i, binding, pending):
            if i == len(join_lits):
                free = [v for v in formula.variables() if v not in binding]
                domains = []
                for v in free:
                    dom = self.sig.constants.get(var_types[v], ())
                    domains.append(dom)
                for combo in product(*domains):
                    full = dict(binding)
                    full.update(zip(free, combo))
                    left = ready_builtins(full, pending)
                    if left is None:
                        continue
                    if left:  # a builtin var escaped binding: formula bug
                        raise TypeCheckError(
                            f"unbound built-in in {formula}: {left[0]}"
                        )
                    self.count += 1
                    if self.count > self.budget:
                        raise CapacityError(
                            f"grounding exceeded budget of {self.budget} clauses"
                        )
                    yield full
                return
            atom = join_lits[i].atom
            # narrow candidates through the first bound argument position
            candidates = None
            for pos, term in enumerate(atom.args):
                value = None
                if isinstance(term, Const):
                    value = term.value
                elif term.name in binding:
                    value = binding[term.name]
                if value is not None:
                    candidates = self.pos_index.get((atom.pred, pos, value), [])
                    break
            if candidates is None:
                candidates = self.by_pred.get(atom.pred, [])
            for args in candidates:
                new = dict(binding)
                ok = True
                for term, value in zip(atom.args, args):
                    if isinstance(term, Const):
                        if term.value != value:
                            ok = False
                            break
                    elif term.name in new:
                        if new[term.name] != value:
                            ok = False
                            break
                    else:
                        new[term.name] = value
                if not ok:
                    continue
                left = ready_builtins(new, pending)
                if left is None:
                    continue
                yield from extend(i + 1, new, left)

        yield from extend(0, {}, list(builtins))

    def clause_from(self, formula: Formula, binding) -> Optional[list]:
        """Build the simplified clause for one grounding; None when satisfied
        by evidence (or tautological)."""
        lits = []
        seen = set()
        for lit in formula.clause_literals():
            pred = lit.atom.pred
            args = tuple(
                binding[t.name] if isinstance(t, Var) else t.value
                for t in lit.atom.args
            )
            if self.sig.is_observable(pred):
                truth = (pred, args) in self.evidence
                if truth == lit.positive:
                    return None  # clause satisfied outright
                continue  # false literal: drop from clause
            key = ((pred, args), lit.positive)
            if (key[0], not lit.positive) in seen:
                return None  # p or !p: tautology
            if key in seen:
                continue
            seen.add(key)
            lits.append(key)
        return lits


def ground(
    program: MlnProgram,
    evidence: Iterable[GroundAtom],
    clause_budget: int = DEFAULT_CLAUSE_BUDGET,
) -> GroundNetwork:
    evidence_set, sig = _check_evidence(program.signature, evidence)
    g = _Grounder(sig, evidence_set, clause_budget)

    soft_raw: list[tuple[list, float, str, tuple]] = []
    hard_raw: list[tuple[list, str]] = []
    for sf in program.soft:
        plus = sf.formula.plus_vars()
        for binding in g.groundings(sf.formula):
            clause = g.clause_from(sf.formula, binding)
            if clause is None:
                continue
            key = tuple(binding[v] for v in plus)
            soft_raw.append((clause, sf.weight_for(key), sf.id, key))
    for f in program.hard:
        origin = str(f)
        for binding in g.groundings(f):
            clause = g.clause_from(f, binding)
            if clause is None:
                continue
            hard_raw.append((clause, origin))

    atom_set = set()
    for clause, *_ in soft_raw:
        atom_set.update(key for key, _pos in clause)
    for clause, _ in hard_raw:
        atom_set.update(key for key, _pos in clause)
    atoms = tuple(sorted(atom_set, key=lambda a: (a[0], tuple(map(const_key, a[1])))))
    index = {a: i for i, a in enumerate(atoms)}

    def encode(clause) -> tuple[int, ...]:
        return tuple(
            (index[key] + 1) if positive else -(index[key] + 1)
            for key, positive in clause
        )

    soft = tuple(
        SoftGroundClause(encode(c), w, fid, key) for c, w, fid, key in soft_raw
    )
    # empty soft clauses can never be satisfied; they contribute nothing
    soft = tuple(c for c in soft if c.lits)
    hard = tuple(HardGroundClause(encode(c), origin) for c, origin in hard_raw)
    return GroundNetwork(atoms, evidence_set, soft, hard)
