"""Averaged structured-perceptron weight learning.

Per training day: MAP-decode with the current weights, then move each
plus-binding weight by rate * (gold count - predicted count) with L2
shrinkage toward 0. Weights are averaged across all steps; unseen bindings
keep the 0 prior mean. Hard formulae are never touched.
"""
from __future__ import annotations

from typing import Optional, Sequence

from ..errors import LabelInconsistencyError
from .grounding import GroundNetwork, clause_true, ground, objective
from .model import MlnProgram
from .solve import DEFAULT_EXACT_CAP, SearchParams, solve_auto


def gold_assignment(net: GroundNetwork, true_atoms) -> tuple[bool, ...]:
    true_set = {(p, tuple(a)) for p, a in true_atoms}
    return tuple(atom in true_set for atom in net.atoms)


def check_labels(net: GroundNetwork, assignment) -> None:
    for c in net.hard:
        if not clause_true(c.lits, assignment):
            raise LabelInconsistencyError(
                f"training labels violate hard formula: {c.origin}"
            )


def learn_weights(
    program: MlnProgram,
    training: Sequence[tuple],
    epochs: int = 10,
    rate: float = 0.1,
    l2: float = 0.01,
    seed: int = 0,
    params: SearchParams = SearchParams(),
    exact_cap: int = DEFAULT_EXACT_CAP,
    networks: Optional[Sequence[GroundNetwork]] = None,
    history: Optional[list] = None,
) -> MlnProgram:
    """Return a copy of the program with learned weight tables.

    training entries are (evidence atoms, true hidden atoms); labels must be
    complete per day. Pass pre-grounded `networks` (aligned with training) to
    skip re-grounding.
    """
    if not program.soft:
        return program
    if networks is None:
        networks = [ground(program, evidence) for evidence, _true in training]
    golds = [gold_assignment(net, true) for net, (_ev, true) in zip(networks, training)]
    for net, g in zip(networks, golds):
        check_labels(net, g)

    # per-day soft clauses grouped by weight-table key, with gold counts fixed
    day_keys: list[list[tuple[tuple, tuple[int, ...]]]] = []
    gold_counts: list[dict[tuple, int]] = []
    for net, g in zip(networks, golds):
        keyed = [((c.formula_id, c.binding), c.lits) for c in net.soft]
        day_keys.append(keyed)
        counts: dict[tuple, int] = {}
        for key, lits in keyed:
            if clause_true(lits, g):
                counts[key] = counts.get(key, 0) + 1
        gold_counts.append(counts)

    weights: dict[tuple, float] = {}
    for sf in program.soft:
        for binding, w in sf.weights.items():
            weights[(sf.id, binding)] = w
    totals: dict[tuple, float] = {}
    tstamp: dict[tuple, int] = {}
    step = 0

    def bump(key, delta):
        nonlocal step
        w = weights.get(key, 0.0)
        totals[key] = totals.get(key, 0.0) + (step - tstamp.get(key, 0)) * w
        tstamp[key] = step
        weights[key] = w * (1.0 - l2) + delta

    def tables() -> dict[str, dict[tuple, float]]:
        out: dict[str, dict[tuple, float]] = {sf.id: {} for sf in program.soft}
        for (fid, binding), w in weights.items():
            out[fid][binding] = w
        return out

    n_days = len(networks)
    for epoch in range(epochs):
        changed = False
        epoch_gold_obj = 0.0
        for d, net in enumerate(networks):
            step += 1
            current = net.reweighted(tables())
            epoch_gold_obj += objective(current, golds[d])
            pred = solve_auto(
                current, seed=seed + epoch * n_days + d, params=params,
                exact_cap=exact_cap,
            )
            pred_counts: dict[tuple, int] = {}
            for key, lits in day_keys[d]:
                if clause_true(lits, pred.assignment):
                    pred_counts[key] = pred_counts.get(key, 0) + 1
            keys = set(gold_counts[d]) | set(pred_counts)
            for key in keys:
                diff = gold_counts[d].get(key, 0) - pred_counts.get(key, 0)
                if diff:
                    bump(key, rate * diff)
                    changed = True
        if history is not None:
            history.append(epoch_gold_obj)
        if not changed:
            break

    averaged: dict[str, dict[tuple, float]] = {sf.id: dict(sf.weights) for sf in program.soft}
    if step:
        for key, w in weights.items():
            total = totals.get(key, 0.0) + (step - tstamp.get(key, 0)) * w
            averaged[key[0]][key[1]] = total / step
    return program.with_weights(averaged)
