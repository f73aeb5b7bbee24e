"""MAP solvers over ground networks.

map_exact: depth-first branch and bound with unit propagation on hard clauses
and an admissible optimistic bound; ties broken toward the lexicographically
smallest assignment (False < True) in atom-index order.

map_search: MaxWalkSAT-style local search with hard clauses at infinite
weight; deterministic for a fixed seed. Weights may be negative: a satisfied
negative-weight clause counts as a violation of magnitude |w|.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ..errors import CapacityError, InfeasibleError, SearchFailureError
from .grounding import GroundNetwork, clause_true, objective

DEFAULT_EXACT_CAP = 24


@dataclass(frozen=True)
class MapState:
    assignment: tuple[bool, ...]
    objective: float

    def true_atoms(self, net: GroundNetwork) -> list:
        return [a for a, v in zip(net.atoms, self.assignment) if v]


@dataclass(frozen=True)
class SearchParams:
    max_flips: int = 100_000
    restarts: int = 10
    noise: float = 0.1
    init_all_false_first: bool = True
    plateau: Optional[int] = None  # stop a restart after this many stale flips


def _check_empty_hard(net: GroundNetwork):
    for c in net.hard:
        if not c.lits:
            raise InfeasibleError(
                f"hard clause is unsatisfiable after evidence simplification: {c.origin}",
                clause=c,
            )


def map_exact(net: GroundNetwork, cap: int = DEFAULT_EXACT_CAP) -> MapState:
    n = len(net.atoms)
    if n > cap:
        raise CapacityError(f"{n} hidden atoms exceed the exact-solver cap of {cap}")
    _check_empty_hard(net)
    if n == 0:
        return MapState((), 0.0)

    clauses = [(c.lits, c.weight) for c in net.soft] + [(c.lits, None) for c in net.hard]
    n_hard_start = len(net.soft)
    occ: list[list[tuple[int, bool]]] = [[] for _ in range(n)]
    for ci, (lits, _w) in enumerate(clauses):
        for lit in lits:
            occ[abs(lit) - 1].append((ci, lit > 0))

    tc = [0] * len(clauses)            # true literal count
    ua = [len(lits) for lits, _ in clauses]  # unassigned literal count
    value: list[Optional[bool]] = [None] * n
    sat_weight = 0.0
    potential = sum(max(w, 0.0) for _, w in clauses[:n_hard_start])

    best_obj = float("-inf")
    best_assign: Optional[tuple] = None
    conflict_origin: Optional[str] = None

    def assign(a: int, v: bool):
        nonlocal sat_weight, potential, conflict_origin
        value[a] = v
        conflict = False
        units = []
        for ci, pos in occ[a]:
            lits, w = clauses[ci]
            ua[ci] -= 1
            if pos == v:
                tc[ci] += 1
                if tc[ci] == 1 and w is not None:
                    sat_weight += w
                    potential -= max(w, 0.0)
            else:
                if tc[ci] == 0 and ua[ci] == 0:
                    if w is None:
                        conflict = True
                        conflict_origin = net.hard[ci - n_hard_start].origin
                    else:
                        potential -= max(w, 0.0)
                elif tc[ci] == 0 and ua[ci] == 1 and w is None:
                    units.append(ci)
        return conflict, units

    def unassign(a: int):
        nonlocal sat_weight, potential
        v = value[a]
        value[a] = None
        for ci, pos in occ[a]:
            lits, w = clauses[ci]
            if pos == v:
                if tc[ci] == 1 and w is not None:
                    sat_weight -= w
                    potential += max(w, 0.0)
                tc[ci] -= 1
            else:
                if tc[ci] == 0 and ua[ci] == 0 and w is not None:
                    potential += max(w, 0.0)
            ua[ci] += 1

    def propagate(a: int, v: bool, trail: list) -> bool:
        queue = [(a, v)]
        while queue:
            atom, val = queue.pop()
            if value[atom] is not None:
                if value[atom] != val:
                    return False
                continue
            conflict, units = assign(atom, val)
            trail.append(atom)
            if conflict:
                return False
            for ci in units:
                if tc[ci] == 0 and ua[ci] == 1:
                    for lit in clauses[ci][0]:
                        idx = abs(lit) - 1
                        if value[idx] is None:
                            queue.append((idx, lit > 0))
                            break
        return True

    def dfs():
        nonlocal best_obj, best_assign
        var = next((i for i in range(n) if value[i] is None), None)
        if var is None:
            if sat_weight > best_obj:
                best_obj = sat_weight
                best_assign = tuple(bool(v) for v in value)
            return
        for v in (False, True):
            trail: list[int] = []
            if propagate(var, v, trail) and sat_weight + potential > best_obj:
                dfs()
            for atom in reversed(trail):
                unassign(atom)

    dfs()
    if best_assign is None:
        raise InfeasibleError(
            "no assignment satisfies the hard clauses"
            + (f"; e.g. {conflict_origin}" if conflict_origin else ""),
        )
    return MapState(best_assign, best_obj)


class _PickList:
    """Constant-time add/remove/random-choice over distinct ints."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items: list[int] = []
        self.pos: dict[int, int] = {}

    def add(self, x: int):
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def remove(self, x: int):
        i = self.pos.pop(x, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def __len__(self):
        return len(self.items)

    def choose(self, rng: random.Random) -> int:
        return self.items[rng.randrange(len(self.items))]


def map_search(
    net: GroundNetwork,
    seed: int = 0,
    params: SearchParams = SearchParams(),
) -> MapState:
    _check_empty_hard(net)
    n = len(net.atoms)
    if n == 0:
        return MapState((), 0.0)
    rng = random.Random(seed)

    lits_list = [c.lits for c in net.soft] + [c.lits for c in net.hard]
    weights: list[Optional[float]] = [c.weight for c in net.soft] + [None] * len(net.hard)
    nclauses = len(lits_list)
    occ_pos: list[list[int]] = [[] for _ in range(n)]
    occ_neg: list[list[int]] = [[] for _ in range(n)]
    for ci, lits in enumerate(lits_list):
        for lit in lits:
            (occ_pos if lit > 0 else occ_neg)[abs(lit) - 1].append(ci)

    big = sum(abs(w) for w in weights if w) + 1.0

    best_assign: Optional[list[bool]] = None
    best_v = float("inf")

    for restart in range(params.restarts):
        if restart == 0 and params.init_all_false_first:
            assign = [False] * n
        else:
            assign = [rng.random() < 0.5 for _ in range(n)]
        tc = [0] * nclauses
        for ci, lits in enumerate(lits_list):
            tc[ci] = sum(
                1 for lit in lits
                if (assign[lit - 1] if lit > 0 else not assign[-lit - 1])
            )
        hard_unsat = _PickList()
        soft_viol = _PickList()
        v_cost = 0.0
        for ci, lits in enumerate(lits_list):
            w = weights[ci]
            if w is None:
                if tc[ci] == 0:
                    hard_unsat.add(ci)
            elif w > 0 and tc[ci] == 0:
                soft_viol.add(ci)
                v_cost += w
            elif w < 0 and tc[ci] > 0:
                soft_viol.add(ci)
                v_cost -= w

        def on_sat(ci):
            nonlocal v_cost
            w = weights[ci]
            if w is None:
                hard_unsat.remove(ci)
            elif w > 0:
                soft_viol.remove(ci)
                v_cost -= w
            elif w < 0:
                soft_viol.add(ci)
                v_cost -= w

        def on_unsat(ci):
            nonlocal v_cost
            w = weights[ci]
            if w is None:
                hard_unsat.add(ci)
            elif w > 0:
                soft_viol.add(ci)
                v_cost += w
            elif w < 0:
                soft_viol.remove(ci)
                v_cost += w

        def flip(a: int):
            if assign[a]:
                assign[a] = False
                gains, losses = occ_neg[a], occ_pos[a]
            else:
                assign[a] = True
                gains, losses = occ_pos[a], occ_neg[a]
            for ci in losses:
                tc[ci] -= 1
                if tc[ci] == 0:
                    on_unsat(ci)
            for ci in gains:
                tc[ci] += 1
                if tc[ci] == 1:
                    on_sat(ci)

        def delta(a: int) -> float:
            # cost change of flipping atom a (positive is worse)
            if assign[a]:
                gains, losses = occ_neg[a], occ_pos[a]
            else:
                gains, losses = occ_pos[a], occ_neg[a]
            d = 0.0
            for ci in losses:
                if tc[ci] == 1:
                    w = weights[ci]
                    d += big if w is None else w
            for ci in gains:
                if tc[ci] == 0:
                    w = weights[ci]
                    d -= big if w is None else w
            return d

        stale = 0
        if not hard_unsat and v_cost < best_v:
            best_v = v_cost
            best_assign = list(assign)
            if v_cost == 0.0:
                break
        for _flip_no in range(params.max_flips):
            if hard_unsat:
                ci = hard_unsat.choose(rng)
            elif soft_viol:
                ci = soft_viol.choose(rng)
            else:
                break
            lits = lits_list[ci]
            if rng.random() < params.noise:
                atom = abs(lits[rng.randrange(len(lits))]) - 1
            else:
                atom = min(
                    (abs(lit) - 1 for lit in lits),
                    key=lambda a: (delta(a), a),
                )
            flip(atom)
            if not hard_unsat and v_cost < best_v:
                best_v = v_cost
                best_assign = list(assign)
                stale = 0
                if v_cost == 0.0:
                    break
            else:
                stale += 1
                if params.plateau is not None and stale > params.plateau:
                    break
        if best_v == 0.0:
            break

    if best_assign is None:
        raise SearchFailureError(
            f"no hard-feasible state found in {params.restarts} restarts "
            f"x {params.max_flips} flips"
        )
    final = tuple(best_assign)
    return MapState(final, objective(net, final))


def _components(net: GroundNetwork) -> list[list[int]]:
    parent = list(range(len(net.atoms)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for c in list(net.soft) + list(net.hard):
        lits = c.lits
        for lit in lits[1:]:
            union(abs(lits[0]) - 1, abs(lit) - 1)
    groups: dict[int, list[int]] = {}
    for i in range(len(net.atoms)):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _subnetwork(net: GroundNetwork, members: list[int]) -> GroundNetwork:
    remap = {old: new for new, old in enumerate(members)}
    member_set = set(members)

    def encode(lits):
        return tuple(
            (remap[abs(lit) - 1] + 1) * (1 if lit > 0 else -1) for lit in lits
        )

    soft = tuple(
        type(c)(encode(c.lits), c.weight, c.formula_id, c.binding)
        for c in net.soft
        if c.lits and abs(c.lits[0]) - 1 in member_set
    )
    hard = tuple(
        type(c)(encode(c.lits), c.origin)
        for c in net.hard
        if c.lits and abs(c.lits[0]) - 1 in member_set
    )
    atoms = tuple(net.atoms[i] for i in members)
    return GroundNetwork(atoms, net.evidence, soft, hard)


def solve_auto(
    net: GroundNetwork,
    seed: int = 0,
    params: SearchParams = SearchParams(),
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> MapState:
    """MAP via connected-component decomposition: exact solving for small
    components, seeded local search for large ones."""
    _check_empty_hard(net)
    n = len(net.atoms)
    if n == 0:
        return MapState((), 0.0)
    comps = _components(net)
    assignment = [False] * n
    total = 0.0
    for k, members in enumerate(comps):
        sub = _subnetwork(net, members)
        if len(members) <= exact_cap:
            state = map_exact(sub, cap=exact_cap)
        else:
            state = map_search(sub, seed=seed + k, params=params)
        total += state.objective
        for local, atom_idx in enumerate(members):
            assignment[atom_idx] = state.assignment[local]
    return MapState(tuple(assignment), total)
