"""Nucleus computation and structural predicates of contracting groups.

The nucleus is the smallest finite set of elements absorbing all deep
sections: starting from the section closure of the generators, their
inverses and the identity, every pairwise product is followed down the
tree; section states that recur at arbitrarily large depth (they lie on or
hang off a cycle of the section graph) are adjoined, and the loop runs to
a fixed point.  Exhausting the state or depth budget yields a bounded
"not contracting within budget" verdict, never a theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from itertools import product

from .ssgroup import BudgetExceeded, GenWord, GroupDef, Perm
from .words import Word


@dataclass(frozen=True)
class Budget:
    max_states: int = 5_000
    max_depth: int = 64


class NotContractingError(Exception):
    """The closure did not stabilize within the budget."""

    def __init__(self, budget: Budget, detail: str = ""):
        self.budget = budget
        msg = f"not contracting within budget {budget}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class Nucleus:
    """Canonical machine states closed under sections and inverses.

    States are indexed 0..size-1 in order of (representative length,
    representative string); per-state data: level-one permutation, section
    table, inverse table, shortest known representative word.
    """

    def __init__(self, group: GroupDef, state_ids):
        machine = group.machine
        order = sorted(state_ids, key=lambda s: (len(machine.reps[s]), str(machine.reps[s])))
        self.group = group
        self.ids = tuple(order)
        index = {sid: i for i, sid in enumerate(order)}
        self.reps = tuple(machine.reps[sid] for sid in order)
        self.perms: tuple[Perm, ...] = tuple(machine.perms[sid] for sid in order)
        for sid in order:
            for kid in machine.kids[sid]:
                if kid not in index:
                    raise ValueError("state set is not closed under sections")
        self.sections = tuple(
            tuple(index[kid] for kid in machine.kids[sid]) for sid in order
        )
        self.inverses = tuple(index[machine.inverse_state(sid)] for sid in order)
        self.identity_index = index[machine.identity]

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(range(len(self.ids)))

    def rep(self, i: int) -> GenWord:
        return self.reps[i]

    def perm(self, i: int) -> Perm:
        return self.perms[i]

    def section(self, i: int, x: int) -> int:
        return self.sections[i][x]

    def act(self, i: int, v: Word) -> Word:
        out = []
        cur = i
        for x in v:
            out.append(self.perms[cur][x])
            cur = self.sections[cur][x]
        return tuple(out)

    def index_of(self, word: GenWord, **kw) -> int | None:
        """Index of the state of a word, or None when it lies outside."""
        sid = self.group.machine.intern(word, **kw)
        try:
            return self.ids.index(sid)
        except ValueError:
            return None

    def to_json(self) -> dict:
        return {
            "group": self.group.content_hash(),
            "alphabet": self.group.d,
            "states": [str(r) for r in self.reps],
        }

    @classmethod
    def from_json(cls, group: GroupDef, data: dict) -> "Nucleus":
        if data.get("group") != group.content_hash():
            raise ValueError("nucleus data belongs to a different group")
        machine = group.machine
        ids = set()
        for text in data["states"]:
            sid = machine.intern(group.word(text))
            ids |= machine.reachable([sid, machine.inverse_state(sid)])
        return cls(group, ids)


def section_closure(group: GroupDef, words, budget: Budget = Budget()) -> list[GenWord]:
    """Smallest set of canonical states containing the given words (and the
    identity) and closed under sections; returned as representative words."""
    machine = group.machine
    roots = {machine.identity}
    for w in words:
        roots.add(machine.intern(group.word(w), max_states=budget.max_states,
                                 max_depth=budget.max_depth))
    closed = machine.reachable(roots)
    return sorted((machine.reps[s] for s in closed), key=lambda w: (len(w), str(w)))


def _persistent_states(machine, root: int, stop: set[int]) -> set[int]:
    """States reachable from `root` at arbitrarily large depth, ignoring the
    region `stop` (which must be section-closed, so no cycle leaves it).

    A state recurs arbitrarily deep iff it has an infinite backward chain
    inside the region, i.e. iff it survives iterated peeling of states
    without incoming region edges.
    """
    region = set()
    stack = [root]
    while stack:
        s = stack.pop()
        if s in region or s in stop:
            continue
        region.add(s)
        stack.extend(machine.kids[s])
    indeg = {s: 0 for s in region}
    for s in region:
        for kid in machine.kids[s]:
            if kid in indeg:
                indeg[kid] += 1
    queue = deque(s for s, n in indeg.items() if n == 0)
    alive = set(region)
    while queue:
        s = queue.popleft()
        alive.discard(s)
        for kid in machine.kids[s]:
            if kid in alive:
                indeg[kid] -= 1
                if indeg[kid] == 0:
                    queue.append(kid)
    return alive


def compute_nucleus(group: GroupDef, budget: Budget = Budget()) -> Nucleus:
    """Fixed point of pairwise-product absorption; minimal under the
    absorption property on every input it terminates on.

    Raises NotContractingError when the state or depth budget runs out;
    that verdict is always "not contracting within budget", the property
    itself is only semi-decidable.
    """
    machine = group.machine
    kw = {"max_states": budget.max_states, "max_depth": budget.max_depth}
    try:
        roots = {machine.identity}
        for sym in group.generators:
            sid = machine.intern(GenWord([(sym, 1)]), **kw)
            roots.add(sid)
            roots.add(machine.inverse_state(sid, **kw))
        current = machine.reachable(roots)
        done: set[tuple[int, int]] = set()
        while True:
            if len(current) > budget.max_states:
                raise NotContractingError(budget, f"{len(current)} states and growing")
            added: set[int] = set()
            for g, h in product(sorted(current), sorted(current)):
                if (g, h) in done:
                    continue
                done.add((g, h))
                prod = machine.product_state(g, h, **kw)
                for s in _persistent_states(machine, prod, current):
                    if s not in current and s not in added:
                        added.add(s)
                        added |= machine.reachable([machine.inverse_state(s, **kw)]) - current
            if not added:
                break
            current |= added
    except BudgetExceeded as exc:
        raise NotContractingError(budget, str(exc)) from None
    return Nucleus(group, current)


def is_regular(nucleus: Nucleus) -> bool:
    """True iff the directed graph on non-identity states, with an edge
    g -> g|_x for every letter x fixed by g whose section is non-identity,
    is acyclic.  A cycle yields arbitrarily deep fixed vertices with
    non-identity section, and conversely."""
    e = nucleus.identity_index
    nodes = [i for i in nucleus if i != e]
    edges = {
        i: [
            nucleus.section(i, x)
            for x in range(nucleus.group.d)
            if nucleus.perm(i)[x] == x and nucleus.section(i, x) != e
        ]
        for i in nodes
    }
    color: dict[int, int] = {}

    def has_cycle(start: int) -> bool:
        stack = [(start, iter(edges[start]))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for kid in it:
                c = color.get(kid)
                if c == 1:
                    return True
                if c is None:
                    color[kid] = 1
                    stack.append((kid, iter(edges[kid])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
        return False

    return not any(has_cycle(i) for i in nodes if i not in color)


def is_self_replicating(group: GroupDef, radius: int) -> str:
    """"yes" iff for every pair of letters x, y some element of length at
    most `radius` maps x to y with trivial section there; "unknown" when
    the search ball is exhausted (the property itself is not refuted)."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    machine = group.machine
    d = group.d
    gens = []
    for sym in group.generators:
        sid = machine.intern(GenWord([(sym, 1)]))
        gens.append(sid)
        gens.append(machine.inverse_state(sid))
    needed = {(x, y) for x in range(d) for y in range(d)}

    def scan(sid: int):
        for x in range(d):
            pair = (x, machine.perms[sid][x])
            if pair in needed and machine.kids[sid][x] == machine.identity:
                needed.discard(pair)

    ball = {machine.identity}
    frontier = [machine.identity]
    scan(machine.identity)
    for _ in range(radius):
        nxt = []
        for s in frontier:
            for g in gens:
                t = machine.product_state(s, g)
                if t not in ball:
                    ball.add(t)
                    nxt.append(t)
                    scan(t)
                    if not needed:
                        return "yes"
        frontier = nxt
    return "yes" if not needed else "unknown"


def is_level_transitive(group: GroupDef, n: int, limit: int = 1 << 20) -> bool:
    """Orbit of 0^n under the generators spans the whole level (which forces
    transitivity on every shallower level as well)."""
    if group.d ** n > limit:
        raise ValueError(f"level {n} has more than {limit} vertices")
    if n == 0:
        return True
    if not group.generators:
        return False
    machine = group.machine
    gens = []
    for sym in group.generators:
        sid = machine.intern(GenWord([(sym, 1)]))
        gens.append(sid)
        gens.append(machine.inverse_state(sid))
    start = (0,) * n
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for g in gens:
            u = machine.act(g, v)
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == group.d ** n


def length3_index_triples(nucleus: Nucleus) -> list[tuple[int, int, int]]:
    """All ordered state triples whose product is trivial; padding by the
    identity captures the length-1 and length-2 relations.

    A triple (i, j, k) multiplies to the identity exactly when the product
    state of i and j is the inverse state of k, so only pair products are
    ever interned.
    """
    machine = nucleus.group.machine
    inverse_of = {machine.inverse_state(nucleus.ids[k]): k for k in nucleus}
    out = []
    for i in nucleus:
        for j in nucleus:
            ij = machine.product_state(nucleus.ids[i], nucleus.ids[j])
            k = inverse_of.get(ij)
            if k is not None:
                out.append((i, j, k))
    return out


def length3_relations(nucleus: Nucleus) -> list[tuple[GenWord, GenWord, GenWord]]:
    return [
        (nucleus.reps[i], nucleus.reps[j], nucleus.reps[k])
        for i, j, k in length3_index_triples(nucleus)
    ]
