"""Finite-level approximations of the limit dynamical system.

Level-n data: words of length n stand for the pieces of the limit space;
two words touch when a nontrivial nucleus state carries one to the other
(these single-state pairs are exactly the level-n traces of asymptotic
equivalence, because every minimal-nucleus state sits on or below a cycle
of the section graph).  Whole pieces coincide only under states that can
be reached backwards along every letter; those pairs are folded into the
vertex classes, the rest become edges.  Dropping the last letter is the
finite shadow of the shift map and descends to classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .nucleus import Nucleus
from .ssgroup import GenWord, GroupDef
from .words import Word, format_word


@dataclass(frozen=True)
class MooreDiagram:
    """Nucleus automaton: per-state permutation realized as labeled edges
    state --(x|y)--> section, with y the image of the letter x."""

    states: tuple[str, ...]
    edges: tuple[tuple[int, int, int, int], ...]  # (src, input, output, dst)

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "edges": [list(e) for e in self.edges],
        }

    def to_dot(self) -> str:
        lines = ["digraph moore {"]
        for i, s in enumerate(self.states):
            lines.append(f'  n{i} [label="{s}"];')
        for src, x, y, dst in self.edges:
            lines.append(f'  n{src} -> n{dst} [label="{x}|{y}"];')
        lines.append("}")
        return "\n".join(lines)


def moore_diagram(nucleus: Nucleus) -> MooreDiagram:
    edges = []
    for i in nucleus:
        for x in range(nucleus.group.d):
            edges.append((i, x, nucleus.perm(i)[x], nucleus.section(i, x)))
    return MooreDiagram(tuple(str(r) for r in nucleus.reps), tuple(edges))


def _check_level(nucleus: Nucleus, n: int, limit: int):
    if nucleus.group.d ** n > limit:
        raise ValueError(f"level {n} has more than {limit} vertices")


def level_identifications(nucleus: Nucleus, n: int, limit: int = 1 << 20) -> set[tuple[Word, Word]]:
    """Unordered pairs of distinct level-n words carried into each other by
    a nontrivial nucleus state."""
    _check_level(nucleus, n, limit)
    pairs: set[tuple[Word, Word]] = set()
    for i in nucleus:
        if i == nucleus.identity_index:
            continue
        for v in product(range(nucleus.group.d), repeat=n):
            u = nucleus.act(i, v)
            if u != v:
                pairs.add((min(v, u), max(v, u)))
    return pairs


def cylinder_stable_states(nucleus: Nucleus) -> set[int]:
    """Largest set of states each reachable backwards along every input
    letter from within the set; exactly these carry whole cylinders of
    left-infinite sequences onto each other."""
    d = nucleus.group.d
    incoming = {i: [set() for _ in range(d)] for i in nucleus}
    for h in nucleus:
        for x in range(d):
            incoming[nucleus.section(h, x)][x].add(h)
    alive = set(nucleus)
    changed = True
    while changed:
        changed = False
        for s in sorted(alive):
            if any(not (incoming[s][x] & alive) for x in range(d)):
                alive.discard(s)
                changed = True
    return alive


@dataclass(frozen=True)
class LevelQuotient:
    """Level-n model of the limit space: classes of words (fused along
    cylinder-stable identifications), touching edges between classes, and
    the shift into the level below."""

    level: int
    blocks: tuple[tuple[Word, ...], ...]
    edges: frozenset[tuple[int, int]]
    shift: tuple[int, ...] | None  # block index at level n-1

    def class_of(self, word: Word) -> int:
        word = tuple(word)
        for i, block in enumerate(self.blocks):
            if word in block:
                return i
        raise KeyError(format_word(word))

    def is_connected(self) -> bool:
        if len(self.blocks) <= 1:
            return True
        parent = list(range(len(self.blocks)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, j in self.edges:
            parent[find(i)] = find(j)
        return len({find(i) for i in range(len(self.blocks))}) == 1

    def degree_sequence(self) -> list[int]:
        deg = [0] * len(self.blocks)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_cycle(self) -> bool:
        return (
            len(self.edges) == len(self.blocks)
            and self.is_connected()
            and all(d == 2 for d in self.degree_sequence())
        )

    def is_path(self) -> bool:
        if len(self.blocks) == 1:
            return not self.edges
        deg = self.degree_sequence()
        return (
            len(self.edges) == len(self.blocks) - 1
            and self.is_connected()
            and sorted(deg)[:2] == [1, 1]
            and all(d <= 2 for d in deg)
        )

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "classes": [[format_word(w) for w in block] for block in self.blocks],
            "edges": sorted([i, j] for i, j in self.edges),
            "shift": list(self.shift) if self.shift is not None else None,
        }

    def to_dot(self) -> str:
        lines = ["graph levelquotient {"]
        for i, block in enumerate(self.blocks):
            label = ",".join(format_word(w) for w in block)
            lines.append(f'  n{i} [label="{label}"];')
        for i, j in sorted(self.edges):
            lines.append(f"  n{i} -- n{j};")
        lines.append("}")
        return "\n".join(lines)


def quotient_graph(nucleus: Nucleus, n: int, limit: int = 1 << 20) -> LevelQuotient:
    """Classes, touching edges, and the shift map at level n."""
    _check_level(nucleus, n, limit)
    d = nucleus.group.d
    words = [tuple(v) for v in product(range(d), repeat=n)]
    index = {v: i for i, v in enumerate(words)}
    parent = list(range(len(words)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    stable = cylinder_stable_states(nucleus) - {nucleus.identity_index}
    for s in stable:
        for v in words:
            parent[find(index[v])] = find(index[nucleus.act(s, v)])
    block_ids = sorted({find(i) for i in range(len(words))})
    block_words = {b: [] for b in block_ids}
    for i, v in enumerate(words):
        block_words[find(i)].append(v)
    blocks = tuple(
        tuple(sorted(ws)) for ws in sorted(block_words.values(), key=lambda ws: min(ws))
    )
    block_of = {w: i for i, ws in enumerate(blocks) for w in ws}

    edges = set()
    for v, u in level_identifications(nucleus, n, limit):
        bi, bj = block_of[v], block_of[u]
        if bi != bj:
            edges.add((min(bi, bj), max(bi, bj)))

    shift = None
    if n >= 1:
        prev = quotient_graph(nucleus, n - 1, limit)
        targets = []
        for ws in blocks:
            hits = {prev.class_of(w[:-1]) for w in ws}
            if len(hits) != 1:
                raise AssertionError("shift does not descend to classes")
            targets.append(hits.pop())
        shift = tuple(targets)
    return LevelQuotient(n, blocks, frozenset(edges), shift)


@dataclass(frozen=True)
class SchreierGraph:
    """Level-n orbit graph: words connected by generator moves."""

    level: int
    vertices: tuple[Word, ...]
    edges: frozenset[tuple[Word, Word]]
    labels: dict  # edge -> sorted generator names

    def is_connected(self) -> bool:
        if len(self.vertices) <= 1:
            return True
        index = {v: i for i, v in enumerate(self.vertices)}
        parent = list(range(len(self.vertices)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for v, u in self.edges:
            parent[find(index[v])] = find(index[u])
        return len({find(i) for i in range(len(self.vertices))}) == 1

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "vertices": [format_word(v) for v in self.vertices],
            "edges": [
                [format_word(v), format_word(u), self.labels[(v, u)]]
                for v, u in sorted(self.edges)
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph schreier {"]
        for v in self.vertices:
            lines.append(f'  "{format_word(v)}";')
        for v, u in sorted(self.edges):
            label = ",".join(self.labels[(v, u)])
            lines.append(f'  "{format_word(v)}" -- "{format_word(u)}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def schreier_graph(group: GroupDef, n: int, limit: int = 1 << 20) -> SchreierGraph:
    """Vertices are the level-n words, one edge per generator move."""
    if group.d ** n > limit:
        raise ValueError(f"level {n} has more than {limit} vertices")
    words = [tuple(v) for v in product(range(group.d), repeat=n)]
    edges = set()
    labels: dict[tuple[Word, Word], list[str]] = {}
    for sym in group.generators:
        w = GenWord([(sym, 1)])
        for v in words:
            u = group.act(w, v)
            if u != v:
                key = (min(v, u), max(v, u))
                edges.add(key)
                labels.setdefault(key, [])
                if sym not in labels[key]:
                    labels[key].append(sym)
    return SchreierGraph(n, tuple(words), frozenset(edges),
                         {k: sorted(v) for k, v in labels.items()})
