"""Finite-presentation data for the table group of a contracting group.

Generators: a finite presentation of the prefix-replacement group over the
bare alphabet (kept opaque) together with one letter L(g) per nontrivial
nucleus state, realized concretely as the table acting as g below a fixed
base letter and trivially elsewhere.  Three relator families are emitted,
each both as a symbolic word and as a concrete table product that must
evaluate to the identity:

  C: commutation of embeddings with disjoint supports, and of L(g) with a
     finite stabilizer set of the complementary cylinder;
  N: L(g1) L(g2) L(g3) for every length-at-most-3 nucleus relation;
  S: L(g) rewritten through a level-two permutation and the embeddings of
     its sections one level down.

Soundness (every relator is the identity) is fully machine-checked;
completeness of the presentation is a theorem, not a computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

from .nucleus import Budget, Nucleus, compute_nucleus, length3_index_triples
from .ssgroup import GenWord, GroupDef
from .vg import Table, thompson_from_antichains
from .words import Antichain, Word, format_word

BASE_LETTER = 0


class UndecidedError(Exception):
    """The word problem ran out of budget while verifying."""


def l_embed(group: GroupDef, v: Word, table: Table) -> Table:
    """Table acting as `table` on the cylinder below v, identically elsewhere."""
    v = tuple(v)
    rows = [(v + a, g, v + b) for a, g, b in table.rows]
    rows.extend((c, GenWord(), c) for c in Antichain([v], group.d).complement())
    return Table(group, rows)


def l_of(group: GroupDef, v: Word, element) -> Table:
    """Embedding of a single group element below the vertex v."""
    return l_embed(group, v, Table.from_element(group, element))


def choose_ab_tables(group: GroupDef) -> tuple[dict, dict]:
    """Canonical prefix movers: a_xy maps the cylinder of y onto that of xy,
    b_x maps the cylinder of the base letter onto that of x (identity at the
    base letter itself).  Completions over the complements are the canonical
    greedy ones."""
    d = group.d
    a_xy = {
        (x, y): thompson_from_antichains(group, [(y,)], [(x, y)])
        for x in range(d)
        for y in range(d)
    }
    b_x = {
        x: Table.identity(group) if x == BASE_LETTER
        else thompson_from_antichains(group, [(BASE_LETTER,)], [(x,)])
        for x in range(d)
    }
    return a_xy, b_x


def embedded_conjugator(group: GroupDef, v: Word, a_xy: dict, b_x: dict) -> Table:
    """Product of movers carrying the base-letter cylinder onto the cylinder
    of v; conjugation by it turns L(g) into the embedding below v."""
    v = tuple(v)
    if not v:
        raise ValueError("cannot conjugate to the empty vertex")
    out = b_x[v[-1]]
    for i in range(len(v) - 1, 0, -1):
        out = a_xy[(v[i - 1], v[i])] * out
    return out


def _vx_normal_rows(table: Table):
    """Normal form of a trivial-entry table for dedup: merge any d sibling
    rows that are an identity split."""
    rows = list(table.rows)
    changed = True
    while changed:
        changed = False
        rows.sort(key=lambda r: r[0])
        for i, (v, g, u) in enumerate(rows):
            if not v:
                continue
            sibs = [r for r in rows if r[0][:-1] == v[:-1]]
            if len(sibs) != table.group.d:
                continue
            if any(r[2][:-1] != sibs[0][2][:-1] or not r[2] for r in sibs):
                continue
            if all(r[0][-1] == r[2][-1] for r in sibs):
                rows = [r for r in rows if r not in sibs]
                rows.append((v[:-1], g, sibs[0][2][:-1]))
                changed = True
                break
    return tuple(sorted(rows, key=lambda r: r[0]))


def offcylinder_stabilizer_tables(group: GroupDef) -> list[Table]:
    """Finite stabilizer set of the complement of the base-letter cylinder:
    every permutation table of domain depth at most two fixing that cylinder
    pointwise, plus one exchange of cylinders of unequal depths."""
    d = group.d
    found: dict[tuple, Table] = {}
    # complete antichains of depth <= 2: per letter keep it or split it once
    for split in product((False, True), repeat=d):
        words: list[Word] = []
        for x in range(d):
            if split[x]:
                words.extend((x, y) for y in range(d))
            else:
                words.append((x,))
        movable = [w for w in words if w[0] != BASE_LETTER]
        fixed = [w for w in words if w[0] == BASE_LETTER]
        for perm in permutations(movable):
            if perm == tuple(movable):
                continue
            mapping = dict(zip(movable, perm))
            mapping.update((w, w) for w in fixed)
            t = Table.permutation(group, words, mapping)
            found.setdefault(_vx_normal_rows(t), t)
    # one exchange of unequal depths, below the first non-base letter
    x2 = next(x for x in range(d) if x != BASE_LETTER)
    lo, hi = (x2, 0), (x2, 1, 0)
    rows = [(lo, GenWord(), hi), (hi, GenWord(), lo)]
    rows.extend((c, GenWord(), c)
                for c in Antichain([lo, hi], d).complement())
    swap = Table(group, rows)
    found.setdefault(_vx_normal_rows(swap), swap)
    return [found[k] for k in sorted(found)]


@dataclass
class Relator:
    family: str
    symbolic: str
    table: Table

    def to_json(self) -> dict:
        return {"family": self.family, "symbolic": self.symbolic,
                "table": self.table.to_json()}


@dataclass
class PresentationBundle:
    group: GroupDef
    nucleus: Nucleus
    s1: list[str]
    a_xy: dict = field(repr=False)
    b_x: dict = field(repr=False)
    stabilizers: list[Table] = field(repr=False)
    relators: dict[str, list[Relator]] = field(repr=False)

    def all_relators(self):
        for family in ("C", "N", "S"):
            yield from self.relators[family]

    def to_json(self) -> dict:
        return {
            "group": self.group.content_hash(),
            "generators": list(self.s1),
            "relators": {
                fam: [r.to_json() for r in rels]
                for fam, rels in self.relators.items()
            },
        }

    @classmethod
    def from_json(cls, group: GroupDef, data: dict,
                  budget: Budget = Budget()) -> "PresentationBundle":
        if data.get("group") != group.content_hash():
            raise ValueError("presentation data belongs to a different group")
        nucleus = compute_nucleus(group, budget)
        a_xy, b_x = choose_ab_tables(group)
        relators = {
            fam: [
                Relator(r["family"], r["symbolic"], Table.from_json(group, r["table"]))
                for r in rels
            ]
            for fam, rels in data["relators"].items()
        }
        return cls(group, nucleus, list(data["generators"]), a_xy, b_x,
                   offcylinder_stabilizer_tables(group), relators)


def _sym_L(rep: GenWord, v: Word | None = None) -> str:
    at = "" if v is None else f"@{format_word(v)}"
    return f"L{at}[{rep}]"


def _nontrivial_states(nucleus: Nucleus) -> list[int]:
    return [i for i in nucleus if i != nucleus.identity_index]


def relators_N(nucleus: Nucleus) -> list[Relator]:
    """One relator L(g1) L(g2) L(g3) per length-at-most-3 nucleus relation."""
    group = nucleus.group
    out = []
    for i, j, k in length3_index_triples(nucleus):
        table = (
            l_of(group, (BASE_LETTER,), nucleus.reps[i])
            * l_of(group, (BASE_LETTER,), nucleus.reps[j])
            * l_of(group, (BASE_LETTER,), nucleus.reps[k])
        )
        sym = "*".join(_sym_L(nucleus.reps[t]) for t in (i, j, k))
        out.append(Relator("N", sym, table))
    return out


def relators_C(nucleus: Nucleus) -> list[Relator]:
    """Commutators of embeddings at distinct letters, at distinct depth-two
    vertices, and of L(g) with the off-cylinder stabilizer set."""
    group = nucleus.group
    d = group.d
    states = _nontrivial_states(nucleus)
    out = []

    def commutator(t1: Table, t2: Table) -> Table:
        return t1 * t2 * t1.inverse() * t2.inverse()

    verts1 = [((x,), (y,)) for x in range(d) for y in range(d) if x != y]
    verts2 = [
        (v1, v2)
        for v1 in product(range(d), repeat=2)
        for v2 in product(range(d), repeat=2)
        if v1 != v2
    ]
    for pairs in (verts1, verts2):
        for v1, v2 in pairs:
            for i in states:
                for j in states:
                    t = commutator(l_of(group, v1, nucleus.reps[i]),
                                   l_of(group, v2, nucleus.reps[j]))
                    sym = (f"[{_sym_L(nucleus.reps[i], v1)}, "
                           f"{_sym_L(nucleus.reps[j], v2)}]")
                    out.append(Relator("C", sym, t))
    for i in states:
        for w_index, h in enumerate(offcylinder_stabilizer_tables(group)):
            t = commutator(l_of(group, (BASE_LETTER,), nucleus.reps[i]), h)
            sym = f"[{_sym_L(nucleus.reps[i])}, W{w_index}]"
            out.append(Relator("C", sym, t))
    return out


def level2_permutation(table: Table) -> Table:
    """Check a table is a permutation of level-two cylinders and return it
    in that shape; raises when the recursion data is inconsistent."""
    group = table.group
    depth = max(2, table.depth(), max(len(u) for _, _, u in table.rows))
    full = Antichain(list(product(range(group.d), repeat=depth)), group.d)
    t = table.refine_domain(full)
    mapping = {}
    for v, g, u in t.rows:
        if group.is_trivial(g).status != "trivial":
            raise ValueError("solved element is not a level-two permutation table")
        if len(u) != len(v) or u[2:] != v[2:]:
            raise ValueError("solved element is not a level-two permutation table")
        if mapping.setdefault(v[:2], u[:2]) != u[:2]:
            raise ValueError("solved element is not a level-two permutation table")
    if sorted(mapping.values()) != sorted(mapping):
        raise ValueError("solved element is not a level-two permutation table")
    e = GenWord()
    return Table(group, [(v, e, mapping[v]) for v in mapping])


def relators_S(nucleus: Nucleus) -> list[Relator]:
    """For each nucleus state g: L(g) equals a level-two permutation times
    the embeddings of its sections below the base letter.  The permutation
    is solved for by table division and verified structurally."""
    group = nucleus.group
    d = group.d
    out = []
    for i in nucleus:
        rep = nucleus.reps[i]
        sections = [nucleus.reps[nucleus.section(i, y)] for y in range(d)]
        prod = None
        for y in range(d):
            t = l_of(group, (BASE_LETTER, y), sections[y])
            prod = t if prod is None else prod * t
        lg = l_of(group, (BASE_LETTER,), rep)
        h = level2_permutation(lg * prod.inverse())
        whole = lg * (h * prod).inverse()
        hmap = ",".join(
            f"{format_word(v)}>{format_word(u)}" for v, _, u in h.rows if v != u
        )
        sym = (
            f"{_sym_L(rep)}*("
            + f"perm<{hmap or 'id'}>*"
            + "*".join(_sym_L(sections[y], (BASE_LETTER, y)) for y in range(d))
            + ")^-1"
        )
        out.append(Relator("S", sym, whole))
    return out


def emit_presentation(group: GroupDef, budget: Budget = Budget()) -> PresentationBundle:
    """Generator letters and the three relator families, with the
    prefix-replacement part of the presentation kept as an opaque import."""
    nucleus = compute_nucleus(group, budget)
    a_xy, b_x = choose_ab_tables(group)
    stabilizers = offcylinder_stabilizer_tables(group)
    relators = {
        "C": relators_C(nucleus),
        "N": relators_N(nucleus),
        "S": relators_S(nucleus),
    }
    s1 = [_sym_L(nucleus.reps[i]) for i in _nontrivial_states(nucleus)]
    return PresentationBundle(group, nucleus, s1, a_xy, b_x, stabilizers, relators)


def verify_relator(relator: Relator, limit: int = 10_000) -> bool:
    """Whether the concrete table product is the identity homeomorphism."""
    status = relator.table.equals(Table.identity(relator.table.group), limit)
    if status == "undecided":
        raise UndecidedError(relator.symbolic)
    return status == "equal"


def expected_c_count(nucleus: Nucleus, stabilizer_count: int) -> int:
    """Size of the commutation family by direct counting."""
    d = nucleus.group.d
    n1 = len(nucleus) - 1
    return n1 * n1 * (d * (d - 1) + d * d * (d * d - 1)) + n1 * stabilizer_count
