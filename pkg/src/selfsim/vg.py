"""Table calculus: boundary homeomorphisms built from prefix replacements.

An element is a table of rows (v, g, u): the cylinder below v is carried
onto the cylinder below u, acting by the group element g in between, i.e.
v w -> u g(w).  Domain and range columns are complete antichains.  A row
splits into its d children without changing the homeomorphism, which is
what composition, equality and canonical forms are built on.  Tables with
trivial entries realize the prefix-replacement (Higman-Thompson type)
homeomorphisms over the bare alphabet.
"""

from __future__ import annotations

from .nucleus import Budget, Nucleus, NotContractingError, compute_nucleus
from .ssgroup import GenWord, GroupDef, perm_parity
from .words import (
    Antichain,
    Word,
    common_refinement,
    format_word,
    is_complete_antichain,
    is_prefix,
    parse_word,
)

Row = tuple[Word, GenWord, Word]


class Table:
    """One boundary homeomorphism; rows sorted by domain word."""

    __slots__ = ("group", "rows")

    def __init__(self, group: GroupDef, rows):
        checked: list[Row] = []
        for row in rows:
            try:
                v, g, u = row
            except (TypeError, ValueError):
                raise ValueError(f"row arity mismatch: {row!r}") from None
            checked.append((tuple(v), group.word(g), tuple(u)))
        if not checked:
            raise ValueError("a table needs at least one row")
        checked.sort(key=lambda r: r[0])
        if not is_complete_antichain([r[0] for r in checked], group.d):
            raise ValueError("domain is not a complete antichain")
        if not is_complete_antichain([r[2] for r in checked], group.d):
            raise ValueError("range is not a complete antichain")
        self.group = group
        self.rows = tuple(checked)

    @classmethod
    def identity(cls, group: GroupDef) -> "Table":
        return cls(group, [((), GenWord(), ())])

    @classmethod
    def from_element(cls, group: GroupDef, g) -> "Table":
        """The table of a single group element acting at the root."""
        return cls(group, [((), group.word(g), ())])

    @classmethod
    def permutation(cls, group: GroupDef, words, mapping) -> "Table":
        """Trivial-entry table permuting the cylinders of an antichain."""
        e = GenWord()
        return cls(group, [(tuple(w), e, tuple(mapping[tuple(w)])) for w in words])

    def domain(self) -> Antichain:
        return Antichain([r[0] for r in self.rows], self.group.d)

    def range_antichain(self) -> Antichain:
        return Antichain([r[2] for r in self.rows], self.group.d)

    def depth(self) -> int:
        return max(len(r[0]) for r in self.rows)

    # -- splitting ---------------------------------------------------------

    def split_row(self, i: int) -> "Table":
        """Replace row i by its d children; the action is unchanged."""
        v, g, u = self.rows[i]
        perm, sections = self.group.wreath(g)
        new = list(self.rows[:i]) + list(self.rows[i + 1 :])
        for x in range(self.group.d):
            new.append((v + (x,), sections[x], u + (perm[x],)))
        return Table(self.group, new)

    def _refine(self, target: Antichain, side: int) -> "Table":
        """Split rows until the chosen column (0 domain, 2 range) equals target."""
        want = set(target.words)
        t = self
        while True:
            have = {r[side] for r in t.rows}
            if have == want:
                return t
            for i, row in enumerate(t.rows):
                w = row[side]
                if w not in want:
                    if not any(is_prefix(w, x) for x in want):
                        raise ValueError("target does not refine the table column")
                    t = t.split_row(i)
                    break

    def refine_domain(self, target) -> "Table":
        """Split until the domain antichain equals `target` (which must
        refine it); the homeomorphism is unchanged."""
        if not isinstance(target, Antichain):
            target = Antichain(target, self.group.d)
        if not target.is_complete():
            raise ValueError("target antichain is not complete")
        return self._refine(target, 0)

    def refine_range(self, target) -> "Table":
        if not isinstance(target, Antichain):
            target = Antichain(target, self.group.d)
        if not target.is_complete():
            raise ValueError("target antichain is not complete")
        return self._refine(target, 2)

    # -- group operations --------------------------------------------------

    def compose(self, other: "Table") -> "Table":
        """self after other, as maps of the boundary."""
        if self.group is not other.group and self.group.content_hash() != other.group.content_hash():
            raise ValueError("tables over different groups")
        middle = common_refinement(other.range_antichain(), self.domain())
        lo = other.refine_range(middle)
        hi = self.refine_domain(middle)
        by_domain = {r[0]: r for r in hi.rows}
        rows = []
        for v, h, w in lo.rows:
            _, g, u = by_domain[w]
            rows.append((v, g * h, u))
        return Table(self.group, rows)

    def __mul__(self, other: "Table") -> "Table":
        return self.compose(other)

    def inverse(self) -> "Table":
        return Table(self.group, [(u, g.inverse(), v) for v, g, u in self.rows])

    def apply(self, word: Word) -> Word:
        """Image of a finite word long enough to reach the domain antichain."""
        word = tuple(word)
        for v, g, u in self.rows:
            if is_prefix(v, word):
                return u + self.group.act(g, word[len(v) :])
        raise ValueError(f"{format_word(word)} is shorter than the domain antichain")

    def equals(self, other: "Table", limit: int = 10_000) -> str:
        """"equal", "different", or "undecided" (word-problem budget ran out).

        Both tables are refined to a common domain; they agree exactly when
        the refined ranges match rowwise and the entries are equal in the
        group (distinct range words force a difference because entries act
        onto the whole subtree).
        """
        if self.group is not other.group and self.group.content_hash() != other.group.content_hash():
            raise ValueError("tables over different groups")
        dom = common_refinement(self.domain(), other.domain())
        a = self.refine_domain(dom)
        b = other.refine_domain(dom)
        undecided = False
        for (v1, g1, u1), (v2, g2, u2) in zip(a.rows, b.rows):
            if u1 != u2:
                return "different"
            res = self.group.are_equal(g1, g2, limit)
            if res.status == "different":
                return "different"
            if res.status == "undecided":
                undecided = True
        return "undecided" if undecided else "equal"

    # -- canonical form ------------------------------------------------------

    def canonical_form(self, nucleus: Nucleus | None = None,
                       budget: Budget = Budget(), limit: int = 10_000) -> "Table":
        """Greedily merge split sibling rows back and rewrite entries to
        shortest nucleus representatives.

        Merging recognizes a single element from its permutation and
        section row among products of at most two nucleus representatives,
        so the result is a normal form up to that search bound; table
        equality never depends on it.  Without a computable nucleus the
        table is returned merge-free.
        """
        group = self.group
        if nucleus is None:
            try:
                nucleus = compute_nucleus(group, budget)
            except NotContractingError:
                nucleus = None
        candidates: list[tuple[GenWord, int]] = []
        if nucleus is not None:
            machine = group.machine
            seen = set()
            pool = list(nucleus.reps)
            pool += [r1 * r2 for r1 in nucleus.reps for r2 in nucleus.reps]
            for w in pool:
                sid = machine.intern(w)
                if sid not in seen:
                    seen.add(sid)
                    candidates.append((machine.reps[sid], sid))
            candidates.sort(key=lambda c: (len(str(c[0])), str(c[0])))

        t = self
        merged = True
        while merged and candidates:
            merged = False
            groups: dict[Word, list[Row]] = {}
            for row in t.rows:
                if row[0]:
                    groups.setdefault(row[0][:-1], []).append(row)
            for parent, rows in groups.items():
                if len(rows) != t.group.d:
                    continue
                ranges = [u for _, _, u in rows]
                if any(not u for u in ranges):
                    continue
                target_parent = ranges[0][:-1]
                if any(u[:-1] != target_parent for u in ranges):
                    continue
                perm = tuple(u[-1] for _, _, u in rows)  # rows sorted by v
                if sorted(perm) != list(range(t.group.d)):
                    continue
                hit = None
                for rep, sid in candidates:
                    if group.machine.perms[sid] != perm:
                        continue
                    kids = group.machine.kids[sid]
                    if all(
                        group.are_equal(group.machine.reps[kids[x]], rows[x][1], limit).status == "equal"
                        for x in range(t.group.d)
                    ):
                        hit = rep
                        break
                if hit is None:
                    continue
                keep = [r for r in t.rows if r not in rows]
                keep.append((parent, hit, target_parent))
                t = Table(group, keep)
                merged = True
                break

        if nucleus is not None:
            machine = group.machine
            rows = []
            for v, g, u in t.rows:
                try:
                    sid = machine.intern(g, max_states=budget.max_states,
                                         max_depth=budget.max_depth)
                    if sid in nucleus.ids:
                        g = machine.reps[sid]
                except Exception:
                    pass
                rows.append((v, g, u))
            t = Table(group, rows)
        return t

    # -- invariants ----------------------------------------------------------

    def sign(self) -> int:
        """Parity of the table (alphabet of odd size, trivial entries only):
        sort by domain, take the parity of the permutation that sorts the
        range column.  Splitting a row preserves it when d is odd."""
        if self.group.d % 2 == 0:
            raise ValueError("sign is undefined for even alphabets "
                             "(every table has an even splitting)")
        for _, g, _ in self.rows:
            if self.group.is_trivial(g).status != "trivial":
                raise ValueError("sign is defined for trivial entries only")
        order = sorted(range(len(self.rows)), key=lambda i: self.rows[i][2])
        rank = [0] * len(order)
        for pos, i in enumerate(order):
            rank[i] = pos
        return perm_parity(rank)

    def image_of_clopen(self, clopen: Antichain) -> Antichain:
        """Coarsest antichain of the image of a clopen set; each refined
        domain cylinder maps onto the full cylinder below its range word."""
        full = Antichain(clopen.words + clopen.complement().words, self.group.d)
        t = self.refine_domain(common_refinement(self.domain(), full))
        hit = [u for v, _, u in t.rows if any(is_prefix(w, v) for w in clopen.words)]
        return Antichain.clopen(hit, self.group.d)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "domain": [format_word(v) for v, _, _ in self.rows],
            "entries": [str(g) for _, g, _ in self.rows],
            "range": [format_word(u) for _, _, u in self.rows],
        }

    @classmethod
    def from_json(cls, group: GroupDef, data: dict) -> "Table":
        rows = zip(
            (parse_word(s) for s in data["domain"]),
            (GenWord.parse(s) for s in data["entries"]),
            (parse_word(s) for s in data["range"]),
        )
        return cls(group, rows)

    def __eq__(self, other):
        return (
            isinstance(other, Table)
            and self.rows == other.rows
            and self.group.content_hash() == other.group.content_hash()
        )

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        rows = "; ".join(
            f"{format_word(v)}:{g}:{format_word(u)}" for v, g, u in self.rows
        )
        return f"Table[{rows}]"


def make_table(group: GroupDef, rows) -> Table:
    """Validated table; rows sorted by the domain column."""
    return Table(group, rows)


def thompson_from_antichains(group: GroupDef, sources, targets) -> Table:
    """Trivial-entry table sending the cylinder of sources[i] onto that of
    targets[i] by prefix replacement.

    Complete inputs must pair off completely.  Incomplete inputs of equal
    size are extended over the complements canonically: the complement
    antichains are equalized in cardinality by splitting the lexicographically
    least shallowest cylinder on the smaller side, then paired in lexicographic
    order.
    """
    sources = [tuple(w) for w in sources]
    targets = [tuple(w) for w in targets]
    if len(sources) != len(targets):
        raise ValueError("antichain size mismatch")
    a1 = Antichain(sources, group.d)
    a2 = Antichain(targets, group.d)
    if len(a1) != len(sources) or len(a2) != len(targets):
        raise ValueError("repeated words in antichain")
    e = GenWord()
    rows = [(v, e, u) for v, u in zip(sources, targets)]
    if a1.is_complete() != a2.is_complete():
        raise ValueError("one antichain is complete and the other is not")
    if not a1.is_complete():
        c1 = sorted(a1.complement().words)
        c2 = sorted(a2.complement().words)
        if (len(c1) - len(c2)) % (group.d - 1 if group.d > 2 else 1) != 0:
            raise ValueError("complements have mismatched cylinder residues")
        while len(c1) != len(c2):
            side = c1 if len(c1) < len(c2) else c2
            w = min(side, key=lambda w: (len(w), w))
            side.remove(w)
            side.extend(w + (x,) for x in range(group.d))
            side.sort()
        rows.extend((v, e, u) for v, u in zip(c1, c2))
    return Table(group, rows)


def same_orbit_clopen(u1: Antichain, u2: Antichain) -> bool:
    """Whether two nonempty proper clopen sets lie in one orbit of the
    prefix-replacement group: exactly when their cylinder-count residues
    agree."""
    if u1.d != u2.d:
        raise ValueError("alphabet mismatch")
    for u in (u1, u2):
        if u.is_empty() or u.is_whole():
            raise ValueError("clopen sets must be nonempty and proper")
    return u1.m_invariant() == u2.m_invariant()


def orbit_witness(group: GroupDef, u1: Antichain, u2: Antichain) -> Table:
    """An element mapping the first clopen set onto the second; exists
    exactly when same_orbit_clopen holds."""
    if not same_orbit_clopen(u1, u2):
        raise ValueError("clopen sets lie in different orbits")
    c1 = sorted(u1.words)
    c2 = sorted(u2.words)
    while len(c1) != len(c2):
        side = c1 if len(c1) < len(c2) else c2
        w = min(side, key=lambda w: (len(w), w))
        side.remove(w)
        side.extend(w + (x,) for x in range(group.d))
        side.sort()
    return thompson_from_antichains(group, c1, c2)
