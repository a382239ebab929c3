"""Abelianization of the prefix-replacement groups via exact integer
linear algebra.

The abelianized group is the cokernel of 1 - sigma on the abelianization
of the underlying self-similar group, where sigma sends a class to the sum
of its first-level sections; for odd alphabets an extra order-two summand
twisted by the permutation parity enters.  Everything reduces to a Smith
normal form over the integers (arbitrary precision).  The post-critical
specialization presents the relevant homology combinatorially from a
finite portrait of a rational map.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from math import gcd

from .nucleus import Budget, Nucleus, compute_nucleus, length3_relations
from .ssgroup import GenWord, GroupDef, perm_parity


# -- exact integer matrices ---------------------------------------------------

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(U, D, V) with D = U @ matrix @ V diagonal, U and V unimodular, and
    the diagonal a divisibility chain d1 | d2 | ...; exact arithmetic."""
    m = [row[:] for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    u = _identity(nrows)
    v = _identity(ncols)

    def row_op(i, j, q):  # row_i -= q * row_j
        m[i] = [a - q * b for a, b in zip(m[i], m[j])]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in m:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nrows, ncols):
        # pivot: smallest nonzero entry of the unreduced block
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if m[i][j] != 0 and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nrows):
                if m[i][t]:
                    row_op(i, t, m[i][t] // m[t][t])
                    if m[i][t]:  # remainder smaller than pivot: promote it
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, ncols):
                if m[t][j]:
                    col_op(j, t, m[t][j] // m[t][t])
                    if m[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                # pivot must divide the remaining block for the chain property
                for i in range(t + 1, nrows):
                    for j in range(t + 1, ncols):
                        if m[i][j] % m[t][t]:
                            m[t] = [a + b for a, b in zip(m[t], m[i])]
                            u[t] = [a + b for a, b in zip(u[t], u[i])]
                            dirty = True
                            break
                    if dirty:
                        break
        t += 1
    for i in range(min(nrows, ncols)):
        if m[i][i] < 0:
            m[i] = [-a for a in m[i]]
            u[i] = [-a for a in u[i]]
    return u, m, v


def _prime_powers(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class AbelGroup:
    """Finitely generated abelian group: free rank plus invariant factors
    forming a divisibility chain (each factor at least 2)."""

    rank: int
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError(f"factors {self.factors} are not a divisibility chain")
        if any(f < 2 for f in self.factors):
            raise ValueError("invariant factors must be at least 2")

    @classmethod
    def from_factors(cls, rank: int, factors) -> "AbelGroup":
        """Normalize arbitrary torsion factors into invariant-factor form."""
        per_prime: dict[int, list[int]] = {}
        for f in factors:
            if f == 0:
                rank += 1
                continue
            for p, k in _prime_powers(abs(f)).items():
                per_prime.setdefault(p, []).append(k)
        width = max((len(v) for v in per_prime.values()), default=0)
        inv = []
        for i in range(width):
            f = 1
            for p, ks in per_prime.items():
                ks_sorted = sorted(ks, reverse=True)
                if i < len(ks_sorted):
                    f *= p ** ks_sorted[i]
            inv.append(f)
        return cls(rank, tuple(sorted(f for f in inv if f > 1)))

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.factors

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{f}Z" for f in self.factors)
        return " + ".join(parts) if parts else "trivial group"


def cokernel(rows: Matrix, ncols: int) -> AbelGroup:
    """Quotient of Z^ncols by the subgroup generated by the given rows."""
    if not rows:
        return AbelGroup(ncols)
    _, d, _ = smith_normal_form(rows)
    diag = [d[i][i] for i in range(min(len(d), ncols)) if d[i][i] != 0]
    return AbelGroup.from_factors(ncols - len(diag), [f for f in diag if f > 1])


# -- the section-sum endomorphism ---------------------------------------------

def ab_vector(group: GroupDef, word: GenWord) -> list[int]:
    """Exponent sums of a word over the generator basis."""
    vec = [0] * len(group.generators)
    index = {sym: i for i, sym in enumerate(group.generators)}
    for sym, exp in word.factors:
        vec[index[sym]] += exp
    return vec


def sigma_matrix(group: GroupDef) -> Matrix:
    """Row i is the abelianized sum of the sections of generator i."""
    rows = []
    for sym in group.generators:
        _, sections = group.recursion[sym]
        vec = [0] * len(group.generators)
        for sec in sections:
            for a, b in zip(range(len(vec)), ab_vector(group, sec)):
                vec[a] += b
        rows.append(vec)
    return rows


def sign_vector(group: GroupDef) -> list[int]:
    """Per-generator parity of the first-level permutation (odd alphabets)."""
    if group.d % 2 == 0:
        raise ValueError("sign is undefined for even alphabets")
    return [perm_parity(group.recursion[sym][0]) for sym in group.generators]


def nucleus_relation_rows(group: GroupDef, nucleus: Nucleus) -> Matrix:
    """Abelianized rows of all length-at-most-3 relations among nucleus
    representatives, over the generator basis."""
    rows = []
    seen = set()
    for g1, g2, g3 in length3_relations(nucleus):
        vec = ab_vector(group, g1 * g2 * g3)
        key = tuple(vec)
        if any(key) and key not in seen:
            seen.add(key)
            rows.append(vec)
    return rows


def vg_abelianization(group: GroupDef, relations: Matrix | None = None,
                      budget: Budget = Budget()) -> AbelGroup:
    """Abelianization of the table group over a self-similar group.

    The group abelianization is presented as the free abelian group on the
    generators modulo `relations` (default: abelianized nucleus relations of
    length at most 3, which presents the finitely presented cover; the two
    agree whenever no nontrivial nucleus state dies in the faithful
    action, which holds by construction here).  Even alphabet: cokernel of
    1 - sigma stacked over the relations.  Odd alphabet: one extra basis
    vector t of order two, with sigma extended by the permutation parity.
    """
    n = len(group.generators)
    if relations is None:
        nucleus = compute_nucleus(group, budget)
        # the default relations present the quotient exactly only when no
        # nontrivial nucleus state acts trivially; states are interned by
        # their action here, so a violation can only mean machinery breakage
        for i in nucleus:
            verdict = group.is_trivial(nucleus.reps[i])
            if (verdict.status == "trivial") != (i == nucleus.identity_index):
                warnings.warn(
                    f"nucleus state {nucleus.reps[i]} degenerates in the faithful "
                    "action; the reported abelianization is the cover's answer"
                )
        relations = nucleus_relation_rows(group, nucleus)
    else:
        relations = [list(r) for r in relations]
        if any(len(r) != n for r in relations):
            raise ValueError("relation rows must match the generator count")
    sig = sigma_matrix(group)
    if group.d % 2 == 0:
        rows = [[(1 if i == j else 0) - sig[i][j] for j in range(n)] for i in range(n)]
        rows += relations
        return cokernel(rows, n)
    parity = sign_vector(group)
    rows = []
    for i in range(n):  # (1 - sigma_1) on generator i: e_i - (parity_i, sigma(e_i))
        rows.append([-parity[i]] + [(1 if i == j else 0) - sig[i][j] for j in range(n)])
    rows.append([2] + [0] * n)  # the extra summand has order two
    rows += [[0] + list(r) for r in relations]
    return cokernel(rows, n + 1)


# -- post-critically finite rational maps -------------------------------------

@dataclass(frozen=True)
class PostCriticalData:
    """Combinatorial portrait of a post-critically finite hyperbolic map:
    the finite forward orbit of the critical values, the map on it, parity
    of the degree, and which points have an even number of preimages
    ("critical values mod 2"; only meaningful for odd degree)."""

    points: tuple[str, ...]
    fmap: dict[str, str] = field(hash=False)
    degree_odd: bool = False
    cvmod2: frozenset[str] = frozenset()

    def __post_init__(self):
        pts = set(self.points)
        if len(self.points) != len(pts) or not pts:
            raise ValueError("portrait needs a nonempty set of distinct points")
        if set(self.fmap) != pts or any(v not in pts for v in self.fmap.values()):
            raise ValueError("map must be a total self-map of the points")
        if not self.cvmod2 <= pts:
            raise ValueError("critical-value flags must be portrait points")
        if not self.degree_odd and self.cvmod2:
            raise ValueError("critical-value-mod-2 flags apply to odd degree only")
        if self.degree_odd and len(self.cvmod2) % 2:
            raise ValueError("odd degree forces an even number of critical values mod 2")

    def preimages(self, z: str) -> list[str]:
        return sorted(y for y in self.points if self.fmap[y] == z)

    def cycles(self) -> list[tuple[str, ...]]:
        """Cycles of the portrait map (the attracting cycles), each rotated
        to start at its least point, sorted."""
        out = []
        seen: set[str] = set()
        for start in self.points:
            if start in seen:
                continue
            trail = []
            pos = {}
            z = start
            while z not in pos and z not in seen:
                pos[z] = len(trail)
                trail.append(z)
                z = self.fmap[z]
            if z in pos:  # new cycle found
                cyc = trail[pos[z]:]
                k = cyc.index(min(cyc))
                out.append(tuple(cyc[k:] + cyc[:k]))
            seen.update(trail)
        return sorted(out)

    def cycle_of(self, z: str) -> tuple[str, ...]:
        """The cycle the forward orbit of z falls into."""
        cycles = {c: set(c) for c in self.cycles()}
        seen = set()
        while z not in seen:
            seen.add(z)
            for cyc, mem in cycles.items():
                if z in mem:
                    return cyc
            z = self.fmap[z]
        raise AssertionError("orbit left the portrait")

    def to_json(self) -> dict:
        return {
            "degree_parity": "odd" if self.degree_odd else "even",
            "points": list(self.points),
            "map": dict(self.fmap),
            "preimages": {z: self.preimages(z) for z in self.points},
            "cvmod2": sorted(self.cvmod2),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PostCriticalData":
        parity = data.get("degree_parity", "even")
        if parity not in ("even", "odd"):
            raise ValueError(f"bad degree parity {parity!r}")
        pcd = cls(
            points=tuple(data["points"]),
            fmap=dict(data["map"]),
            degree_odd=(parity == "odd"),
            cvmod2=frozenset(data.get("cvmod2", ())),
        )
        if "preimages" in data:
            for z, ys in data["preimages"].items():
                if sorted(ys) != pcd.preimages(z):
                    raise ValueError(f"preimage list for {z!r} contradicts the map")
        return pcd


def rational_map_abelianization(portrait: PostCriticalData) -> AbelGroup:
    """Cokernel of 1 - sigma on the portrait homology: one generator per
    point, sum of all generators zero, sigma summing over the portrait
    preimages; odd degree adds the order-two summand twisted by the
    critical-value flags."""
    pts = sorted(portrait.points)
    index = {z: i for i, z in enumerate(pts)}
    n = len(pts)
    sig = [[0] * n for _ in range(n)]
    for z in pts:
        for y in portrait.preimages(z):
            sig[index[z]][index[y]] += 1
    if not portrait.degree_odd:
        rows = [[(1 if i == j else 0) - sig[i][j] for j in range(n)] for i in range(n)]
        rows.append([1] * n)
        return cokernel(rows, n)
    rows = []
    for z in pts:
        i = index[z]
        parity = 1 if z in portrait.cvmod2 else 0
        rows.append([-parity] + [(1 if i == j else 0) - sig[i][j] for j in range(n)])
    rows.append([2] + [0] * n)
    rows.append([0] + [1] * n)
    return cokernel(rows, n + 1)


def predicted_rational_formula(k: int, l: int, odd_exception: bool = False) -> AbelGroup:
    """Closed form for a hyperbolic portrait with k attracting cycles whose
    lengths have greatest common divisor l; the odd-degree exception branch
    adds an order-two summand."""
    if k < 1 or l < 1:
        raise ValueError("need k >= 1 and l >= 1")
    factors = [l] if l > 1 else []
    if odd_exception:
        factors.append(2)
    return AbelGroup.from_factors(k - 1, factors)


def predicted_for_portrait(portrait: PostCriticalData) -> AbelGroup:
    """Apply the closed form to a portrait: k cycles, l their gcd, and the
    exception branch exactly when every cycle attracts an even number of
    critical values mod 2."""
    cycles = portrait.cycles()
    k = len(cycles)
    l = 0
    for c in cycles:
        l = gcd(l, len(c))
    exception = False
    if portrait.degree_odd:
        attracted = {c: 0 for c in cycles}
        for z in portrait.cvmod2:
            attracted[portrait.cycle_of(z)] += 1
        exception = all(v % 2 == 0 for v in attracted.values())
    return predicted_rational_formula(k, l, exception)


def formula_applies(portrait: PostCriticalData) -> bool:
    """Whether the closed form is valid for this flag configuration.

    Even degree: always.  Odd degree: always, except when every cycle
    attracts an even number of flagged points, every cycle length is even,
    and the flag parities accumulated around the cycles and down the tails
    sum odd; then the order-two summand couples with the sum-zero homology
    relation (flag patterns of that shape are beyond the branching a single
    rational map can carry, starting with Riemann-Hurwitz on the minimal
    ones).
    """
    if not portrait.degree_odd:
        return True
    cycles = portrait.cycles()
    cycset = {z for c in cycles for z in c}
    attracted = {c: 0 for c in cycles}
    for z in portrait.cvmod2:
        attracted[portrait.cycle_of(z)] += 1
    if any(v % 2 for v in attracted.values()):
        return True
    if any(len(c) % 2 for c in cycles):
        return True

    def tail_flag_count(z: str) -> int:
        seen: set[str] = set()
        stack, count = [z], 0
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            if w in portrait.cvmod2:
                count += 1
            stack.extend(y for y in portrait.preimages(w) if y not in cycset)
        return count

    total = sum(tail_flag_count(z) for z in portrait.points if z not in cycset)
    for cyc in cycles:
        members = set(cyc)
        order = [cyc[0]]
        while len(order) < len(cyc):  # walk along predecessors
            order.append(next(y for y in portrait.preimages(order[-1]) if y in members))
        offset = 0
        for z in order:
            total += offset
            t_z = (1 if z in portrait.cvmod2 else 0) + sum(
                tail_flag_count(y) for y in portrait.preimages(z) if y not in cycset
            )
            offset = (offset + t_z) % 2
    return total % 2 == 0


def random_portrait(rng: random.Random, max_cycles: int = 4, max_len: int = 5,
                    degree_odd: bool | None = None, max_tail: int = 4) -> PostCriticalData:
    """Random consistent portrait: some cycles, optional tail points falling
    into them, and (odd degree) an even-sized flag set within the closed
    formula's domain of validity."""
    if degree_odd is None:
        degree_odd = rng.random() < 0.5
    k = rng.randint(1, max_cycles)
    points: list[str] = []
    fmap: dict[str, str] = {}
    for c in range(k):
        length = rng.randint(1, max_len)
        cyc = [f"c{c}p{i}" for i in range(length)]
        for i, z in enumerate(cyc):
            fmap[z] = cyc[(i + 1) % length]
        points.extend(cyc)
    for t in range(rng.randint(0, max_tail)):
        z = f"t{t}"
        fmap[z] = rng.choice(points)
        points.append(z)
    while True:
        flags: frozenset[str] = frozenset()
        if degree_odd:
            n_flags = 2 * rng.randint(0, len(points) // 2)
            flags = frozenset(rng.sample(points, n_flags))
        portrait = PostCriticalData(tuple(points), fmap, degree_odd, flags)
        if formula_applies(portrait):
            return portrait
