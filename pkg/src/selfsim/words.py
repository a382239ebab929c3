"""Finite words over a d-letter alphabet, the prefix order, and antichains.

A word is a tuple of letters 0..d-1; the empty tuple is the root of the
tree of all finite words.  A set of pairwise prefix-incomparable words (an
antichain) describes a clopen subset of the boundary: the union of the
cylinders hanging below its words.  Completeness of an antichain (the
cylinders cover everything) is checked with exact rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

Word = tuple[int, ...]

EPSILON: Word = ()


def parse_word(text: str) -> Word:
    """Parse a digit string like "011"; "e" or "" is the empty word."""
    if text in ("e", ""):
        return ()
    if not text.isdigit():
        raise ValueError(f"not a word: {text!r}")
    return tuple(int(c) for c in text)


def format_word(word: Word) -> str:
    return "".join(str(x) for x in word) if word else "e"


def level_words(d: int, n: int):
    """All words of length n in lexicographic order."""
    return (tuple(v) for v in product(range(d), repeat=n))


def is_prefix(v: Word, u: Word) -> bool:
    """True iff v is a beginning of u (equality counts)."""
    return len(v) <= len(u) and u[: len(v)] == v


def prefix_compare(v: Word, u: Word) -> str:
    """One of "equal", "prefix" (v before u), "extension", "incomparable".

    Equal words are below each other in both directions; that case is
    reported as "equal" rather than picking a side.
    """
    if v == u:
        return "equal"
    if is_prefix(v, u):
        return "prefix"
    if is_prefix(u, v):
        return "extension"
    return "incomparable"


def lex_compare(v: Word, u: Word) -> int:
    """Total order: letterwise, with a prefix sorting before its extensions."""
    if v == u:
        return 0
    return -1 if v < u else 1


def is_antichain(words) -> bool:
    ws = list(words)
    for i, v in enumerate(ws):
        for u in ws[i + 1 :]:
            if is_prefix(v, u) or is_prefix(u, v):
                return False
    return True


def is_complete_antichain(words, d: int) -> bool:
    """Antichain whose cylinders partition the boundary.

    Uses the exact identity sum(d**-len(v)) == 1; floating point would
    accept near-misses.
    """
    ws = set(words)
    if len(ws) != len(list(words)) or not is_antichain(ws):
        return False
    return sum(Fraction(1, d ** len(v)) for v in ws) == 1


def m_invariant(words, d: int) -> int:
    """Cylinder-count residue mod d-1 of the clopen set given by an antichain.

    Splitting one cylinder into its d children changes the count by d-1,
    so the residue does not depend on the chosen decomposition.  For d=2
    it is identically 0.
    """
    if d < 2:
        raise ValueError("alphabet must have at least two letters")
    return len(set(words)) % (d - 1) if d > 2 else 0


class Antichain:
    """A finite set of pairwise incomparable words over a fixed alphabet."""

    __slots__ = ("words", "d")

    def __init__(self, words, d: int):
        ws = tuple(sorted(set(tuple(w) for w in words)))
        if d < 2:
            raise ValueError("alphabet must have at least two letters")
        for w in ws:
            if any(x < 0 or x >= d for x in w):
                raise ValueError(f"letter out of range in {format_word(w)}")
        if not is_antichain(ws):
            raise ValueError("words are not pairwise incomparable")
        self.words = ws
        self.d = d

    @classmethod
    def clopen(cls, words, d: int) -> "Antichain":
        """Coarsest antichain describing the union of the given cylinders.

        Accepts overlapping input (nested cylinders are absorbed) and then
        merges every complete family of d siblings into their parent.
        """
        ws = set(tuple(w) for w in words)
        keep = {w for w in ws if not any(is_prefix(v, w) and v != w for v in ws)}
        merged = True
        while merged:
            merged = False
            for w in sorted(keep, key=lambda w: (-len(w), w)):
                if w and all(w[:-1] + (x,) in keep for x in range(d)):
                    for x in range(d):
                        keep.discard(w[:-1] + (x,))
                    keep.add(w[:-1])
                    merged = True
                    break
        return cls(keep, d)

    def is_complete(self) -> bool:
        return is_complete_antichain(self.words, self.d)

    def is_empty(self) -> bool:
        return not self.words

    def is_whole(self) -> bool:
        """True iff the clopen set is the whole boundary."""
        return Antichain.clopen(self.words, self.d).words == ((),)

    def m_invariant(self) -> int:
        return m_invariant(self.words, self.d)

    def refines(self, other: "Antichain") -> bool:
        """Every word here extends (or equals) a word of `other`."""
        return all(any(is_prefix(v, w) for v in other.words) for w in self.words)

    def split(self, word: Word) -> "Antichain":
        """Replace one word by its d children (elementary splitting)."""
        word = tuple(word)
        if word not in self.words:
            raise ValueError(f"{format_word(word)} not in antichain")
        ws = [w for w in self.words if w != word]
        ws.extend(word + (x,) for x in range(self.d))
        return Antichain(ws, self.d)

    def complement(self) -> "Antichain":
        """Coarsest antichain of the complementary clopen set."""
        out: list[Word] = []
        have = set(self.words)

        def walk(prefix: Word):
            if prefix in have:
                return
            if not any(is_prefix(prefix, w) for w in have):
                out.append(prefix)
                return
            for x in range(self.d):
                walk(prefix + (x,))

        walk(())
        return Antichain(out, self.d)

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return tuple(word) in self.words

    def __eq__(self, other):
        return (
            isinstance(other, Antichain)
            and self.words == other.words
            and self.d == other.d
        )

    def __hash__(self):
        return hash((self.words, self.d))

    def __repr__(self):
        return f"Antichain([{', '.join(format_word(w) for w in self.words)}], d={self.d})"

    def to_json(self) -> list[str]:
        return [format_word(w) for w in self.words]

    @classmethod
    def from_json(cls, data, d: int) -> "Antichain":
        return cls([parse_word(s) for s in data], d)


def common_refinement(a1: Antichain, a2: Antichain) -> Antichain:
    """Coarsest complete antichain refining two complete antichains.

    Every boundary point passes through exactly one word of each input;
    the refinement keeps the deeper of the two.
    """
    if a1.d != a2.d:
        raise ValueError("alphabet mismatch")
    if not a1.is_complete() or not a2.is_complete():
        raise ValueError("common refinement needs complete antichains")
    out = set()
    for v in a1.words:
        for u in a2.words:
            if is_prefix(v, u):
                out.add(u)
            elif is_prefix(u, v):
                out.add(v)
    return Antichain(out, a1.d)
