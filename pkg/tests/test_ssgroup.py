import random
from itertools import product

import pytest

import oracles
from selfsim.ssgroup import GenWord, GroupDef, parse_group
from selfsim.words import parse_word


def test_genword_reduction():
    assert str(GenWord.parse("aA")) == "e"
    assert str(GenWord.parse("abBA")) == "e"
    assert str(GenWord.parse("abBc")) == "ac"
    assert str(GenWord.parse("b D C")) == "bDC"
    assert GenWord.parse("ab").inverse() == GenWord.parse("BA")
    assert GenWord.parse("a") * GenWord.parse("A") == GenWord()


def test_parse_group_adding(adding):
    assert adding.d == 2
    assert adding.generators == ("a",)
    perm, secs = adding.recursion["a"]
    assert perm == (1, 0)
    assert [str(s) for s in secs] == ["e", "a"]


def test_parse_group_grigorchuk(grigorchuk):
    assert grigorchuk.generators == ("a", "b", "c", "d")
    assert grigorchuk.recursion["a"][0] == (1, 0)
    assert [str(s) for s in grigorchuk.recursion["b"][1]] == ["a", "c"]
    assert [str(s) for s in grigorchuk.recursion["c"][1]] == ["a", "d"]
    assert [str(s) for s in grigorchuk.recursion["d"][1]] == ["e", "b"]


def test_parse_group_errors():
    with pytest.raises(ValueError):
        parse_group("alphabet: 2\na = (0 1)(e, b)\n")  # undeclared symbol
    with pytest.raises(ValueError):
        parse_group("alphabet: 2\na = (0 0)(e, a)\n")  # not a bijection
    with pytest.raises(ValueError):
        parse_group("alphabet: 2\na = (0 2)(e, a)\n")  # letter out of range
    with pytest.raises(ValueError):
        parse_group("a = (0 1)(e, a)\n")  # missing header
    with pytest.raises(ValueError):
        parse_group("alphabet: 2\na = (0 1)(e, a, a)\n")  # arity


def test_group_text_roundtrip(grigorchuk, adding, basilica):
    for g in (grigorchuk, adding, basilica):
        again = parse_group(g.to_text())
        assert again.to_text() == g.to_text()
        assert again.content_hash() == g.content_hash()


def test_wreath_decompose_examples(adding):
    a = adding.word("a")
    perm, secs = adding.wreath(a)
    assert perm == (1, 0)
    assert [str(s) for s in secs] == ["e", "a"]
    perm, secs = adding.wreath(a * a)
    assert perm == (0, 1)
    assert [str(s) for s in secs] == ["a", "a"]
    perm, secs = adding.wreath(GenWord())
    assert perm == (0, 1) or perm == (0, 1)
    assert perm == tuple(range(2))
    assert all(str(s) == "e" for s in secs)


def test_act_examples(adding, grigorchuk):
    a = adding.word("a")
    assert adding.act(a, (1, 1, 0)) == (0, 0, 1)
    assert grigorchuk.act(grigorchuk.word("a"), (0, 1, 1)) == (1, 1, 1)
    assert adding.act(GenWord(), (0, 1, 0)) == (0, 1, 0)


def test_act_matches_odometer_model(adding):
    a = adding.word("a")
    for n in range(1, 9):
        for v in product(range(2), repeat=n):
            assert adding.act(a, v) == oracles.odometer_increment(v)


def test_section_examples(adding, grigorchuk):
    a = adding.word("a")
    assert str(adding.section(a, (1,))) == "a"
    assert str(adding.section(a, (0,))) == "e"
    assert str(grigorchuk.section(grigorchuk.word("b"), (1,))) == "c"
    assert str(grigorchuk.section(grigorchuk.word("b"), (0,))) == "a"


def test_section_cocycle(grigorchuk):
    rng = random.Random(1)
    syms = "abcdABCD"
    for _ in range(40):
        g = grigorchuk.word("".join(rng.choice(syms) for _ in range(rng.randint(1, 4))))
        v = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
        u = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
        lhs = grigorchuk.section(g, v + u)
        rhs = grigorchuk.section(grigorchuk.section(g, v), u)
        assert grigorchuk.are_equal(lhs, rhs).status == "equal"


def test_perm_on_level_examples(adding, grigorchuk):
    a = adding.word("a")
    perm = adding.perm_on_level(a, 2)
    # lexicographic level order: 00, 01, 10, 11; odometer 4-cycle
    words = [(0, 0), (0, 1), (1, 0), (1, 1)]
    mapping = {words[i]: words[perm[i]] for i in range(4)}
    assert mapping == {(0, 0): (1, 0), (1, 0): (0, 1), (0, 1): (1, 1), (1, 1): (0, 0)}
    assert grigorchuk.perm_on_level(grigorchuk.word("a"), 1) == (1, 0)
    assert adding.perm_on_level(GenWord(), 3) == tuple(range(8))
    with pytest.raises(ValueError):
        adding.perm_on_level(a, 30, limit=1000)


def test_is_trivial_examples(adding, grigorchuk):
    assert grigorchuk.is_trivial(grigorchuk.word("b D C")).status == "trivial"
    assert grigorchuk.is_trivial(grigorchuk.word("bb")).status == "trivial"
    res = adding.is_trivial(adding.word("aa"))
    assert res.status == "nontrivial"
    assert adding.act(adding.word("aa"), res.witness) != res.witness
    assert res.witness == (0, 0)


def test_is_trivial_undecided_budget():
    # fresh group: nothing cached, and the closure of (ad)^4 has 6 states
    g = parse_group("alphabet: 2\na = (0 1)(e, e)\nb = ()(a, c)\nc = ()(a, d)\nd = ()(e, b)\n")
    res = g.is_trivial(g.word("adadadad"), limit=3)
    assert res.status == "undecided"
    assert g.is_trivial(g.word("adadadad"), limit=100).status == "trivial"


def test_are_equal_examples(adding, grigorchuk):
    assert grigorchuk.are_equal(grigorchuk.word("b"), grigorchuk.word("cd")).status == "equal"
    res = adding.are_equal(adding.word("a"), adding.word("A"))
    assert res.status == "different"
    v = res.witness
    assert adding.act(adding.word("a"), v) != adding.act(adding.word("A"), v)
    g = grigorchuk.word("abab")
    assert grigorchuk.are_equal(g, g).status == "equal"


def test_action_is_homomorphism(grigorchuk, basilica):
    rng = random.Random(2)
    for group, syms in ((grigorchuk, "abcdABCD"), (basilica, "abAB")):
        for _ in range(30):
            g = group.word("".join(rng.choice(syms) for _ in range(rng.randint(0, 4))))
            h = group.word("".join(rng.choice(syms) for _ in range(rng.randint(0, 4))))
            for n in range(1, 7):
                for v in product(range(2), repeat=n):
                    assert group.act(g * h, v) == group.act(g, group.act(h, v))
                break  # a single length per pair keeps this quick
            v6 = tuple(rng.randint(0, 1) for _ in range(6))
            assert group.act(g * h, v6) == group.act(g, group.act(h, v6))


def test_wreath_is_homomorphism(grigorchuk):
    rng = random.Random(3)
    syms = "abcdABCD"
    for _ in range(25):
        g = grigorchuk.word("".join(rng.choice(syms) for _ in range(rng.randint(1, 4))))
        h = grigorchuk.word("".join(rng.choice(syms) for _ in range(rng.randint(1, 4))))
        pg, sg = grigorchuk.wreath(g)
        ph, sh = grigorchuk.wreath(h)
        pgh, sgh = grigorchuk.wreath(g * h)
        assert pgh == tuple(pg[ph[x]] for x in range(2))
        for x in range(2):
            assert grigorchuk.are_equal(sgh[x], sg[ph[x]] * sh[x]).status == "equal"


def test_is_trivial_matches_bruteforce_on_grigorchuk(grigorchuk):
    words = [""]
    for _ in range(4):
        words = [w + s for w in words for s in "abcd"] + words
    seen = set()
    for text in set(words):
        g = grigorchuk.word(text)
        verdict = grigorchuk.is_trivial(g)
        assert verdict.status in ("trivial", "nontrivial")
        brute = all(
            oracles.apply_word(grigorchuk, g.factors, v) == v
            for v in product(range(2), repeat=8)
        )
        assert (verdict.status == "trivial") == brute, text


def test_machine_interning_identifies_equal_elements(grigorchuk):
    m = grigorchuk.machine
    assert m.intern(grigorchuk.word("b")) == m.intern(grigorchuk.word("cd"))
    assert m.intern(grigorchuk.word("bb")) == m.identity
    assert m.intern(grigorchuk.word("a")) == m.intern(grigorchuk.word("A"))
    assert m.intern(grigorchuk.word("ab")) != m.intern(grigorchuk.word("ba"))


def test_witness_words_are_valid(basilica):
    rng = random.Random(4)
    for _ in range(40):
        g = basilica.word("".join(rng.choice("abAB") for _ in range(rng.randint(1, 6))))
        res = basilica.is_trivial(g)
        if res.status == "nontrivial":
            assert basilica.act(g, res.witness) != res.witness
