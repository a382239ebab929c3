import random
from itertools import product

import pytest

import oracles
from selfsim import kneading_group, resolve_group
from selfsim.nucleus import (
    Budget,
    NotContractingError,
    compute_nucleus,
    is_level_transitive,
    is_regular,
    is_self_replicating,
    length3_relations,
    section_closure,
)
from selfsim.ssgroup import GenWord, parse_group

LAMPLIGHTER = "alphabet: 2\na = (0 1)(a, b)\nb = ()(a, b)\n"


def test_section_closure_examples(adding, grigorchuk):
    reps = [str(w) for w in section_closure(adding, [adding.word("a")])]
    assert sorted(reps) == ["a", "e"]
    reps = [str(w) for w in section_closure(grigorchuk, [grigorchuk.word("b")])]
    assert sorted(reps) == ["a", "b", "c", "d", "e"]
    assert [str(w) for w in section_closure(adding, [])] == ["e"]


def test_nucleus_sizes(adding_nucleus, grigorchuk_nucleus, basilica_nucleus):
    assert len(adding_nucleus) == 3
    assert len(grigorchuk_nucleus) == 5
    assert len(basilica_nucleus) == 7


@pytest.mark.parametrize("name,size", [("adding", 3), ("grigorchuk", 5), ("basilica", 7)])
def test_nucleus_matches_bruteforce_oracle(name, size):
    group = resolve_group(name)
    brute = oracles.nucleus(group, level=10)
    assert len(brute) == size
    computed = compute_nucleus(group)
    assert len(computed) == size
    got_sigs = {oracles.signature(group, rep.factors, 10) for rep in computed.reps}
    assert got_sigs == set(brute)


def test_lamplighter_not_contracting():
    group = parse_group(LAMPLIGHTER)
    with pytest.raises(NotContractingError):
        compute_nucleus(group)


def test_lamplighter_oracle_grows():
    group = parse_group(LAMPLIGHTER)
    with pytest.raises(oracles.OracleBudget):
        oracles.nucleus(group, level=6, cap=40)


def test_nucleus_structure(basilica_nucleus):
    n = basilica_nucleus
    e = n.identity_index
    assert str(n.reps[e]) == "e"
    d = n.group.d
    for i in n:
        for x in range(d):
            assert 0 <= n.section(i, x) < len(n)
        assert n.inverses[n.inverses[i]] == i
    reps = {str(r) for r in n.reps}
    assert reps == {"e", "a", "b", "A", "B", "aB", "bA"}


def test_nucleus_absorbs_random_products(basilica_nucleus):
    n = basilica_nucleus
    group = n.group
    machine = group.machine
    rng = random.Random(5)
    members = set(n.ids)
    for _ in range(200):
        i, j = rng.randrange(len(n)), rng.randrange(len(n))
        prod = n.reps[i] * n.reps[j]
        # all sections at depth len(nucleus) must lie inside
        sid = machine.intern(prod)
        for v in product(range(group.d), repeat=4):
            cur = sid
            for x in v:
                cur = machine.kids[cur][x]
            assert cur in members


def test_nucleus_minimality_small_examples():
    for name in ("adding", "grigorchuk", "basilica"):
        group = resolve_group(name)
        nucleus = compute_nucleus(group)
        machine = group.machine
        # every non-identity state recurs arbitrarily deep in some product
        # of at most two generator letters, so no state can be dropped
        needed = set(nucleus.ids) - {machine.identity}
        gens = [GenWord([(s, e)]) for s in group.generators for e in (1, -1)]
        words = gens + [g * h for g in gens for h in gens]
        persistent = set()
        for w in words:
            sid = machine.intern(w)
            region = machine.reachable([sid])
            indeg = {s: 0 for s in region}
            for s in region:
                for kid in machine.kids[s]:
                    indeg[kid] += 1
            alive = set(region)
            queue = [s for s, k in indeg.items() if k == 0]
            while queue:
                s = queue.pop()
                alive.discard(s)
                for kid in machine.kids[s]:
                    if kid in alive:
                        indeg[kid] -= 1
                        if indeg[kid] == 0:
                            queue.append(kid)
            persistent |= alive
        assert needed <= persistent


def test_is_regular(adding_nucleus, grigorchuk_nucleus, basilica_nucleus, trivial2):
    assert is_regular(adding_nucleus)
    assert not is_regular(grigorchuk_nucleus)
    assert is_regular(basilica_nucleus)
    assert is_regular(compute_nucleus(trivial2))


def test_is_regular_agrees_with_direct_check(adding_nucleus, grigorchuk_nucleus,
                                             basilica_nucleus):
    # direct form: for every state some depth n <= 10 works
    for nucleus in (adding_nucleus, grigorchuk_nucleus, basilica_nucleus):
        group = nucleus.group
        e = nucleus.identity_index

        def state_ok(i):
            for n in range(1, 11):
                good = True
                for v in product(range(group.d), repeat=n):
                    if nucleus.act(i, v) == v:
                        cur = i
                        for x in v:
                            cur = nucleus.section(cur, x)
                        if cur != e:
                            good = False
                            break
                if good:
                    return True
            return False

        direct = all(state_ok(i) for i in nucleus if i != e)
        assert direct == is_regular(nucleus)


def test_self_replicating(adding, basilica, grigorchuk):
    assert is_self_replicating(adding, 2) == "yes"
    assert is_self_replicating(basilica, 4) == "yes"
    # contrary to a first guess, the letter swapper witnesses all pairs here
    assert is_self_replicating(grigorchuk, 2) == "yes"
    flip = parse_group("alphabet: 2\na = (0 1)(a, a)\n")
    assert is_self_replicating(flip, 6) == "unknown"


def test_level_transitive(adding, grigorchuk):
    assert is_level_transitive(adding, 8)
    assert is_level_transitive(grigorchuk, 8)
    inert = parse_group("alphabet: 2\na = ()(a, a)\n")
    assert not is_level_transitive(inert, 1)


def test_length3_relations_examples(adding_nucleus, grigorchuk_nucleus, trivial2):
    rel = length3_relations(grigorchuk_nucleus)
    texts = {tuple(str(w) for w in t) for t in rel}
    assert ("a", "a", "e") in texts
    assert ("b", "b", "e") in texts
    assert ("b", "c", "d") in texts

    rel = length3_relations(adding_nucleus)
    texts = {tuple(str(w) for w in t) for t in rel}
    # identity padding plus the inverse pair in all arrangements
    expected = {
        ("e", "e", "e"),
        ("a", "A", "e"), ("A", "a", "e"),
        ("a", "e", "A"), ("A", "e", "a"),
        ("e", "a", "A"), ("e", "A", "a"),
    }
    assert texts == expected

    rel = length3_relations(compute_nucleus(trivial2))
    assert [tuple(str(w) for w in t) for t in rel] == [("e", "e", "e")]


def test_kneading_nucleus_budgets():
    for v in ("", "0", "1", "01", "111"):
        group = kneading_group(v)
        nucleus = compute_nucleus(group)
        assert len(nucleus) >= 3


def test_nucleus_deterministic_across_runs():
    # the contract: the final set does not depend on exploration history
    for name in ("adding", "basilica", "grigorchuk"):
        first = compute_nucleus(resolve_group(name))
        second = compute_nucleus(resolve_group(name))
        assert [str(r) for r in first.reps] == [str(r) for r in second.reps]
        assert first.sections == second.sections
        assert first.inverses == second.inverses


def test_nucleus_cache_roundtrip(grigorchuk_nucleus):
    from selfsim.nucleus import Nucleus

    data = grigorchuk_nucleus.to_json()
    again = Nucleus.from_json(grigorchuk_nucleus.group, data)
    assert [str(r) for r in again.reps] == [str(r) for r in grigorchuk_nucleus.reps]
    assert again.sections == grigorchuk_nucleus.sections
