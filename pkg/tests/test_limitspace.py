from itertools import product

import pytest

from selfsim import resolve_group
from selfsim.limitspace import (
    cylinder_stable_states,
    level_identifications,
    moore_diagram,
    quotient_graph,
    schreier_graph,
)
from selfsim.nucleus import compute_nucleus, is_level_transitive
from selfsim.ssgroup import parse_group


def test_moore_diagram_examples(adding_nucleus, grigorchuk_nucleus, trivial2):
    md = moore_diagram(adding_nucleus)
    assert len(md.states) == 3
    a = md.states.index("a")
    edges_from_a = {(x, y, md.states[dst]) for s, x, y, dst in md.edges if s == a}
    assert edges_from_a == {(0, 1, "e"), (1, 0, "a")}

    md = moore_diagram(grigorchuk_nucleus)
    assert len(md.states) == 5

    md = moore_diagram(compute_nucleus(trivial2))
    assert len(md.states) == 1
    assert {(x, y) for _, x, y, _ in md.edges} == {(0, 0), (1, 1)}
    assert "digraph" in md.to_dot()


def test_level_identifications_examples(adding, adding_nucleus, trivial2, grigorchuk_nucleus):
    pairs = level_identifications(adding_nucleus, 2)
    a = adding.word("a")
    expected = set()
    for v in product(range(2), repeat=2):
        u = adding.act(a, v)
        expected.add((min(v, u), max(v, u)))
    assert pairs == expected

    assert level_identifications(compute_nucleus(trivial2), 3) == set()

    pairs3 = level_identifications(grigorchuk_nucleus, 3)
    # the interval structure: exactly 2^3 - 1 touching pairs
    assert len(pairs3) == 7


def test_identification_count_bound(grigorchuk_nucleus, basilica_nucleus):
    for nucleus in (grigorchuk_nucleus, basilica_nucleus):
        for n in range(1, 7):
            pairs = level_identifications(nucleus, n)
            assert len(pairs) <= (len(nucleus) - 1) * nucleus.group.d ** n


def test_cylinder_stable_states(adding_nucleus, grigorchuk_nucleus):
    assert cylinder_stable_states(adding_nucleus) == {adding_nucleus.identity_index}
    assert cylinder_stable_states(grigorchuk_nucleus) == {grigorchuk_nucleus.identity_index}
    flip = parse_group("alphabet: 2\na = (0 1)(a, a)\n")
    fnuc = compute_nucleus(flip)
    assert cylinder_stable_states(fnuc) == set(range(len(fnuc)))


def test_quotient_graph_adding(adding_nucleus):
    for n in range(1, 8):
        q = quotient_graph(adding_nucleus, n)
        assert len(q.blocks) == 2 ** n
        assert all(len(b) == 1 for b in q.blocks)
        if n >= 2:
            assert q.is_cycle()
        assert q.is_connected()


def test_quotient_graph_grigorchuk(grigorchuk_nucleus):
    for n in range(1, 8):
        q = quotient_graph(grigorchuk_nucleus, n)
        assert len(q.blocks) == 2 ** n
        assert q.is_path()


def test_quotient_graph_trivial(trivial2):
    q = quotient_graph(compute_nucleus(trivial2), 3)
    assert len(q.blocks) == 8
    assert not q.edges
    assert not q.is_connected()


def test_quotient_graph_fused_classes():
    flip = parse_group("alphabet: 2\na = (0 1)(a, a)\n")
    nucleus = compute_nucleus(flip)
    q = quotient_graph(nucleus, 3)
    assert len(q.blocks) == 4
    assert all(len(b) == 2 for b in q.blocks)
    assert not q.is_connected()  # the flip group is not level-transitive


def test_connectivity_matches_level_transitivity():
    groups = ["adding", "basilica", "grigorchuk", "kneading:01", "trivial:2"]
    for name in groups:
        group = resolve_group(name)
        nucleus = compute_nucleus(group)
        for n in range(1, 7):
            q = quotient_graph(nucleus, n)
            assert q.is_connected() == is_level_transitive(group, n), (name, n)


def test_shift_well_defined(adding_nucleus, grigorchuk_nucleus, basilica_nucleus):
    for nucleus in (adding_nucleus, grigorchuk_nucleus, basilica_nucleus):
        for n in range(2, 7):
            pairs = level_identifications(nucleus, n)
            prev = level_identifications(nucleus, n - 1)
            for v, u in pairs:
                sv, su = v[:-1], u[:-1]
                assert sv == su or (min(sv, su), max(sv, su)) in prev
            q = quotient_graph(nucleus, n)
            assert q.shift is not None
            prev_q = quotient_graph(nucleus, n - 1)
            for i, block in enumerate(q.blocks):
                targets = {prev_q.class_of(w[:-1]) for w in block}
                assert targets == {q.shift[i]}


def test_quotient_exports(adding_nucleus):
    q = quotient_graph(adding_nucleus, 2)
    data = q.to_json()
    assert data["level"] == 2
    assert len(data["classes"]) == 4
    assert "graph" in q.to_dot()


def test_schreier_graph_examples(adding, grigorchuk):
    s = schreier_graph(adding, 4)
    assert len(s.vertices) == 16
    assert len(s.edges) == 16  # a single 16-cycle
    assert s.is_connected()
    deg = {v: 0 for v in s.vertices}
    for v, u in s.edges:
        deg[v] += 1
        deg[u] += 1
    assert all(x == 2 for x in deg.values())

    s = schreier_graph(grigorchuk, 3)
    assert len(s.vertices) == 8
    assert s.is_connected()

    inert = parse_group("alphabet: 2\na = ()(a, a)\n")
    s = schreier_graph(inert, 1)
    assert len(s.vertices) == 2
    assert not s.edges
    assert not s.is_connected()


def test_schreier_exports(grigorchuk):
    s = schreier_graph(grigorchuk, 2)
    data = s.to_json()
    assert data["level"] == 2
    assert all(len(e) == 3 for e in data["edges"])
    assert "graph" in s.to_dot()


def test_level_limit_errors(adding_nucleus):
    with pytest.raises(ValueError):
        level_identifications(adding_nucleus, 25, limit=1000)
    with pytest.raises(ValueError):
        quotient_graph(adding_nucleus, 25, limit=1000)
    with pytest.raises(ValueError):
        schreier_graph(adding_nucleus.group, 25, limit=1000)
