import json
import time

import pytest

from selfsim import kneading_group, parse_group, resolve_group
from selfsim.abelian import vg_abelianization
from selfsim.catalogue import builtin_groups
from selfsim.cli import main
from selfsim.nucleus import compute_nucleus


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_wp_examples(capsys):
    code, out, _ = run(capsys, "wp", "grigorchuk", "b D C")
    assert code == 0 and out.strip() == "trivial"
    code, out, _ = run(capsys, "wp", "adding", "aa")
    assert code == 0 and out.startswith("nontrivial")


def test_abel_examples(capsys):
    code, out, _ = run(capsys, "abel", "grigorchuk")
    assert code == 0 and out.strip() == "trivial group"
    code, out, _ = run(capsys, "abel", "adding")
    assert code == 0 and out.strip() == "Z"


def test_nucleus_output(capsys):
    code, out, _ = run(capsys, "nucleus", "adding")
    assert code == 0
    assert "3 states" in out
    code, out, _ = run(capsys, "nucleus", "adding", "--json")
    data = json.loads(out)
    assert sorted(data["states"]) == ["A", "a", "e"]


def test_exit_codes(capsys):
    code, _, err = run(capsys, "wp", "adding", "zz")
    assert code == 1 and "error" in err
    lamp_text = "alphabet: 2\na = (0 1)(a, b)\nb = ()(a, b)\n"
    import tempfile, os

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "lamp.group")
        with open(path, "w") as fh:
            fh.write(lamp_text)
        code, _, err = run(capsys, "nucleus", path, "--budget-states", "200")
        assert code == 2
        assert "not contracting" in err
    code, out, _ = run(capsys, "wp", "grigorchuk", "adadadad", "--depth-limit", "3")
    assert code == 2 and out.strip() == "undecided"


def test_nucleus_cache(capsys, tmp_path):
    path = tmp_path / "adding.group"
    path.write_text(resolve_group("adding").to_text())
    code, out1, _ = run(capsys, "nucleus", str(path))
    assert code == 0
    cache = tmp_path / "adding.group.nucleus.json"
    assert cache.exists()
    code, out2, _ = run(capsys, "nucleus", str(path))
    assert code == 0 and out1.splitlines()[1:] == out2.splitlines()[1:]
    code, out3, _ = run(capsys, "nucleus", str(path), "--no-cache")
    assert code == 0 and out1.splitlines()[1:] == out3.splitlines()[1:]


def test_vg_verbs(capsys):
    swap = json.dumps({"domain": ["0", "1"], "entries": ["e", "e"], "range": ["1", "0"]})
    ident = json.dumps({"domain": ["e"], "entries": ["e"], "range": ["e"]})
    code, out, _ = run(capsys, "vg", "trivial:2", "mul", swap, swap)
    assert code == 0
    code, out2, _ = run(capsys, "vg", "trivial:2", "eq", out.strip(), ident)
    assert code == 0 and out2.strip() == "equal"
    code, out3, _ = run(capsys, "vg", "trivial:2", "canon", out.strip())
    assert json.loads(out3) == json.loads(ident)
    code, out4, _ = run(capsys, "vg", "trivial:2", "inv", swap)
    assert json.loads(out4) == json.loads(swap)
    code, out5, _ = run(capsys, "vg", "trivial:2", "apply", swap, "011")
    assert out5.strip() == "111"


def test_abel_rational(capsys):
    portrait = json.dumps({
        "degree_parity": "even",
        "points": ["c", "v", "inf"],
        "map": {"c": "v", "v": "c", "inf": "inf"},
        "cvmod2": [],
    })
    code, out, _ = run(capsys, "abel-rational", portrait)
    assert code == 0 and out.strip() == "Z"
    code, out, _ = run(capsys, "abel-rational", portrait, "--predict", "2", "1")
    assert "predicted: Z" in out


def test_present_summary(capsys):
    code, out, _ = run(capsys, "present", "adding", "--verify")
    assert code == 0
    assert "family N: 7 relators (7 verify as identity)" in out


def test_limit_and_schreier(capsys):
    code, out, _ = run(capsys, "limit", "adding", "--level", "3")
    data = json.loads(out)
    assert len(data["classes"]) == 8
    code, out, _ = run(capsys, "limit", "adding", "--level", "2", "--format", "dot")
    assert out.startswith("graph")
    code, out, _ = run(capsys, "schreier", "grigorchuk", "--level", "2")
    assert len(json.loads(out)["vertices"]) == 4
    code, out, _ = run(capsys, "moore", "adding")
    assert len(json.loads(out)["states"]) == 3


def test_m_invariant_verb(capsys):
    code, out, _ = run(capsys, "m-invariant", "--alphabet", "3", '["0","10","11","12"]')
    assert code == 0 and out.strip() == "0"


def test_catalogue_roundtrip(capsys):
    code, out, _ = run(capsys, "catalogue")
    assert code == 0
    blocks = [b for b in out.split("# ") if b.strip()]
    assert len(blocks) == 3
    for block in blocks:
        name, _, text = block.partition("\n")
        again = parse_group(text)
        assert again.to_text() == builtin_groups()[name.strip()].to_text()


def test_kneading_examples():
    g = kneading_group("")
    assert g.to_text() == resolve_group("adding").to_text()
    g0 = kneading_group("0")
    assert g0.generators == ("a", "b")
    perm, secs = g0.recursion["b"]
    assert perm == (0, 1) and [str(s) for s in secs] == ["a", "e"]
    g01 = kneading_group("01")
    assert len(g01.generators) == 3
    with pytest.raises(ValueError):
        kneading_group("2")


def test_catalogue_performance():
    groups = list(builtin_groups()) + ["kneading:01"]
    for name in groups:
        start = time.perf_counter()
        group = resolve_group(name)
        compute_nucleus(group)
        vg_abelianization(group)
        assert time.perf_counter() - start < 5.0, name


def test_group_json_products(basilica):
    from selfsim.vg import Table

    t = Table(basilica, [((0,), "a", (1, 0)), ((1, 0), "e", (1, 1)), ((1, 1), "b", (0,))])
    assert Table.from_json(basilica, t.to_json()).rows == t.rows
