import json
import os

import pytest

from symdecomp.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_canon_prints_canonical_file_unchanged(capsys):
    code, out, _ = run(capsys, "canon", data("parity4.obdd"))
    assert code == 0
    with open(data("parity4.obdd")) as fh:
        assert out == fh.read()


def test_canon_dot(capsys):
    code, out, _ = run(capsys, "canon", "--dot", data("parity4.obdd"))
    assert code == 0 and out.startswith("digraph")


def test_eval(capsys):
    assert run(capsys, "eval", data("parity4.obdd"), "1011")[1].strip() == "1"
    assert run(capsys, "eval", data("parity4.obdd"), "1010")[1].strip() == "0"


def test_apply_and_equiv(capsys, tmp_path):
    code, out, _ = run(capsys, "apply", "not", data("parity4.obdd"), "--canon")
    assert code == 0
    neg = tmp_path / "neg.obdd"
    neg.write_text(out)
    assert run(capsys, "equiv", data("parity4.obdd"), str(neg))[0] == 1
    assert run(capsys, "equiv", data("parity4.obdd"), data("parity4.obdd"))[0] == 0


def test_junta_negative(capsys):
    code, out, _ = run(capsys, "junta", "--target", data("parity4.obdd"), "--k", "3")
    assert code == 1 and out.startswith("NO")


def test_reconfig_yes_with_json(capsys):
    code, out, _ = run(capsys, "reconfig", "--target", data("parity4.obdd"), "--circuit", data("xor.circ"),
                       "--p", "2", "--w", "4", "--class", "builtin:validity:2", "--json")
    assert code == 0
    env = json.loads(out)
    assert env["answer"] == "YES"
    assert env["witness"].startswith("witness k=2 n=4")
    assert set(env["stats"]) == {"states_explored", "levels", "wall_ms"}


def test_decompose_verify(capsys):
    code, out, _ = run(capsys, "decompose", "--target", data("and2.obdd"), "--circuit", data("and.circ"),
                       "--p", "2", "--verify")
    assert code == 0
    assert "pointwise=True" in out and "gate widths:" in out


def test_decompose_no_prints_dead_level(capsys):
    code, out, _ = run(capsys, "decompose", "--target", data("parity4.obdd"), "--circuit",
                       data("identity.circ"), "--p", "1")
    assert code == 1
    assert "died at level" in out


def test_errors_exit_two(capsys, tmp_path):
    code, _, err = run(capsys, "reconfig", "--target", data("parity4.obdd"), "--circuit", data("xor.circ"),
                       "--p", "2", "--w", "2")
    assert code == 2 and "InvalidParameters" in err
    bad = tmp_path / "bad.circ"
    bad.write_text("circuit inputs=2\ng1 = x1\ng3 = AND g1 g2\n")
    code, _, err = run(capsys, "decompose", "--target", data("and2.obdd"), "--circuit", str(bad), "--p", "2")
    assert code == 2 and "MissingVariable" in err
    assert run(capsys, "canon", str(tmp_path / "missing.obdd"))[0] == 2


def test_resource_limit_exit_two(capsys):
    # majority has width 3, a negated width-2 function never does
    code, _, err = run(capsys, "decompose", "--target", data("majority3.obdd"), "--circuit", data("not.circ"),
                       "--p", "2", "--max-width", "3")
    assert code == 2 and "ResourceLimit" in err


def test_factorize(capsys):
    code, out, _ = run(capsys, "factorize", "--target", data("majority3.obdd"), "--k", "3")
    assert code == 0 and out.count("obdd width=2") == 3
    assert run(capsys, "factorize", "--target", data("and2.obdd"), "--k", "2")[0] == 1


def test_genjunta_with_hypercube_class(capsys):
    code, out, _ = run(capsys, "genjunta", "--target", data("and2.obdd"), "--k", "2", "--p", "2",
                       "--m-max", "3", "--class", "builtin:hypercube")
    assert code == 0 and "g3 = AND g1 g2" in out


def test_class_from_file(capsys, tmp_path):
    f = tmp_path / "v.sofa"
    f.write_text("builtin validity 2\n")
    code, _, _ = run(capsys, "decompose", "--target", data("and2.obdd"), "--circuit", data("and.circ"),
                     "--p", "2", "--class", str(f))
    assert code == 0


def test_oracle_sweep(capsys, tmp_path):
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps({"n_max": 1, "p_max": 1, "w_max": 2, "k_max": 1, "m_max": 2}))
    code, out, _ = run(capsys, "--seed", "3", "oracle", "sweep", str(cfg))
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines
    assert all(set(r) == {"instance", "oracle", "solver", "match"} and r["match"] for r in lines)


def test_usage_error_exit_two(capsys):
    assert run(capsys, "reconfig")[0] == 2
