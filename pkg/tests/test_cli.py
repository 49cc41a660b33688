import json
import subprocess
import sys

import numpy as np
import pytest

from listpaint.cli import main
from listpaint.formats import encode_edge_list, encode_graph6, write_graph6_corpus
from listpaint.graph import complete_bipartite, cycle_graph, enumerate_graphs, path_graph, random_regular_bipartite


@pytest.fixture
def c4(tmp_path):
    p = tmp_path / "c4.g6"
    p.write_bytes(encode_graph6(cycle_graph(4)) + b"\n")
    return p


def test_params_and_verify(c4, tmp_path, capsys):
    out = tmp_path / "rep.json"
    table = tmp_path / "rep.tsv"
    assert main(["params", str(c4), "-o", str(out), "--table", str(table)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "parameter-report" and doc["payload"]["values"]["rem"] == 3
    assert table.read_text().splitlines()[0] == "parameter\tvalue\tstatus"
    assert main(["verify", str(c4), str(out)]) == 0
    assert "accept" in capsys.readouterr().out


def test_params_cap_exit(tmp_path):
    p = tmp_path / "big.g6"
    p.write_bytes(encode_graph6(path_graph(12)))
    assert main(["params", str(p), "-o", str(tmp_path / "x.json"), "--no-witnesses"]) == 3


def test_verify_rejects_tampered_witness(c4, tmp_path, capsys):
    out = tmp_path / "rep.json"
    main(["params", str(c4), "-o", str(out)])
    doc = json.loads(out.read_text())
    sd3 = {k: doc[k] for k in doc if k != "payload"}
    sd3["kind"] = "sd3-sequence"
    sd3["payload"] = doc["payload"]["witnesses"]["sd3"]
    w = tmp_path / "sd3.json"
    w.write_text(json.dumps(sd3))
    assert main(["verify", str(c4), str(w)]) == 0
    sd3["payload"]["tokens"] = [2, 2, 2, 2]
    w.write_text(json.dumps(sd3))
    assert main(["verify", str(c4), str(w)]) == 2
    other = tmp_path / "c5.g6"
    other.write_bytes(encode_graph6(cycle_graph(5)))
    assert main(["verify", str(other), str(out)]) == 2
    assert capsys.readouterr().out.count("reject") == 2


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.g6"
    p.write_bytes(b"D?\x01")
    assert main(["params", str(p)]) == 4
    assert "offset 2" in capsys.readouterr().err
    assert main(["params", str(tmp_path / "missing.g6")]) == 4


def test_usage_errors(c4):
    with pytest.raises(SystemExit) as exc:
        main(["params"])
    assert exc.value.code == 1
    assert main(["knn", "--n", "4"]) == 1
    assert main(["gadget", str(c4), "1,2"]) == 1
    assert main(["build-scheme", str(c4), "--chromatic"]) == 1


def test_audit_corpus(tmp_path):
    corpus = tmp_path / "small.g6"
    corpus.write_bytes(write_graph6_corpus([g for n in range(1, 5) for g in enumerate_graphs(n)]))
    out, table, figs = tmp_path / "audit.json", tmp_path / "audit.tsv", tmp_path / "figs"
    assert main(["audit", str(corpus), "-o", str(out), "--table", str(table), "--figures", str(figs)]) == 0
    res = json.loads(out.read_text())
    assert res["violations"] == [] and res["graphs"] == 18
    assert len(table.read_text().splitlines()) == 19
    assert (figs / "audit_parameters.png").stat().st_size > 0


def test_orient_at_roundtrip(tmp_path):
    p = tmp_path / "k33.g6"
    p.write_bytes(encode_graph6(complete_bipartite(3, 3)))
    out = tmp_path / "o.json"
    assert main(["orient-at", str(p), "--r", "2", "--d", "3", "-o", str(out)]) == 0
    assert main(["verify", str(p), str(out)]) == 0
    doc = json.loads(out.read_text())
    doc["payload"]["claims"]["max_outdegree"] = 0
    out.write_text(json.dumps(doc))
    assert main(["verify", str(p), str(out)]) == 2


def test_build_scheme_failure_is_a_report(c4, tmp_path):
    out = tmp_path / "s.json"
    assert main(["build-scheme", str(c4), "--save-budget", "0", "-o", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["outcome"] == "failed" and rep["phase"]


def test_build_scheme_deterministic_and_verifiable(tmp_path):
    g = random_regular_bipartite(256, 128, np.random.default_rng(0))
    p = tmp_path / "r128.txt"
    p.write_text(encode_edge_list(g))
    args = ["build-scheme", str(p), "--save-budget", "1", "--seed", "3",
            "--override-const", "eps=0.7", "--override-const", "c=0.4", "--override-const", "p_S=0.053"]
    outs = []
    for i in range(2):
        out, figs = tmp_path / f"s{i}.json", tmp_path / f"f{i}"
        assert main(args + ["-o", str(out), "--table", str(tmp_path / f"t{i}.tsv"), "--figures", str(figs)]) == 0
        outs.append((out.read_bytes(), (figs / "pipeline_tokens.png").read_bytes(),
                     (tmp_path / f"t{i}.tsv").read_bytes()))
    assert outs[0] == outs[1]
    # verify in a fresh interpreter
    run = subprocess.run([sys.executable, "-m", "listpaint.cli", "verify", str(p), str(tmp_path / "s0.json")],
                         capture_output=True, text=True)
    assert run.returncode == 0 and run.stdout.strip() == "accept"


def test_build_scheme_bad_override(c4):
    assert main(["build-scheme", str(c4), "--override-const", "gamma=1"]) == 1
    assert main(["build-scheme", str(c4), "--override-const", "eps"]) == 1


def test_knn(tmp_path):
    out, table, figs = tmp_path / "k.json", tmp_path / "k.tsv", tmp_path / "figs"
    assert main(["knn", "--n", "3", "-o", str(out), "--table", str(table), "--figures", str(figs)]) == 0
    res = json.loads(out.read_text())
    assert res["k"] == 3 and res["schemes"] == 8 and res["bound_holds"]
    assert (figs / "knn_3_save_profile.png").exists()


def test_gadget_iterates_to_constant(tmp_path):
    p = tmp_path / "p3.g6"
    p.write_bytes(encode_graph6(path_graph(3)))
    out = tmp_path / "g.json"
    assert main(["gadget", str(p), "2,1,3", "--iterate", "-o", str(out)]) == 0
    res = json.loads(out.read_text())
    assert len(set(res["tokens"])) == 1
    assert [r["D"] for r in res["rounds"]] == [2, 1]
    w = tmp_path / "w.json"
    w.write_text(json.dumps(res["witness"]))
    g6 = tmp_path / "big.g6"
    g6.write_text(res["graph6"])
    assert main(["verify", str(g6), str(w)]) == 0


def test_convert(c4, tmp_path, capsys):
    edges = tmp_path / "c4.txt"
    assert main(["convert", str(c4), str(edges)]) == 0
    back = tmp_path / "back.g6"
    assert main(["convert", str(edges), str(back)]) == 0
    assert back.read_bytes().strip() == c4.read_bytes().strip()
    assert main(["convert", str(c4), "-", "--to", "graph6"]) == 0
    assert capsys.readouterr().out.strip() == "Cl"
