import json

import numpy as np
import pytest

from toper.cli import bench_times, main, parse_function_list
from toper.embed import EmbeddingMatrix
from toper.graph import Graph, GraphCollection, save_native, write_tu_dataset
from toper.viz import read_svg_points

SEVEN = "degree,popularity,closeness,degree_centrality,forman,ollivier,atomic_weight"


@pytest.fixture(scope="module")
def mini(tmp_path_factory, mutag):
    d = tmp_path_factory.mktemp("mini") / "MINI"
    idx = list(range(0, 188, 4))
    write_tu_dataset(GraphCollection([mutag.graphs[i] for i in idx], mutag.graph_labels[idx], "MINI"), d)
    return d


@pytest.fixture
def fast_hyper(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps({"neurons": 16, "activation": "relu", "dropout": 0.0, "lr": 0.01, "decay": 0.001, "epochs": 40}))
    return p


def report(path):
    d = json.loads(path.read_text())
    d.pop("wall_time", None)
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEmbed:
    def test_mutag_seven_functions(self, capsys, mutag_dir, tmp_path):
        out = tmp_path / "e.csv"
        code, _, _ = run(capsys, "embed", "--dataset", mutag_dir, "--functions", SEVEN, "--workers", 1, "--out", out)
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 189 and len(lines[0].split(",")) == 16

    def test_default_functions_include_atomic_weight_for_mutag(self, mutag):
        fns = [f for f, _ in parse_function_list("default", mutag)]
        assert fns == SEVEN.split(",")

    def test_function_options(self):
        assert parse_function_list("ollivier@alpha=0,attribute:1") == [("ollivier", {"alpha": 0}), ("attribute:1", {})]

    def test_empty_dir(self, capsys, tmp_path):
        (tmp_path / "EMPTY").mkdir()
        code, _, err = run(capsys, "embed", "--dataset", tmp_path / "EMPTY")
        assert code != 0 and err

    def test_single_graph(self, capsys, tmp_path):
        d = tmp_path / "ONE"
        write_tu_dataset(GraphCollection([Graph(3, [(0, 1), (1, 2)])], [0], "ONE"), d)
        code, out, _ = run(capsys, "embed", "--dataset", d, "--functions", "degree", "--workers", 1)
        assert code == 0 and len(out.splitlines()) == 2

    def test_native_format(self, capsys, tmp_path):
        p = tmp_path / "n.json"
        save_native(GraphCollection([Graph(2, [(0, 1)]), Graph(3, [(0, 1)])], [0, 1], "N"), p)
        code, out, _ = run(capsys, "embed", "--dataset", p, "--format", "native", "--functions", "degree", "--workers", 1)
        assert code == 0 and len(out.splitlines()) == 3

    def test_missing_dataset_is_parse_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "embed", "--dataset", tmp_path / "nope")
        assert code == 3

    def test_bad_function_is_usage_error(self, capsys, mini):
        code, _, _ = run(capsys, "embed", "--dataset", mini, "--functions", "betweenness")
        assert code == 2


class TestClassify:
    def test_deterministic(self, capsys, mini, fast_hyper, tmp_path):
        args = ["classify", "--dataset", mini, "--functions", "degree,closeness", "--hyper", fast_hyper,
                "--selection", "ttest", "--folds", 5, "--workers", 1]
        assert run(capsys, *args, "--out", tmp_path / "a.json")[0] == 0
        assert run(capsys, *args, "--out", tmp_path / "b.json")[0] == 0
        a, b = report(tmp_path / "a.json"), report(tmp_path / "b.json")
        assert a == b and len(a["fold_accuracies"]) == 5

    def test_from_embeddings(self, capsys, tmp_path, fast_hyper):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(size=(20, 2)), rng.normal(size=(20, 2)) + 6])
        EmbeddingMatrix(X, ["f.sublevel.a", "f.sublevel.b"], np.repeat([0, 1], 20)).to_csv(tmp_path / "e.csv")
        code, out, _ = run(capsys, "classify", "--embeddings", tmp_path / "e.csv", "--hyper", fast_hyper, "--workers", 1)
        assert code == 0 and "±" in out

    def test_missing_labels_file(self, capsys, mini, tmp_path):
        import shutil

        d = tmp_path / "MINI"
        shutil.copytree(mini, d)
        (d / "MINI_graph_labels.txt").unlink()
        code, _, _ = run(capsys, "classify", "--dataset", d)
        assert code == 3

    def test_needs_input(self, capsys):
        assert run(capsys, "classify")[0] == 2

    def test_seed_env_override(self, capsys, monkeypatch, tmp_path, fast_hyper):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(40, 2))
        EmbeddingMatrix(X, ["f.sublevel.a", "f.sublevel.b"], np.repeat([0, 1], 20)).to_csv(tmp_path / "e.csv")
        base = ["classify", "--embeddings", tmp_path / "e.csv", "--hyper", fast_hyper, "--selection", "none", "--workers", 1]
        run(capsys, *base, "--seed", 7, "--out", tmp_path / "a.json")
        monkeypatch.setenv("TOPER_SEED", "7")
        run(capsys, *base, "--seed", 0, "--out", tmp_path / "b.json")
        assert report(tmp_path / "a.json") == report(tmp_path / "b.json")
        monkeypatch.setenv("TOPER_SEED", "seven")
        assert run(capsys, *base)[0] == 2


class TestCluster:
    def test_mini(self, capsys, mini, tmp_path):
        code, out, _ = run(capsys, "cluster", "--dataset", mini, "--functions", "degree", "--workers", 1, "--out", tmp_path / "c.json")
        assert code == 0
        assert set(json.loads((tmp_path / "c.json").read_text())) == {"silhouette", "calinski_harabasz", "davies_bouldin"}

    def test_single_class(self, capsys, tmp_path):
        d = tmp_path / "S"
        write_tu_dataset(GraphCollection([Graph(2, [(0, 1)]), Graph(3, [(0, 1), (1, 2)])], [0, 0], "S"), d)
        assert run(capsys, "cluster", "--dataset", d, "--functions", "degree", "--workers", 1)[0] == 5

    def test_two_blobs_by_dataset(self, capsys, tmp_path):
        small = [Graph(3, [(0, 1), (1, 2)]), Graph(3, [(0, 1), (0, 2)]), Graph(4, [(0, 1), (1, 2), (2, 3)])]
        big = [Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)]) for n in (25, 25, 26)]
        write_tu_dataset(GraphCollection(small, [0, 0, 1], "SMALL"), tmp_path / "SMALL")
        write_tu_dataset(GraphCollection(big, [0, 1, 1], "BIG"), tmp_path / "BIG")
        code, out, _ = run(capsys, "cluster", "--dataset", tmp_path / "SMALL", "--dataset", tmp_path / "BIG",
                           "--functions", "degree", "--label-by", "dataset", "--workers", 1, "--out", tmp_path / "c.json")
        assert code == 0
        assert json.loads((tmp_path / "c.json").read_text())["silhouette"] > 0.9


class TestViz:
    def test_multi_spec_needs_axes(self, capsys, mini):
        assert run(capsys, "viz", "--dataset", mini, "--functions", "degree,closeness")[0] == 2

    def test_axes_pick_and_labels(self, capsys, mini, tmp_path):
        out = tmp_path / "v.svg"
        code, _, _ = run(capsys, "viz", "--dataset", mini, "--functions", "degree,closeness", "--axes", "closeness.sublevel",
                         "--workers", 1, "--out", out)
        assert code == 0
        svg = out.read_text()
        assert ">pivot (a)<" in svg and ">growth (b)<" in svg and 'class="legend"' in svg
        assert sum(len(v) for v in read_svg_points(svg).values()) == 47

    def test_byte_deterministic(self, capsys, mini, tmp_path):
        for name in ("a.svg", "b.svg"):
            run(capsys, "viz", "--dataset", mini, "--functions", "degree", "--workers", 1, "--out", tmp_path / name)
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_one_graph_one_point(self, capsys, tmp_path):
        write_tu_dataset(GraphCollection([Graph(3, [(0, 1), (1, 2)])], [0], "ONE"), tmp_path / "ONE")
        code, out, _ = run(capsys, "viz", "--dataset", tmp_path / "ONE", "--functions", "degree", "--workers", 1)
        assert code == 0 and out.count("<circle") == 1

    def test_three_datasets_three_colors(self, capsys, tmp_path):
        paths = []
        for k in range(3):
            name = f"D{k}"
            gs = [Graph(3 + k + i, [(j, j + 1) for j in range(2 + k + i)]) for i in range(2)]
            write_tu_dataset(GraphCollection(gs, [0, 1], name), tmp_path / name)
            paths += ["--dataset", tmp_path / name]
        code, out, _ = run(capsys, "viz", *paths, "--functions", "degree", "--workers", 1)
        assert code == 0
        assert sorted(read_svg_points(out)) == ["D0", "D1", "D2"]


class TestBench:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bench", "--n", "10,200", "--repeats", 1)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "n,seconds"
        assert [int(r.split(",")[0]) for r in lines[1:]] == [10, 200]
        assert all(float(r.split(",")[1]) >= 0 for r in lines[1:])

    def test_bad_n(self, capsys):
        assert run(capsys, "bench", "--n", "ten")[0] == 2
        assert run(capsys, "bench", "--n", "1")[0] == 2

    def test_bench_times(self):
        rows = bench_times([10], repeats=1)
        assert rows[0][0] == 10 and rows[0][1] > 0


class TestStats:
    def test_mutag(self, capsys, mutag_dir, tmp_path):
        code, out, _ = run(capsys, "stats", "--dataset", mutag_dir, "--out", tmp_path / "s.json")
        assert code == 0 and "graphs=188" in out
        s = json.loads((tmp_path / "s.json").read_text())["MUTAG"]
        assert s["classes"] == 2


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2
