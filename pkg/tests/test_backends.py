"""Cross-backend agreement: both engine cores must produce identical runs."""

import pytest

from linkey import bench
from linkey.config import RunConfig
from linkey.engine import available_backends, get_module, make_engine
from linkey.workloads import run_benchmark

needs_both = pytest.mark.skipif(len(available_backends()) < 2,
                                reason="compiled core not built")


def row_without_backend(result):
    d = result.to_dict()
    d.pop("backend")
    return d


CASES = [
    ("ll", "small", 3, "linkey"),
    ("dll", "small", 1, "stride"),
    ("bintree_dfs", "small", 2, "linkey"),
    ("bintree_probe_zipf", "small", 2, "linkey"),
    ("splay_zipf", "small", 5, "linkey"),
    ("rbtree_uni", "small", 4, "none"),
    ("trie_zipf", "small", 6, "linkey"),
    ("octree", "small", 1, "linkey"),
    ("graph_bfs", "small", 7, "stride"),
]


@needs_both
@pytest.mark.parametrize("benchmark,size,seed,pref", CASES)
def test_backends_agree(benchmark, size, seed, pref):
    rows = []
    for backend in available_backends():
        cfg = RunConfig(benchmark=benchmark, size=size, seed=seed,
                        prefetcher=pref, backend=backend)
        out = run_benchmark(cfg)
        assert out.result.backend == backend
        rows.append(row_without_backend(out.result))
    assert rows[0] == rows[1]


@needs_both
def test_backend_selection():
    for backend in available_backends():
        e = make_engine(__import__("linkey").SimConfig(), backend=backend)
        assert e.backend == backend
    assert get_module("auto").BACKEND_NAME in available_backends()
    with pytest.raises((ImportError, ValueError)):
        get_module("fortran")


@needs_both
def test_kernels_exported_by_both():
    names = ("k_chain_sum", "k_chain_reverse", "k_tree_dfs_sum",
             "k_tree_bfs_sum", "k_wcycle_sum", "k_graph_bfs_sum",
             "k_sweep_read")
    for backend in available_backends():
        mod = get_module(backend)
        for name in names:
            assert callable(getattr(mod, name))


@needs_both
def test_bench_tool_reports_agreement(capsys):
    rc = bench.main(["--benchmark", "ll", "--size", "small", "--seed", "2",
                     "--repeat", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    for backend in available_backends():
        assert backend in out
    assert "ok" in out
    assert "MISMATCH" not in out
