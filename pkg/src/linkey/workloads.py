"""Benchmark suite: builders, kernels, and the per-run orchestration.

Each benchmark prepares a mirror structure natively (no simulated traffic),
so heap layout and the reference result are fixed before the simulation
starts.  The runner then allocates pool slots in creation order, bulk-loads
the serialized fields, registers the layout with the prefetcher, and runs
the kernel with the caches cold.  Every run verifies the kernel's checksum
against the in-process reference before reporting metrics.

Traversal kernels return 64-bit value sums; lookup kernels perform exactly
1000 probes and return the probe-hit count.  Dynamic benchmarks hold back
one key in twenty at build time and insert them at seeded-random points of
the probe sequence, re-registering the root whenever it moves.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import native_structs as ns
from .config import RunConfig, SimConfig
from .engine import get_module, make_engine
from .errors import ComparisonError, RangeError
from .layouts import (LAYOUTS, OFF_COLOR, OFF_KEY, OFF_LEFT, OFF_PARENT,
                      OFF_RIGHT, OFF_TREE_VALUE, NodeLayout)
from .metrics import RunResult, make_result
from .samplers import UniformSampler, ZipfSampler

M64 = (1 << 64) - 1

SIZES = {"small": 1000, "large": 10000, "huge": 100000}
PROBES = 1000

# Distinct sub-streams of the run seed, one per random purpose.
CH_VALUES = 0
CH_SHUFFLE = 1
CH_PROBE = 2
CH_SCHEDULE = 3
CH_WORDS = 4
CH_POOL = 6


def sub_seed(seed: int, channel: int) -> int:
    return (seed * 1_000_003 + channel) & 0x7FFFFFFFFFFFFFFF


def sub_rng(seed: int, channel: int) -> random.Random:
    return random.Random(sub_seed(seed, channel))


def size_count(size: str, cap: int | None = None) -> int:
    if size not in SIZES:
        raise RangeError("unknown size %r" % size)
    n = SIZES[size]
    return min(n, cap) if cap else n


def full_tree_count(target: int, cap: int | None = None) -> int:
    """Node count of the smallest full binary tree holding ``target`` keys,
    shrunk level by level to respect ``cap``."""
    d = 1
    while (1 << d) - 1 < target:
        d += 1
    if cap:
        while d > 1 and (1 << d) - 1 > cap:
            d -= 1
    return (1 << d) - 1


def key_domain(count: int) -> int:
    """Smallest full-tree key space holding ``count`` distinct keys."""
    d = 1
    while (1 << d) - 1 < count:
        d += 1
    return (1 << d) - 1


# -- heap-side accessors -------------------------------------------------------


class HeapTreeAccess:
    """Binary-tree node fields read and written through the simulation."""

    NULL = 0
    node_size = 32

    def __init__(self, engine):
        self.e = engine

    @staticmethod
    def is_null(x) -> bool:
        return x == 0

    def key(self, x: int) -> int:
        return self.e.read64(x + OFF_KEY)

    def left(self, x: int) -> int:
        return self.e.read64(x + OFF_LEFT)

    def right(self, x: int) -> int:
        return self.e.read64(x + OFF_RIGHT)

    def set_left(self, x: int, v: int) -> None:
        self.e.write64(x + OFF_LEFT, v)

    def set_right(self, x: int, v: int) -> None:
        self.e.write64(x + OFF_RIGHT, v)

    def new_node(self, key: int, value: int) -> int:
        addr = self.e.alloc_node(self.node_size)
        self.e.write64(addr + OFF_KEY, key)
        self.e.write64(addr + OFF_TREE_VALUE, value)
        self.e.write64(addr + OFF_LEFT, 0)
        self.e.write64(addr + OFF_RIGHT, 0)
        return addr


class HeapRBAccess(HeapTreeAccess):
    node_size = 48

    def parent(self, x: int) -> int:
        return self.e.read64(x + OFF_PARENT)

    def set_parent(self, x: int, v: int) -> None:
        self.e.write64(x + OFF_PARENT, v)

    def color(self, x: int) -> int:
        return self.e.read64(x + OFF_COLOR)

    def set_color(self, x: int, c: int) -> None:
        self.e.write64(x + OFF_COLOR, c)

    def new_node(self, key: int, value: int) -> int:
        addr = self.e.alloc_node(self.node_size)
        self.e.write64(addr + OFF_KEY, key)
        self.e.write64(addr + OFF_TREE_VALUE, value)
        self.e.write64(addr + OFF_LEFT, 0)
        self.e.write64(addr + OFF_RIGHT, 0)
        self.e.write64(addr + OFF_PARENT, 0)
        self.e.write64(addr + OFF_COLOR, ns.RED)
        return addr


class HeapTrieAccess:
    NULL = 0

    def __init__(self, engine):
        self.e = engine

    @staticmethod
    def is_null(x) -> bool:
        return x == 0

    def is_word(self, x: int) -> int:
        return self.e.read64(x)

    def child(self, x: int, i: int) -> int:
        return self.e.read64(x + 8 + 8 * i)


# -- op schedules ------------------------------------------------------------------


def probe_ops(keys: list, domain: int, seed: int, zipf: bool) -> list[tuple]:
    sampler_cls = ZipfSampler if zipf else UniformSampler
    sampler = sampler_cls(domain, sub_seed(seed, CH_PROBE))
    return [("p", keys[sampler.draw() - 1]) for _ in range(PROBES)]


def mixed_ops(keys_all: list[int], pending: list[tuple[int, int]], seed: int,
              zipf: bool) -> list[tuple]:
    """1000 probes with the held-back keys inserted at random positions."""
    probes = probe_ops(keys_all, len(keys_all), seed, zipf)
    total = len(probes) + len(pending)
    sched = sub_rng(seed, CH_SCHEDULE)
    where = set(sched.sample(range(total), len(pending)))
    ops: list[tuple] = []
    pi = ii = 0
    for i in range(total):
        if i in where:
            key, value = pending[ii]
            ops.append(("i", key, value))
            ii += 1
        else:
            ops.append(probes[pi])
            pi += 1
    return ops


def run_lookup_ops(acc, root, ops, probe, insert, on_root_change) -> tuple[int, object]:
    hits = 0
    for op in ops:
        if op[0] == "p":
            new_root, hit = probe(acc, root, op[1])
            hits += 1 if hit else 0
        else:
            new_root = insert(acc, root, op[1], op[2])
        if new_root != root:
            root = new_root
            on_root_change(root)
    return hits, root


# -- benchmark preparation ------------------------------------------------------------


@dataclass
class Prepared:
    layout: NodeLayout
    nodes: list
    roots: list
    run: object
    ref: object
    extra_alloc: int = 0
    extras: dict = field(default_factory=dict)


def _prep_chain(size: str, seed: int, cap, reverse: bool) -> Prepared:
    head, nodes = ns.build_chain(size_count(size, cap), sub_rng(seed, CH_VALUES))
    layout = LAYOUTS["ll"]

    if reverse:
        def run(e):
            mod = get_module(e.backend)
            new_head = mod.k_chain_reverse(e, head.addr, 8)
            e.pf_set_root(0, new_head)
            return mod.k_chain_sum(e, new_head, 0, 8, 1)

        def ref():
            return ns.sum_values(nodes)
    else:
        def run(e):
            return get_module(e.backend).k_chain_sum(e, head.addr, 0, 8, 2)

        def ref():
            return 2 * ns.sum_values(nodes) & M64

    return Prepared(layout, nodes, [(0, head)], run, ref)


def _prep_dll(size: str, seed: int, cap) -> Prepared:
    head, tail, nodes = ns.build_dll(size_count(size, cap),
                                     sub_rng(seed, CH_VALUES))

    def run(e):
        mod = get_module(e.backend)
        fwd = mod.k_chain_sum(e, head.addr, 0, 8, 1)
        bwd = mod.k_chain_sum(e, tail.addr, 0, 16, 1)
        return (fwd + bwd) & M64

    def ref():
        return 2 * ns.sum_values(nodes) & M64

    return Prepared(LAYOUTS["dll"], nodes, [(0, head), (1, tail)], run, ref)


def _build_bintree(size: str, seed: int, cap):
    count = full_tree_count(SIZES[size], cap)
    keys = list(range(1, count + 1))
    root, nodes = ns.build_complete_bst(keys, sub_rng(seed, CH_VALUES))
    return count, root, nodes


def _prep_bintree_sum(size: str, seed: int, cap, bfs: bool) -> Prepared:
    _, root, nodes = _build_bintree(size, seed, cap)

    if bfs:
        def run(e):
            return get_module(e.backend).k_tree_bfs_sum(e, root.addr, 8, 16, 24)

        def ref():
            return ns.sum_values(nodes)
    else:
        def run(e):
            return get_module(e.backend).k_tree_dfs_sum(e, root.addr, 8, 16, 24, 2)

        def ref():
            return 2 * ns.sum_values(nodes) & M64

    return Prepared(LAYOUTS["bintree"], nodes, [(0, root)], run, ref)


def _prep_bintree_probe(size: str, seed: int, cap, zipf: bool) -> Prepared:
    count, root, nodes = _build_bintree(size, seed, cap)
    keys = list(range(1, count + 1))
    sub_rng(seed, CH_SHUFFLE).shuffle(keys)
    ops = probe_ops(keys, count, seed, zipf)

    def probe(acc, r, key):
        return r, ns.bst_probe(acc, r, key)

    def run(e):
        hits, _ = run_lookup_ops(HeapTreeAccess(e), root.addr, ops, probe,
                                 None, lambda r: None)
        return hits

    def ref():
        hits, _ = run_lookup_ops(ns.ObjAccess(), root, ops, probe,
                                 None, lambda r: None)
        return hits

    return Prepared(LAYOUTS["bintree"], nodes, [(0, root)], run, ref,
                    extras=dict(ops=ops, mirror_root=root))


def _dynamic_keys(size: str, seed: int, cap):
    count = size_count(size, cap)
    domain = key_domain(count)
    perm = list(range(1, domain + 1))
    sub_rng(seed, CH_SHUFFLE).shuffle(perm)
    keys_all = perm[:count]
    held = count // 20
    build_keys = keys_all[:count - held]
    pending_keys = keys_all[count - held:]
    return keys_all, build_keys, pending_keys


def _prep_search_tree(size: str, seed: int, cap, zipf: bool,
                      red_black: bool) -> Prepared:
    keys_all, build_keys, pending_keys = _dynamic_keys(size, seed, cap)
    vals = sub_rng(seed, CH_VALUES)
    node_cls = ns.RBNode if red_black else ns.TreeNode
    builder = ns.ObjAccess(node_cls)
    build_pairs = [(k, vals.getrandbits(64)) for k in build_keys]

    if red_black:
        def probe(acc, r, key):
            return r, ns.bst_probe(acc, r, key)

        def insert(acc, r, key, value):
            return ns.rb_insert(acc, r, key, value, acc.new_node)

        heap_access = HeapRBAccess
    else:
        probe = ns.splay_probe

        def insert(acc, r, key, value):
            return ns.splay_insert(acc, r, key, value, acc.new_node)

        heap_access = HeapTreeAccess

    def build_mirror(acc):
        r = acc.NULL
        for k, v in build_pairs:
            r = insert(acc, r, k, v)
        return r

    root = build_mirror(builder)
    nodes = builder.created
    pending = [(k, vals.getrandbits(64)) for k in pending_keys]
    ops = mixed_ops(keys_all, pending, seed, zipf)
    layout = LAYOUTS["rbtree" if red_black else "splay"]

    def run(e):
        hits, _ = run_lookup_ops(heap_access(e), root.addr, ops, probe, insert,
                                 lambda r: e.pf_set_root(0, r))
        return hits

    def ref():
        # Replay on a freshly rebuilt mirror: the serialized build tree must
        # stay untouched so a shared preparation can serve several runs.
        replay = ns.ObjAccess(node_cls)
        hits, _ = run_lookup_ops(replay, build_mirror(replay), ops, probe,
                                 insert, lambda r: None)
        return hits

    return Prepared(layout, nodes, [(0, root)], run, ref,
                    extra_alloc=len(pending),
                    extras=dict(ops=ops, mirror_root=root, keys_all=keys_all,
                                build_pairs=build_pairs, pending=pending,
                                probe=probe, insert=insert,
                                build_mirror=build_mirror))


def _prep_trie(size: str, seed: int, cap, zipf: bool) -> Prepared:
    words = ns.gen_words(size_count(size, cap), sub_rng(seed, CH_WORDS))
    root, nodes = ns.build_trie(words)
    ops = probe_ops(words, len(words), seed, zipf)

    def probe(acc, r, word):
        return r, ns.trie_probe(acc, r, word)

    def run(e):
        hits, _ = run_lookup_ops(HeapTrieAccess(e), root.addr, ops, probe,
                                 None, lambda r: None)
        return hits

    def ref():
        hits, _ = run_lookup_ops(ns.ObjAccess(), root, ops, probe,
                                 None, lambda r: None)
        return hits

    return Prepared(LAYOUTS["trie"], nodes, [(0, root)], run, ref,
                    extras=dict(ops=ops, words=words, mirror_root=root))


def _prep_octree(size: str, seed: int, cap) -> Prepared:
    root, nodes = ns.build_octree(size_count(size, cap),
                                  sub_rng(seed, CH_VALUES))

    def run(e):
        return get_module(e.backend).k_wcycle_sum(e, root.addr, 0, 8, 8)

    def ref():
        return ns.wcycle_ref(nodes)

    return Prepared(LAYOUTS["octree"], nodes, [(0, root)], run, ref)


def _prep_graph(size: str, seed: int, cap) -> Prepared:
    root, nodes = ns.build_graph(size_count(size, cap),
                                 sub_rng(seed, CH_VALUES))

    def run(e):
        return get_module(e.backend).k_graph_bfs_sum(e, root.addr, 0, 8, 5)

    def ref():
        return ns.graph_bfs_ref(root)

    return Prepared(LAYOUTS["graph"], nodes, [(0, root)], run, ref)


@dataclass(frozen=True)
class Benchmark:
    name: str
    kind: str  # "traversal" or "lookup"
    prepare: object


BENCHMARKS: dict[str, Benchmark] = {}


def _register(name: str, kind: str, fn) -> None:
    BENCHMARKS[name] = Benchmark(name, kind, fn)


_register("ll", "traversal", lambda s, sd, cap: _prep_chain(s, sd, cap, False))
_register("ll_reverse", "traversal", lambda s, sd, cap: _prep_chain(s, sd, cap, True))
_register("dll", "traversal", _prep_dll)
_register("bintree_dfs", "traversal",
          lambda s, sd, cap: _prep_bintree_sum(s, sd, cap, False))
_register("bintree_bfs", "traversal",
          lambda s, sd, cap: _prep_bintree_sum(s, sd, cap, True))
_register("bintree_probe_uni", "lookup",
          lambda s, sd, cap: _prep_bintree_probe(s, sd, cap, False))
_register("bintree_probe_zipf", "lookup",
          lambda s, sd, cap: _prep_bintree_probe(s, sd, cap, True))
_register("rbtree_uni", "lookup",
          lambda s, sd, cap: _prep_search_tree(s, sd, cap, False, True))
_register("rbtree_zipf", "lookup",
          lambda s, sd, cap: _prep_search_tree(s, sd, cap, True, True))
_register("splay_uni", "lookup",
          lambda s, sd, cap: _prep_search_tree(s, sd, cap, False, False))
_register("splay_zipf", "lookup",
          lambda s, sd, cap: _prep_search_tree(s, sd, cap, True, False))
_register("trie_uni", "lookup", lambda s, sd, cap: _prep_trie(s, sd, cap, False))
_register("trie_zipf", "lookup", lambda s, sd, cap: _prep_trie(s, sd, cap, True))
_register("octree", "traversal", _prep_octree)
_register("graph_bfs", "traversal", _prep_graph)

BENCH_NAMES = tuple(BENCHMARKS)


def prepare(name: str, size: str, seed: int, cap: int | None = None) -> Prepared:
    if name not in BENCHMARKS:
        raise RangeError("unknown benchmark %r" % name)
    return BENCHMARKS[name].prepare(size, seed, cap)


# -- the runner ------------------------------------------------------------------------


@dataclass
class RunOutcome:
    result: RunResult
    checksum: int
    ref_checksum: int
    engine: object
    prepared: Prepared


def run_benchmark(cfg: RunConfig, cap: int | None = None,
                  prepared: Prepared | None = None) -> RunOutcome:
    """Build, simulate, verify the checksum, and collect metrics for one run.

    A pre-built ``prepared`` structure may be passed in when several
    prefetchers run the same workload; it is rebuilt from scratch here
    otherwise.  Preparation is deterministic in (benchmark, size, seed), so
    sharing it only saves time.
    """
    prep = prepared if prepared is not None else prepare(
        cfg.benchmark, cfg.size, cfg.seed, cap)
    layout = prep.layout
    sim = SimConfig(
        pool_pitch=layout.pool_pitch,
        pool_slots=len(prep.nodes) + prep.extra_alloc,
        pool_seed=sub_seed(cfg.seed, CH_POOL),
        prefetcher=cfg.prefetcher,
        at_entries=cfg.at_entries, cat_entries=cfg.cat_entries,
        bfq_entries=cfg.bfq_entries, buffer_cap=cfg.buffer_cap,
        drain_per_event=cfg.drain_per_event)
    engine = make_engine(sim, backend=cfg.backend)
    for node in prep.nodes:
        node.addr = engine.alloc_node(layout.node_size)
    engine.heap_load(ns.serialize(prep.nodes))
    engine.pf_set_size(layout.node_size)
    for off in layout.child_offsets:
        engine.pf_add_offset(off)
    for slot, node in prep.roots:
        engine.pf_set_root(slot, node.addr)
    engine.reset_metrics()
    checksum = prep.run(engine)
    ref = prep.ref()
    if checksum != ref:
        raise ComparisonError(
            "%s/%s/seed=%d: simulated checksum %d != reference %d"
            % (cfg.benchmark, cfg.size, cfg.seed, checksum, ref))
    result = make_result(cfg, engine.metrics(), checksum, engine.backend)
    return RunOutcome(result, checksum, ref, engine, prep)
