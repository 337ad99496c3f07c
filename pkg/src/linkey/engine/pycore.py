"""Pure-Python simulation core.

The core owns three pieces of state and one control loop:

* ``SimHeap`` -- sparse 64-bit word storage plus a shuffled-slot node pool.
  Reads of never-written words return 0 (a NULL pointer).
* Three inclusive, set-associative, true-LRU cache levels.  Only tags and
  two marker bits per line are modeled; data always lives in the heap.
* A prefetcher (``none``, ``stride``, or ``linkey``).

Every demand access runs the same fixed sequence:

1. the prefetcher's demand hook builds a fresh request buffer,
2. up to ``drain_per_event`` requests are drained from that buffer,
3. the cache lookup/fill happens and latency is charged,
4. if a memory response occurred (any L1 miss, or any store completing),
   the block address is delivered to the prefetcher's build hook,
5. up to ``drain_per_event`` more requests are drained.

Draining a request either drops it (block already L1-resident; not counted
as issued) or fills all levels with the prefetched bit set and delivers the
response to the build hook -- and, when the request carries object metadata,
to the backup-fetch-queue ingest hook.  Requests left in the buffer when the
next demand access arrives are discarded; the hook rebuilds the buffer from
scratch each time.
"""

from __future__ import annotations

from collections import deque

from ..errors import (AlignmentError, AllocationError, CapacityError,
                      LayoutError, RangeError)

M64 = (1 << 64) - 1
MASK45 = (1 << 45) - 1
BLOCK = 64
PAGE = 4096

BACKEND_NAME = "pure"


def cache_line(addr: int) -> int:
    return addr & ~(BLOCK - 1)


class SimHeap:
    """Sparse word storage with a seeded-shuffle node pool."""

    def __init__(self, base: int, pitch: int, order: list[int]):
        self.base = base
        self.pitch = pitch
        self._order = order
        self._cursor = 0
        self._words: dict[int, int] = {}

    def alloc_node(self, node_size: int) -> int:
        if node_size > self.pitch:
            raise AllocationError("node of %d bytes does not fit a %d-byte slot"
                                  % (node_size, self.pitch))
        if self._cursor >= len(self._order):
            raise AllocationError("node pool exhausted")
        addr = self.base + self._order[self._cursor] * self.pitch
        self._cursor += 1
        return addr

    def slots_remaining(self) -> int:
        return len(self._order) - self._cursor

    def read64(self, addr: int) -> int:
        if addr & 7:
            raise AlignmentError("read64 at unaligned address %#x" % addr)
        return self._words.get(addr, 0)

    def write64(self, addr: int, value: int) -> None:
        if addr & 7:
            raise AlignmentError("write64 at unaligned address %#x" % addr)
        self._words[addr] = value & M64

    def read_any(self, addr: int) -> int:
        # Byte-offset read used by the prefetcher's table builder; child
        # offsets are not required to be word-aligned.
        shift = (addr & 7) * 8
        lo = self._words.get(addr & ~7, 0) >> shift
        hi = self._words.get((addr & ~7) + 8, 0) << (64 - shift) if shift else 0
        return (lo | hi) & M64


class CacheLevel:
    """One set-associative level; per-set lines kept in MRU-first order.

    A line is ``[tag, prefetched, used]``.  The prefetched bit is set only by
    prefetch fills and cleared by the first demand hit; the used bit records
    that the line served a demand hit at least once.
    """

    def __init__(self, sets: int, ways: int, latency: int):
        self.sets = sets
        self.ways = ways
        self.latency = latency
        self.lines: list[list[list[int]]] = [[] for _ in range(sets)]

    def _set(self, blk: int) -> list[list[int]]:
        return self.lines[(blk >> 6) % self.sets]

    def lookup(self, blk: int) -> list[int] | None:
        """Promote ``blk`` to MRU and return its line, or None."""
        s = self._set(blk)
        for i, line in enumerate(s):
            if line[0] == blk:
                if i:
                    s.insert(0, s.pop(i))
                return line
        return None

    def contains(self, blk: int) -> bool:
        s = self._set(blk)
        return any(line[0] == blk for line in s)

    def insert(self, blk: int, prefetched: int) -> int | None:
        """Insert as MRU; return the evicted tag if the set was full."""
        s = self._set(blk)
        evicted = None
        if len(s) >= self.ways:
            evicted = s.pop()[0]
        s.insert(0, [blk, prefetched, 0])
        return evicted

    def invalidate(self, blk: int) -> None:
        s = self._set(blk)
        for i, line in enumerate(s):
            if line[0] == blk:
                s.pop(i)
                return

    def dump(self) -> list[list[tuple[int, int, int]]]:
        return [[tuple(line) for line in s] for s in self.lines]


class NullPrefetcher:
    """Inert prefetcher: every hook is a no-op."""

    kind = "none"

    def core_req(self, addr: int) -> list[tuple[int, int | None]]:
        return []

    def build(self, blk: int) -> None:
        pass

    def ingest(self, blk: int, obj_off: int) -> None:
        pass

    def stats(self) -> dict[str, int]:
        return dict(at_insert=0, cat_insert=0, invalidations=0,
                    evictions=0, bfq_push=0, bfq_drop=0)

    def reset_stats(self) -> None:
        pass


class StridePrefetcher(NullPrefetcher):
    """Global stride detector with a 2-bit saturating confidence counter.

    The first access only records the address.  Afterwards each access
    computes the new delta; a match bumps confidence, a mismatch decays it
    and adopts the new delta.  At confidence >= 2 the next two blocks along
    the stride are requested, except any that leave the 4 KiB page of the
    triggering access; the triggering access's own block is never requested.
    """

    kind = "stride"

    def __init__(self) -> None:
        self.last_addr: int | None = None
        self.stride = 0
        self.confidence = 2

    def core_req(self, addr: int) -> list[tuple[int, int | None]]:
        out: list[tuple[int, int | None]] = []
        if self.last_addr is None:
            self.last_addr = addr
            return out
        delta = addr - self.last_addr
        if delta == self.stride:
            self.confidence = min(3, self.confidence + 1)
        else:
            self.confidence = max(0, self.confidence - 1)
            self.stride = delta
        self.last_addr = addr
        if self.confidence >= 2 and self.stride != 0:
            page = addr >> 12
            core_blk = cache_line(addr)
            for mult in (1, 2):
                target = addr + mult * self.stride
                if target < 0:
                    continue
                blk = cache_line(target)
                if blk >> 12 != page or blk == core_blk:
                    continue
                if all(blk != b for b, _ in out):
                    out.append((blk, None))
        return out


class LinkeyPrefetcher:
    """Layout-hinted prefetcher for linked data structures.

    State is an address table (AT) of node bases, a child association table
    (CAT) of parent/child/offset links, a small FIFO of backup fetch targets
    (BFQ), and the layout registers (node size, child offsets, key offset,
    four root slots).  Node bases are stored as 45-bit values: the low three
    bits of a 48-bit address are implied by 8-byte node alignment.
    """

    kind = "linkey"

    def __init__(self, at_entries: int, cat_entries: int, bfq_entries: int,
                 buffer_cap: int, heap: SimHeap):
        self.at_n = at_entries
        self.cat_n = cat_entries
        self.bfq_n = bfq_entries
        self.buffer_cap = buffer_cap
        self.heap = heap
        self.reset()
        self.reset_stats()

    # -- configuration ----------------------------------------------------

    def reset(self) -> None:
        n, m = self.at_n, self.cat_n
        self.at_valid = [0] * n
        self.at_used = [0] * n
        self.at_built = [0] * n
        self.at_base = [0] * n
        self.at_slot_valid = [[0] * 8 for _ in range(n)]
        self.at_slot_cat = [[0] * 8 for _ in range(n)]
        self.cat_valid = [0] * m
        self.cat_used = [0] * m
        self.cat_built = [0] * m
        self.cat_parent = [0] * m
        self.cat_child = [0] * m
        self.cat_off = [0] * m
        # Stored bases are unique among valid entries, so the CAM is a map.
        self.at_index: dict[int, int] = {}
        self.at_used_count = 0
        self.cat_used_count = 0
        self.roots: list[list[int]] = [[0, 0] for _ in range(4)]  # [valid, at index]
        self.bfq: deque[int] = deque()
        self.node_size = 0
        self.offsets: list[int] = []
        self.key_o = 0
        self.last_hit: int | None = None
        self.armed = False

    def reset_stats(self) -> None:
        self.n_at_insert = 0
        self.n_cat_insert = 0
        self.n_invalidations = 0
        self.n_evictions = 0
        self.n_bfq_push = 0
        self.n_bfq_drop = 0

    def stats(self) -> dict[str, int]:
        return dict(at_insert=self.n_at_insert, cat_insert=self.n_cat_insert,
                    invalidations=self.n_invalidations, evictions=self.n_evictions,
                    bfq_push=self.n_bfq_push, bfq_drop=self.n_bfq_drop)

    def set_size(self, size: int) -> None:
        if not 0 < size <= 4096:
            raise LayoutError("node size %d outside (0, 4096]" % size)
        self.node_size = size

    def add_offset(self, off: int) -> None:
        if len(self.offsets) >= 8:
            raise CapacityError("all 8 child offset registers are in use")
        if off < 0 or off + 8 > self.node_size:
            raise LayoutError("child offset %d does not fit a node of %d bytes"
                              % (off, self.node_size))
        self.offsets.append(off)

    def set_root(self, slot: int, addr: int) -> None:
        if not 0 <= slot < 4:
            raise RangeError("root slot %d outside [0, 4)" % slot)
        idx = self._add_or_find(addr, protected=-1, force=True)
        self.roots[slot][0] = 1
        self.roots[slot][1] = idx

    def clear_roots(self) -> None:
        for slot in self.roots:
            slot[0] = 0

    def new_traversal(self) -> None:
        self.armed = True
        self._clear_built()

    # -- small helpers -----------------------------------------------------

    def _clear_built(self) -> None:
        self.at_built = [0] * self.at_n
        self.cat_built = [0] * self.cat_n

    def _is_root_entry(self, idx: int) -> bool:
        return any(v and i == idx for v, i in self.roots)

    def _find_valid(self, stored: int) -> int | None:
        return self.at_index.get(stored)

    def _set_at_used(self, idx: int) -> None:
        if not self.at_used[idx]:
            self.at_used[idx] = 1
            self.at_used_count += 1

    def _set_cat_used(self, idx: int) -> None:
        if not self.cat_used[idx]:
            self.cat_used[idx] = 1
            self.cat_used_count += 1

    def _mark_used(self, idx: int) -> None:
        self._set_at_used(idx)
        for k in range(len(self.offsets)):
            if self.at_slot_valid[idx][k]:
                self._set_cat_used(self.at_slot_cat[idx][k])
        # A fully used table starts a fresh recency epoch.
        if self.at_used_count == self.at_n:
            self.at_used = [0] * self.at_n
            self.at_used_count = 0
        if self.cat_used_count == self.cat_n:
            self.cat_used = [0] * self.cat_n
            self.cat_used_count = 0

    # -- eviction and invalidation -----------------------------------------

    def pick_victim_at(self, protected: int = -1) -> int | None:
        for j in range(self.at_n):
            if (self.at_valid[j] and not self.at_used[j] and not self.at_built[j]
                    and j != protected and not self._is_root_entry(j)):
                return j
        return None

    def pick_victim_cat(self) -> int | None:
        for j in range(self.cat_n):
            if self.cat_valid[j] and not self.cat_used[j] and not self.cat_built[j]:
                return j
        return None

    def invalidate_cat(self, idx: int) -> None:
        if not self.cat_valid[idx]:
            return
        p, k = self.cat_parent[idx], self.cat_off[idx]
        if self.at_valid[p] and self.at_slot_valid[p][k] and self.at_slot_cat[p][k] == idx:
            self.at_slot_valid[p][k] = 0
        self.cat_valid[idx] = 0
        if self.cat_used[idx]:
            self.cat_used[idx] = 0
            self.cat_used_count -= 1
        self.cat_built[idx] = 0
        self.n_invalidations += 1

    def invalidate_at(self, idx: int) -> None:
        if not self.at_valid[idx]:
            return
        for c in range(self.cat_n):
            if self.cat_valid[c] and (self.cat_parent[c] == idx or self.cat_child[c] == idx):
                self.invalidate_cat(c)
        for slot in self.roots:
            if slot[0] and slot[1] == idx:
                slot[0] = 0
        self.at_valid[idx] = 0
        self.at_index.pop(self.at_base[idx], None)
        if self.at_used[idx]:
            self.at_used[idx] = 0
            self.at_used_count -= 1
        self.at_built[idx] = 0
        for k in range(8):
            self.at_slot_valid[idx][k] = 0
        self.n_invalidations += 1

    def _add_or_find(self, addr: int, protected: int, force: bool) -> int | None:
        """Locate or allocate the entry for a node base.

        A found entry gets its just-built bit refreshed.  Allocation prefers
        the lowest-index invalid slot, then the normal eviction victim; with
        ``force`` (root registration must land) the lowest-index valid
        non-root entry is evicted regardless of its replacement bits.
        """
        stored = (addr >> 3) & MASK45
        found = self._find_valid(stored)
        if found is not None:
            self.at_built[found] = 1
            return found
        slot = None
        for j in range(self.at_n):
            if not self.at_valid[j]:
                slot = j
                break
        if slot is None:
            slot = self.pick_victim_at(protected)
            if slot is None and force:
                for j in range(self.at_n):
                    if not self._is_root_entry(j):
                        slot = j
                        break
            if slot is None:
                return None
            self.n_evictions += 1
            self.invalidate_at(slot)
        self.at_valid[slot] = 1
        if self.at_used[slot]:
            self.at_used[slot] = 0
            self.at_used_count -= 1
        self.at_built[slot] = 1
        self.at_base[slot] = stored
        self.at_index[stored] = slot
        for k in range(8):
            self.at_slot_valid[slot][k] = 0
        self.n_at_insert += 1
        return slot

    # -- table search --------------------------------------------------------

    def search(self, addr: int) -> int | None:
        """Root range check first, then the content-addressed lookup.

        A root hit that starts a new traversal (previous hit was a different
        entry, or an explicit new-traversal mark is pending) re-learns the
        key offset from this access and clears every just-built bit.  Any hit
        refreshes the used bits of the entry and of its outgoing links; when
        a whole table becomes used, all its used bits reset (a new epoch).
        """
        for valid, idx in self.roots:
            if not valid:
                continue
            base = self.at_base[idx] << 3
            if base <= addr < base + self.node_size:
                if self.armed or self.last_hit != idx:
                    self.key_o = addr - base
                    self._clear_built()
                    self.armed = False
                self.last_hit = idx
                self._mark_used(idx)
                return idx
        target = addr - self.key_o
        if target >= 0 and not target & 7:
            j = self.at_index.get((target >> 3) & MASK45)
            if j is not None and not self._is_root_entry(j):
                self.last_hit = j
                self._mark_used(j)
                return j
        return None

    # -- table building -------------------------------------------------------

    def build(self, blk: int) -> None:
        """Response hook: relearn the links of every node touching ``blk``.

        For each resident node whose span covers the block, every registered
        child offset landing inside the block is re-read from the heap.  The
        stale link at that offset is dropped unconditionally; a non-NULL
        pointer is then linked back in if, after evictions, both tables have
        space.  The scan snapshot is taken up front; an entry recycled by an
        earlier insertion simply gets processed under its new identity.
        """
        if self.node_size == 0:
            return
        span = self.node_size - 1
        parents = [j for j in range(self.at_n)
                   if self.at_valid[j]
                   and cache_line(self.at_base[j] << 3) <= blk
                   <= cache_line((self.at_base[j] << 3) + span)]
        for p in parents:
            if not self.at_valid[p]:
                continue
            base = self.at_base[p] << 3
            for k, off in enumerate(self.offsets):
                ptr_addr = base + off
                if cache_line(ptr_addr) != blk:
                    continue
                child_ptr = self.heap.read_any(ptr_addr)
                if self.at_slot_valid[p][k]:
                    self.invalidate_cat(self.at_slot_cat[p][k])
                if child_ptr == 0:
                    continue
                child = self._add_or_find(child_ptr, protected=p, force=False)
                if child is None:
                    continue
                cat_slot = None
                for c in range(self.cat_n):
                    if not self.cat_valid[c]:
                        cat_slot = c
                        break
                if cat_slot is None:
                    cat_slot = self.pick_victim_cat()
                    if cat_slot is None:
                        continue
                    self.n_evictions += 1
                    self.invalidate_cat(cat_slot)
                self.cat_valid[cat_slot] = 1
                if self.cat_used[cat_slot]:
                    self.cat_used[cat_slot] = 0
                    self.cat_used_count -= 1
                self.cat_built[cat_slot] = 1
                self.cat_parent[cat_slot] = p
                self.cat_child[cat_slot] = child
                self.cat_off[cat_slot] = k
                self.at_slot_valid[p][k] = 1
                self.at_slot_cat[p][k] = cat_slot
                self.n_cat_insert += 1

    # -- backup fetch queue ----------------------------------------------------

    def ingest(self, blk: int, obj_off: int) -> None:
        """Prefetch-response hook: queue children the tables will not fetch.

        The responding node's base is recovered from the request metadata.
        If the node is absent from the AT all its non-NULL children in this
        block are queued; if present, only children whose link slot is
        invalid.  Duplicates already queued are skipped; overflow drops the
        oldest queued base.
        """
        node_base = blk + obj_off
        parent = self._find_valid((node_base >> 3) & MASK45)
        for k, off in enumerate(self.offsets):
            ptr_addr = node_base + off
            if cache_line(ptr_addr) != blk:
                continue
            child_ptr = self.heap.read_any(ptr_addr)
            if child_ptr == 0:
                continue
            if parent is not None and self.at_slot_valid[parent][k]:
                continue
            stored = (child_ptr >> 3) & MASK45
            # The queue backs up the tables; children the tables already
            # know are never queued.
            if stored in self.at_index:
                continue
            if stored in self.bfq:
                continue
            if len(self.bfq) >= self.bfq_n:
                self.bfq.popleft()
                self.n_bfq_drop += 1
            self.bfq.append(stored)
            self.n_bfq_push += 1

    # -- demand hook -------------------------------------------------------------

    def core_req(self, addr: int) -> list[tuple[int, int | None]]:
        """Fill a fresh request buffer for one core access.

        On a table hit, walk the association graph breadth-first from the hit
        entry, requesting each object's key block first and then its child
        pointer blocks.  Whatever buffer space remains is fed from the backup
        fetch queue.  The core's own block is never requested and no block is
        requested twice.
        """
        buf: list[tuple[int, int | None]] = []
        buf_blocks: set[int] = set()
        core_blk = cache_line(addr)

        def issue(target: int, node_base: int) -> None:
            if len(buf) >= self.buffer_cap:
                return
            blk = cache_line(target)
            if blk == core_blk or blk in buf_blocks:
                return
            buf.append((blk, node_base - blk))
            buf_blocks.add(blk)

        def prefetch_object(node_base: int) -> None:
            issue(node_base + self.key_o, node_base)
            for off in self.offsets:
                if len(buf) >= self.buffer_cap:
                    break
                issue(node_base + off, node_base)

        hit = self.search(addr)
        if hit is not None:
            queue: deque[int] = deque([hit])
            seen: set[int] = set()
            while queue and len(buf) < self.buffer_cap:
                idx = queue.popleft()
                if idx in seen:
                    continue
                seen.add(idx)
                prefetch_object(self.at_base[idx] << 3)
                for k in range(len(self.offsets)):
                    if self.at_slot_valid[idx][k]:
                        queue.append(self.cat_child[self.at_slot_cat[idx][k]])
        while len(buf) < self.buffer_cap and self.bfq:
            prefetch_object(self.bfq.popleft() << 3)
        return buf

    # -- introspection --------------------------------------------------------

    def snapshot(self) -> dict:
        n_off = len(self.offsets)
        at = tuple(
            (1, self.at_used[j], self.at_built[j], self.at_base[j],
             tuple((self.at_slot_valid[j][k], self.at_slot_cat[j][k] if self.at_slot_valid[j][k] else 0)
                   for k in range(n_off)))
            if self.at_valid[j] else (0, 0, 0, 0, ((0, 0),) * n_off)
            for j in range(self.at_n))
        cat = tuple(
            (1, self.cat_used[c], self.cat_built[c], self.cat_parent[c],
             self.cat_child[c], self.cat_off[c])
            if self.cat_valid[c] else (0, 0, 0, 0, 0, 0)
            for c in range(self.cat_n))
        return dict(node_size=self.node_size, offsets=tuple(self.offsets),
                    key_o=self.key_o, armed=self.armed, last_hit=self.last_hit,
                    roots=tuple((v, i if v else 0) for v, i in self.roots),
                    at=at, cat=cat, bfq=tuple(self.bfq))


class Engine:
    """Ties the heap, hierarchy and prefetcher together; tracks metrics."""

    backend = BACKEND_NAME

    def __init__(self, cfg, order: list[int] | None = None):
        from ..config import pool_order
        if order is None:
            order = pool_order(cfg.pool_slots, cfg.pool_seed)
        self.cfg = cfg
        self.heap = SimHeap(cfg.heap_base, cfg.pool_pitch, order)
        self.l1 = CacheLevel(cfg.l1.sets, cfg.l1.ways, cfg.l1.latency)
        self.l2 = CacheLevel(cfg.l2.sets, cfg.l2.ways, cfg.l2.latency)
        self.l3 = CacheLevel(cfg.l3.sets, cfg.l3.ways, cfg.l3.latency)
        self.dram_latency = cfg.dram_latency
        self.drain_n = cfg.drain_per_event
        if cfg.prefetcher == "linkey":
            self.pf = LinkeyPrefetcher(cfg.at_entries, cfg.cat_entries,
                                       cfg.bfq_entries, cfg.buffer_cap, self.heap)
        elif cfg.prefetcher == "stride":
            self.pf = StridePrefetcher()
        else:
            self.pf = NullPrefetcher()
        self.reset_metrics()
        self._last_outcome = (0, 0, False)

    # -- raw heap (no simulation) ------------------------------------------

    def alloc_node(self, node_size: int) -> int:
        return self.heap.alloc_node(node_size)

    def slots_remaining(self) -> int:
        return self.heap.slots_remaining()

    def heap_read64(self, addr: int) -> int:
        return self.heap.read64(addr)

    def heap_write64(self, addr: int, value: int) -> None:
        self.heap.write64(addr, value)

    def heap_load(self, pairs) -> None:
        for addr, value in pairs:
            self.heap.write64(addr, value)

    # -- simulated accesses ---------------------------------------------------

    def read64(self, addr: int) -> int:
        value = self.heap.read64(addr)
        self._access(addr, False)
        return value

    def write64(self, addr: int, value: int) -> None:
        self.heap.write64(addr, value)
        self._access(addr, True)

    def last_outcome(self) -> tuple[int, int, bool]:
        """(level that served the last access: 1/2/3, 4=memory; latency; whether
        it was the first demand use of a prefetched L1 line)."""
        return self._last_outcome

    def _access(self, addr: int, is_write: bool) -> None:
        self.n_accesses += 1
        blk = cache_line(addr)
        pending = self.pf.core_req(addr)
        self._drain(pending)
        level, latency, pf_first = self._demand(blk)
        self.stall_cycles += latency
        if pf_first:
            self.n_pf_hits += 1
        self._last_outcome = (level, latency, pf_first)
        if is_write or level > 1:
            self.pf.build(blk)
            self._drain(pending)

    def _demand(self, blk: int) -> tuple[int, int, bool]:
        line = self.l1.lookup(blk)
        if line is not None:
            pf_first = bool(line[1])
            line[1] = 0
            line[2] = 1
            return 1, self.l1.latency, pf_first
        self.n_l1_miss += 1
        if self.l2.lookup(blk) is not None:
            self._fill(self.l1, blk)
            return 2, self.l2.latency, False
        self.n_l2_miss += 1
        if self.l3.lookup(blk) is not None:
            self._fill(self.l2, blk)
            self._fill(self.l1, blk)
            return 3, self.l3.latency, False
        self.n_l3_miss += 1
        self._fill(self.l3, blk)
        self._fill(self.l2, blk)
        self._fill(self.l1, blk)
        return 4, self.dram_latency, False

    def _fill(self, level: CacheLevel, blk: int, prefetched: int = 0) -> None:
        evicted = level.insert(blk, prefetched)
        if evicted is None:
            return
        # Inclusion: a victim leaving an outer level may not linger inward.
        if level is self.l3:
            self.l2.invalidate(evicted)
            self.l1.invalidate(evicted)
        elif level is self.l2:
            self.l1.invalidate(evicted)

    def _drain(self, pending: list) -> None:
        for _ in range(self.drain_n):
            if not pending:
                return
            blk, obj_off = pending.pop(0)
            if self._prefetch_fill(blk):
                self.n_pf_issued += 1
                self.pf.build(blk)
                if obj_off is not None:
                    self.pf.ingest(blk, obj_off)

    def _prefetch_fill(self, blk: int) -> bool:
        if self.l1.contains(blk):
            return False
        if self.l3.lookup(blk) is None:
            self._fill(self.l3, blk, 1)
        if self.l2.lookup(blk) is None:
            self._fill(self.l2, blk, 1)
        self._fill(self.l1, blk, 1)
        return True

    def issue_prefetch(self, blk: int, obj_off: int | None = None) -> bool:
        """Directly issue one prefetch request (unit-test hook)."""
        if self._prefetch_fill(blk):
            self.n_pf_issued += 1
            self.pf.build(blk)
            if obj_off is not None:
                self.pf.ingest(blk, obj_off)
            return True
        return False

    # -- metrics ---------------------------------------------------------------

    def reset_metrics(self) -> None:
        self.n_accesses = 0
        self.n_l1_miss = 0
        self.n_l2_miss = 0
        self.n_l3_miss = 0
        self.n_pf_issued = 0
        self.n_pf_hits = 0
        self.stall_cycles = 0
        self.pf.reset_stats()

    def metrics(self) -> dict[str, int]:
        out = dict(kernel_accesses=self.n_accesses,
                   l1d_miss=self.n_l1_miss, l2_miss=self.n_l2_miss,
                   l3_miss=self.n_l3_miss,
                   prefetch_issued=self.n_pf_issued, prefetch_hits=self.n_pf_hits,
                   stall_cycles=self.stall_cycles)
        out.update(self.pf.stats())
        return out

    # -- cache introspection -----------------------------------------------------

    def _level(self, which: int) -> CacheLevel:
        return (self.l1, self.l2, self.l3)[which - 1]

    def cache_contains(self, which: int, blk: int) -> bool:
        return self._level(which).contains(blk)

    def cache_dump(self, which: int):
        return self._level(which).dump()

    # -- prefetcher surface --------------------------------------------------------

    def _linkey(self) -> LinkeyPrefetcher:
        if not isinstance(self.pf, LinkeyPrefetcher):
            raise RangeError("engine was built with prefetcher %r" % self.pf.kind)
        return self.pf

    def pf_reset(self) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.reset()

    def pf_set_size(self, size: int) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.set_size(size)

    def pf_add_offset(self, off: int) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.add_offset(off)

    def pf_set_root(self, slot: int, addr: int) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.set_root(slot, addr)

    def pf_clear_roots(self) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.clear_roots()

    def pf_new_traversal(self) -> None:
        if isinstance(self.pf, LinkeyPrefetcher):
            self.pf.new_traversal()

    def pf_core_req(self, addr: int):
        return self.pf.core_req(addr)

    def pf_build(self, blk: int) -> None:
        self.pf.build(blk)

    def pf_ingest(self, blk: int, obj_off: int) -> None:
        self.pf.ingest(blk, obj_off)

    def pf_search(self, addr: int):
        return self._linkey().search(addr)

    def pf_pick_victim(self, which: str, protected: int = -1):
        pf = self._linkey()
        if which == "at":
            return pf.pick_victim_at(protected)
        if which == "cat":
            return pf.pick_victim_cat()
        raise RangeError("which must be 'at' or 'cat'")

    def pf_invalidate_at(self, idx: int) -> None:
        self._linkey().invalidate_at(idx)

    def pf_invalidate_cat(self, idx: int) -> None:
        self._linkey().invalidate_cat(idx)

    def pf_snapshot(self) -> dict:
        if isinstance(self.pf, LinkeyPrefetcher):
            return self.pf.snapshot()
        return dict(kind=self.pf.kind)


# -- kernel drivers -----------------------------------------------------------
#
# The tight per-node loops of the traversal benchmarks.  The native core
# exports the same functions compiled; lookups and structure mutation live in
# the workloads module because their access counts are small.


def k_chain_sum(e: Engine, head: int, voff: int, noff: int, passes: int) -> int:
    total = 0
    for _ in range(passes):
        node = head
        while node:
            total = (total + e.read64(node + voff)) & M64
            node = e.read64(node + noff)
    return total


def k_chain_reverse(e: Engine, head: int, noff: int) -> int:
    prev = 0
    node = head
    while node:
        nxt = e.read64(node + noff)
        e.write64(node + noff, prev)
        prev = node
        node = nxt
    return prev


def k_tree_dfs_sum(e: Engine, root: int, voff: int, loff: int, roff: int,
                   passes: int) -> int:
    def rec(node: int) -> int:
        if not node:
            return 0
        total = e.read64(node + voff)
        total += rec(e.read64(node + loff))
        total += rec(e.read64(node + roff))
        return total & M64
    grand = 0
    for _ in range(passes):
        grand = (grand + rec(root)) & M64
    return grand


def k_tree_bfs_sum(e: Engine, root: int, voff: int, loff: int, roff: int) -> int:
    total = 0
    queue: deque[int] = deque()
    if root:
        queue.append(root)
    while queue:
        node = queue.popleft()
        total = (total + e.read64(node + voff)) & M64
        left = e.read64(node + loff)
        right = e.read64(node + roff)
        if left:
            queue.append(left)
        if right:
            queue.append(right)
    return total


def k_wcycle_sum(e: Engine, root: int, voff: int, coff: int, nchild: int) -> int:
    def rec(node: int) -> int:
        if not node:
            return 0
        total = e.read64(node + voff)
        for _ in range(2):
            for i in range(nchild):
                child = e.read64(node + coff + 8 * i)
                total = (total + rec(child)) & M64
        return total
    return rec(root)


def k_graph_bfs_sum(e: Engine, root: int, voff: int, coff: int, nchild: int) -> int:
    total = 0
    seen = {root}
    queue: deque[int] = deque([root])
    while queue:
        node = queue.popleft()
        total = (total + e.read64(node + voff)) & M64
        for i in range(nchild):
            child = e.read64(node + coff + 8 * i)
            if child and child not in seen:
                seen.add(child)
                queue.append(child)
    return total


def k_sweep_read(e: Engine, base: int, count: int, step: int, passes: int) -> int:
    total = 0
    for _ in range(passes):
        addr = base
        for _i in range(count):
            total = (total + e.read64(addr)) & M64
            addr += step
    return total
