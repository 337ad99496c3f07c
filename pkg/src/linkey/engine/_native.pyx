# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, cdivision=True
"""Compiled simulation core.

Behavioral twin of the pure-Python engine: same state machines, same event
order, same observable results (metrics, snapshots, cache dumps, request
buffers), built for speed.  Tables and caches live in flat C arrays, the
sparse heap in a hash map; the per-access control loop never touches Python
objects.  Anything observable is converted back to plain Python values so
snapshots and metrics compare equal across the two cores.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.string cimport memset
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

from cython.operator cimport dereference as deref

from linkey.errors import (AlignmentError, AllocationError, CapacityError,
                           LayoutError, RangeError)

M64 = (1 << 64) - 1
MASK45 = (1 << 45) - 1
BLOCK = 64
PAGE = 4096

BACKEND_NAME = "native"

cdef uint64_t C_MASK45 = ((<uint64_t>1) << 45) - 1
cdef int64_t C_BLK = ~(<int64_t>63)


def cache_line(addr):
    return addr & ~(BLOCK - 1)


cdef class CHeap:
    """Sparse word storage with a seeded-shuffle node pool."""

    cdef unordered_map[uint64_t, uint64_t] words
    cdef vector[int64_t] order
    cdef int64_t base
    cdef int64_t pitch
    cdef int cursor

    def __cinit__(self, base, pitch, order):
        self.base = base
        self.pitch = pitch
        self.cursor = 0
        self.order.reserve(len(order))
        for v in order:
            self.order.push_back(v)

    cdef inline uint64_t get(self, int64_t addr):
        cdef unordered_map[uint64_t, uint64_t].iterator it
        it = self.words.find(<uint64_t>addr)
        if it == self.words.end():
            return 0
        return deref(it).second

    cdef inline void put(self, int64_t addr, uint64_t value):
        self.words[<uint64_t>addr] = value

    cdef uint64_t read_any(self, int64_t addr):
        # byte-offset read; child offsets are not required to be word-aligned
        cdef int shift = (<int>(addr & 7)) * 8
        cdef int64_t a0 = addr & ~(<int64_t>7)
        cdef uint64_t lo = self.get(a0) >> shift
        cdef uint64_t hi
        if shift:
            hi = self.get(a0 + 8) << (64 - shift)
            return lo | hi
        return lo


cdef class CCache:
    """One set-associative level; per-set lines kept in MRU-first order.

    Lines are parallel arrays (tag, prefetched bit, used bit) of ``ways``
    slots per set; the first ``occ[set]`` slots are live, most recent first.
    """

    cdef int sets, ways, latency
    cdef vector[int64_t] tags
    cdef vector[uint8_t] pf
    cdef vector[uint8_t] used
    cdef vector[int32_t] occ

    def __cinit__(self, int sets, int ways, int latency):
        self.sets = sets
        self.ways = ways
        self.latency = latency
        self.tags.resize(<size_t>sets * ways)
        self.pf.resize(<size_t>sets * ways)
        self.used.resize(<size_t>sets * ways)
        self.occ.resize(sets)

    cdef inline int setidx(self, int64_t blk):
        cdef int64_t i = (blk >> 6) % self.sets
        if i < 0:
            i += self.sets
        return <int>i

    cdef int lookup(self, int64_t blk):
        # promote to MRU; return the line's flat index, or -1
        cdef int si = self.setidx(blk)
        cdef int base = si * self.ways
        cdef int n = self.occ[si]
        cdef int i, j
        cdef int64_t t
        cdef uint8_t p, u
        for i in range(n):
            if self.tags[base + i] == blk:
                if i:
                    t = self.tags[base + i]
                    p = self.pf[base + i]
                    u = self.used[base + i]
                    for j in range(i, 0, -1):
                        self.tags[base + j] = self.tags[base + j - 1]
                        self.pf[base + j] = self.pf[base + j - 1]
                        self.used[base + j] = self.used[base + j - 1]
                    self.tags[base] = t
                    self.pf[base] = p
                    self.used[base] = u
                return base
        return -1

    cdef bint has(self, int64_t blk):
        cdef int si = self.setidx(blk)
        cdef int base = si * self.ways
        cdef int n = self.occ[si]
        cdef int i
        for i in range(n):
            if self.tags[base + i] == blk:
                return True
        return False

    cdef bint insert(self, int64_t blk, int prefetched, int64_t *evicted):
        # insert as MRU; report the evicted tag if the set was full
        cdef int si = self.setidx(blk)
        cdef int base = si * self.ways
        cdef int n = self.occ[si]
        cdef bint ev = False
        cdef int j
        if n >= self.ways:
            evicted[0] = self.tags[base + self.ways - 1]
            ev = True
            n = self.ways - 1
        for j in range(n, 0, -1):
            self.tags[base + j] = self.tags[base + j - 1]
            self.pf[base + j] = self.pf[base + j - 1]
            self.used[base + j] = self.used[base + j - 1]
        self.tags[base] = blk
        self.pf[base] = <uint8_t>prefetched
        self.used[base] = 0
        self.occ[si] = n + 1
        return ev

    cdef void drop(self, int64_t blk):
        cdef int si = self.setidx(blk)
        cdef int base = si * self.ways
        cdef int n = self.occ[si]
        cdef int i, j
        for i in range(n):
            if self.tags[base + i] == blk:
                for j in range(i, n - 1):
                    self.tags[base + j] = self.tags[base + j + 1]
                    self.pf[base + j] = self.pf[base + j + 1]
                    self.used[base + j] = self.used[base + j + 1]
                self.occ[si] = n - 1
                return

    def contains_py(self, blk):
        return self.has(blk)

    def dump_py(self):
        cdef int si, base, i
        out = []
        for si in range(self.sets):
            base = si * self.ways
            rows = []
            for i in range(self.occ[si]):
                rows.append((self.tags[base + i], <int>self.pf[base + i],
                             <int>self.used[base + i]))
            out.append(rows)
        return out


cdef class CLinkey:
    """Layout-hinted prefetcher state: address table, child association
    table, backup fetch queue, and the layout registers.  Node bases are
    stored as 45-bit values (8-byte node alignment implies the low bits).
    """

    cdef CHeap heap
    cdef int at_n, cat_n, bfq_n, buffer_cap
    cdef vector[uint8_t] at_valid
    cdef vector[uint8_t] at_used
    cdef vector[uint8_t] at_built
    cdef vector[uint64_t] at_base
    cdef vector[uint8_t] at_slot_valid      # at_n * 8
    cdef vector[int32_t] at_slot_cat        # at_n * 8
    cdef vector[uint8_t] cat_valid
    cdef vector[uint8_t] cat_used
    cdef vector[uint8_t] cat_built
    cdef vector[int32_t] cat_parent
    cdef vector[int32_t] cat_child
    cdef vector[int32_t] cat_off
    cdef unordered_map[uint64_t, int32_t] at_index
    cdef int at_used_count, cat_used_count
    cdef int root_valid[4]
    cdef int root_idx[4]
    cdef vector[uint64_t] bfq_buf           # ring of queued stored bases
    cdef int bfq_head, bfq_count
    cdef int node_size
    cdef int64_t offsets[8]
    cdef int n_offsets
    cdef int64_t key_o
    cdef int last_hit                       # -1 when none
    cdef bint armed
    cdef long long n_at_insert, n_cat_insert, n_invalidations
    cdef long long n_evictions, n_bfq_push, n_bfq_drop
    # scratch for the request-buffer walk
    cdef vector[int32_t] bfs_q
    cdef vector[uint8_t] seen

    def __cinit__(self, int at_n, int cat_n, int bfq_n, int buffer_cap,
                  CHeap heap):
        self.heap = heap
        self.at_n = at_n
        self.cat_n = cat_n
        self.bfq_n = bfq_n
        self.buffer_cap = buffer_cap
        self.at_valid.resize(at_n)
        self.at_used.resize(at_n)
        self.at_built.resize(at_n)
        self.at_base.resize(at_n)
        self.at_slot_valid.resize(<size_t>at_n * 8)
        self.at_slot_cat.resize(<size_t>at_n * 8)
        self.cat_valid.resize(cat_n)
        self.cat_used.resize(cat_n)
        self.cat_built.resize(cat_n)
        self.cat_parent.resize(cat_n)
        self.cat_child.resize(cat_n)
        self.cat_off.resize(cat_n)
        self.bfq_buf.resize(bfq_n if bfq_n > 0 else 1)
        self.seen.resize(at_n)
        self.creset()
        self.creset_stats()

    # -- configuration ----------------------------------------------------

    cdef void creset(self):
        memset(self.at_valid.data(), 0, self.at_n)
        memset(self.at_used.data(), 0, self.at_n)
        memset(self.at_built.data(), 0, self.at_n)
        memset(self.at_base.data(), 0, <size_t>self.at_n * 8)
        memset(self.at_slot_valid.data(), 0, <size_t>self.at_n * 8)
        memset(self.at_slot_cat.data(), 0, <size_t>self.at_n * 8 * 4)
        memset(self.cat_valid.data(), 0, self.cat_n)
        memset(self.cat_used.data(), 0, self.cat_n)
        memset(self.cat_built.data(), 0, self.cat_n)
        memset(self.cat_parent.data(), 0, <size_t>self.cat_n * 4)
        memset(self.cat_child.data(), 0, <size_t>self.cat_n * 4)
        memset(self.cat_off.data(), 0, <size_t>self.cat_n * 4)
        self.at_index.clear()
        self.at_used_count = 0
        self.cat_used_count = 0
        cdef int s
        for s in range(4):
            self.root_valid[s] = 0
            self.root_idx[s] = 0
        self.bfq_head = 0
        self.bfq_count = 0
        self.node_size = 0
        self.n_offsets = 0
        self.key_o = 0
        self.last_hit = -1
        self.armed = False

    cdef void creset_stats(self):
        self.n_at_insert = 0
        self.n_cat_insert = 0
        self.n_invalidations = 0
        self.n_evictions = 0
        self.n_bfq_push = 0
        self.n_bfq_drop = 0

    cdef int set_size(self, int size) except -1:
        if not 0 < size <= 4096:
            raise LayoutError("node size %d outside (0, 4096]" % size)
        self.node_size = size
        return 0

    cdef int add_offset(self, int64_t off) except -1:
        if self.n_offsets >= 8:
            raise CapacityError("all 8 child offset registers are in use")
        if off < 0 or off + 8 > self.node_size:
            raise LayoutError("child offset %d does not fit a node of %d bytes"
                              % (off, self.node_size))
        self.offsets[self.n_offsets] = off
        self.n_offsets += 1
        return 0

    cdef int set_root(self, int slot, int64_t addr) except -1:
        if not 0 <= slot < 4:
            raise RangeError("root slot %d outside [0, 4)" % slot)
        cdef int idx = self.add_or_find(<uint64_t>addr, -1, True)
        self.root_valid[slot] = 1
        self.root_idx[slot] = idx
        return 0

    cdef void clear_roots(self):
        cdef int s
        for s in range(4):
            self.root_valid[s] = 0

    cdef void new_traversal(self):
        self.armed = True
        self.clear_built()

    # -- small helpers -----------------------------------------------------

    cdef void clear_built(self):
        memset(self.at_built.data(), 0, self.at_n)
        memset(self.cat_built.data(), 0, self.cat_n)

    cdef bint is_root_entry(self, int idx):
        cdef int s
        for s in range(4):
            if self.root_valid[s] and self.root_idx[s] == idx:
                return True
        return False

    cdef int find_valid(self, uint64_t stored):
        cdef unordered_map[uint64_t, int32_t].iterator it
        it = self.at_index.find(stored)
        if it == self.at_index.end():
            return -1
        return deref(it).second

    cdef void set_at_used(self, int idx):
        if not self.at_used[idx]:
            self.at_used[idx] = 1
            self.at_used_count += 1

    cdef void set_cat_used(self, int idx):
        if not self.cat_used[idx]:
            self.cat_used[idx] = 1
            self.cat_used_count += 1

    cdef void mark_used(self, int idx):
        self.set_at_used(idx)
        cdef int k
        for k in range(self.n_offsets):
            if self.at_slot_valid[idx * 8 + k]:
                self.set_cat_used(self.at_slot_cat[idx * 8 + k])
        # a fully used table starts a fresh recency epoch
        if self.at_used_count == self.at_n:
            memset(self.at_used.data(), 0, self.at_n)
            self.at_used_count = 0
        if self.cat_used_count == self.cat_n:
            memset(self.cat_used.data(), 0, self.cat_n)
            self.cat_used_count = 0

    # -- backup fetch queue ring ---------------------------------------------

    cdef bint bfq_has(self, uint64_t v):
        cdef int cap = <int>self.bfq_buf.size()
        cdef int i
        for i in range(self.bfq_count):
            if self.bfq_buf[(self.bfq_head + i) % cap] == v:
                return True
        return False

    cdef uint64_t bfq_pop(self):
        cdef int cap = <int>self.bfq_buf.size()
        cdef uint64_t v = self.bfq_buf[self.bfq_head]
        self.bfq_head = (self.bfq_head + 1) % cap
        self.bfq_count -= 1
        return v

    cdef void bfq_append(self, uint64_t v):
        cdef int cap = <int>self.bfq_buf.size()
        self.bfq_buf[(self.bfq_head + self.bfq_count) % cap] = v
        self.bfq_count += 1

    # -- eviction and invalidation -----------------------------------------

    cdef int pick_victim_at(self, int protected):
        cdef int j
        for j in range(self.at_n):
            if (self.at_valid[j] and not self.at_used[j]
                    and not self.at_built[j] and j != protected
                    and not self.is_root_entry(j)):
                return j
        return -1

    cdef int pick_victim_cat(self):
        cdef int j
        for j in range(self.cat_n):
            if (self.cat_valid[j] and not self.cat_used[j]
                    and not self.cat_built[j]):
                return j
        return -1

    cdef void invalidate_cat(self, int idx):
        if not self.cat_valid[idx]:
            return
        cdef int p = self.cat_parent[idx]
        cdef int k = self.cat_off[idx]
        if (self.at_valid[p] and self.at_slot_valid[p * 8 + k]
                and self.at_slot_cat[p * 8 + k] == idx):
            self.at_slot_valid[p * 8 + k] = 0
        self.cat_valid[idx] = 0
        if self.cat_used[idx]:
            self.cat_used[idx] = 0
            self.cat_used_count -= 1
        self.cat_built[idx] = 0
        self.n_invalidations += 1

    cdef void invalidate_at(self, int idx):
        if not self.at_valid[idx]:
            return
        cdef int c, s, k
        for c in range(self.cat_n):
            if self.cat_valid[c] and (self.cat_parent[c] == idx
                                      or self.cat_child[c] == idx):
                self.invalidate_cat(c)
        for s in range(4):
            if self.root_valid[s] and self.root_idx[s] == idx:
                self.root_valid[s] = 0
        self.at_valid[idx] = 0
        self.at_index.erase(self.at_base[idx])
        if self.at_used[idx]:
            self.at_used[idx] = 0
            self.at_used_count -= 1
        self.at_built[idx] = 0
        for k in range(8):
            self.at_slot_valid[idx * 8 + k] = 0
        self.n_invalidations += 1

    cdef int add_or_find(self, uint64_t addr, int protected, bint force):
        # locate or allocate the entry for a node base; a found entry gets
        # its just-built bit refreshed; allocation prefers the lowest-index
        # invalid slot, then the normal victim; with force the lowest-index
        # non-root entry goes regardless of its replacement bits
        cdef uint64_t stored = (addr >> 3) & C_MASK45
        cdef int found = self.find_valid(stored)
        if found >= 0:
            self.at_built[found] = 1
            return found
        cdef int slot = -1
        cdef int j
        for j in range(self.at_n):
            if not self.at_valid[j]:
                slot = j
                break
        if slot < 0:
            slot = self.pick_victim_at(protected)
            if slot < 0 and force:
                for j in range(self.at_n):
                    if not self.is_root_entry(j):
                        slot = j
                        break
            if slot < 0:
                return -1
            self.n_evictions += 1
            self.invalidate_at(slot)
        self.at_valid[slot] = 1
        if self.at_used[slot]:
            self.at_used[slot] = 0
            self.at_used_count -= 1
        self.at_built[slot] = 1
        self.at_base[slot] = stored
        self.at_index[stored] = slot
        for j in range(8):
            self.at_slot_valid[slot * 8 + j] = 0
        self.n_at_insert += 1
        return slot

    # -- table search --------------------------------------------------------

    cdef int search(self, int64_t addr):
        # root range check first, then the content-addressed lookup; a root
        # hit that starts a new traversal re-learns the key offset and
        # clears every just-built bit
        cdef int s, idx, j
        cdef int64_t base, target
        for s in range(4):
            if not self.root_valid[s]:
                continue
            idx = self.root_idx[s]
            base = <int64_t>(self.at_base[idx] << 3)
            if base <= addr < base + self.node_size:
                if self.armed or self.last_hit != idx:
                    self.key_o = addr - base
                    self.clear_built()
                    self.armed = False
                self.last_hit = idx
                self.mark_used(idx)
                return idx
        target = addr - self.key_o
        if target >= 0 and not (target & 7):
            j = self.find_valid((<uint64_t>target >> 3) & C_MASK45)
            if j >= 0 and not self.is_root_entry(j):
                self.last_hit = j
                self.mark_used(j)
                return j
        return -1

    # -- table building -------------------------------------------------------

    cdef void build(self, int64_t blk):
        # response hook: relearn the links of every node touching the block;
        # the stale link at a covered offset is dropped unconditionally and
        # a non-NULL pointer linked back in if both tables have space; the
        # scan snapshot is taken up front, so an entry recycled by an
        # earlier insertion is processed under its new identity
        if self.node_size == 0:
            return
        cdef int64_t span = self.node_size - 1
        cdef vector[int32_t] parents
        cdef int j, k, child, cat_slot, c
        cdef int64_t base, ptr_addr
        cdef uint64_t child_ptr
        for j in range(self.at_n):
            if not self.at_valid[j]:
                continue
            base = <int64_t>(self.at_base[j] << 3)
            if (base & C_BLK) <= blk <= ((base + span) & C_BLK):
                parents.push_back(j)
        cdef size_t pi
        cdef int p
        for pi in range(parents.size()):
            p = parents[pi]
            if not self.at_valid[p]:
                continue
            base = <int64_t>(self.at_base[p] << 3)
            for k in range(self.n_offsets):
                ptr_addr = base + self.offsets[k]
                if (ptr_addr & C_BLK) != blk:
                    continue
                child_ptr = self.heap.read_any(ptr_addr)
                if self.at_slot_valid[p * 8 + k]:
                    self.invalidate_cat(self.at_slot_cat[p * 8 + k])
                if child_ptr == 0:
                    continue
                child = self.add_or_find(child_ptr, p, False)
                if child < 0:
                    continue
                cat_slot = -1
                for c in range(self.cat_n):
                    if not self.cat_valid[c]:
                        cat_slot = c
                        break
                if cat_slot < 0:
                    cat_slot = self.pick_victim_cat()
                    if cat_slot < 0:
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
                self.at_slot_valid[p * 8 + k] = 1
                self.at_slot_cat[p * 8 + k] = cat_slot
                self.n_cat_insert += 1

    # -- backup fetch queue ingest ---------------------------------------------

    cdef int ingest(self, int64_t blk, int64_t obj_off) except -1:
        # prefetch-response hook: queue children the tables will not fetch;
        # duplicates are skipped and overflow drops the oldest queued base
        cdef int64_t node_base = blk + obj_off
        cdef int parent = self.find_valid(
            (<uint64_t>(node_base >> 3)) & C_MASK45)
        cdef int k
        cdef int64_t ptr_addr
        cdef uint64_t child_ptr, stored
        for k in range(self.n_offsets):
            ptr_addr = node_base + self.offsets[k]
            if (ptr_addr & C_BLK) != blk:
                continue
            child_ptr = self.heap.read_any(ptr_addr)
            if child_ptr == 0:
                continue
            if parent >= 0 and self.at_slot_valid[parent * 8 + k]:
                continue
            stored = (child_ptr >> 3) & C_MASK45
            # the queue backs up the tables; children the tables already
            # know are never queued
            if self.at_index.count(stored):
                continue
            if self.bfq_has(stored):
                continue
            if self.bfq_count >= self.bfq_n:
                if self.bfq_count == 0:
                    raise IndexError("pop from an empty deque")
                self.bfq_pop()
                self.n_bfq_drop += 1
            self.bfq_append(stored)
            self.n_bfq_push += 1
        return 0

    # -- introspection --------------------------------------------------------

    def stats_py(self):
        return dict(at_insert=self.n_at_insert, cat_insert=self.n_cat_insert,
                    invalidations=self.n_invalidations,
                    evictions=self.n_evictions,
                    bfq_push=self.n_bfq_push, bfq_drop=self.n_bfq_drop)

    def snapshot_py(self):
        cdef int j, k, c, s, i
        cdef int n_off = self.n_offsets
        cdef int cap = <int>self.bfq_buf.size()
        at_rows = []
        for j in range(self.at_n):
            if self.at_valid[j]:
                slots = tuple(
                    (<int>self.at_slot_valid[j * 8 + k],
                     <int>self.at_slot_cat[j * 8 + k]
                     if self.at_slot_valid[j * 8 + k] else 0)
                    for k in range(n_off))
                at_rows.append((1, <int>self.at_used[j], <int>self.at_built[j],
                                self.at_base[j], slots))
            else:
                at_rows.append((0, 0, 0, 0, ((0, 0),) * n_off))
        cat_rows = []
        for c in range(self.cat_n):
            if self.cat_valid[c]:
                cat_rows.append((1, <int>self.cat_used[c],
                                 <int>self.cat_built[c],
                                 <int>self.cat_parent[c],
                                 <int>self.cat_child[c],
                                 <int>self.cat_off[c]))
            else:
                cat_rows.append((0, 0, 0, 0, 0, 0))
        bfq = tuple(self.bfq_buf[(self.bfq_head + i) % cap]
                    for i in range(self.bfq_count))
        return dict(
            node_size=self.node_size,
            offsets=tuple(self.offsets[k] for k in range(n_off)),
            key_o=self.key_o,
            armed=bool(self.armed),
            last_hit=None if self.last_hit < 0 else self.last_hit,
            roots=tuple((self.root_valid[s],
                         self.root_idx[s] if self.root_valid[s] else 0)
                        for s in range(4)),
            at=tuple(at_rows), cat=tuple(cat_rows), bfq=bfq)


cdef class Engine:
    """Ties the heap, hierarchy and prefetcher together; tracks metrics."""

    cdef public object cfg
    cdef CHeap heapc
    cdef CCache l1c, l2c, l3c
    cdef CLinkey lk
    cdef int dram_latency, drain_n, pf_kind
    cdef bint s_has_last
    cdef int64_t s_last, s_stride
    cdef int s_conf
    cdef vector[int64_t] pend_blk
    cdef vector[int64_t] pend_off
    cdef vector[uint8_t] pend_hasoff
    cdef int pend_head
    cdef long long n_accesses, n_l1_miss, n_l2_miss, n_l3_miss
    cdef long long n_pf_issued, n_pf_hits, stall_cycles
    cdef int last_level, last_latency
    cdef bint last_pf_first

    def __init__(self, cfg, order=None):
        from linkey.config import pool_order
        if order is None:
            order = pool_order(cfg.pool_slots, cfg.pool_seed)
        self.cfg = cfg
        self.heapc = CHeap(cfg.heap_base, cfg.pool_pitch, order)
        self.l1c = CCache(cfg.l1.sets, cfg.l1.ways, cfg.l1.latency)
        self.l2c = CCache(cfg.l2.sets, cfg.l2.ways, cfg.l2.latency)
        self.l3c = CCache(cfg.l3.sets, cfg.l3.ways, cfg.l3.latency)
        self.dram_latency = cfg.dram_latency
        self.drain_n = cfg.drain_per_event
        if cfg.prefetcher == "linkey":
            self.pf_kind = 2
            self.lk = CLinkey(cfg.at_entries, cfg.cat_entries,
                              cfg.bfq_entries, cfg.buffer_cap, self.heapc)
        elif cfg.prefetcher == "stride":
            self.pf_kind = 1
            self.lk = None
        else:
            self.pf_kind = 0
            self.lk = None
        self.s_has_last = False
        self.s_last = 0
        self.s_stride = 0
        self.s_conf = 2
        self.pend_head = 0
        self.reset_metrics()
        self.last_level = 0
        self.last_latency = 0
        self.last_pf_first = False

    @property
    def backend(self):
        return BACKEND_NAME

    # -- raw heap (no simulation) ------------------------------------------

    def alloc_node(self, node_size):
        cdef CHeap h = self.heapc
        cdef int64_t addr
        if node_size > h.pitch:
            raise AllocationError("node of %d bytes does not fit a %d-byte slot"
                                  % (node_size, h.pitch))
        if h.cursor >= <int>h.order.size():
            raise AllocationError("node pool exhausted")
        addr = h.base + h.order[h.cursor] * h.pitch
        h.cursor += 1
        return addr

    def slots_remaining(self):
        return <int>self.heapc.order.size() - self.heapc.cursor

    def heap_read64(self, addr):
        cdef int64_t a = addr
        if a & 7:
            raise AlignmentError("read64 at unaligned address %#x" % addr)
        return self.heapc.get(a)

    def heap_write64(self, addr, value):
        cdef int64_t a = addr
        if a & 7:
            raise AlignmentError("write64 at unaligned address %#x" % addr)
        self.heapc.put(a, <uint64_t>(value & M64))

    def heap_load(self, pairs):
        for addr, value in pairs:
            self.heap_write64(addr, value)

    # -- simulated accesses ---------------------------------------------------

    def read64(self, addr):
        return self._sim_read64(addr)

    def write64(self, addr, value):
        self._sim_write64(addr, <uint64_t>(value & M64))

    def last_outcome(self):
        """(level that served the last access: 1/2/3, 4=memory; latency;
        whether it was the first demand use of a prefetched L1 line)."""
        return (self.last_level, self.last_latency,
                True if self.last_pf_first else False)

    cdef uint64_t _sim_read64(self, int64_t addr) except *:
        if addr & 7:
            raise AlignmentError("read64 at unaligned address %#x" % addr)
        cdef uint64_t value = self.heapc.get(addr)
        self._access(addr, False)
        return value

    cdef int _sim_write64(self, int64_t addr, uint64_t value) except -1:
        if addr & 7:
            raise AlignmentError("write64 at unaligned address %#x" % addr)
        self.heapc.put(addr, value)
        self._access(addr, True)
        return 0

    cdef int _access(self, int64_t addr, bint is_write) except -1:
        self.n_accesses += 1
        cdef int64_t blk = addr & C_BLK
        self._core_req(addr)
        self._drain_pending()
        cdef int level = self._demand(blk)
        self.stall_cycles += self.last_latency
        if self.last_pf_first:
            self.n_pf_hits += 1
        self.last_level = level
        if is_write or level > 1:
            if self.pf_kind == 2:
                self.lk.build(blk)
            self._drain_pending()
        return 0

    cdef int _demand(self, int64_t blk) except -1:
        cdef int w = self.l1c.lookup(blk)
        if w >= 0:
            self.last_pf_first = self.l1c.pf[w] != 0
            self.l1c.pf[w] = 0
            self.l1c.used[w] = 1
            self.last_latency = self.l1c.latency
            return 1
        self.n_l1_miss += 1
        self.last_pf_first = False
        if self.l2c.lookup(blk) >= 0:
            self._fill(1, blk, 0)
            self.last_latency = self.l2c.latency
            return 2
        self.n_l2_miss += 1
        if self.l3c.lookup(blk) >= 0:
            self._fill(2, blk, 0)
            self._fill(1, blk, 0)
            self.last_latency = self.l3c.latency
            return 3
        self.n_l3_miss += 1
        self._fill(3, blk, 0)
        self._fill(2, blk, 0)
        self._fill(1, blk, 0)
        self.last_latency = self.dram_latency
        return 4

    cdef void _fill(self, int levelno, int64_t blk, int prefetched):
        cdef CCache c
        if levelno == 1:
            c = self.l1c
        elif levelno == 2:
            c = self.l2c
        else:
            c = self.l3c
        cdef int64_t evicted = 0
        if not c.insert(blk, prefetched, &evicted):
            return
        # inclusion: a victim leaving an outer level may not linger inward
        if levelno == 3:
            self.l2c.drop(evicted)
            self.l1c.drop(evicted)
        elif levelno == 2:
            self.l1c.drop(evicted)

    cdef int _drain_pending(self) except -1:
        cdef int n
        cdef int64_t blk, off
        cdef bint has
        for n in range(self.drain_n):
            if self.pend_head >= <int>self.pend_blk.size():
                return 0
            blk = self.pend_blk[self.pend_head]
            off = self.pend_off[self.pend_head]
            has = self.pend_hasoff[self.pend_head]
            self.pend_head += 1
            if self._prefetch_fill(blk):
                self.n_pf_issued += 1
                if self.pf_kind == 2:
                    self.lk.build(blk)
                    if has:
                        self.lk.ingest(blk, off)
        return 0

    cdef bint _prefetch_fill(self, int64_t blk):
        if self.l1c.has(blk):
            return False
        if self.l3c.lookup(blk) < 0:
            self._fill(3, blk, 1)
        if self.l2c.lookup(blk) < 0:
            self._fill(2, blk, 1)
        self._fill(1, blk, 1)
        return True

    def issue_prefetch(self, blk, obj_off=None):
        """Directly issue one prefetch request (unit-test hook)."""
        cdef int64_t b = blk
        if self._prefetch_fill(b):
            self.n_pf_issued += 1
            if self.pf_kind == 2:
                self.lk.build(b)
                if obj_off is not None:
                    self.lk.ingest(b, obj_off)
            return True
        return False

    # -- request buffer -------------------------------------------------------

    cdef int _core_req(self, int64_t addr) except -1:
        self.pend_blk.clear()
        self.pend_off.clear()
        self.pend_hasoff.clear()
        self.pend_head = 0
        if self.pf_kind == 1:
            self._stride_req(addr)
        elif self.pf_kind == 2:
            self._linkey_req(addr)
        return 0

    cdef void _stride_req(self, int64_t addr):
        # global stride detector with a 2-bit saturating confidence counter;
        # at confidence >= 2 the next two blocks along the stride are
        # requested, page-bounded, never the core's own block
        cdef int64_t delta, page, core_blk, target, blk
        cdef int mult
        cdef size_t i
        cdef bint dup
        if not self.s_has_last:
            self.s_has_last = True
            self.s_last = addr
            return
        delta = addr - self.s_last
        if delta == self.s_stride:
            if self.s_conf < 3:
                self.s_conf += 1
        else:
            if self.s_conf > 0:
                self.s_conf -= 1
            self.s_stride = delta
        self.s_last = addr
        if self.s_conf >= 2 and self.s_stride != 0:
            page = addr >> 12
            core_blk = addr & C_BLK
            for mult in range(1, 3):
                target = addr + mult * self.s_stride
                if target < 0:
                    continue
                blk = target & C_BLK
                if (blk >> 12) != page or blk == core_blk:
                    continue
                dup = False
                for i in range(self.pend_blk.size()):
                    if self.pend_blk[i] == blk:
                        dup = True
                        break
                if dup:
                    continue
                self.pend_blk.push_back(blk)
                self.pend_off.push_back(0)
                self.pend_hasoff.push_back(0)

    cdef void _issue(self, int64_t target, int64_t node_base,
                     int64_t core_blk):
        cdef CLinkey lk = self.lk
        if <int>self.pend_blk.size() >= lk.buffer_cap:
            return
        cdef int64_t blk = target & C_BLK
        if blk == core_blk:
            return
        cdef size_t i
        for i in range(self.pend_blk.size()):
            if self.pend_blk[i] == blk:
                return
        self.pend_blk.push_back(blk)
        self.pend_off.push_back(node_base - blk)
        self.pend_hasoff.push_back(1)

    cdef void _prefetch_object(self, int64_t node_base, int64_t core_blk):
        cdef CLinkey lk = self.lk
        self._issue(node_base + lk.key_o, node_base, core_blk)
        cdef int k
        for k in range(lk.n_offsets):
            if <int>self.pend_blk.size() >= lk.buffer_cap:
                break
            self._issue(node_base + lk.offsets[k], node_base, core_blk)

    cdef void _linkey_req(self, int64_t addr):
        # on a table hit, walk the association graph breadth-first from the
        # hit entry; whatever buffer space remains is fed from the backup
        # fetch queue
        cdef CLinkey lk = self.lk
        cdef int64_t core_blk = addr & C_BLK
        cdef int hit = lk.search(addr)
        cdef int qh, idx, k
        if hit >= 0:
            lk.bfs_q.clear()
            memset(lk.seen.data(), 0, lk.at_n)
            lk.bfs_q.push_back(hit)
            qh = 0
            while (qh < <int>lk.bfs_q.size()
                   and <int>self.pend_blk.size() < lk.buffer_cap):
                idx = lk.bfs_q[qh]
                qh += 1
                if lk.seen[idx]:
                    continue
                lk.seen[idx] = 1
                self._prefetch_object(<int64_t>(lk.at_base[idx] << 3),
                                      core_blk)
                for k in range(lk.n_offsets):
                    if lk.at_slot_valid[idx * 8 + k]:
                        lk.bfs_q.push_back(
                            lk.cat_child[lk.at_slot_cat[idx * 8 + k]])
        while (<int>self.pend_blk.size() < lk.buffer_cap
               and lk.bfq_count > 0):
            self._prefetch_object(<int64_t>(lk.bfq_pop() << 3), core_blk)

    # -- metrics ---------------------------------------------------------------

    def reset_metrics(self):
        self.n_accesses = 0
        self.n_l1_miss = 0
        self.n_l2_miss = 0
        self.n_l3_miss = 0
        self.n_pf_issued = 0
        self.n_pf_hits = 0
        self.stall_cycles = 0
        if self.pf_kind == 2:
            self.lk.creset_stats()

    def metrics(self):
        out = dict(kernel_accesses=self.n_accesses,
                   l1d_miss=self.n_l1_miss, l2_miss=self.n_l2_miss,
                   l3_miss=self.n_l3_miss,
                   prefetch_issued=self.n_pf_issued,
                   prefetch_hits=self.n_pf_hits,
                   stall_cycles=self.stall_cycles)
        if self.pf_kind == 2:
            out.update(self.lk.stats_py())
        else:
            out.update(dict(at_insert=0, cat_insert=0, invalidations=0,
                            evictions=0, bfq_push=0, bfq_drop=0))
        return out

    # -- cache introspection -----------------------------------------------------

    def cache_contains(self, which, blk):
        return (self.l1c, self.l2c, self.l3c)[which - 1].contains_py(blk)

    def cache_dump(self, which):
        return (self.l1c, self.l2c, self.l3c)[which - 1].dump_py()

    # -- prefetcher surface --------------------------------------------------------

    cdef str _kind_name(self):
        if self.pf_kind == 2:
            return "linkey"
        if self.pf_kind == 1:
            return "stride"
        return "none"

    cdef CLinkey _linkey(self):
        if self.pf_kind != 2:
            raise RangeError("engine was built with prefetcher %r"
                             % self._kind_name())
        return self.lk

    def pf_reset(self):
        if self.pf_kind == 2:
            self.lk.creset()

    def pf_set_size(self, size):
        if self.pf_kind == 2:
            self.lk.set_size(size)

    def pf_add_offset(self, off):
        if self.pf_kind == 2:
            self.lk.add_offset(off)

    def pf_set_root(self, slot, addr):
        if self.pf_kind == 2:
            self.lk.set_root(slot, addr)

    def pf_clear_roots(self):
        if self.pf_kind == 2:
            self.lk.clear_roots()

    def pf_new_traversal(self):
        if self.pf_kind == 2:
            self.lk.new_traversal()

    def pf_core_req(self, addr):
        self._core_req(addr)
        cdef size_t i
        out = []
        for i in range(self.pend_blk.size()):
            out.append((self.pend_blk[i],
                        self.pend_off[i] if self.pend_hasoff[i] else None))
        return out

    def pf_build(self, blk):
        if self.pf_kind == 2:
            self.lk.build(blk)

    def pf_ingest(self, blk, obj_off):
        if self.pf_kind == 2:
            self.lk.ingest(blk, obj_off)

    def pf_search(self, addr):
        cdef int r = self._linkey().search(addr)
        return None if r < 0 else r

    def pf_pick_victim(self, which, protected=-1):
        cdef CLinkey lk = self._linkey()
        cdef int r
        if which == "at":
            r = lk.pick_victim_at(protected)
        elif which == "cat":
            r = lk.pick_victim_cat()
        else:
            raise RangeError("which must be 'at' or 'cat'")
        return None if r < 0 else r

    def pf_invalidate_at(self, idx):
        self._linkey().invalidate_at(idx)

    def pf_invalidate_cat(self, idx):
        self._linkey().invalidate_cat(idx)

    def pf_snapshot(self):
        if self.pf_kind == 2:
            return self.lk.snapshot_py()
        return dict(kind=self._kind_name())


# -- kernel drivers -----------------------------------------------------------
#
# The tight per-node loops of the traversal benchmarks, compiled.  Sums wrap
# modulo 2**64 exactly as the pure core's explicit masking does.


def k_chain_sum(Engine e, head, voff, noff, passes):
    cdef int64_t h = head, vo = voff, no = noff, node
    cdef long p = passes, i
    cdef uint64_t total = 0
    for i in range(p):
        node = h
        while node != 0:
            total = total + e._sim_read64(node + vo)
            node = <int64_t>e._sim_read64(node + no)
    return total


def k_chain_reverse(Engine e, head, noff):
    cdef int64_t prev = 0, node = head, no = noff, nxt
    while node != 0:
        nxt = <int64_t>e._sim_read64(node + no)
        e._sim_write64(node + no, <uint64_t>prev)
        prev = node
        node = nxt
    return prev


cdef uint64_t _dfs_sum(Engine e, int64_t node, int64_t vo, int64_t lo,
                       int64_t ro) except *:
    if node == 0:
        return 0
    cdef uint64_t total = e._sim_read64(node + vo)
    cdef int64_t child = <int64_t>e._sim_read64(node + lo)
    total = total + _dfs_sum(e, child, vo, lo, ro)
    child = <int64_t>e._sim_read64(node + ro)
    total = total + _dfs_sum(e, child, vo, lo, ro)
    return total


def k_tree_dfs_sum(Engine e, root, voff, loff, roff, passes):
    cdef int64_t r = root, vo = voff, lo = loff, ro = roff
    cdef long p = passes, i
    cdef uint64_t grand = 0
    for i in range(p):
        grand = grand + _dfs_sum(e, r, vo, lo, ro)
    return grand


def k_tree_bfs_sum(Engine e, root, voff, loff, roff):
    cdef int64_t r = root, vo = voff, lo = loff, ro = roff
    cdef int64_t node, left, right
    cdef vector[int64_t] queue
    cdef size_t head = 0
    cdef uint64_t total = 0
    if r:
        queue.push_back(r)
    while head < queue.size():
        node = queue[head]
        head += 1
        total = total + e._sim_read64(node + vo)
        left = <int64_t>e._sim_read64(node + lo)
        right = <int64_t>e._sim_read64(node + ro)
        if left:
            queue.push_back(left)
        if right:
            queue.push_back(right)
    return total


cdef uint64_t _wcycle_sum(Engine e, int64_t node, int64_t vo, int64_t co,
                          int nchild) except *:
    if node == 0:
        return 0
    cdef uint64_t total = e._sim_read64(node + vo)
    cdef int r, i
    cdef int64_t child
    for r in range(2):
        for i in range(nchild):
            child = <int64_t>e._sim_read64(node + co + 8 * i)
            total = total + _wcycle_sum(e, child, vo, co, nchild)
    return total


def k_wcycle_sum(Engine e, root, voff, coff, nchild):
    return _wcycle_sum(e, root, voff, coff, nchild)


def k_graph_bfs_sum(Engine e, root, voff, coff, nchild):
    cdef int64_t r = root, vo = voff, co = coff, node, child
    cdef int n = nchild, i
    cdef unordered_set[int64_t] seen
    cdef vector[int64_t] queue
    cdef size_t head = 0
    cdef uint64_t total = 0
    seen.insert(r)
    queue.push_back(r)
    while head < queue.size():
        node = queue[head]
        head += 1
        total = total + e._sim_read64(node + vo)
        for i in range(n):
            child = <int64_t>e._sim_read64(node + co + 8 * i)
            if child != 0 and seen.count(child) == 0:
                seen.insert(child)
                queue.push_back(child)
    return total


def k_sweep_read(Engine e, base, count, step, passes):
    cdef int64_t addr, b = base, st = step
    cdef long c = count, p = passes, i, j
    cdef uint64_t total = 0
    for i in range(p):
        addr = b
        for j in range(c):
            total = total + e._sim_read64(addr)
            addr += st
    return total
