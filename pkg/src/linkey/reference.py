"""Naive reference model of the prefetcher tables.

This is a deliberately slow, obvious re-statement of the table semantics,
used as an oracle: fuzz tests drive it in lockstep with the real engines and
compare snapshots, emitted request streams, and counters after every
operation.  It shares no code with the engines.

The model also knows its own invariants; ``check_integrity`` re-derives the
cross-table consistency rules from scratch after every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapacityError, LayoutError, RangeError

M64 = (1 << 64) - 1
MASK45 = (1 << 45) - 1


def _line(addr: int) -> int:
    return addr & ~63


@dataclass
class ATEntry:
    valid: bool = False
    used: bool = False
    built: bool = False
    base: int = 0
    slot_valid: list = field(default_factory=lambda: [False] * 8)
    slot_cat: list = field(default_factory=lambda: [0] * 8)


@dataclass
class CATEntry:
    valid: bool = False
    used: bool = False
    built: bool = False
    parent: int = 0
    child: int = 0
    off_index: int = 0


@dataclass
class Root:
    valid: bool = False
    index: int = 0


class ReferenceModel:
    def __init__(self, at_entries: int, cat_entries: int, bfq_entries: int = 8,
                 buffer_cap: int = 8):
        self.at_n = at_entries
        self.cat_n = cat_entries
        self.bfq_n = bfq_entries
        self.buffer_cap = buffer_cap
        self.heap: dict[int, int] = {}
        self.reset()
        self.counters = self._zero_counters()

    @staticmethod
    def _zero_counters() -> dict[str, int]:
        return dict(at_insert=0, cat_insert=0, invalidations=0,
                    evictions=0, bfq_push=0, bfq_drop=0)

    def reset(self) -> None:
        self.at = [ATEntry() for _ in range(self.at_n)]
        self.cat = [CATEntry() for _ in range(self.cat_n)]
        self.roots = [Root() for _ in range(4)]
        self.bfq: list[int] = []
        self.node_size = 0
        self.offsets: list[int] = []
        self.key_o = 0
        self.last_hit: int | None = None
        self.armed = False

    def reset_stats(self) -> None:
        self.counters = self._zero_counters()

    def stats(self) -> dict[str, int]:
        return dict(self.counters)

    # -- heap mirror (the model reads the same memory the engine does) ------

    def heap_write(self, addr: int, value: int) -> None:
        if addr % 8:
            raise RangeError("model heap writes must be word-aligned")
        self.heap[addr] = value & M64

    def heap_read_any(self, addr: int) -> int:
        lo_word = self.heap.get(addr - addr % 8, 0)
        shift = (addr % 8) * 8
        if shift == 0:
            return lo_word
        hi_word = self.heap.get(addr - addr % 8 + 8, 0)
        return ((lo_word >> shift) | (hi_word << (64 - shift))) & M64

    # -- register file -------------------------------------------------------

    def set_size(self, size: int) -> None:
        if size <= 0 or size > 4096:
            raise LayoutError("bad node size")
        self.node_size = size

    def add_offset(self, off: int) -> None:
        if len(self.offsets) == 8:
            raise CapacityError("offset registers full")
        if off < 0 or off + 8 > self.node_size:
            raise LayoutError("offset outside node")
        self.offsets.append(off)

    def new_traversal(self) -> None:
        self.armed = True
        self._wipe_built()

    def clear_roots(self) -> None:
        for r in self.roots:
            r.valid = False

    def set_root(self, slot: int, addr: int) -> None:
        if slot < 0 or slot > 3:
            raise RangeError("bad root slot")
        idx = self.add_or_find(addr, protected=None, force=True)
        assert idx is not None
        self.roots[slot].valid = True
        self.roots[slot].index = idx

    # -- internal bookkeeping -----------------------------------------------

    def _wipe_built(self) -> None:
        for e in self.at:
            e.built = False
        for c in self.cat:
            c.built = False

    def _root_indices(self) -> set[int]:
        return {r.index for r in self.roots if r.valid}

    def _touch(self, idx: int) -> None:
        self.at[idx].used = True
        for k in range(len(self.offsets)):
            if self.at[idx].slot_valid[k]:
                self.cat[self.at[idx].slot_cat[k]].used = True
        if all(e.used for e in self.at):
            for e in self.at:
                e.used = False
        if all(c.used for c in self.cat):
            for c in self.cat:
                c.used = False

    # -- invalidation ----------------------------------------------------------

    def invalidate_cat(self, idx: int) -> None:
        entry = self.cat[idx]
        if not entry.valid:
            return
        parent_entry = self.at[entry.parent]
        if (parent_entry.valid and parent_entry.slot_valid[entry.off_index]
                and parent_entry.slot_cat[entry.off_index] == idx):
            parent_entry.slot_valid[entry.off_index] = False
        entry.valid = False
        entry.used = False
        entry.built = False
        self.counters["invalidations"] += 1

    def invalidate_at(self, idx: int) -> None:
        entry = self.at[idx]
        if not entry.valid:
            return
        for c in range(self.cat_n):
            if self.cat[c].valid and (self.cat[c].parent == idx
                                      or self.cat[c].child == idx):
                self.invalidate_cat(c)
        for r in self.roots:
            if r.valid and r.index == idx:
                r.valid = False
        entry.valid = False
        entry.used = False
        entry.built = False
        entry.slot_valid = [False] * 8
        self.counters["invalidations"] += 1

    # -- replacement -------------------------------------------------------------

    def pick_victim_at(self, protected: int | None = None) -> int | None:
        roots = self._root_indices()
        for j in range(self.at_n):
            e = self.at[j]
            if not e.valid or e.used or e.built:
                continue
            if j in roots or j == protected:
                continue
            return j
        return None

    def pick_victim_cat(self) -> int | None:
        for j in range(self.cat_n):
            c = self.cat[j]
            if c.valid and not c.used and not c.built:
                return j
        return None

    def add_or_find(self, addr: int, protected: int | None,
                    force: bool) -> int | None:
        stored = (addr >> 3) & MASK45
        for j in range(self.at_n):
            if self.at[j].valid and self.at[j].base == stored:
                self.at[j].built = True
                return j
        slot = None
        for j in range(self.at_n):
            if not self.at[j].valid:
                slot = j
                break
        if slot is None:
            slot = self.pick_victim_at(protected)
            if slot is None and force:
                roots = self._root_indices()
                for j in range(self.at_n):
                    if j not in roots:
                        slot = j
                        break
            if slot is None:
                return None
            self.counters["evictions"] += 1
            self.invalidate_at(slot)
        e = self.at[slot]
        e.valid = True
        e.used = False
        e.built = True
        e.base = stored
        e.slot_valid = [False] * 8
        e.slot_cat = [0] * 8
        self.counters["at_insert"] += 1
        return slot

    # -- search -------------------------------------------------------------------

    def search(self, addr: int) -> int | None:
        for r in self.roots:
            if not r.valid:
                continue
            base = self.at[r.index].base << 3
            if base <= addr < base + self.node_size:
                if self.armed or self.last_hit != r.index:
                    self.key_o = addr - base
                    self._wipe_built()
                    self.armed = False
                self.last_hit = r.index
                self._touch(r.index)
                return r.index
        target = addr - self.key_o
        if target >= 0 and target % 8 == 0:
            stored = (target >> 3) & MASK45
            roots = self._root_indices()
            for j in range(self.at_n):
                if self.at[j].valid and self.at[j].base == stored and j not in roots:
                    self.last_hit = j
                    self._touch(j)
                    return j
        return None

    # -- build --------------------------------------------------------------------

    def build(self, blk: int) -> None:
        if self.node_size == 0:
            return
        covering = []
        for j in range(self.at_n):
            if not self.at[j].valid:
                continue
            base = self.at[j].base << 3
            if _line(base) <= blk <= _line(base + self.node_size - 1):
                covering.append(j)
        for p in covering:
            if not self.at[p].valid:
                continue
            base = self.at[p].base << 3
            for k in range(len(self.offsets)):
                ptr_addr = base + self.offsets[k]
                if _line(ptr_addr) != blk:
                    continue
                child_ptr = self.heap_read_any(ptr_addr)
                if self.at[p].slot_valid[k]:
                    self.invalidate_cat(self.at[p].slot_cat[k])
                if child_ptr == 0:
                    continue
                child = self.add_or_find(child_ptr, protected=p, force=False)
                if child is None:
                    continue
                cat_slot = None
                for c in range(self.cat_n):
                    if not self.cat[c].valid:
                        cat_slot = c
                        break
                if cat_slot is None:
                    cat_slot = self.pick_victim_cat()
                    if cat_slot is None:
                        continue
                    self.counters["evictions"] += 1
                    self.invalidate_cat(cat_slot)
                entry = self.cat[cat_slot]
                entry.valid = True
                entry.used = False
                entry.built = True
                entry.parent = p
                entry.child = child
                entry.off_index = k
                self.at[p].slot_valid[k] = True
                self.at[p].slot_cat[k] = cat_slot
                self.counters["cat_insert"] += 1

    # -- backup fetch queue ----------------------------------------------------------

    def ingest(self, blk: int, obj_off: int) -> None:
        node_base = blk + obj_off
        stored = (node_base >> 3) & MASK45
        parent = None
        for j in range(self.at_n):
            if self.at[j].valid and self.at[j].base == stored:
                parent = j
                break
        for k in range(len(self.offsets)):
            ptr_addr = node_base + self.offsets[k]
            if _line(ptr_addr) != blk:
                continue
            child_ptr = self.heap_read_any(ptr_addr)
            if child_ptr == 0:
                continue
            if parent is not None and self.at[parent].slot_valid[k]:
                continue
            child_stored = (child_ptr >> 3) & MASK45
            if any(e.valid and e.base == child_stored for e in self.at):
                continue
            if child_stored in self.bfq:
                continue
            if len(self.bfq) == self.bfq_n:
                del self.bfq[0]
                self.counters["bfq_drop"] += 1
            self.bfq.append(child_stored)
            self.counters["bfq_push"] += 1

    # -- demand hook --------------------------------------------------------------------

    def core_req(self, addr: int) -> list[tuple[int, int]]:
        requests: list[tuple[int, int]] = []
        requested: set[int] = set()
        core_blk = _line(addr)

        def want(target: int, node_base: int) -> None:
            if len(requests) == self.buffer_cap:
                return
            blk = _line(target)
            if blk == core_blk or blk in requested:
                return
            requests.append((blk, node_base - blk))
            requested.add(blk)

        def want_object(node_base: int) -> None:
            want(node_base + self.key_o, node_base)
            for off in self.offsets:
                if len(requests) == self.buffer_cap:
                    return
                want(node_base + off, node_base)

        hit = self.search(addr)
        if hit is not None:
            frontier = [hit]
            visited: set[int] = set()
            while frontier and len(requests) < self.buffer_cap:
                idx = frontier.pop(0)
                if idx in visited:
                    continue
                visited.add(idx)
                want_object(self.at[idx].base << 3)
                for k in range(len(self.offsets)):
                    if self.at[idx].slot_valid[k]:
                        frontier.append(self.cat[self.at[idx].slot_cat[k]].child)
        while len(requests) < self.buffer_cap and self.bfq:
            want_object(self.bfq.pop(0) << 3)
        return requests

    # -- snapshot and invariants -----------------------------------------------------------

    def snapshot(self) -> dict:
        n_off = len(self.offsets)
        at_rows = []
        for e in self.at:
            if e.valid:
                slots = tuple((int(e.slot_valid[k]),
                               e.slot_cat[k] if e.slot_valid[k] else 0)
                              for k in range(n_off))
                at_rows.append((1, int(e.used), int(e.built), e.base, slots))
            else:
                at_rows.append((0, 0, 0, 0, ((0, 0),) * n_off))
        cat_rows = []
        for c in self.cat:
            if c.valid:
                cat_rows.append((1, int(c.used), int(c.built), c.parent,
                                 c.child, c.off_index))
            else:
                cat_rows.append((0, 0, 0, 0, 0, 0))
        return dict(node_size=self.node_size, offsets=tuple(self.offsets),
                    key_o=self.key_o, armed=self.armed, last_hit=self.last_hit,
                    roots=tuple((int(r.valid), r.index if r.valid else 0)
                                for r in self.roots),
                    at=tuple(at_rows), cat=tuple(cat_rows),
                    bfq=tuple(self.bfq))

    def check_integrity(self) -> list[str]:
        """Re-derive every cross-table invariant; return violations."""
        bad: list[str] = []
        n_off = len(self.offsets)
        for j, e in enumerate(self.at):
            if not e.valid:
                if any(e.slot_valid):
                    bad.append("at[%d] invalid but has live child slots" % j)
                continue
            if e.base >> 45:
                bad.append("at[%d] base wider than 45 bits" % j)
            for k in range(8):
                if not e.slot_valid[k]:
                    continue
                if k >= n_off:
                    bad.append("at[%d] slot %d beyond registered offsets" % (j, k))
                    continue
                c = e.slot_cat[k]
                if not (0 <= c < self.cat_n) or not self.cat[c].valid:
                    bad.append("at[%d] slot %d points at dead cat entry" % (j, k))
                elif self.cat[c].parent != j or self.cat[c].off_index != k:
                    bad.append("at[%d] slot %d disagrees with cat[%d]" % (j, k, c))
        for c, entry in enumerate(self.cat):
            if not entry.valid:
                continue
            if not (0 <= entry.parent < self.at_n) or not self.at[entry.parent].valid:
                bad.append("cat[%d] parent missing" % c)
            elif not (self.at[entry.parent].slot_valid[entry.off_index]
                      and self.at[entry.parent].slot_cat[entry.off_index] == c):
                bad.append("cat[%d] not referenced by its parent slot" % c)
            if not (0 <= entry.child < self.at_n) or not self.at[entry.child].valid:
                bad.append("cat[%d] child missing" % c)
            if entry.off_index >= n_off:
                bad.append("cat[%d] offset index out of range" % c)
        for s, r in enumerate(self.roots):
            if r.valid and (not (0 <= r.index < self.at_n)
                            or not self.at[r.index].valid):
                bad.append("root[%d] references dead entry" % s)
        if len(self.bfq) > self.bfq_n:
            bad.append("bfq overflow")
        if len(set(self.bfq)) != len(self.bfq):
            bad.append("bfq holds duplicates")
        for b in self.bfq:
            if b >> 45:
                bad.append("bfq entry wider than 45 bits")
        return bad
