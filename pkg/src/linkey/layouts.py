"""Node layouts for the benchmark data structures.

Every structure stores 64-bit fields at fixed byte offsets inside its node.
The prefetcher is told the node size and the offsets of the child pointers;
the key/value field that lookups touch first sits at offset 0 so the key
offset register converges to 0 on the first root hit of a traversal.

Pool pitch is the spacing between node slots in the allocation pool.  Slots
are padded out to whole 64-byte cache lines (the usual allocator practice of
not letting small nodes share a line with unrelated neighbours); nodes
therefore never straddle a slot boundary but large nodes still span several
lines of their own slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, LayoutError

CACHE_BLOCK = 64
MAX_NODE_SIZE = 4096
MAX_CHILD_OFFSETS = 8
MAX_ROOTS = 4


def _round_up(value: int, quantum: int) -> int:
    return (value + quantum - 1) // quantum * quantum


@dataclass(frozen=True)
class NodeLayout:
    """Static description of one node type."""

    name: str
    node_size: int
    child_offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 < self.node_size <= MAX_NODE_SIZE:
            raise LayoutError("node size %d outside (0, %d]" % (self.node_size, MAX_NODE_SIZE))
        if len(self.child_offsets) > MAX_CHILD_OFFSETS:
            raise CapacityError("%d child offsets exceed the register file of %d"
                                % (len(self.child_offsets), MAX_CHILD_OFFSETS))
        for off in self.child_offsets:
            if off < 0 or off + 8 > self.node_size:
                raise LayoutError("child offset %d does not fit a node of %d bytes"
                                  % (off, self.node_size))

    @property
    def pool_pitch(self) -> int:
        return _round_up(self.node_size, CACHE_BLOCK)


def _letter_offset(letter: str) -> int:
    return 8 + 8 * (ord(letter) - ord("a"))


# Singly linked list: value, next.
LL = NodeLayout("ll", 16, (8,))

# Doubly linked list: value, next, prev.
DLL = NodeLayout("dll", 24, (8, 16))

# Binary search tree: key, value, left, right.
BINTREE = NodeLayout("bintree", 32, (16, 24))

# Red-black tree: key, value, left, right, parent, color.  The parent pointer
# is bookkeeping for rebalancing, not a traversal edge, so it is not handed
# to the prefetcher.
RBTREE = NodeLayout("rbtree", 48, (16, 24))

# Splay tree (top-down splaying, no parent pointer): key, value, left, right.
SPLAY = NodeLayout("splay", 32, (16, 24))

# Trie: word-marker flag, then 26 child pointers.  Only the eight most common
# English letters fit the prefetcher's offset registers.
TRIE_HINT_LETTERS = "etaoinsr"
TRIE = NodeLayout("trie", 8 + 26 * 8, tuple(_letter_offset(c) for c in TRIE_HINT_LETTERS))

# Octree: value, then 8 child pointers.
OCTREE = NodeLayout("octree", 8 + 8 * 8, tuple(8 + 8 * i for i in range(8)))

# Bounded-degree graph: value, then 5 child pointers.
GRAPH = NodeLayout("graph", 8 + 5 * 8, tuple(8 + 8 * i for i in range(5)))

LAYOUTS = {layout.name: layout
           for layout in (LL, DLL, BINTREE, RBTREE, SPLAY, TRIE, OCTREE, GRAPH)}

# Field offsets used by builders and kernels.
OFF_VALUE = 0          # ll/dll/octree/graph value, trie word-marker
OFF_NEXT = 8           # ll/dll
OFF_PREV = 16          # dll
OFF_KEY = 0            # search trees
OFF_TREE_VALUE = 8     # search trees
OFF_LEFT = 16
OFF_RIGHT = 24
OFF_PARENT = 32        # rbtree
OFF_COLOR = 40         # rbtree
OFF_CHILD0 = 8         # octree/graph first child slot


def trie_child_offset(letter: str) -> int:
    if not ("a" <= letter <= "z"):
        raise LayoutError("trie keys are lowercase words, got %r" % letter)
    return _letter_offset(letter)
