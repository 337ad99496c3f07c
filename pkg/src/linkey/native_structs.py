"""In-process mirror structures for the benchmark suite.

Builders construct each linked structure natively (plain Python objects),
in a deterministic creation order; the runner later assigns each node a
simulated-heap address in that same order and serializes the fields.

The structure algorithms (BST probe, top-down splay, red-black insert,
trie walk) are written once against a tiny accessor interface, so the
simulated kernel and the non-simulated reference replay are the same code
path over different node handles.  That makes the checksum oracle a test of
the simulation layer, not of two independently written tree algorithms.
"""

from __future__ import annotations

from collections import deque

M64 = (1 << 64) - 1

RED = 1
BLACK = 0

# Relative frequency of lowercase letters in English text (per mille),
# a..z.  Drives dictionary generation so the common letters carry most
# trie edges.
LETTER_WEIGHTS = (82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8, 40, 24,
                  67, 75, 19, 1, 60, 63, 91, 28, 10, 24, 2, 20, 1)
ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def gen_words(count: int, rng) -> list[str]:
    """Distinct lowercase words, length 1..16, frequency-weighted letters."""
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < count:
        length = rng.randint(1, 16)
        word = "".join(rng.choices(ALPHABET, weights=LETTER_WEIGHTS, k=length))
        if word not in seen:
            seen.add(word)
            out.append(word)
    return out


# -- mirror nodes ---------------------------------------------------------


class ChainNode:
    __slots__ = ("addr", "value", "next")

    def __init__(self, value: int):
        self.addr = 0
        self.value = value
        self.next: ChainNode | None = None

    def words(self) -> tuple[int, ...]:
        return (self.value, self.next.addr if self.next else 0)


class DllNode:
    __slots__ = ("addr", "value", "next", "prev")

    def __init__(self, value: int):
        self.addr = 0
        self.value = value
        self.next: DllNode | None = None
        self.prev: DllNode | None = None

    def words(self) -> tuple[int, ...]:
        return (self.value,
                self.next.addr if self.next else 0,
                self.prev.addr if self.prev else 0)


class TreeNode:
    """Plain binary tree node (bintree and splay layouts)."""

    __slots__ = ("addr", "key", "value", "left", "right")

    def __init__(self, key: int, value: int):
        self.addr = 0
        self.key = key
        self.value = value
        self.left: TreeNode | None = None
        self.right: TreeNode | None = None

    def words(self) -> tuple[int, ...]:
        return (self.key, self.value,
                self.left.addr if self.left else 0,
                self.right.addr if self.right else 0)


class RBNode:
    __slots__ = ("addr", "key", "value", "left", "right", "parent", "color")

    def __init__(self, key: int, value: int):
        self.addr = 0
        self.key = key
        self.value = value
        self.left: RBNode | None = None
        self.right: RBNode | None = None
        self.parent: RBNode | None = None
        self.color = RED

    def words(self) -> tuple[int, ...]:
        return (self.key, self.value,
                self.left.addr if self.left else 0,
                self.right.addr if self.right else 0,
                self.parent.addr if self.parent else 0,
                self.color)


class TrieNode:
    __slots__ = ("addr", "is_word", "children")

    def __init__(self):
        self.addr = 0
        self.is_word = 0
        self.children: list[TrieNode | None] = [None] * 26

    def words(self) -> tuple[int, ...]:
        return (self.is_word,
                *(c.addr if c else 0 for c in self.children))


class FanNode:
    """Fixed-fanout node used by the octree and the graph."""

    __slots__ = ("addr", "value", "children", "depth", "fanout")

    def __init__(self, value: int, fanout: int, depth: int = 0):
        self.addr = 0
        self.value = value
        self.children: list[FanNode] = []
        self.depth = depth
        self.fanout = fanout

    def words(self) -> tuple[int, ...]:
        pad = [0] * (self.fanout - len(self.children))
        return (self.value, *(c.addr for c in self.children), *pad)


def serialize(nodes) -> list[tuple[int, int]]:
    """(address, word) pairs for every nonzero field of every node."""
    pairs: list[tuple[int, int]] = []
    for n in nodes:
        addr = n.addr
        for i, w in enumerate(n.words()):
            if w:
                pairs.append((addr + 8 * i, w))
    return pairs


# -- builders ------------------------------------------------------------------


def build_chain(count: int, rng) -> tuple[ChainNode, list[ChainNode]]:
    nodes = [ChainNode(rng.getrandbits(64)) for _ in range(count)]
    for a, b in zip(nodes, nodes[1:]):
        a.next = b
    return nodes[0], nodes


def build_dll(count: int, rng) -> tuple[DllNode, DllNode, list[DllNode]]:
    nodes = [DllNode(rng.getrandbits(64)) for _ in range(count)]
    for a, b in zip(nodes, nodes[1:]):
        a.next = b
        b.prev = a
    return nodes[0], nodes[-1], nodes


def build_complete_bst(keys: list[int], rng) -> tuple[TreeNode, list[TreeNode]]:
    """Balanced BST over sorted keys; nodes created in preorder."""
    nodes: list[TreeNode] = []

    def rec(lo: int, hi: int) -> TreeNode | None:
        if lo > hi:
            return None
        mid = (lo + hi) // 2
        node = TreeNode(keys[mid], rng.getrandbits(64))
        nodes.append(node)
        node.left = rec(lo, mid - 1)
        node.right = rec(mid + 1, hi)
        return node

    root = rec(0, len(keys) - 1)
    assert root is not None
    return root, nodes


def build_trie(words_list: list[str]) -> tuple[TrieNode, list[TrieNode]]:
    root = TrieNode()
    nodes = [root]
    for word in words_list:
        node = root
        for ch in word:
            i = ord(ch) - 97
            child = node.children[i]
            if child is None:
                child = TrieNode()
                node.children[i] = child
                nodes.append(child)
            node = child
        node.is_word = 1
    return root, nodes


def build_octree(count: int, rng) -> tuple[FanNode, list[FanNode]]:
    """Complete 8-ary tree with exactly ``count`` nodes, filled in BFS order."""
    nodes = [FanNode(rng.getrandbits(64), 8)]
    for i in range(1, count):
        parent = nodes[(i - 1) // 8]
        child = FanNode(rng.getrandbits(64), 8, parent.depth + 1)
        parent.children.append(child)
        nodes.append(child)
    return nodes[0], nodes


def build_graph(count: int, rng) -> tuple[FanNode, list[FanNode]]:
    """Connected undirected graph of degree 1..5; every edge occupies a child
    slot in both endpoints.  A random-attachment spanning tree guarantees
    connectivity and at least one neighbour per node, then leftover slot
    pairs are joined by extra random edges."""
    fan = 5
    nodes = [FanNode(rng.getrandbits(64), fan) for _ in range(count)]
    open_slots = [0]
    for i in range(1, count):
        pos = rng.randrange(len(open_slots))
        j = open_slots[pos]
        parent = nodes[j]
        parent.children.append(nodes[i])
        nodes[i].children.append(parent)
        if len(parent.children) == fan:
            open_slots[pos] = open_slots[-1]
            open_slots.pop()
        if len(nodes[i].children) < fan:
            open_slots.append(i)
    for i in range(count):
        node = nodes[i]
        for _ in range(fan - len(node.children)):
            if rng.random() >= 0.35:
                continue
            t = rng.randrange(count)
            other = nodes[t]
            if (t != i and len(node.children) < fan
                    and len(other.children) < fan
                    and other not in node.children):
                node.children.append(other)
                other.children.append(node)
    return nodes[0], nodes


# -- reference checksums ----------------------------------------------------------


def sum_values(nodes) -> int:
    total = 0
    for n in nodes:
        total += n.value
    return total & M64


def wcycle_ref(nodes) -> int:
    """Closed form of the double-recursion sum: each node at depth d is
    visited 2^d times."""
    total = 0
    for n in nodes:
        total += n.value << n.depth
    return total & M64


def wcycle_direct(node: FanNode | None) -> int:
    """Literal double recursion (tiny inputs; validates the closed form)."""
    if node is None:
        return 0
    total = node.value
    for _ in range(2):
        for i in range(8):
            child = node.children[i] if i < len(node.children) else None
            total = (total + wcycle_direct(child)) & M64
    return total


def graph_bfs_ref(root: FanNode) -> int:
    seen = {id(root)}
    queue = deque([root])
    total = 0
    while queue:
        node = queue.popleft()
        total = (total + node.value) & M64
        for child in node.children:
            if id(child) not in seen:
                seen.add(id(child))
                queue.append(child)
    return total


def chain_reverse_mirror(nodes: list[ChainNode]) -> ChainNode:
    """Reverse the mirror chain in place; returns the new head."""
    prev = None
    node = nodes[0]
    while node is not None:
        nxt = node.next
        node.next = prev
        prev = node
        node = nxt
    return nodes[-1]


# -- accessor-generic structure algorithms ----------------------------------------


class ObjAccess:
    """Mirror-object accessor; operations touch no simulated memory."""

    NULL = None

    def __init__(self, node_cls=None):
        self.node_cls = node_cls
        self.created: list = []

    def new_node(self, key: int, value: int):
        node = self.node_cls(key, value)
        self.created.append(node)
        return node

    @staticmethod
    def is_null(x) -> bool:
        return x is None

    @staticmethod
    def key(x) -> int:
        return x.key

    @staticmethod
    def left(x):
        return x.left

    @staticmethod
    def right(x):
        return x.right

    @staticmethod
    def set_left(x, v) -> None:
        x.left = v

    @staticmethod
    def set_right(x, v) -> None:
        x.right = v

    @staticmethod
    def parent(x):
        return x.parent

    @staticmethod
    def set_parent(x, v) -> None:
        x.parent = v

    @staticmethod
    def color(x) -> int:
        return x.color

    @staticmethod
    def set_color(x, c: int) -> None:
        x.color = c

    @staticmethod
    def is_word(x) -> int:
        return x.is_word

    @staticmethod
    def child(x, i: int):
        return x.children[i]


def bst_probe(acc, root, key: int) -> bool:
    x = root
    while not acc.is_null(x):
        k = acc.key(x)
        if key == k:
            return True
        x = acc.left(x) if key < k else acc.right(x)
    return False


def trie_probe(acc, root, word: str) -> bool:
    """Walk a word; the flag field is read at every visited node."""
    node = root
    hit = acc.is_word(node)
    for ch in word:
        nxt = acc.child(node, ord(ch) - 97)
        if acc.is_null(nxt):
            return False
        node = nxt
        hit = acc.is_word(node)
    return bool(hit)


def splay(acc, root, key: int):
    """Top-down splay; returns (new_root, its key).

    The two assembly trees hang off a conceptual header node that lives in
    local variables, never in simulated memory (it is a stack temporary in
    the usual implementation).
    """
    t = root
    tk = acc.key(t)
    header_left = acc.NULL
    header_right = acc.NULL
    l = acc.NULL
    r = acc.NULL
    while True:
        if key < tk:
            tl = acc.left(t)
            if acc.is_null(tl):
                break
            tlk = acc.key(tl)
            if key < tlk:
                acc.set_left(t, acc.right(tl))
                acc.set_right(tl, t)
                t = tl
                tk = tlk
                tl = acc.left(t)
                if acc.is_null(tl):
                    break
                tlk = acc.key(tl)
            if acc.is_null(r):
                header_left = t
            else:
                acc.set_left(r, t)
            r = t
            t = tl
            tk = tlk
        elif key > tk:
            tr = acc.right(t)
            if acc.is_null(tr):
                break
            trk = acc.key(tr)
            if key > trk:
                acc.set_right(t, acc.left(tr))
                acc.set_left(tr, t)
                t = tr
                tk = trk
                tr = acc.right(t)
                if acc.is_null(tr):
                    break
                trk = acc.key(tr)
            if acc.is_null(l):
                header_right = t
            else:
                acc.set_right(l, t)
            l = t
            t = tr
            tk = trk
        else:
            break
    if acc.is_null(l):
        header_right = acc.left(t)
    else:
        acc.set_right(l, acc.left(t))
    if acc.is_null(r):
        header_left = acc.right(t)
    else:
        acc.set_left(r, acc.right(t))
    acc.set_left(t, header_right)
    acc.set_right(t, header_left)
    return t, tk


def splay_probe(acc, root, key: int):
    """Returns (new_root, hit)."""
    if acc.is_null(root):
        return root, False
    t, tk = splay(acc, root, key)
    return t, tk == key


def splay_insert(acc, root, key: int, value: int, new_node):
    """Returns the new root; no-op (beyond the splay) if the key exists."""
    if acc.is_null(root):
        return new_node(key, value)
    t, tk = splay(acc, root, key)
    if tk == key:
        return t
    z = new_node(key, value)
    if key < tk:
        acc.set_left(z, acc.left(t))
        acc.set_right(z, t)
        acc.set_left(t, acc.NULL)
    else:
        acc.set_right(z, acc.right(t))
        acc.set_left(z, t)
        acc.set_right(t, acc.NULL)
    return z


def _rb_rotate_left(acc, root, x):
    y = acc.right(x)
    yl = acc.left(y)
    acc.set_right(x, yl)
    if not acc.is_null(yl):
        acc.set_parent(yl, x)
    xp = acc.parent(x)
    acc.set_parent(y, xp)
    if acc.is_null(xp):
        root = y
    elif x == acc.left(xp):
        acc.set_left(xp, y)
    else:
        acc.set_right(xp, y)
    acc.set_left(y, x)
    acc.set_parent(x, y)
    return root


def _rb_rotate_right(acc, root, x):
    y = acc.left(x)
    yr = acc.right(y)
    acc.set_left(x, yr)
    if not acc.is_null(yr):
        acc.set_parent(yr, x)
    xp = acc.parent(x)
    acc.set_parent(y, xp)
    if acc.is_null(xp):
        root = y
    elif x == acc.right(xp):
        acc.set_right(xp, y)
    else:
        acc.set_left(xp, y)
    acc.set_right(y, x)
    acc.set_parent(x, y)
    return root


def rb_insert(acc, root, key: int, value: int, new_node):
    """Classic red-black insertion; returns the new root.

    Duplicate keys are not inserted (the descent just stops having read the
    path), matching the distinct-key workloads that drive it.
    """
    y = acc.NULL
    x = root
    yk = 0
    while not acc.is_null(x):
        y = x
        yk = acc.key(x)
        if key == yk:
            return root
        x = acc.left(x) if key < yk else acc.right(x)
    z = new_node(key, value)
    acc.set_parent(z, y)
    if acc.is_null(y):
        root = z
    elif key < yk:
        acc.set_left(y, z)
    else:
        acc.set_right(y, z)
    while True:
        zp = acc.parent(z)
        if acc.is_null(zp) or acc.color(zp) != RED:
            break
        zg = acc.parent(zp)
        if acc.is_null(zg):
            break
        if zp == acc.left(zg):
            u = acc.right(zg)
            if not acc.is_null(u) and acc.color(u) == RED:
                acc.set_color(zp, BLACK)
                acc.set_color(u, BLACK)
                acc.set_color(zg, RED)
                z = zg
            else:
                if z == acc.right(zp):
                    z = zp
                    root = _rb_rotate_left(acc, root, z)
                    zp = acc.parent(z)
                    zg = acc.parent(zp)
                acc.set_color(zp, BLACK)
                acc.set_color(zg, RED)
                root = _rb_rotate_right(acc, root, zg)
        else:
            u = acc.left(zg)
            if not acc.is_null(u) and acc.color(u) == RED:
                acc.set_color(zp, BLACK)
                acc.set_color(u, BLACK)
                acc.set_color(zg, RED)
                z = zg
            else:
                if z == acc.left(zp):
                    z = zp
                    root = _rb_rotate_right(acc, root, z)
                    zp = acc.parent(z)
                    zg = acc.parent(zp)
                acc.set_color(zp, BLACK)
                acc.set_color(zg, RED)
                root = _rb_rotate_left(acc, root, zg)
    if acc.color(root) == RED:
        acc.set_color(root, BLACK)
    return root


def rb_check(root) -> int:
    """Validate red-black invariants on a mirror tree; returns black height."""
    if root is None:
        return 1
    assert root.color == BLACK, "root must be black"

    def rec(node, lo, hi) -> int:
        if node is None:
            return 1
        assert lo < node.key < hi, "BST order violated"
        if node.color == RED:
            for c in (node.left, node.right):
                assert c is None or c.color == BLACK, "red node with red child"
        for c in (node.left, node.right):
            assert c is None or c.parent is node, "parent pointer wrong"
        hl = rec(node.left, lo, node.key)
        hr = rec(node.right, node.key, hi)
        assert hl == hr, "black height mismatch"
        return hl + (1 if node.color == BLACK else 0)

    return rec(root, float("-inf"), float("inf"))
