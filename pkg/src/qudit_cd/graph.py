"""Simple undirected graphs and their text encodings (graph6, 1-based edge lists)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``."""

    n: int
    edges: frozenset

    def __init__(self, n: int, edges: Iterable = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) outside vertex range [0, {n})")
            key = (min(i, j), max(i, j))
            if key in norm:
                raise ValueError(f"duplicate edge {key}")
            norm.add(key)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        adj = {v: self.neighbors(v) for v in range(self.n)}
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def relabel(self, perm) -> "Graph":
        """Image of the graph under vertex map ``i -> perm[i]``."""
        return Graph(self.n, [(perm[a], perm[b]) for a, b in self.edges])

    # common families ---------------------------------------------------

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls(a + b, [(i, a + j) for i in range(a) for j in range(b)])


# ---------------------------------------------------------------------------
# graph6


def _encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)])
    raise ValueError("graph too large for graph6")


def encode_graph6(g: Graph) -> bytes:
    """graph6 bytes (no header, no trailing newline)."""
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = bytes(
        63 + int("".join(map(str, bits[k : k + 6])), 2) for k in range(0, len(bits), 6)
    )
    return _encode_n(g.n) + body


def decode_graph6(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data:
        raise GraphFormatError("empty graph6 string")
    if any(not 63 <= c <= 126 for c in data):
        raise GraphFormatError("graph6 byte outside printable range 63..126")
    if data[0] == 126:
        if len(data) >= 2 and data[1] == 126:
            raise GraphFormatError("graph6 8-byte size form is not supported")
        if len(data) < 4:
            raise GraphFormatError("truncated graph6 size field")
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        body = data[4:]
    else:
        n = data[0] - 63
        body = data[1:]
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(body) != need:
        kind = "truncated" if len(body) < need else "overlong"
        raise GraphFormatError(f"{kind} graph6 payload: {len(body)} bytes, expected {need}")
    bits = []
    for c in body:
        v = c - 63
        bits.extend((v >> (5 - b)) & 1 for b in range(6))
    if any(bits[nbits:]):
        raise GraphFormatError("nonzero padding bits in graph6 payload")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


def parse_edgelist(text: bytes | str, n: int | None = None) -> Graph:
    """``i j`` pairs, 1-based, one per line; ``#`` starts a comment.

    The vertex count is the largest index seen unless ``n`` is given.  A
    line ``n <count>`` (e.g. ``n 5``) also sets it, allowing isolated vertices.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {raw!r}") from None
        if i < 1 or j < 1:
            raise GraphFormatError(f"line {lineno}: vertex indices are 1-based")
        pairs.append((lineno, i - 1, j - 1))
    top = max((max(i, j) for _, i, j in pairs), default=-1) + 1
    if n is None:
        n = top
    elif top > n:
        raise GraphFormatError(f"vertex index {top} out of range for n={n}")
    seen = set()
    for lineno, i, j in pairs:
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop at vertex {i + 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge ({i + 1}, {j + 1})")
        seen.add(key)
    return Graph(n, seen)


def format_edgelist(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{i + 1} {j + 1}" for i, j in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_graph(data: bytes | str, fmt: str = "graph6") -> Graph:
    if fmt == "graph6":
        return decode_graph6(data)
    if fmt == "edgelist":
        return parse_edgelist(data)
    raise ValueError(f"unknown graph format {fmt!r}")


def read_graph6_corpus(data: bytes | str) -> list[Graph]:
    """One graph6 string per non-blank line."""
    if isinstance(data, str):
        data = data.encode("ascii")
    return [decode_graph6(line) for line in data.splitlines() if line.strip()]
