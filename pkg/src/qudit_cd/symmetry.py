"""Graph automorphisms, vertex/edge/arc orbits and CD-parameter grouping.

Vertices are 0-based internally; ``one_based`` converts for display.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph

MAX_AUTOMORPHISM_VERTICES = 12

Permutation = tuple[int, ...]


def _refined_classes(g: Graph) -> list[tuple]:
    """Vertex invariant: degree plus sorted neighbour degrees."""
    deg = g.degrees()
    return [(deg[v], tuple(sorted(deg[w] for w in g.neighbors(v)))) for v in range(g.n)]


def automorphism_group(g: Graph) -> list[Permutation]:
    """All vertex permutations preserving the edge set (identity first).

    Exhaustive backtracking; candidates are restricted to vertices with the
    same degree profile and consistent adjacency to already-mapped vertices.
    """
    if g.n > MAX_AUTOMORPHISM_VERTICES:
        raise ValueError(f"automorphism search limited to {MAX_AUTOMORPHISM_VERTICES} vertices")
    n = g.n
    cls = _refined_classes(g)
    adj = [[g.has_edge(i, j) for j in range(n)] for i in range(n)]
    # map high-degree vertices first: they prune hardest
    order = sorted(range(n), key=lambda v: (-cls[v][0], v))
    image = [-1] * n
    used = [False] * n
    out: list[Permutation] = []

    def extend(pos: int) -> None:
        if pos == n:
            out.append(tuple(image))
            return
        v = order[pos]
        for w in range(n):
            if used[w] or cls[w] != cls[v]:
                continue
            if any(adj[u][v] != adj[image[u]][w] for u in order[:pos]):
                continue
            image[v] = w
            used[w] = True
            extend(pos + 1)
            used[w] = False
            image[v] = -1

    extend(0)
    out.sort(key=lambda p: p != tuple(range(n)))
    return out


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``(p o q)(i) = p[q[i]]``."""
    return tuple(p[i] for i in q)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


class _DisjointSet:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self) -> list[tuple]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return sorted((tuple(sorted(v)) for v in groups.values()), key=lambda c: c[0])


def _edge_image(p: Permutation, e):
    a, b = p[e[0]], p[e[1]]
    return (min(a, b), max(a, b))


@dataclass(frozen=True)
class OrbitPartition:
    vertex_orbits: tuple[tuple[int, ...], ...]
    edge_orbits: tuple[tuple[tuple[int, int], ...], ...]
    arc_orbits: tuple[tuple[tuple[int, int], ...], ...] | None = None

    def vertex_orbit_of(self) -> dict[int, int]:
        return {v: k for k, orb in enumerate(self.vertex_orbits) for v in orb}

    def edge_orbit_of(self) -> dict[tuple[int, int], int]:
        return {e: k for k, orb in enumerate(self.edge_orbits) for e in orb}

    def arc_orbit_of(self) -> dict[tuple[int, int], int]:
        if self.arc_orbits is None:
            raise ValueError("arc orbits not computed")
        return {a: k for k, orb in enumerate(self.arc_orbits) for a in orb}

    def one_based(self) -> dict:
        out = {
            "vertex_orbits": [[v + 1 for v in orb] for orb in self.vertex_orbits],
            "edge_orbits": [[[a + 1, b + 1] for a, b in orb] for orb in self.edge_orbits],
        }
        if self.arc_orbits is not None:
            out["arc_orbits"] = [[[a + 1, b + 1] for a, b in orb] for orb in self.arc_orbits]
        return out


def orbits(g: Graph, auts: list[Permutation]) -> OrbitPartition:
    """Vertex and edge orbits under the permutation group ``auts``."""
    vs = _DisjointSet(range(g.n))
    es = _DisjointSet(g.sorted_edges())
    for p in auts:
        for v in range(g.n):
            vs.union(v, p[v])
        for e in g.sorted_edges():
            es.union(e, _edge_image(p, e))
    return OrbitPartition(tuple(vs.classes()), tuple(es.classes()))


def arc_orbits(g: Graph, op: OrbitPartition) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Arc orbits of the doubled directed graph, keyed per edge orbit.

    Each edge contributes both arcs; an arc ``(t, h)`` is filed under the key
    ``(orbit of t, orbit of h, edge orbit)`` and arcs sharing a key form one
    arc orbit.
    """
    vorb = op.vertex_orbit_of()
    buckets: dict[tuple[int, int, int], list] = {}
    for eo, edges in enumerate(op.edge_orbits):
        for i, j in edges:
            for t, h in ((i, j), (j, i)):
                buckets.setdefault((vorb[t], vorb[h], eo), []).append((t, h))
    return tuple(sorted((tuple(sorted(a)) for a in buckets.values()), key=lambda c: c[0]))


def arc_orbits_by_action(g: Graph, auts: list[Permutation]) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Reference arc orbits: classes of ordered edge pairs under the group action."""
    arcs = [a for i, j in g.sorted_edges() for a in ((i, j), (j, i))]
    ds = _DisjointSet(arcs)
    for p in auts:
        for t, h in arcs:
            ds.union((t, h), (p[t], p[h]))
    return tuple(ds.classes())


def orbit_partition(g: Graph, auts: list[Permutation] | None = None) -> OrbitPartition:
    """Vertex, edge and arc orbits in one call."""
    if auts is None:
        auts = automorphism_group(g)
    op = orbits(g, auts)
    return OrbitPartition(op.vertex_orbits, op.edge_orbits, arc_orbits(g, op))


@dataclass(frozen=True)
class ParamGroupMap:
    """``group_of[k]`` is the shared-parameter group of pool element ``k``."""

    group_of: tuple[int, ...]
    n_groups: int
    keys: tuple = ()

    def members(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_groups)]
        for k, g in enumerate(self.group_of):
            out[g].append(k)
        return out

    def broadcast(self, group_values):
        """Per-element values from one value per group."""
        return [group_values[g] for g in self.group_of]


def identity_groups(size: int) -> ParamGroupMap:
    return ParamGroupMap(tuple(range(size)), size, tuple(("k", k) for k in range(size)))


def group_parameters(pool, op: OrbitPartition) -> ParamGroupMap:
    """Tie pool elements whose supports share a vertex/arc orbit and whose labels match."""
    vorb = op.vertex_orbit_of()
    aorb = op.arc_orbit_of()
    ids: dict = {}
    group_of = []
    for e in pool.elements:
        kind, where = e.support
        if kind == "vertex":
            if where not in vorb:
                raise ValueError(f"pool element on unknown vertex {where}")
            key = ("vertex", vorb[where], e.labels)
        elif kind == "arc":
            if where not in aorb:
                raise ValueError(f"pool element on arc {where} not present in the graph")
            key = ("arc", aorb[where], e.labels)
        else:
            key = (kind, where, e.labels)
        group_of.append(ids.setdefault(key, len(ids)))
    return ParamGroupMap(tuple(group_of), len(ids), tuple(ids))


def permute_pool(pool, perm: Permutation) -> list[int]:
    """Index map ``k -> k'`` with ``B_k'`` the image of ``B_k`` under the site permutation."""
    index = {e.factors: k for k, e in enumerate(pool.elements)}
    out = []
    for e in pool.elements:
        img = tuple(sorted((perm[s], lab) for s, lab in e.factors))
        if img not in index:
            raise ValueError(f"pool not closed under permutation {perm}")
        out.append(index[img])
    return out


def reduction_ratio(g: Graph, problem_kind: str = "ising", **problem_args) -> float:
    """Grouped over total CD parameter count for the problem's first-order pool."""
    from .cd import cd_pool
    from .hamiltonians import mixer, problem_hamiltonian

    hp = problem_hamiltonian(problem_kind, g, **problem_args)
    pool = cd_pool(mixer(g.n, hp.d), hp)
    if len(pool) == 0:
        raise ValueError("problem has an empty CD pool")
    groups = group_parameters(pool, orbit_partition(g))
    return groups.n_groups / len(pool)
