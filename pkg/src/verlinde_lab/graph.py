"""Trinion dual graphs: 3-valent multigraphs with loops.

A graph on V vertices is stored in the half-edge model: vertex v owns the
three half-edges 3v, 3v+1, 3v+2, and a fixed-point-free involution pairs the
3V half-edges into edges (both halves at one vertex form a loop).  Nothing
else is stored -- these are abstract duals, with no ribbon or embedding data,
so loops and parallel edges are first class and isomorphism means multigraph
isomorphism.

For a connected 3-valent graph E = 3V/2, so the genus g = E - V + 1 of the
surface it came from is (V + 2)/2 and V = 2g - 2 is forced to be even.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

#: canonical_form is exact brute-force minimization; cap the search size.
MAX_CANONICAL_VERTICES = 12

#: Genus range for whole-class generation (desk scale).
MIN_GENUS, MAX_GENUS = 2, 4

GRAPH_FILE_SUFFIX = ".trinion.json"


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Total-order key identifying a multigraph isomorphism class.

    key = (V, seg_0, seg_1, ...) where placing vertex i contributes the
    segment (loops_i, mult_{i,0}, ..., mult_{i,i-1}) and the whole tuple is
    lexicographically minimal over vertex orderings.
    """

    key: tuple[int, ...]


@dataclass(frozen=True)
class TrinionGraph:
    """Connected 3-valent multigraph with loops, in the half-edge model."""

    pairing: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(h) for h in self.pairing)
        object.__setattr__(self, "pairing", p)
        n = len(p)
        if n == 0 or n % 3 != 0:
            raise ValueError("pairing length must be a positive multiple of 3")
        if n % 6 != 0:
            raise ValueError("vertex count must be even (got odd V)")
        if sorted(p) != list(range(n)):
            raise ValueError("pairing must be a permutation of the half-edge ids")
        for h, q in enumerate(p):
            if q == h:
                raise ValueError(f"half-edge {h} is matched to itself")
            if p[q] != h:
                raise ValueError("pairing is not an involution")
        if not _is_connected(p):
            raise ValueError("graph is not connected")

    @property
    def vertex_count(self) -> int:
        return len(self.pairing) // 3

    @property
    def edge_count(self) -> int:
        return len(self.pairing) // 2

    @property
    def genus(self) -> int:
        return self.edge_count - self.vertex_count + 1

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as (h, partner) half-edge pairs with h < partner, ascending."""
        return tuple(
            (h, q) for h, q in enumerate(self.pairing) if h < q
        )

    def half_edges_of_vertex(self, v: int) -> tuple[int, int, int]:
        return (3 * v, 3 * v + 1, 3 * v + 2)

    def edge_index_of_halfedge(self) -> dict[int, int]:
        idx = {}
        for i, (h, q) in enumerate(self.edges):
            idx[h] = i
            idx[q] = i
        return idx

    def vertex_edge_triples(self) -> list[tuple[int, int, int]]:
        """Per vertex, the indices of its three incident edges.

        A loop's index appears twice in its vertex's triple, so triples can
        be consumed directly by per-vertex admissibility conditions.
        """
        idx = self.edge_index_of_halfedge()
        return [
            (idx[3 * v], idx[3 * v + 1], idx[3 * v + 2])
            for v in range(self.vertex_count)
        ]

    def loop_count(self, v: int) -> int:
        return sum(
            1 for h in self.half_edges_of_vertex(v) if self.pairing[h] // 3 == v
        ) // 2

    def adjacency_counts(self) -> tuple[list[int], list[list[int]]]:
        """(loops per vertex, symmetric matrix of inter-vertex edge counts)."""
        V = self.vertex_count
        loops = [0] * V
        mult = [[0] * V for _ in range(V)]
        for h, q in self.edges:
            a, b = h // 3, q // 3
            if a == b:
                loops[a] += 1
            else:
                mult[a][b] += 1
                mult[b][a] += 1
        return loops, mult

    def __repr__(self):
        name = class_name(self)
        tag = f" ({name})" if name else ""
        return f"TrinionGraph(V={self.vertex_count}, E={self.edge_count}{tag})"


def _is_connected(pairing: tuple[int, ...]) -> bool:
    V = len(pairing) // 3
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for h in (3 * v, 3 * v + 1, 3 * v + 2):
            u = pairing[h] // 3
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == V


def genus(G: TrinionGraph) -> int:
    """Genus of the underlying surface: E - V + 1 = (V + 2)/2."""
    return G.genus


def _canonical_key(loops: list[int], mult: list[list[int]], V: int) -> tuple[int, ...]:
    """Lexicographically minimal flattened adjacency data over vertex orderings.

    Branch-and-bound over partial orderings: placing vertex v at position i
    appends (loops[v], mult[v][perm[0]], ..., mult[v][perm[i-1]]); any prefix
    already above the best known key is pruned.
    """
    best: list[tuple[int, ...] | None] = [None]

    def extend(perm: list[int], used: int, key: tuple[int, ...]):
        i = len(perm)
        if i == V:
            if best[0] is None or key < best[0]:
                best[0] = key
            return
        for v in range(V):
            if used & (1 << v):
                continue
            seg = (loops[v],) + tuple(mult[v][perm[j]] for j in range(i))
            new_key = key + seg
            if best[0] is not None and new_key > best[0][: len(new_key)]:
                continue
            perm.append(v)
            extend(perm, used | (1 << v), new_key)
            perm.pop()

    extend([], 0, ())
    assert best[0] is not None
    return (V,) + best[0]


@lru_cache(maxsize=4096)
def _canonical_form_cached(pairing: tuple[int, ...]) -> CanonicalForm:
    G = TrinionGraph(pairing)
    loops, mult = G.adjacency_counts()
    return CanonicalForm(_canonical_key(loops, mult, G.vertex_count))


def canonical_form(G: TrinionGraph) -> CanonicalForm:
    """Isomorphism-class key; equal iff the graphs are isomorphic multigraphs."""
    if G.vertex_count > MAX_CANONICAL_VERTICES:
        raise ValueError(
            f"canonical_form supports at most {MAX_CANONICAL_VERTICES} vertices "
            f"(got {G.vertex_count})"
        )
    return _canonical_form_cached(G.pairing)


def _graph_from_counts(loops: list[int], mult: list[list[int]]) -> TrinionGraph:
    """Deterministic half-edge realization of an adjacency-count structure."""
    V = len(loops)
    free = [list(range(3 * v, 3 * v + 3)) for v in range(V)]
    pairing = [-1] * (3 * V)

    def take(v: int) -> int:
        return free[v].pop(0)

    for v in range(V):
        for _ in range(loops[v]):
            a, b = take(v), take(v)
            pairing[a], pairing[b] = b, a
    for v in range(V):
        for u in range(v + 1, V):
            for _ in range(mult[v][u]):
                a, b = take(v), take(u)
                pairing[a], pairing[b] = b, a
    return TrinionGraph(tuple(pairing))


def graph_from_canonical(form: CanonicalForm) -> TrinionGraph:
    """Rebuild the canonical representative graph of an isomorphism class."""
    key = form.key
    V = key[0]
    loops = [0] * V
    mult = [[0] * V for _ in range(V)]
    pos = 1
    for i in range(V):
        loops[i] = key[pos]
        pos += 1
        for j in range(i):
            mult[i][j] = mult[j][i] = key[pos]
            pos += 1
    return _graph_from_counts(loops, mult)


def theta_graph() -> TrinionGraph:
    """Two vertices joined by three parallel edges."""
    return TrinionGraph((3, 4, 5, 0, 1, 2))


def dumbbell_graph() -> TrinionGraph:
    """Two vertices, one loop each, joined by a bridge."""
    return TrinionGraph((1, 0, 5, 4, 3, 2))


def class_name(G: TrinionGraph) -> str | None:
    """Stable human name for the genus-2 classes, else None."""
    if G.vertex_count != 2:
        return None
    if canonical_form(G) == canonical_form(theta_graph()):
        return "theta"
    if canonical_form(G) == canonical_form(dumbbell_graph()):
        return "dumbbell"
    return None


def _labeled_structures(V: int):
    """All 3-regular adjacency-count structures on V labeled vertices.

    Perfect-matching enumeration on the 3V half-edges, quotiented by the slot
    symmetry within each vertex: the lowest unmatched half-edge is matched
    against one candidate vertex at a time, always consuming that vertex's
    lowest free slot.  Every labeled multigraph is reached; connectedness is
    checked by the caller.
    """
    capacity = [3] * V
    loops = [0] * V
    mult = [[0] * V for _ in range(V)]
    out = set()

    def rec(remaining: int):
        if remaining == 0:
            out.add(
                (tuple(loops), tuple(mult[v][u] for v in range(V) for u in range(v + 1, V)))
            )
            return
        v = next(i for i in range(V) if capacity[i] > 0)
        if capacity[v] >= 2:
            capacity[v] -= 2
            loops[v] += 1
            rec(remaining - 2)
            loops[v] -= 1
            capacity[v] += 2
        for u in range(v + 1, V):
            if capacity[u] > 0:
                capacity[v] -= 1
                capacity[u] -= 1
                mult[v][u] += 1
                mult[u][v] += 1
                rec(remaining - 2)
                mult[v][u] -= 1
                mult[u][v] -= 1
                capacity[v] += 1
                capacity[u] += 1

    rec(3 * V)
    return out


def _counts_connected(loops: tuple[int, ...], flat_mult: tuple[int, ...], V: int) -> bool:
    mult = [[0] * V for _ in range(V)]
    pos = 0
    for v in range(V):
        for u in range(v + 1, V):
            mult[v][u] = mult[u][v] = flat_mult[pos]
            pos += 1
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in range(V):
            if mult[v][u] > 0 and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == V


def generate_genus_graphs(g: int) -> list[TrinionGraph]:
    """All connected 3-valent multigraphs with 2g-2 vertices, one per class.

    Output is the canonical representative of each isomorphism class, sorted
    by canonical key, so repeated runs are byte-identical.
    """
    if not MIN_GENUS <= g <= MAX_GENUS:
        raise ValueError(f"genus must lie in [{MIN_GENUS}, {MAX_GENUS}], got {g}")
    V = 2 * g - 2
    keys = set()
    for loops, flat_mult in _labeled_structures(V):
        if not _counts_connected(loops, flat_mult, V):
            continue
        mult = [[0] * V for _ in range(V)]
        pos = 0
        for v in range(V):
            for u in range(v + 1, V):
                mult[v][u] = mult[u][v] = flat_mult[pos]
                pos += 1
        keys.add(CanonicalForm(_canonical_key(list(loops), mult, V)))
    return [graph_from_canonical(k) for k in sorted(keys)]


def fusion_move(G: TrinionGraph, edge_index: int, variant: int) -> TrinionGraph:
    """Elementary fusion move: contract a non-loop edge, re-expand the other way.

    Contracting edge e merges its endpoints into a 4-valent vertex carrying
    half-edges {a, b} (rest of one endpoint) and {c, d} (rest of the other);
    re-expansion splits them across a new bridge as {a, c}|{b, d} (variant 0)
    or {a, d}|{b, c} (variant 1).  Genus, connectivity and 3-valence are
    preserved.
    """
    if variant not in (0, 1):
        raise ValueError("variant must be 0 or 1")
    edges = G.edges
    if not 0 <= edge_index < len(edges):
        raise ValueError(f"edge index {edge_index} out of range")
    h1, h2 = edges[edge_index]
    v1, v2 = h1 // 3, h2 // 3
    if v1 == v2:
        raise ValueError("cannot apply a fusion move to a loop")

    a, b = sorted(h for h in G.half_edges_of_vertex(v1) if h != h1)
    c, d = sorted(h for h in G.half_edges_of_vertex(v2) if h != h2)
    if variant == 0:
        first, second = (a, c), (b, d)
    else:
        first, second = (a, d), (b, c)

    # Reposition the four external half-edges; the bridge takes slot 2 at both
    # new vertices and every other half-edge keeps its id.
    relabel = {
        first[0]: 3 * v1,
        first[1]: 3 * v1 + 1,
        second[0]: 3 * v2,
        second[1]: 3 * v2 + 1,
    }
    bridge1, bridge2 = 3 * v1 + 2, 3 * v2 + 2
    new_pairing = [-1] * len(G.pairing)
    for x, y in edges:
        if (x, y) == (min(h1, h2), max(h1, h2)):
            continue
        nx, ny = relabel.get(x, x), relabel.get(y, y)
        new_pairing[nx], new_pairing[ny] = ny, nx
    new_pairing[bridge1], new_pairing[bridge2] = bridge2, bridge1
    return TrinionGraph(tuple(new_pairing))


def to_json_dict(G: TrinionGraph) -> dict:
    """Graph JSON: {"vertices": V, "edges": [[[v,slot],[v,slot]], ...]}."""
    return {
        "vertices": G.vertex_count,
        "edges": [
            [[h // 3, h % 3], [q // 3, q % 3]] for h, q in G.edges
        ],
    }


def from_json_dict(data: dict) -> TrinionGraph:
    V = int(data["vertices"])
    pairing = [-1] * (3 * V)
    for (v1, s1), (v2, s2) in data["edges"]:
        h1, h2 = 3 * int(v1) + int(s1), 3 * int(v2) + int(s2)
        for h in (h1, h2):
            if not 0 <= h < 3 * V:
                raise ValueError(f"half-edge ({h // 3},{h % 3}) out of range")
        if pairing[h1] != -1 or pairing[h2] != -1:
            raise ValueError("half-edge used twice in edge list")
        pairing[h1], pairing[h2] = h2, h1
    return TrinionGraph(tuple(pairing))


def graph_json_bytes(G: TrinionGraph) -> bytes:
    """Serialized graph with deterministic field order, for reproducible hashing."""
    return (json.dumps(to_json_dict(G), indent=2, sort_keys=False) + "\n").encode()


def save_graph(G: TrinionGraph, path: str | Path) -> None:
    Path(path).write_bytes(graph_json_bytes(G))


def load_graph(path: str | Path) -> TrinionGraph:
    return from_json_dict(json.loads(Path(path).read_text()))
