"""Admissible integer weights of level k on a trinion graph.

An assignment gives every edge e an integer j_e in [0, k]; the encoded weight
is j_e/(2k) and the action coordinate is c_e = j_e/k, so every admissibility
check below is an exact integer comparison.  At each vertex the three
incident labels (a loop's label entering twice) must satisfy

  (1) j_a + j_b + j_c even,
  (2) j_a + j_b + j_c <= 2k,
  (3) every label <= the sum of the other two.

Loops are not special-cased anywhere: condition testing consumes the per
vertex multiset of half-edge labels, which doubles a loop automatically.
This reading makes the count graph-independent within a genus, which is the
consistency criterion the counting cross-checks enforce.

The boundary assignment j_e = k everywhere (the maximally degenerate fibre)
violates condition (2) at every vertex for k >= 1 and is deliberately not
counted; the counts here are strict.
"""

from __future__ import annotations

from dataclasses import dataclass

from verlinde_lab.graph import TrinionGraph

#: Enumeration refuses when the raw label space (k+1)^E exceeds this.
DEFAULT_MAX_STATES = 10**7

#: Contraction refuses when any tensor frontier needs more than this many cells.
DEFAULT_MAX_FRONTIER = 10**7


class WorkBoundExceeded(RuntimeError):
    """Raised when brute-force enumeration would exceed its state budget."""


class FrontierBudgetExceeded(RuntimeError):
    """Raised when tensor contraction would exceed its frontier budget."""


@dataclass(frozen=True)
class WeightAssignment:
    """Integer labels j_e in [0, k], one per edge of a specific graph."""

    graph: TrinionGraph
    level: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        labels = tuple(int(j) for j in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != self.graph.edge_count:
            raise ValueError(
                f"expected {self.graph.edge_count} labels, got {len(labels)}"
            )
        for j in labels:
            if not 0 <= j <= self.level:
                raise ValueError(f"label {j} outside [0, {self.level}]")


class ThetaLabel(WeightAssignment):
    """Admissible assignment; the index w of a theta-basis vector s_w.

    Basis vectors are represented by their labels only; no analytic data is
    attached.
    """

    def __post_init__(self):
        super().__post_init__()
        if not is_admissible(self.graph, self):
            raise ValueError("theta label must be admissible")


def vertex_conditions_hold(k: int, triple: tuple[int, int, int]) -> bool:
    """Conditions (1)-(3) for one vertex's multiset of incident labels."""
    a, b, c = triple
    s = a + b + c
    if s % 2 != 0 or s > 2 * k:
        return False
    m = max(a, b, c)
    return m <= s - m


def is_admissible(G: TrinionGraph, w: WeightAssignment) -> bool:
    """True iff conditions (1)-(3) hold at every vertex of G."""
    if w.graph != G:
        raise ValueError("weight assignment belongs to a different graph")
    labels = w.labels
    k = w.level
    for e1, e2, e3 in G.vertex_edge_triples():
        if not vertex_conditions_hold(k, (labels[e1], labels[e2], labels[e3])):
            return False
    return True


def _check_state_budget(G: TrinionGraph, k: int, max_states: int) -> None:
    states = (k + 1) ** G.edge_count
    if states > max_states:
        raise WorkBoundExceeded(
            f"(k+1)^E = {states} exceeds the {max_states} state budget; "
            "use count_via_contraction instead"
        )


def _bfs_edge_order(G: TrinionGraph) -> list[int]:
    """Edge order in which every prefix spans a connected vertex set."""
    triples = G.vertex_edge_triples()
    seen_vertices = {0}
    order: list[int] = []
    placed = set()
    frontier = [0]
    # Edges of each discovered vertex are appended as soon as the vertex is
    # reached, so when an edge is assigned at least one endpoint is fresh in
    # label-count terms and the two-label prune below fires early.
    while frontier:
        v = frontier.pop(0)
        for e in triples[v]:
            if e in placed:
                continue
            placed.add(e)
            order.append(e)
            h1, h2 = G.edges[e]
            for u in (h1 // 3, h2 // 3):
                if u not in seen_vertices:
                    seen_vertices.add(u)
                    frontier.append(u)
    return order


def _dfs_admissible(G: TrinionGraph, k: int, collect: bool, max_states: int):
    """Depth-first enumeration with per-vertex pruning.

    Returns (count, labels_list); labels_list is only populated when
    ``collect`` is set.
    """
    _check_state_budget(G, k, max_states)
    E = G.edge_count
    triples = G.vertex_edge_triples()
    order = _bfs_edge_order(G)
    pos = {e: t for t, e in enumerate(order)}
    endpoints = [
        tuple(sorted({h1 // 3, h2 // 3})) for h1, h2 in G.edges
    ]
    labels = [0] * E
    found: list[tuple[int, ...]] = []
    count = 0

    def feasible_after(e: int, t: int) -> bool:
        for v in endpoints[e]:
            vals = [labels[ei] for ei in triples[v] if pos[ei] <= t]
            if len(vals) == 3:
                if not vertex_conditions_hold(k, tuple(vals)):
                    return False
            elif len(vals) == 2:
                # No third label in [0, k] can repair these violations.
                if vals[0] + vals[1] > 2 * k or abs(vals[0] - vals[1]) > k:
                    return False
        return True

    def rec(t: int):
        nonlocal count
        if t == E:
            count += 1
            if collect:
                found.append(tuple(labels))
            return
        e = order[t]
        for j in range(k + 1):
            labels[e] = j
            if feasible_after(e, t):
                rec(t + 1)
        labels[e] = 0

    rec(0)
    if collect:
        found.sort()
    return count, found


def enumerate_admissible(
    G: TrinionGraph, k: int, max_states: int = DEFAULT_MAX_STATES
) -> list[ThetaLabel]:
    """All admissible assignments, sorted lexicographically by label tuple."""
    if k < 0:
        raise ValueError("level must be non-negative")
    _, found = _dfs_admissible(G, k, collect=True, max_states=max_states)
    return [ThetaLabel(G, k, labels) for labels in found]


def count_admissible_bruteforce(
    G: TrinionGraph, k: int, max_states: int = DEFAULT_MAX_STATES
) -> int:
    """|enumerate_admissible(G, k)| without materializing the labels."""
    if k < 0:
        raise ValueError("level must be non-negative")
    count, _ = _dfs_admissible(G, k, collect=False, max_states=max_states)
    return count


def theta_basis(
    G: TrinionGraph, k: int, max_states: int = DEFAULT_MAX_STATES
) -> list[ThetaLabel]:
    """The canonical index set of the theta basis: the admissible labels."""
    return enumerate_admissible(G, k, max_states=max_states)


# ---------------------------------------------------------------------------
# Fast counting by tensor contraction
# ---------------------------------------------------------------------------


class _Tensor:
    """Sparse integer tensor over the open-edge label space of a vertex cluster."""

    __slots__ = ("vertices", "open_edges", "entries")

    def __init__(self, vertices: frozenset[int], open_edges: tuple[int, ...], entries: dict):
        self.vertices = vertices
        self.open_edges = open_edges
        self.entries = entries


def _admissible_triples(k: int):
    for a in range(k + 1):
        for b in range(k + 1):
            hi = min(a + b, 2 * k - a - b)
            for c in range(abs(a - b), hi + 1, 2):
                yield a, b, c


def _vertex_tensor(v: int, triple: tuple[int, int, int], k: int) -> _Tensor:
    ids = sorted(set(triple))
    entries: dict = {}
    if len(ids) == 3:
        t0, t1, t2 = triple
        for a, b, c in _admissible_triples(k):
            val = {t0: a, t1: b, t2: c}
            entries[tuple(val[e] for e in ids)] = 1
        return _Tensor(frozenset([v]), tuple(ids), entries)
    # Loop vertex: labels (l, l, t) need t even, t <= 2l, 2l + t <= 2k.
    loop = next(e for e in ids if triple.count(e) == 2)
    other = next(e for e in ids if e != loop)
    for l in range(k + 1):
        for t in range(0, min(2 * l, 2 * k - 2 * l) + 1, 2):
            val = {loop: l, other: t}
            entries[tuple(val[e] for e in ids)] = 1
    tensor = _Tensor(frozenset([v]), tuple(ids), entries)
    # The loop edge has both endpoints inside this tensor: sum it out now.
    return _project_out(tensor, [loop])


def _project_out(t: _Tensor, edges: list[int]) -> _Tensor:
    keep = [i for i, e in enumerate(t.open_edges) if e not in edges]
    new_open = tuple(t.open_edges[i] for i in keep)
    out: dict = {}
    for key, val in t.entries.items():
        nk = tuple(key[i] for i in keep)
        out[nk] = out.get(nk, 0) + val
    return _Tensor(t.vertices, new_open, out)


def _merge(a: _Tensor, b: _Tensor) -> _Tensor:
    shared = sorted(set(a.open_edges) & set(b.open_edges))
    pos_a = [a.open_edges.index(e) for e in shared]
    pos_b = [b.open_edges.index(e) for e in shared]
    rest_a = [i for i, e in enumerate(a.open_edges) if e not in shared]
    rest_b = [i for i, e in enumerate(b.open_edges) if e not in shared]
    open_a = [a.open_edges[i] for i in rest_a]
    open_b = [b.open_edges[i] for i in rest_b]
    new_open = tuple(sorted(open_a + open_b))
    # Where each surviving index of a/b lands in the merged key.
    place = {e: i for i, e in enumerate(new_open)}
    land_a = [place[e] for e in open_a]
    land_b = [place[e] for e in open_b]

    groups: dict = {}
    for key, val in b.entries.items():
        sk = tuple(key[i] for i in pos_b)
        groups.setdefault(sk, []).append((tuple(key[i] for i in rest_b), val))

    out: dict = {}
    width = len(new_open)
    for key, val in a.entries.items():
        sk = tuple(key[i] for i in pos_a)
        matches = groups.get(sk)
        if not matches:
            continue
        part_a = tuple(key[i] for i in rest_a)
        for part_b, val_b in matches:
            combined = [0] * width
            for idx, lab in zip(land_a, part_a):
                combined[idx] = lab
            for idx, lab in zip(land_b, part_b):
                combined[idx] = lab
            ck = tuple(combined)
            out[ck] = out.get(ck, 0) + val * val_b
    return _Tensor(a.vertices | b.vertices, new_open, out)


def count_via_contraction(
    G: TrinionGraph, k: int, max_frontier: int = DEFAULT_MAX_FRONTIER
) -> int:
    """Exact |W_g^k| by contracting per-vertex admissibility tensors.

    Agrees with count_admissible_bruteforce by construction of the vertex
    tensors; edges are eliminated in a greedy minimum-frontier order and all
    arithmetic is arbitrary-precision integer.
    """
    if k < 0:
        raise ValueError("level must be non-negative")

    def check_budget(width: int):
        need = (k + 1) ** width
        if need > max_frontier:
            raise FrontierBudgetExceeded(
                f"frontier of {width} open edges needs (k+1)^{width} = {need} "
                f"cells; budget is {max_frontier}"
            )

    tensors = []
    for v, triple in enumerate(G.vertex_edge_triples()):
        t = _vertex_tensor(v, triple, k)
        check_budget(len(t.open_edges))
        tensors.append(t)

    while len(tensors) > 1:
        best = None
        for i in range(len(tensors)):
            for j in range(i + 1, len(tensors)):
                shared = set(tensors[i].open_edges) & set(tensors[j].open_edges)
                if not shared:
                    continue
                width = (
                    len(set(tensors[i].open_edges) | set(tensors[j].open_edges))
                    - len(shared)
                )
                cand = (width, i, j)
                if best is None or cand < best:
                    best = cand
        assert best is not None, "connected graph always leaves a sharing pair"
        width, i, j = best
        check_budget(width)
        merged = _merge(tensors[i], tensors[j])
        tensors = [t for idx, t in enumerate(tensors) if idx not in (i, j)]
        tensors.append(merged)

    final = tensors[0]
    assert final.open_edges == ()
    return final.entries.get((), 0)


def weight_set_json_dict(G: TrinionGraph, k: int, labels: list[ThetaLabel]) -> dict:
    """Weight-set JSON: graph identified by canonical key, labels in edge order.

    Label rows follow G's edge order; for canonical representative graphs
    (everything the CLI emits) that coincides with the canonical edge order.
    """
    from verlinde_lab.graph import canonical_form

    return {
        "graph": list(canonical_form(G).key),
        "level": k,
        "labels": [list(w.labels) for w in labels],
    }
