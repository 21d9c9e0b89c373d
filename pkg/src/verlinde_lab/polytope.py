"""The Clebsch-Gordan moment polytope of a trinion graph, in action coordinates.

The polytope lives in [0,1]^E with one coordinate c_e per edge (c = j/k on
the weight lattice).  Each vertex with incident labels (c_a, c_b, c_c) --
loops doubled -- contributes the three triangle inequalities c_x <= c_y + c_z
and the cap c_a + c_b + c_c <= 2; together with the box constraints this is
the full H-representation.  Everything except Monte Carlo sampling is exact
rational arithmetic.

The admissible weights of level k are exactly the points of (1/k)Z^E inside
the polytope whose scaled coordinates j = k*c satisfy the per-vertex parity
condition, so ``lattice_count`` must and does reproduce the weight counts.
The parity condition thins the full (1/k)-lattice by 2^r, r the GF(2) rank of
the parity system, so the observed growth constant of the counts is
volume / 2^r rather than the bare volume; ``asymptotic_table`` reports both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from verlinde_lab.graph import TrinionGraph
from verlinde_lab.weights import count_via_contraction

#: exact_volume is a recursive boundary integration; cap the dimension.
MAX_EXACT_DIMENSION = 6

MIN_MC_SAMPLES = 10**3

_MC_CHUNK = 65536


@dataclass(frozen=True)
class ClebschGordanPolytope:
    """Rational H-representation: rows (a, b) meaning a . c <= b."""

    dim: int
    ineqs: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    def __post_init__(self):
        for a, b in self.ineqs:
            if len(a) != self.dim:
                raise ValueError("inequality arity does not match dimension")


def build_polytope(G: TrinionGraph) -> ClebschGordanPolytope:
    """H-representation of the moment polytope of G, deterministic row order."""
    d = G.edge_count
    rows: list[tuple[tuple[Fraction, ...], Fraction]] = []
    seen = set()

    def add(coeffs: dict[int, int], bound: int):
        a = tuple(Fraction(coeffs.get(i, 0)) for i in range(d))
        row = (a, Fraction(bound))
        if row not in seen:
            seen.add(row)
            rows.append(row)

    for e in range(d):
        add({e: -1}, 0)
        add({e: 1}, 1)
    for triple in G.vertex_edge_triples():
        for x in range(3):
            coeffs: dict[int, int] = {}
            coeffs[triple[x]] = coeffs.get(triple[x], 0) + 1
            for y in range(3):
                if y != x:
                    coeffs[triple[y]] = coeffs.get(triple[y], 0) - 1
            if any(c != 0 for c in coeffs.values()):
                add(coeffs, 0)
        total: dict[int, int] = {}
        for e in triple:
            total[e] = total.get(e, 0) + 1
        add(total, 2)
    return ClebschGordanPolytope(d, tuple(rows))


def contains(P: ClebschGordanPolytope, point: tuple[Fraction, ...]) -> bool:
    """Exact membership test."""
    if len(point) != P.dim:
        raise ValueError(f"point has {len(point)} coordinates, polytope is {P.dim}-dimensional")
    for a, b in P.ineqs:
        if sum(ai * xi for ai, xi in zip(a, point)) > b:
            return False
    return True


# ---------------------------------------------------------------------------
# Exact volume: recursive facet integration
# ---------------------------------------------------------------------------
#
# For P = {x : a_i . x <= b_i} the divergence theorem with the field x/d gives
#   vol_d(P) = (1/d) * sum_i (b_i / |a_i|) vol_{d-1}(F_i),
# and eliminating one coordinate on the facet hyperplane turns each term into
# the purely rational  (1/d) * b_i * vol_{d-1}(P_i) / |a_{i,j}|  where P_i is
# the substituted (d-1)-dimensional system.  Sub-systems are canonicalized
# (primitive integer rows, sorted, one row per direction) and memoized, so
# equal faces reached along different facet chains are computed once and the
# result is independent of the input row order.


def _normalize_rows(rows) -> tuple:
    """Canonical row set: primitive integer rows, min bound per direction, sorted.

    Returns None if a trivially infeasible row 0 <= b < 0 is present.
    """
    by_dir: dict = {}
    for a, b in rows:
        scale = lcm(*(f.denominator for f in (*a, b)))
        ia = tuple(int(f * scale) for f in a)
        ib = int(b * scale)
        if all(c == 0 for c in ia):
            if ib < 0:
                return None
            continue
        g = gcd(ib, *(abs(c) for c in ia))
        if g > 1:
            ia = tuple(c // g for c in ia)
            ib //= g
        if ia not in by_dir or ib < by_dir[ia]:
            by_dir[ia] = ib
    return tuple(sorted((a, b) for a, b in by_dir.items()))


def _interval_length(rows) -> Fraction:
    lo, hi = None, None
    for (a,), b in rows:
        bound = Fraction(b, a)
        if a > 0:
            hi = bound if hi is None else min(hi, bound)
        else:
            lo = bound if lo is None else max(lo, bound)
    if lo is None or hi is None:
        raise ValueError("polytope is unbounded")
    return max(Fraction(0), hi - lo)


def _substitute(rows, facet_row, pivot: int):
    """Eliminate coordinate ``pivot`` using equality on ``facet_row``."""
    fa, fb = facet_row
    piv = Fraction(fa[pivot])
    out = []
    for a, b in rows:
        if (a, b) == facet_row:
            continue
        cj = Fraction(a[pivot])
        if cj == 0:
            na = tuple(Fraction(c) for i, c in enumerate(a) if i != pivot)
            nb = Fraction(b)
        else:
            ratio = cj / piv
            na = tuple(
                Fraction(a[i]) - ratio * fa[i] for i in range(len(a)) if i != pivot
            )
            nb = Fraction(b) - ratio * fb
        out.append((na, nb))
    return out


def _volume_rec(d: int, rows, memo) -> Fraction:
    if rows is None:
        return Fraction(0)
    if d == 0:
        return Fraction(1)
    if d == 1:
        return _interval_length(rows)
    cached = memo.get((d, rows))
    if cached is not None:
        return cached
    total = Fraction(0)
    for a, b in rows:
        if b == 0:
            continue  # facet hyperplane through the origin contributes b * (...) = 0
        pivot = max(range(d), key=lambda i: (abs(a[i]), -i))
        if a[pivot] == 0:
            continue
        sub = _normalize_rows(_substitute(rows, (a, b), pivot))
        sub_vol = _volume_rec(d - 1, sub, memo)
        if sub_vol:
            total += Fraction(b) * sub_vol / abs(a[pivot])
    result = total / d
    memo[(d, rows)] = result
    return result


def exact_volume(P: ClebschGordanPolytope) -> Fraction:
    """Exact Euclidean volume; 0 for degenerate (lower-dimensional) input."""
    if P.dim > MAX_EXACT_DIMENSION:
        raise ValueError(
            f"exact_volume supports dimension <= {MAX_EXACT_DIMENSION} "
            f"(got {P.dim}); use mc_volume"
        )
    rows = _normalize_rows(P.ineqs)
    return _volume_rec(P.dim, rows, {})


def mc_volume(
    P: ClebschGordanPolytope, samples: int, rng_seed: int
) -> tuple[float, float]:
    """Hit-or-miss volume estimate over [0,1]^dim with binomial standard error."""
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {samples}")
    A = np.array([[float(c) for c in a] for a, _ in P.ineqs], dtype=float)
    b = np.array([float(bb) for _, bb in P.ineqs], dtype=float)
    rng = np.random.default_rng(rng_seed)
    hits = 0
    remaining = samples
    while remaining > 0:
        n = min(_MC_CHUNK, remaining)
        x = rng.random((n, P.dim))
        inside = (x @ A.T <= b).all(axis=1)
        hits += int(inside.sum())
        remaining -= n
    estimate = hits / samples
    stderr = (estimate * (1.0 - estimate) / samples) ** 0.5
    return estimate, stderr


# ---------------------------------------------------------------------------
# Lattice counting and asymptotics
# ---------------------------------------------------------------------------


def _integer_rows_for_level(P: ClebschGordanPolytope, k: int):
    """Rows (A, B) with A . j <= B over the integer labels j = k*c."""
    out = []
    for a, b in P.ineqs:
        scale = lcm(*(f.denominator for f in (*a, b)))
        ia = [int(f * scale) for f in a]
        ib = int(b * scale) * k
        out.append((ia, ib))
    return out


def lattice_count(P: ClebschGordanPolytope, G: TrinionGraph, k: int) -> int:
    """Points of (1/k)Z^dim in P whose labels j = k*c satisfy vertex parity.

    This is the polytope-side route to the weight count: only the
    H-representation and the parity condition are consulted.
    """
    if k < 1:
        raise ValueError("level must be at least 1")
    d = P.dim
    if d != G.edge_count:
        raise ValueError("polytope dimension does not match the graph's edge count")
    rows = _integer_rows_for_level(P, k)
    # Minimum achievable remaining contribution per row from coordinates >= t.
    min_rest = [[0] * (d + 1) for _ in rows]
    for r, (ia, _) in enumerate(rows):
        for t in range(d - 1, -1, -1):
            min_rest[r][t] = min_rest[r][t + 1] + min(0, ia[t] * k)
    triples = G.vertex_edge_triples()
    vertex_done_at = [max(tr) for tr in triples]
    labels = [0] * d
    count = 0

    def rec(t: int, partial: list[int]):
        nonlocal count
        if t == d:
            count += 1
            return
        for j in range(k + 1):
            labels[t] = j
            new_partial = [p + ia[t] * j for p, (ia, _) in zip(partial, rows)]
            ok = all(
                p + min_rest[r][t + 1] <= rows[r][1]
                for r, p in enumerate(new_partial)
            )
            if ok:
                for v, done in enumerate(vertex_done_at):
                    if done == t:
                        e1, e2, e3 = triples[v]
                        if (labels[e1] + labels[e2] + labels[e3]) % 2 != 0:
                            ok = False
                            break
            if ok:
                rec(t + 1, new_partial)

    rec(0, [0] * len(rows))
    return count


def parity_rank(G: TrinionGraph) -> int:
    """GF(2) rank of the per-vertex parity system (loops contribute 0 mod 2)."""
    rows = []
    for triple in G.vertex_edge_triples():
        mask = 0
        for e in set(triple):
            if triple.count(e) % 2 == 1:
                mask |= 1 << e
        rows.append(mask)
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


@dataclass(frozen=True)
class AsymptoticRow:
    level: int
    count: int
    ratio: Fraction  # count / level**dim


@dataclass(frozen=True)
class AsymptoticTable:
    """Growth law of the lattice counts against the polytope volume.

    ``extrapolated_limit`` fits count/k^d = C + a/k + b/k^2 through the last
    three levels (None when fewer than three rows exist).  ``volume`` is the
    bare lattice-density law; the parity condition keeps only a 2^r fraction
    of the lattice, so ``volume_parity_corrected`` = volume / 2^r is the
    constant the counts actually approach.  Both are reported side by side.
    """

    dimension: int
    rows: tuple[AsymptoticRow, ...]
    extrapolated_limit: Fraction | None
    volume: Fraction
    parity_rank: int
    volume_parity_corrected: Fraction


def _fit_limit(points: list[tuple[int, Fraction]]) -> Fraction:
    """Exact solve of t(k) = C + a/k + b/k^2 through three (k, t) points."""
    (k1, t1), (k2, t2), (k3, t3) = points
    rows = [
        [Fraction(1), Fraction(1, k), Fraction(1, k * k), t]
        for k, t in ((k1, t1), (k2, t2), (k3, t3))
    ]
    # Gaussian elimination, exact.
    for col in range(3):
        piv = next(r for r in range(col, 3) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pivval = rows[col][col]
        rows[col] = [x / pivval for x in rows[col]]
        for r in range(3):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return rows[0][3]


def asymptotic_table(G: TrinionGraph, k_max: int) -> AsymptoticTable:
    """Counts N_k for k <= k_max, ratios N_k/k^d, and the fitted growth constant."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    d = G.edge_count
    rows = []
    for k in range(1, k_max + 1):
        n = count_via_contraction(G, k)
        rows.append(AsymptoticRow(k, n, Fraction(n, k**d)))
    limit = None
    if k_max >= 3:
        limit = _fit_limit([(r.level, r.ratio) for r in rows[-3:]])
    vol = exact_volume(build_polytope(G))
    r = parity_rank(G)
    return AsymptoticTable(
        dimension=d,
        rows=tuple(rows),
        extrapolated_limit=limit,
        volume=vol,
        parity_rank=r,
        volume_parity_corrected=vol / 2**r,
    )


def table_to_csv(table: AsymptoticTable) -> str:
    lines = ["k,count,ratio"]
    for row in table.rows:
        lines.append(f"{row.level},{row.count},{float(row.ratio)!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def to_json_dict(P: ClebschGordanPolytope) -> dict:
    """Polytope JSON: {"dim": d, "ineqs": [[a_1..a_d, b], ...]}, rationals as strings."""
    return {
        "dim": P.dim,
        "ineqs": [[str(c) for c in (*a, b)] for a, b in P.ineqs],
    }


def from_json_dict(data: dict) -> ClebschGordanPolytope:
    d = int(data["dim"])
    ineqs = []
    for row in data["ineqs"]:
        if len(row) != d + 1:
            raise ValueError(f"inequality row needs {d + 1} entries, got {len(row)}")
        vals = [Fraction(s) for s in row]
        ineqs.append((tuple(vals[:d]), vals[d]))
    return ClebschGordanPolytope(d, tuple(ineqs))
