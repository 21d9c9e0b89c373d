"""Classical torus-fibration counting: theta characteristics and multisections.

For the rank-one model of a principally polarized g-torus fibration at level
k, the fibres carrying a basis vector are the k^g points of order k on the
base; they are labelled by characteristics in (Z/k)^g and the translation
group acts simply transitively on the labels.

The higher-rank generalization is modelled by affine multisections of the
dual fibration: finitely many components b |-> A.b + t (mod Z^g) with A an
integer matrix and t a rational shift.  The fibres supporting a covariant
constant section are the solutions of A.b + t = 0 (mod Z^g); for nonsingular
A there are exactly |det A| of them per component, found explicitly through
the Smith normal form, and the total matches the topological intersection
number of the multisection with the zero section.  Everything in this module
is exact integer/rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

#: bs_points refuses to materialize more labels than this.
DEFAULT_MAX_POINTS = 10**6


class BudgetExceeded(RuntimeError):
    """Raised when a point set is too large to materialize."""


class SingularComponentError(ValueError):
    """A multisection component with det A = 0 has no isolated intersections."""


@dataclass(frozen=True)
class TorusFibration:
    """Lagrangian torus fibration of a g-dimensional abelian phase space."""

    g: int
    level: int

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("fibre dimension g must be at least 1")
        if self.level < 1:
            raise ValueError("level must be at least 1")


@dataclass(frozen=True)
class Characteristic:
    """Label of a basis vector: a vector of residues mod k."""

    g: int
    level: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.g:
            raise ValueError(f"expected {self.g} residues, got {len(self.values)}")
        object.__setattr__(
            self, "values", tuple(int(v) % self.level for v in self.values)
        )


def bs_count(F: TorusFibration) -> int:
    """Number of level-k basis labels: k^g."""
    return F.level**F.g


def bs_points(F: TorusFibration, max_points: int = DEFAULT_MAX_POINTS) -> list[Characteristic]:
    """All k^g characteristics, in lexicographic order."""
    total = bs_count(F)
    if total > max_points:
        raise BudgetExceeded(
            f"k^g = {total} labels exceed the budget of {max_points}; "
            "use bs_count for the count alone"
        )
    return [
        Characteristic(F.g, F.level, values)
        for values in product(range(F.level), repeat=F.g)
    ]


def translate_label(w: Characteristic, v: Characteristic) -> Characteristic:
    """Translation action on labels: componentwise addition mod k."""
    if (w.g, w.level) != (v.g, v.level):
        raise ValueError("characteristics live on different tori")
    return Characteristic(
        w.g, w.level, tuple(a + b for a, b in zip(w.values, v.values))
    )


@dataclass(frozen=True)
class MultisectionComponent:
    """One affine section b |-> A.b + t (mod Z^g)."""

    matrix: tuple[tuple[int, ...], ...]
    shift: tuple[Fraction, ...]

    def __post_init__(self):
        g = len(self.matrix)
        matrix = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", matrix)
        for row in matrix:
            if len(row) != g:
                raise ValueError("component matrix must be square")
        shift = tuple(Fraction(x) for x in self.shift)
        object.__setattr__(self, "shift", shift)
        if len(shift) != g:
            raise ValueError("shift length must match matrix size")
        for s in shift:
            if not 0 <= s < 1:
                raise ValueError(f"shift entry {s} outside [0, 1)")


@dataclass(frozen=True)
class AffineMultisection:
    """Finite union of affine sections over a g-torus base."""

    g: int
    components: tuple[MultisectionComponent, ...]

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("base dimension g must be at least 1")
        if not self.components:
            raise ValueError("multisection needs at least one component")
        for comp in self.components:
            if len(comp.matrix) != self.g:
                raise ValueError("component dimension does not match the base")


def smith_normal_form(
    A: list[list[int]],
) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Integer Smith normal form: returns (U, D, V) with U A V = D.

    U and V are unimodular; D is diagonal with non-negative entries and
    d_1 | d_2 | ... along the diagonal.
    """
    a = [[int(x) for x in row] for row in A]
    n = len(a)
    m = len(a[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i += q * row_j
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        U[i] = [x + q * y for x, y in zip(U[i], U[j])]

    def add_col(i, j, q):  # col_i += q * col_j
        for row in a:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]

    for t in range(min(n, m)):
        while True:
            pivot = None
            for i in range(t, n):
                for j in range(t, m):
                    if a[i][j] != 0 and (
                        pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])
                    ):
                        pivot = (i, j)
            if pivot is None:
                break
            i, j = pivot
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            if a[t][t] < 0:
                negate_row(t)
            dirty = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t] != 0:
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # Enforce divisibility of the remaining block by the pivot.
            fixed = True
            for i in range(t + 1, n):
                if any(a[i][j] % a[t][t] != 0 for j in range(t + 1, m)):
                    add_row(t, i, 1)
                    fixed = False
                    break
            if fixed:
                break
    return U, a, V


def _component_diagonal(comp: MultisectionComponent):
    U, D, V = smith_normal_form([list(row) for row in comp.matrix])
    diag = [D[i][i] for i in range(len(D))]
    if any(d == 0 for d in diag):
        raise SingularComponentError(
            "component matrix is singular: fibrewise intersection is "
            "positive-dimensional and the count is undefined in this model"
        )
    return U, V, diag


def gft_intersection_count(M: AffineMultisection) -> int:
    """Total number of base points supporting a covariant constant section.

    Per component the congruence A.b + t = 0 (mod Z^g) has exactly
    |det A| = d_1*...*d_g solutions on the torus, read off from the Smith
    normal form; components are summed with multiplicity.
    """
    total = 0
    for comp in M.components:
        _, _, diag = _component_diagonal(comp)
        prod = 1
        for d in diag:
            prod *= abs(d)
        total += prod
    return total


def _component_solutions(comp: MultisectionComponent) -> list[tuple[Fraction, ...]]:
    U, V, diag = _component_diagonal(comp)
    g = len(diag)
    # Solve D y = -U t (mod Z^g), then map back through b = V y (mod Z^g).
    s = [
        -sum(Fraction(U[i][l]) * comp.shift[l] for l in range(g)) for i in range(g)
    ]
    points = []
    for residues in product(*(range(d) for d in diag)):
        y = [(s[i] + residues[i]) / diag[i] for i in range(g)]
        b = tuple(
            (sum(Fraction(V[i][j]) * y[j] for j in range(g))) % 1 for i in range(g)
        )
        points.append(b)
    points.sort()
    return points


def e_bs_fibres(M: AffineMultisection) -> list[tuple[tuple[Fraction, ...], int]]:
    """Explicit solution set: (base point in [0,1)^g, component index) pairs.

    Base points shared by several components appear once per component, so
    the list length equals ``gft_intersection_count``.
    """
    out: list[tuple[tuple[Fraction, ...], int]] = []
    for idx, comp in enumerate(M.components):
        for point in _component_solutions(comp):
            out.append((point, idx))
    return out


def to_json_dict(M: AffineMultisection) -> dict:
    """Multisection JSON: {"g": g, "components": [{"A": [[..]], "t": ["p/q",..]}]}."""
    return {
        "g": M.g,
        "components": [
            {"A": [list(row) for row in comp.matrix], "t": [str(s) for s in comp.shift]}
            for comp in M.components
        ],
    }


def from_json_dict(data: dict) -> AffineMultisection:
    comps = []
    for entry in data["components"]:
        matrix = tuple(tuple(int(x) for x in row) for row in entry["A"])
        shift = tuple(Fraction(s) for s in entry["t"])
        comps.append(MultisectionComponent(matrix, shift))
    return AffineMultisection(int(data["g"]), tuple(comps))
