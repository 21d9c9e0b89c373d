"""The su(2) fusion ring at level k, its characters, and the Verlinde formula.

Representations are labelled by twice the spin throughout the package: the
irreducible of spin i (dimension 2i+1) is the integer label m = 2i, so basis
labels at level k are m = 0, 1, ..., k and no half-integers appear anywhere.
The level-k ring is the quotient of the su(2) representation ring by the
ideal generated by the label m = k+1 (dimension k+2); its structure constants
are the truncated Clebsch-Gordan rule implemented here and enforced, not
assumed, by the character-homomorphism oracle.

All trigonometric evaluation runs at PRECISION_BITS of mantissa (well beyond
double-double) so that integer rounding in ``verlinde_dim`` is unambiguous at
desk scales.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

# >= 106-bit (double-double) required for the rounding tolerances below;
# 200 bits leaves a wide margin for g <= 6, k <= 20.
PRECISION_BITS = 200

#: Largest acceptable distance from the Verlinde sum to the nearest integer.
ROUNDING_TOLERANCE = 1e-6


class PrecisionError(ArithmeticError):
    """Raised when a value that must be an integer fails to round cleanly."""


def clebsch_gordan(m1: int, m2: int) -> list[int]:
    """Decompose the tensor product of labels m1, m2 in the full ring.

    Returns {|m1-m2|, |m1-m2|+2, ..., m1+m2}, each summand with
    multiplicity one.
    """
    if m1 < 0 or m2 < 0:
        raise ValueError("spin labels must be non-negative")
    return list(range(abs(m1 - m2), m1 + m2 + 1, 2))


def fusion_coefficient(k: int, m1: int, m2: int, m3: int) -> int:
    """Structure constant N_{m1,m2}^{m3} of the level-k fusion ring (0 or 1)."""
    for m in (m1, m2, m3):
        if not 0 <= m <= k:
            raise ValueError(f"label {m} outside level-{k} basis range [0, {k}]")
    if (m1 + m2 + m3) % 2 != 0:
        return 0
    if abs(m1 - m2) <= m3 <= min(m1 + m2, 2 * k - m1 - m2):
        return 1
    return 0


@dataclass(frozen=True)
class FusionElement:
    """Element of the level-k fusion ring: integer multiplicities over m = 0..k."""

    level: int
    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        cleaned = {}
        for m, c in self.coeffs.items():
            if not 0 <= m <= self.level:
                raise ValueError(f"label {m} outside level-{self.level} basis")
            if c != 0:
                cleaned[int(m)] = int(c)
        object.__setattr__(self, "coeffs", cleaned)

    def __getitem__(self, m: int) -> int:
        return self.coeffs.get(m, 0)

    def __add__(self, other: "FusionElement") -> "FusionElement":
        if self.level != other.level:
            raise ValueError("level mismatch in fusion-ring sum")
        merged = dict(self.coeffs)
        for m, c in other.coeffs.items():
            merged[m] = merged.get(m, 0) + c
        return FusionElement(self.level, merged)

    def __repr__(self):
        if not self.coeffs:
            return f"FusionElement(level={self.level}, 0)"
        terms = " + ".join(
            (f"V({m})" if c == 1 else f"{c}*V({m})") for m, c in sorted(self.coeffs.items())
        )
        return f"FusionElement(level={self.level}, {terms})"


def basis_element(k: int, m: int) -> FusionElement:
    """The basis element V(m) of the level-k ring."""
    return FusionElement(k, {m: 1})


def fusion_product(a: FusionElement, b: FusionElement) -> FusionElement:
    """Product in the level-k fusion ring, extended bilinearly from the basis."""
    if a.level != b.level:
        raise ValueError(f"level mismatch: {a.level} != {b.level}")
    k = a.level
    out: dict[int, int] = {}
    for m1, c1 in a.coeffs.items():
        for m2, c2 in b.coeffs.items():
            lo = abs(m1 - m2)
            hi = min(m1 + m2, 2 * k - m1 - m2)
            for m3 in range(lo, hi + 1, 2):
                out[m3] = out.get(m3, 0) + c1 * c2
    return FusionElement(k, out)


@dataclass(frozen=True)
class CharacterPoint:
    """Evaluation point z = n*pi/(k+2) of the level-k character family, 1 <= n <= k+1.

    The pair (n, level) is the exact datum; ``value`` is its numeric
    realization at the module working precision.
    """

    n: int
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if not 1 <= self.n <= self.level + 1:
            raise ValueError(
                f"character index n={self.n} outside [1, {self.level + 1}] at level {self.level}"
            )

    @property
    def value(self) -> mp.mpf:
        with mp.workprec(PRECISION_BITS):
            return mp.pi * self.n / (self.level + 2)


def character_points(k: int) -> list[CharacterPoint]:
    """The k+1 character evaluation points of the level-k ring."""
    return [CharacterPoint(n, k) for n in range(1, k + 2)]


def character(z: CharacterPoint, m: int) -> mp.mpf:
    """Character value sin((m+1) z)/sin(z) of the label m at the point z.

    Defined for any m >= 0, including labels outside the level-k basis;
    in particular m = k+1 (the ideal generator) evaluates to zero at every
    level-k point.
    """
    if m < 0:
        raise ValueError("spin label must be non-negative")
    with mp.workprec(PRECISION_BITS):
        zv = mp.pi * z.n / (z.level + 2)
        return mp.sin((m + 1) * zv) / mp.sin(zv)


def character_of_element(z: CharacterPoint, a: FusionElement) -> mp.mpf:
    """Linear extension of ``character`` to ring elements."""
    with mp.workprec(PRECISION_BITS):
        total = mp.mpf(0)
        for m, c in a.coeffs.items():
            total += c * character(z, m)
        return total


def character_homomorphism_check(k: int, z: CharacterPoint, m1: int, m2: int) -> float:
    """Residual |chi_z(m1) chi_z(m2) - sum_p N_{m1,m2}^p chi_z(p)|.

    A vanishing residual at every level-k character point certifies that the
    truncated fusion rule realizes the quotient-ring product; this is the
    oracle for ``fusion_product``.
    """
    if z.level != k:
        raise ValueError(f"character point has level {z.level}, expected {k}")
    with mp.workprec(PRECISION_BITS):
        lhs = character(z, m1) * character(z, m2)
        prod = fusion_product(basis_element(k, m1), basis_element(k, m2))
        rhs = character_of_element(z, prod)
        return float(abs(lhs - rhs))


def verlinde_dim(g: int, k: int) -> int:
    """Rank of the level-k space of non-abelian theta functions at genus g.

    Evaluates ((k+2)/2)^(g-1) * sum_{n=1}^{k+1} sin(n pi/(k+2))^-(2g-2)
    in extended precision and rounds to the nearest integer; raises
    PrecisionError if the rounding residual reaches ROUNDING_TOLERANCE.
    """
    if g < 2:
        raise ValueError("genus must be at least 2")
    if k < 0:
        raise ValueError("level must be non-negative")
    with mp.workprec(PRECISION_BITS):
        prefactor = mp.mpf(k + 2) ** (g - 1) / mp.mpf(2) ** (g - 1)
        total = mp.mpf(0)
        for n in range(1, k + 2):
            s = mp.sin(mp.pi * n / (k + 2))
            total += s ** (-(2 * g - 2))
        value = prefactor * total
        nearest = mp.nint(value)
        residual = abs(value - nearest)
        if residual >= ROUNDING_TOLERANCE:
            raise PrecisionError(
                f"Verlinde sum for g={g}, k={k} is {mp.nstr(value, 30)}; "
                f"residual {mp.nstr(residual, 5)} exceeds {ROUNDING_TOLERANCE}"
            )
        return int(nearest)
