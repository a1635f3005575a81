"""Partitions, compositions, orders, tableaux, Kostka numbers, margin matrices.

Conventions fixed here and relied on everywhere downstream:

* A partition is a tuple of positive integers, weakly decreasing, with no
  trailing zeros.  A composition is a tuple of nonnegative integers of a
  declared length.
* ``partitions(d)`` and ``compositions(n, d)`` enumerate in descending
  lexicographic order, so the first partition is ``(d,)`` and the last is
  ``(1,)*d``.  The lexicographic order on partitions of equal weight is plain
  tuple comparison.
* ``margin_matrices(lam, mu)`` enumerates matrices row by row, each row
  running through compositions in the canonical (descending) order subject to
  remaining column budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

Partition = tuple[int, ...]
Composition = tuple[int, ...]


# ----------------------------------------------------------------------
# Partitions and compositions
# ----------------------------------------------------------------------

def is_partition(seq) -> bool:
    seq = tuple(seq)
    return all(isinstance(x, int) and x > 0 for x in seq) and \
        all(seq[i] >= seq[i + 1] for i in range(len(seq) - 1))


def weight(seq) -> int:
    return sum(seq)


def normalize_partition(seq) -> Partition:
    """Drop trailing zeros and validate."""
    seq = tuple(int(x) for x in seq)
    while seq and seq[-1] == 0:
        seq = seq[:-1]
    if not is_partition(seq):
        raise ValueError(f"{seq} is not a partition")
    return seq


def pad(seq, n: int) -> Composition:
    seq = tuple(seq)
    if len(seq) > n:
        raise ValueError(f"cannot pad length-{len(seq)} sequence to length {n}")
    return seq + (0,) * (n - len(seq))


def sort_to_partition(comp) -> Partition:
    return tuple(sorted((x for x in comp if x > 0), reverse=True))


@lru_cache(maxsize=None)
def partitions(d: int) -> tuple[Partition, ...]:
    """All partitions of d, in descending lexicographic order."""
    if d == 0:
        return ((),)

    def gen(rest: int, largest: int):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, largest), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return tuple(gen(d, d))


@lru_cache(maxsize=None)
def compositions(n: int, d: int) -> tuple[Composition, ...]:
    """The set Lambda(n, d) in descending lexicographic order."""
    if n < 1:
        raise ValueError("need n >= 1")

    def gen(slots: int, rest: int):
        if slots == 1:
            yield (rest,)
            return
        for first in range(rest, -1, -1):
            for tail in gen(slots - 1, rest - first):
                yield (first,) + tail

    return tuple(gen(n, d))


def conjugate(lam) -> Partition:
    """Transpose of the Young diagram."""
    lam = normalize_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part >= i) for i in range(1, lam[0] + 1))


def hook_length(lam: Partition, i: int, j: int) -> int:
    """Hook length of box (i, j), zero-indexed."""
    lamc = conjugate(lam)
    return (lam[i] - j) + (lamc[j] - i) - 1


def boxes(lam: Partition) -> Iterator[tuple[int, int]]:
    for i, part in enumerate(lam):
        for j in range(part):
            yield (i, j)


def sigma_perm(lam) -> tuple[int, ...]:
    """The permutation taking row-major to column-major box numbering.

    Returns the one-line form ``(sigma(1), ..., sigma(d))``: position r of the
    row-major reading, sitting in row i and column j, maps to
    ``lam'_1 + ... + lam'_{j-1} + i``.
    """
    lam = normalize_partition(lam)
    lamc = conjugate(lam)
    col_offset = [0]
    for part in lamc:
        col_offset.append(col_offset[-1] + part)
    images = []
    for i, part in enumerate(lam, start=1):
        for j in range(1, part + 1):
            images.append(col_offset[j - 1] + i)
    return tuple(images)


def perm_compose(sigma: tuple[int, ...], tau: tuple[int, ...]) -> tuple[int, ...]:
    """(sigma . tau)(t) = sigma(tau(t)), one-line forms, 1-based."""
    return tuple(sigma[tau[t - 1] - 1] for t in range(1, len(tau) + 1))


def perm_inverse(sigma: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma, start=1):
        inv[s - 1] = i
    return tuple(inv)


def perm_sign(sigma: tuple[int, ...]) -> int:
    n = len(sigma)
    inv = sum(1 for i in range(n) for j in range(i + 1, n) if sigma[i] > sigma[j])
    return -1 if inv % 2 else 1


# ----------------------------------------------------------------------
# Orders
# ----------------------------------------------------------------------

def dominance_leq(mu, lam) -> bool:
    """mu <= lam in dominance: every prefix sum of mu is at most that of lam."""
    mu, lam = tuple(mu), tuple(lam)
    if weight(mu) != weight(lam):
        raise ValueError("dominance order compares equal weights only")
    total_mu = total_lam = 0
    for r in range(max(len(mu), len(lam))):
        total_mu += mu[r] if r < len(mu) else 0
        total_lam += lam[r] if r < len(lam) else 0
        if total_mu > total_lam:
            return False
    return True


def dominance_lt(mu, lam) -> bool:
    return tuple(mu) != tuple(lam) and dominance_leq(mu, lam)


def lex_leq(mu, lam) -> bool:
    """Lexicographic order on partitions of equal weight (tuple comparison)."""
    return tuple(mu) <= tuple(lam)


class _LexTop:
    def __repr__(self):
        return "+inf"


class _LexBottom:
    def __repr__(self):
        return "-inf"


LEX_TOP = _LexTop()
LEX_BOTTOM = _LexBottom()


def lex_successor(lam):
    """Immediate successor among partitions of the same weight; (d,) -> +inf."""
    lam = normalize_partition(lam)
    chain = partitions(weight(lam))  # descending: successor sits one earlier
    i = chain.index(lam)
    return LEX_TOP if i == 0 else chain[i - 1]


def lex_predecessor(lam):
    lam = normalize_partition(lam)
    chain = partitions(weight(lam))
    i = chain.index(lam)
    return LEX_BOTTOM if i == len(chain) - 1 else chain[i + 1]


# ----------------------------------------------------------------------
# Fillings and tableaux
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Filling:
    """A filling of the Young diagram of ``shape``: entry rows, left-justified."""

    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if tuple(len(r) for r in self.rows) != tuple(self.shape):
            raise ValueError("rows do not match shape")
        if any(x < 1 for row in self.rows for x in row):
            raise ValueError("entries must be positive")

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    @property
    def is_tableau(self) -> bool:
        """Weakly increasing along rows, strictly increasing down columns."""
        for row in self.rows:
            if any(row[j] > row[j + 1] for j in range(len(row) - 1)):
                return False
        for i in range(len(self.rows) - 1):
            upper, lower = self.rows[i], self.rows[i + 1]
            if any(upper[j] >= lower[j] for j in range(len(lower))):
                return False
        return True

    def content(self, n: Optional[int] = None) -> Composition:
        """mu_i = multiplicity of the entry i; padded to length n if given."""
        entries = [x for row in self.rows for x in row]
        top = max(entries, default=0)
        length = top if n is None else n
        if top > length:
            raise ValueError("entry exceeds requested content length")
        out = [0] * length
        for x in entries:
            out[x - 1] += 1
        return tuple(out)

    def row_contents(self, n: int) -> tuple[Composition, ...]:
        """Per-row contents alpha^i in Lambda(n, lam_i)."""
        out = []
        for row in self.rows:
            alpha = [0] * n
            for x in row:
                alpha[x - 1] += 1
            out.append(tuple(alpha))
        return tuple(out)


def tableaux(lam, content) -> list[Filling]:
    """All semistandard Young tableaux of the given shape and content."""
    lam = normalize_partition(lam)
    content = tuple(content)
    if weight(lam) != weight(content):
        raise ValueError("shape and content must have equal weight")
    n_entries = len(content)
    results: list[Filling] = []
    rows = [[0] * part for part in lam]
    remaining = list(content)

    cells = [(i, j) for i, part in enumerate(lam) for j in range(part)]
    # Column-major fill keeps the strict-column constraint local.
    cells.sort(key=lambda ij: (ij[1], ij[0]))

    def backtrack(pos: int):
        if pos == len(cells):
            results.append(Filling(lam, tuple(tuple(r) for r in rows)))
            return
        i, j = cells[pos]
        lo = rows[i][j - 1] if j > 0 else 1
        if i > 0:
            lo = max(lo, rows[i - 1][j] + 1)
        for v in range(lo, n_entries + 1):
            if remaining[v - 1] > 0:
                rows[i][j] = v
                remaining[v - 1] -= 1
                backtrack(pos + 1)
                remaining[v - 1] += 1
        rows[i][j] = 0

    backtrack(0)
    return results


def kostka(lam, mu) -> int:
    """Number of semistandard tableaux of shape lam and content mu."""
    return len(tableaux(lam, mu))


def row_filling_from_contents(lam, row_contents) -> Filling:
    """Rebuild the weakly-increasing-row filling with given per-row contents."""
    rows = []
    for alpha in row_contents:
        row = []
        for letter, mult in enumerate(alpha, start=1):
            row.extend([letter] * mult)
        rows.append(tuple(row))
    return Filling(normalize_partition(lam), tuple(rows))


# ----------------------------------------------------------------------
# Margin matrices
# ----------------------------------------------------------------------

MarginMatrix = tuple[tuple[int, ...], ...]


def margins(a: MarginMatrix) -> tuple[Composition, Composition]:
    """(row_sums, col_sums) of a nonnegative integer matrix."""
    row_sums = tuple(sum(r) for r in a)
    col_sums = tuple(sum(col) for col in zip(*a)) if a else ()
    return row_sums, col_sums


def transpose_matrix(a: MarginMatrix) -> MarginMatrix:
    return tuple(zip(*a)) if a else ()


@lru_cache(maxsize=None)
def margin_matrices(lam: Composition, mu: Composition) -> tuple[MarginMatrix, ...]:
    """All nonnegative integer matrices with row sums lam and column sums mu."""
    lam, mu = tuple(lam), tuple(mu)
    if weight(lam) != weight(mu):
        raise ValueError("row and column sums must have equal weight")
    n_cols = len(mu)

    def rows_gen(i: int, budget: tuple[int, ...]):
        if i == len(lam):
            if all(b == 0 for b in budget):
                yield ()
            return
        for row in _bounded_compositions(n_cols, lam[i], budget):
            new_budget = tuple(b - r for b, r in zip(budget, row))
            for rest in rows_gen(i + 1, new_budget):
                yield (row,) + rest

    return tuple(rows_gen(0, mu))


def _bounded_compositions(slots: int, total: int, bounds) -> Iterator[Composition]:
    """Compositions of ``total`` into ``slots`` parts with per-slot bounds,
    descending lexicographic order."""
    if slots == 1:
        if total <= bounds[0]:
            yield (total,)
        return
    for first in range(min(total, bounds[0]), -1, -1):
        for tail in _bounded_compositions(slots - 1, total - first, bounds[1:]):
            yield (first,) + tail


def diagonal_matrix(mu: Composition) -> MarginMatrix:
    n = len(mu)
    return tuple(tuple(mu[i] if i == j else 0 for j in range(n)) for i in range(n))


def filling_to_margin(t: Filling, n: int) -> MarginMatrix:
    """The matrix a_{ij} = #{boxes in row i with entry j}."""
    return t.row_contents(n)


# ----------------------------------------------------------------------
# Text / JSON forms
# ----------------------------------------------------------------------

def parse_partition(text: str) -> Partition:
    """Parse ``"3,2,1"`` (or an empty string for the zero partition)."""
    text = text.strip()
    if not text:
        return ()
    return normalize_partition(int(x) for x in text.split(","))


def partition_str(lam) -> str:
    return ",".join(str(x) for x in lam)
