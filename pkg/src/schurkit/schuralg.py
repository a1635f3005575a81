"""The Schur algebra S_k(n, d) with its basis of symmetrized tensors.

The basis is indexed by n x n nonnegative integer matrices A with total sum d
(margin matrices over all pairs of weights).  The element gamma_A acts on the
d-fold tensor power of k^n as the sum over the orbit of tensor products of
elementary matrices whose multiset of index pairs is given by A; the element
with row sums lam and column sums mu maps the mu-weight space into the
lam-weight space and kills every other weight.

Conventions: vectors are rows and maps act on the right, so for basis elements
``multiply(a, b)`` is the element acting as "apply a, then b"; the weight
idempotents are the diagonal matrices, and their sum is the unit.

Structure constants are computed over Z by composing the actions on the
generator word of the source weight (they are integral by construction), then
reduced to the session ring.
"""

from __future__ import annotations

import itertools
from collections import Counter
from functools import lru_cache
from math import comb
from typing import Iterable

from . import combinat as cb
from .exactla import ExactMatrix
from .rings import RingSpec

MarginMatrix = cb.MarginMatrix
Word = tuple[int, ...]


# ----------------------------------------------------------------------
# Word combinatorics
# ----------------------------------------------------------------------

def words_of_content(beta: Iterable[int]) -> list[Word]:
    """All words over {1..n} whose letter i appears beta_i times."""
    beta = tuple(beta)

    def gen(remaining: tuple[int, ...], length: int):
        if length == 0:
            yield ()
            return
        for letter, mult in enumerate(remaining, start=1):
            if mult:
                shrunk = remaining[:letter - 1] + (mult - 1,) + remaining[letter:]
                for tail in gen(shrunk, length - 1):
                    yield (letter,) + tail

    return list(gen(beta, sum(beta)))


def content_of_word(w: Word, n: int) -> cb.Composition:
    out = [0] * n
    for letter in w:
        out[letter - 1] += 1
    return tuple(out)


def generator_word(mu: cb.Composition) -> Word:
    """The sorted word 1^{mu_1} 2^{mu_2} ... of content mu."""
    out = []
    for letter, mult in enumerate(mu, start=1):
        out.extend([letter] * mult)
    return tuple(out)


def apply_basis_to_word(a: MarginMatrix, w: Word) -> list[Word]:
    """Expand gamma_a applied to a basis word of (k^n)^{tensor d}.

    Nonzero only when the content of ``w`` equals the column sums of ``a``;
    the result is a list of distinct words, each with coefficient one: for
    every letter j, the positions of j in ``w`` receive the letters of column
    j of ``a`` (with multiplicity) in all distinct arrangements.
    """
    n = len(a)
    row_sums, col_sums = cb.margins(a)
    if content_of_word(w, n) != col_sums:
        return []
    positions = {j: [t for t, letter in enumerate(w) if letter == j] for j in range(1, n + 1)}
    per_column = []
    for j in range(1, n + 1):
        if not positions[j]:
            continue
        col = tuple(a[i][j - 1] for i in range(n))
        fillings = words_of_content(col)  # arrangements of column j's letters
        per_column.append((positions[j], fillings))
    out = []
    for choice in itertools.product(*(f for _, f in per_column)):
        word = [0] * len(w)
        for (pos, _), fill in zip(per_column, choice):
            for t, letter in zip(pos, fill):
                word[t] = letter
        out.append(tuple(word))
    return out


# ----------------------------------------------------------------------
# Structure constants over Z (shared per (n, d))
# ----------------------------------------------------------------------

class ReexpressionError(Exception):
    """A product failed to lie in the span of the basis: internal inconsistency."""


_SC_TABLE: dict[tuple, dict] = {}


def _structure_constants(n: int, d: int, a: MarginMatrix, b: MarginMatrix) -> tuple:
    """Coefficients of gamma_a * gamma_b ("apply a then b") in the basis.

    Returns a tuple of (margin matrix, integer coefficient) pairs, cached per
    (n, d) over Z.  Raises :class:`ReexpressionError` if the expansion on the
    generator word is not constant on basis patterns, which would signal a
    broken basis.
    """
    table = _SC_TABLE.setdefault((n, d), {})
    if (a, b) in table:
        return table[(a, b)]
    out = _structure_constants_compute(n, d, a, b)
    table[(a, b)] = out
    return out


def _structure_constants_compute(n: int, d: int, a: MarginMatrix, b: MarginMatrix) -> tuple:
    rs_a, cs_a = cb.margins(a)
    rs_b, cs_b = cb.margins(b)
    if rs_a != cs_b:
        return ()
    g = generator_word(cs_a)
    acc: Counter = Counter()
    for w in apply_basis_to_word(a, g):
        for w2 in apply_basis_to_word(b, w):
            acc[w2] += 1
    by_pattern: dict[MarginMatrix, dict[Word, int]] = {}
    for w2, coeff in acc.items():
        pattern = tuple(tuple(sum(1 for t in range(d) if w2[t] == i and g[t] == j)
                              for j in range(1, n + 1)) for i in range(1, n + 1))
        by_pattern.setdefault(pattern, {})[w2] = coeff
    out = []
    for pattern, terms in by_pattern.items():
        prs, pcs = cb.margins(pattern)
        if prs != rs_b or pcs != cs_a:
            raise ReexpressionError("product term outside expected weight block")
        expected = len(apply_basis_to_word(pattern, g))
        coeffs = set(terms.values())
        if len(terms) != expected or len(coeffs) != 1:
            raise ReexpressionError("product is not a basis combination")
        out.append((pattern, coeffs.pop()))
    out.sort()
    return tuple(out)


# ----------------------------------------------------------------------
# Algebra elements
# ----------------------------------------------------------------------

class AlgebraElement:
    """A finitely supported combination of basis elements gamma_A."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: "SchurAlgebra", coeffs: dict):
        self.algebra = algebra
        ring = algebra.ring
        self.coeffs = {a: c for a, c in coeffs.items() if not ring.is_zero(c)}

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        ring = self.algebra.ring
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = ring.add(out.get(a, ring.zero()), c)
        return AlgebraElement(self.algebra, out)

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        return f"AlgebraElement({len(self.coeffs)} terms)"

    def scale(self, c) -> "AlgebraElement":
        ring = self.algebra.ring
        return AlgebraElement(self.algebra, {a: ring.mul(c, x) for a, x in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs


class SchurAlgebra:
    """S_k(n, d): basis, multiplication, transpose anti-automorphism."""

    def __init__(self, n: int, d: int, ring: RingSpec):
        if n < 1 or d < 0:
            raise ValueError("need n >= 1 and d >= 0")
        self.n = n
        self.d = d
        self.ring = ring
        self.weights = cb.compositions(n, d)
        self.weight_index = {w: i for i, w in enumerate(self.weights)}
        self._basis: tuple[MarginMatrix, ...] | None = None
        self._basis_index: dict[MarginMatrix, int] | None = None

    @property
    def basis(self) -> tuple[MarginMatrix, ...]:
        """Basis matrices, ordered by (row-sum weight, column-sum weight).

        Enumerated lazily: the full list is only materialized at desk scale.
        """
        if self._basis is None:
            out: list[MarginMatrix] = []
            for lam in self.weights:
                for mu in self.weights:
                    out.extend(cb.margin_matrices(lam, mu))
            self._basis = tuple(out)
            assert len(self._basis) == comb(self.n * self.n + self.d - 1, self.d)
        return self._basis

    @property
    def basis_index(self) -> dict[MarginMatrix, int]:
        if self._basis_index is None:
            self._basis_index = {a: i for i, a in enumerate(self.basis)}
        return self._basis_index

    @property
    def dim(self) -> int:
        return comb(self.n * self.n + self.d - 1, self.d)

    def __repr__(self):
        return f"SchurAlgebra(n={self.n}, d={self.d}, ring={self.ring})"

    # -- elements -------------------------------------------------------

    def element(self, coeffs: dict) -> AlgebraElement:
        return AlgebraElement(self, {a: self.ring.from_int(c) if isinstance(c, int) else c
                                     for a, c in coeffs.items()})

    def gamma(self, a: MarginMatrix) -> AlgebraElement:
        if len(a) != self.n or any(len(r) != self.n for r in a) \
                or sum(x for r in a for x in r) != self.d \
                or any(x < 0 for r in a for x in r):
            raise ValueError("matrix is not a basis index for this algebra")
        return self.element({a: 1})

    def xi(self, mu: cb.Composition) -> AlgebraElement:
        """Weight idempotent: the diagonal basis element of weight mu."""
        return self.gamma(cb.diagonal_matrix(cb.pad(mu, self.n)))

    def unit(self) -> AlgebraElement:
        out = self.element({})
        for mu in self.weights:
            out = out + self.xi(mu)
        return out

    # -- multiplication --------------------------------------------------

    def structure_constants(self, a: MarginMatrix, b: MarginMatrix) -> dict[MarginMatrix, int]:
        """Integer coefficients of gamma_a * gamma_b (apply a, then b)."""
        return dict(_structure_constants(self.n, self.d, a, b))

    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        if x.algebra is not self or y.algebra is not self:
            raise ValueError("elements of a different algebra")
        ring = self.ring
        out: dict = {}
        for a, ca in x.coeffs.items():
            for b, db in y.coeffs.items():
                cab = ring.mul(ca, db)
                if ring.is_zero(cab):
                    continue
                for pattern, coeff in _structure_constants(self.n, self.d, a, b):
                    val = ring.mul(cab, ring.from_int(coeff))
                    out[pattern] = ring.add(out.get(pattern, ring.zero()), val)
        return AlgebraElement(self, out)

    def transpose_anti_automorphism(self, x: AlgebraElement) -> AlgebraElement:
        """gamma_A maps to gamma_{A^T}; reverses products, involutive."""
        return AlgebraElement(self, {cb.transpose_matrix(a): c for a, c in x.coeffs.items()})

    # -- the faithful tensor action ---------------------------------------

    def tensor_words(self) -> list[Word]:
        """Basis words of (k^n)^{tensor d} in row-major order."""
        return [w for w in itertools.product(range(1, self.n + 1), repeat=self.d)]

    def tensor_action(self, a: MarginMatrix) -> ExactMatrix:
        """The n^d x n^d matrix of gamma_a on tensor space (rows = images)."""
        words = self.tensor_words()
        index = {w: i for i, w in enumerate(words)}
        size = len(words)
        ring = self.ring
        zero, one = ring.zero(), ring.one()
        data = [[zero] * size for _ in range(size)]
        for w in words:
            for w2 in apply_basis_to_word(a, w):
                data[index[w]][index[w2]] = ring.add(data[index[w]][index[w2]], one)
        return ExactMatrix(size, size, data, ring)

    def element_tensor_action(self, x: AlgebraElement) -> ExactMatrix:
        size = self.n ** self.d
        out = ExactMatrix.zero(size, size, self.ring)
        for a, c in x.coeffs.items():
            out = out.add(self.tensor_action(a).scale(c))
        return out

    # -- generating sets ---------------------------------------------------

    def reduced_generators(self, divided: bool = True) -> tuple[MarginMatrix, ...]:
        """Diagonal idempotents plus matrices with a single off-diagonal entry.

        With ``divided`` the off-diagonal entry runs over all r >= 1 (the
        divided powers of the elementary moves); with ``divided=False`` only
        r = 1 is used, which generates over Q but not over F_p (the divided
        square of an elementary move is not a product of unit moves in
        characteristic p), so the default keeps the divided powers.
        """
        out = [cb.diagonal_matrix(mu) for mu in self.weights]
        top = self.d if divided else min(self.d, 1)
        for r in range(1, top + 1):
            for i in range(self.n):
                for j in range(self.n):
                    if i == j:
                        continue
                    for diag in cb.compositions(self.n, self.d - r):
                        a = [[diag[p] if p == c else 0 for c in range(self.n)]
                             for p in range(self.n)]
                        a[i][j] += r
                        out.append(tuple(tuple(row) for row in a))
        return tuple(out)

    # -- serialization ------------------------------------------------------

    def dump_json(self) -> dict:
        """Basis and multiplication table, per the external interface."""
        products = []
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                terms = _structure_constants(self.n, self.d, a, b)
                if terms:
                    products.append([i, j, [[self.basis_index[c], str(v)] for c, v in terms]])
        return {
            "n": self.n,
            "d": self.d,
            "basis": [[list(row) for row in a] for a in self.basis],
            "products": products,
        }

    # -- structure constant cache files -----------------------------------

    def basis_hash(self) -> str:
        import hashlib
        text = repr(self.basis).encode()
        return hashlib.sha256(text).hexdigest()

    def export_cache(self) -> dict:
        """Computed structure constants (integer, ring independent)."""
        table = _SC_TABLE.get((self.n, self.d), {})
        idx = self.basis_index
        entries = sorted(
            (idx[a], idx[b], sorted((idx[c], v) for c, v in terms))
            for (a, b), terms in table.items())
        return {"n": self.n, "d": self.d, "basis_hash": self.basis_hash(),
                "products": [[i, j, [[k, v] for k, v in terms]]
                             for i, j, terms in entries]}

    def import_cache(self, doc: dict) -> bool:
        """Prefill the table from a cache document; False on hash mismatch."""
        if doc.get("n") != self.n or doc.get("d") != self.d \
                or doc.get("basis_hash") != self.basis_hash():
            return False
        table = _SC_TABLE.setdefault((self.n, self.d), {})
        basis = self.basis
        for i, j, terms in doc.get("products", []):
            table[(basis[i], basis[j])] = tuple(sorted(
                (basis[k], int(v)) for k, v in terms))
        return True


_ALGEBRAS: dict[tuple, SchurAlgebra] = {}


def schur_algebra(n: int, d: int, ring: RingSpec) -> SchurAlgebra:
    key = (n, d, ring)
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = SchurAlgebra(n, d, ring)
    return _ALGEBRAS[key]
