"""Exact dense linear algebra over Z, Q and F_p.

Provides kernels, images, Smith normal form, lattice arithmetic and quotient
presentations.  Submodules of free modules are represented by canonical
:class:`Lattice` objects: Hermite normal form over Z, reduced row echelon form
over fields, so submodule equality is matrix equality.

Vectors are rows; a linear map acts on the right (``v @ M``), the kernel of
``M`` is ``{x : x @ M == 0}`` and the image is the row space of ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import _np
from .rings import RingSpec, Scalar


class TorsionError(Exception):
    """A quotient expected to be free turned out to have torsion."""


# ----------------------------------------------------------------------
# Matrices
# ----------------------------------------------------------------------

class ExactMatrix:
    """A dense matrix with entries in a fixed session ring."""

    __slots__ = ("rows", "cols", "data", "ring")

    def __init__(self, rows: int, cols: int, data, ring: RingSpec):
        self.rows = rows
        self.cols = cols
        self.data = tuple(tuple(row) for row in data)
        self.ring = ring
        if len(self.data) != rows or any(len(r) != cols for r in self.data):
            raise ValueError("matrix dimensions inconsistent with entries")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_rows(data: Iterable[Iterable[Scalar]], cols: int, ring: RingSpec) -> "ExactMatrix":
        data = [list(map(ring.from_int, r)) if all(isinstance(x, int) for x in r) else list(r)
                for r in data]
        return ExactMatrix(len(data), cols, data, ring)

    @staticmethod
    def identity(n: int, ring: RingSpec) -> "ExactMatrix":
        one, zero = ring.one(), ring.zero()
        return ExactMatrix(n, n, [[one if i == j else zero for j in range(n)] for i in range(n)], ring)

    @staticmethod
    def zero(rows: int, cols: int, ring: RingSpec) -> "ExactMatrix":
        z = ring.zero()
        return ExactMatrix(rows, cols, [[z] * cols for _ in range(rows)], ring)

    # -- basics -----------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, ExactMatrix) and self.ring == other.ring
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data, self.ring))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols} over {self.ring})"

    def row(self, i: int) -> tuple:
        return self.data[i]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
                           self.ring)

    def mul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows or self.ring != other.ring:
            raise ValueError("shape or ring mismatch in matrix product")
        R = self.ring
        if R.kind == "Q":
            out = [[sum((a * b for a, b in zip(row, col)), Fraction(0))
                    for col in zip(*other.data)] for row in self.data]
            return ExactMatrix(self.rows, other.cols, out, R)
        a = _np.as_array(self.data, self.cols)
        b = _np.as_array(other.data, other.cols)
        prod = _np.matmul_modp(a, b, R.p) if R.kind == "Fp" else _np.matmul(a, b)
        return ExactMatrix(self.rows, other.cols, [[int(x) for x in row] for row in prod], R)

    def __matmul__(self, other):
        return self.mul(other)

    def add(self, other: "ExactMatrix") -> "ExactMatrix":
        R = self.ring
        return ExactMatrix(self.rows, self.cols,
                           [[R.add(a, b) for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self.data, other.data)], R)

    def scale(self, c: Scalar) -> "ExactMatrix":
        R = self.ring
        return ExactMatrix(self.rows, self.cols,
                           [[R.mul(c, a) for a in row] for row in self.data], R)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def stack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return ExactMatrix(self.rows + other.rows, self.cols, self.data + other.data, self.ring)

    def augment(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in augment")
        return ExactMatrix(self.rows, self.cols + other.cols,
                           [r1 + r2 for r1, r2 in zip(self.data, other.data)], self.ring)


# ----------------------------------------------------------------------
# Echelon forms, rank, kernels
# ----------------------------------------------------------------------

def canonical_form(m: ExactMatrix) -> ExactMatrix:
    """HNF over Z, RREF over fields; zero rows dropped.  Idempotent."""
    R = m.ring
    if R.kind == "Z":
        H, _, piv = _np.echelon_int(_np.as_array(m.data, m.cols))
        rows = [[int(x) for x in H[i]] for i in range(len(piv))]
        return ExactMatrix(len(rows), m.cols, rows, R)
    if R.kind == "Fp":
        H, _, piv = _np.echelon_modp(_np.as_array(m.data, m.cols), R.p)
        rows = [[int(x) for x in H[i]] for i in range(len(piv))]
        return ExactMatrix(len(rows), m.cols, rows, R)
    rows = _np.rref_normalize_rational(list(m.data))
    return ExactMatrix(len(rows), m.cols, rows, R)


def rank(m: ExactMatrix) -> int:
    R = m.ring
    if R.kind == "Fp":
        return _np.rank_modp(_np.as_array(m.data, m.cols), R.p)
    if R.kind == "Q":
        return _np.rank_int(_np.clear_denominators(m.data)) if m.rows else 0
    return _np.rank_int(_np.as_array(m.data, m.cols))


def kernel_basis(m: ExactMatrix) -> "Lattice":
    """Canonical basis of ``{x : x @ m == 0}``; saturated over Z."""
    R = m.ring
    if m.rows == 0:
        return Lattice(0, ExactMatrix(0, 0, [], R), canonical=True)
    if R.kind == "Fp":
        ker = _np.kernel_modp(_np.as_array(m.data, m.cols), R.p)
        rows = [[int(x) for x in row] for row in ker]
    elif R.kind == "Q":
        rows = _np.kernel_rational(list(m.data), m.cols)
    else:
        ker = _np.kernel_int(_np.as_array(m.data, m.cols))
        rows = [[int(x) for x in row] for row in ker]
    return Lattice(m.rows, ExactMatrix(len(rows), m.rows, rows, R), canonical=True)


def solve_left(m: ExactMatrix, v: list) -> Optional[list]:
    """One solution ``x`` of ``x @ m == v``, or None.  Exact over the ring."""
    R = m.ring
    if m.rows == 0:
        return [] if all(x == 0 for x in v) else None
    if R.kind == "Z":
        H, U, piv = _np.echelon_int(_np.as_array(m.data, m.cols), transform=True)
        w = [int(x) for x in v]
        coeffs = [0] * m.rows
        for k, j in enumerate(piv):
            pivval = int(H[k, j])
            if w[j] % pivval:
                return None
            q = w[j] // pivval
            if q:
                w = [a - q * int(b) for a, b in zip(w, H[k])]
                coeffs = [c + q * int(u) for c, u in zip(coeffs, U[k])]
        return coeffs if all(x == 0 for x in w) else None
    if R.kind == "Fp":
        p = R.p
        H, U, piv = _np.echelon_modp(_np.as_array(m.data, m.cols), p, transform=True)
        w = [int(x) % p for x in v]
        coeffs = [0] * m.rows
        for k, j in enumerate(piv):
            q = w[j]  # pivot normalized to 1
            if q:
                w = [(a - q * int(b)) % p for a, b in zip(w, H[k])]
                coeffs = [(c + q * int(u)) % p for c, u in zip(coeffs, U[k])]
        return coeffs if all(x == 0 for x in w) else None
    # Q: RREF with bookkeeping done in Fractions.
    work = [[Fraction(x) for x in row] for row in m.data]
    n = m.cols
    track = [[Fraction(int(i == j)) for j in range(m.rows)] for i in range(m.rows)]
    r = 0
    piv_cols = []
    for j in range(n):
        if r >= len(work):
            break
        pr = next((i for i in range(r, len(work)) if work[i][j] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        track[r], track[pr] = track[pr], track[r]
        pv = work[r][j]
        work[r] = [x / pv for x in work[r]]
        track[r] = [x / pv for x in track[r]]
        for i in range(len(work)):
            if i != r and work[i][j] != 0:
                c = work[i][j]
                work[i] = [x - c * y for x, y in zip(work[i], work[r])]
                track[i] = [x - c * y for x, y in zip(track[i], track[r])]
        piv_cols.append(j)
        r += 1
    w = [Fraction(x) for x in v]
    coeffs = [Fraction(0)] * m.rows
    for k, j in enumerate(piv_cols):
        q = w[j]
        if q:
            w = [a - q * b for a, b in zip(w, work[k])]
            coeffs = [c + q * t for c, t in zip(coeffs, track[k])]
    return coeffs if all(x == 0 for x in w) else None


def det(m: ExactMatrix) -> Scalar:
    """Determinant by exact fraction-free elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return m.ring.one()
    R = m.ring
    a = [[Fraction(x) if R.kind == "Q" else int(x) for x in row] for row in m.data]
    if R.kind == "Q":
        sign = 1
        detval = Fraction(1)
        for j in range(n):
            pr = next((i for i in range(j, n) if a[i][j] != 0), None)
            if pr is None:
                return Fraction(0)
            if pr != j:
                a[j], a[pr] = a[pr], a[j]
                sign = -sign
            detval *= a[j][j]
            pv = a[j][j]
            for i in range(j + 1, n):
                if a[i][j]:
                    c = a[i][j] / pv
                    a[i] = [x - c * y for x, y in zip(a[i], a[j])]
        return sign * detval
    # Bareiss over Z; reduce mod p at the end for Fp.
    sign = 1
    prev = 1
    for j in range(n - 1):
        pr = next((i for i in range(j, n) if a[i][j] != 0), None)
        if pr is None:
            return R.from_int(0)
        if pr != j:
            a[j], a[pr] = a[pr], a[j]
            sign = -sign
        for i in range(j + 1, n):
            a[i] = [(a[i][k] * a[j][j] - a[i][j] * a[j][k]) // prev for k in range(n)]
        prev = a[j][j]
    return R.from_int(sign * a[n - 1][n - 1])


# ----------------------------------------------------------------------
# Smith normal form
# ----------------------------------------------------------------------

def snf(m: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Smith normal form ``U @ m @ V == S`` with U, V invertible over the ring.

    Over Z the diagonal entries are nonnegative and divide successively; over a
    field they are 1.  Valid for Z and fields (the session rings are PIDs).
    """
    R = m.ring
    rows, cols = m.rows, m.cols
    a = [[int(x) if R.kind != "Q" else Fraction(x) for x in row] for row in m.data]
    U = [[R.from_int(int(i == j)) for j in range(rows)] for i in range(rows)]
    V = [[R.from_int(int(i == j)) for j in range(cols)] for i in range(cols)]

    def row_op(i, k, c):  # row_i += c * row_k
        a[i] = [R.add(x, R.mul(c, y)) for x, y in zip(a[i], a[k])]
        U[i] = [R.add(x, R.mul(c, y)) for x, y in zip(U[i], U[k])]

    def col_op(j, k, c):  # col_j += c * col_k
        for rr in a:
            rr[j] = R.add(rr[j], R.mul(c, rr[k]))
        for rr in V:
            rr[j] = R.add(rr[j], R.mul(c, rr[k]))

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def col_swap(j, k):
        for rr in a:
            rr[j], rr[k] = rr[k], rr[j]
        for rr in V:
            rr[j], rr[k] = rr[k], rr[j]

    t = 0
    while True:
        found = [(i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j] != 0]
        if not found:
            break
        if R.kind == "Z":
            i0, j0 = min(found, key=lambda ij: abs(a[ij[0]][ij[1]]))
        else:
            i0, j0 = found[0]
        row_swap(t, i0)
        col_swap(t, j0)
        while True:
            piv = a[t][t]
            done = True
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    if R.kind == "Z":
                        q = a[i][t] // piv
                        row_op(i, t, -q)
                        if a[i][t] != 0:  # remainder smaller than pivot: swap up
                            row_swap(t, i)
                            done = False
                    else:
                        row_op(i, t, R.neg(R.div(a[i][t], piv)))
            piv = a[t][t]
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    if R.kind == "Z":
                        q = a[t][j] // piv
                        col_op(j, t, -q)
                        if a[t][j] != 0:
                            col_swap(t, j)
                            done = False
                    else:
                        col_op(j, t, R.neg(R.div(a[t][j], piv)))
            if done and all(a[i][t] == 0 for i in range(t + 1, rows)) \
                    and all(a[t][j] == 0 for j in range(t + 1, cols)):
                break
        if R.kind == "Z" and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        if R.is_field and a[t][t] != 0 and a[t][t] != R.one():
            c = R.inv(a[t][t])
            a[t] = [R.mul(c, x) for x in a[t]]
            U[t] = [R.mul(c, x) for x in U[t]]
        t += 1
        if t >= min(rows, cols):
            break

    if R.kind == "Z":
        # Enforce the divisibility chain d_t | d_{t+1}.
        k = min(rows, cols)
        changed = True
        while changed:
            changed = False
            for i in range(k - 1):
                x, y = a[i][i], a[i + 1][i + 1]
                if y and x and y % x != 0:
                    # gcd/lcm trick: col_i += col_{i+1}, then re-clear the 2x2 block.
                    col_op(i, i + 1, 1)
                    while a[i + 1][i] != 0:
                        q = a[i][i] // a[i + 1][i] if a[i + 1][i] != 0 else 0
                        if abs(a[i + 1][i]) <= abs(a[i][i]):
                            row_swap(i, i + 1)
                        if a[i + 1][i] != 0:
                            q = a[i + 1][i] // a[i][i]
                            row_op(i + 1, i, -q)
                    # clear fill-in above/right
                    if a[i][i + 1] != 0:
                        q = a[i][i + 1] // a[i][i]
                        col_op(i + 1, i, -q)
                        if a[i][i + 1] != 0:
                            col_swap(i, i + 1)
                            row_swap(i, i + 1)
                    if a[i][i] < 0:
                        a[i] = [-x for x in a[i]]
                        U[i] = [-x for x in U[i]]
                    if a[i + 1][i + 1] < 0:
                        a[i + 1] = [-x for x in a[i + 1]]
                        U[i + 1] = [-x for x in U[i + 1]]
                    changed = True

    S = ExactMatrix(rows, cols, a, R)
    Um = ExactMatrix(rows, rows, U, R)
    Vm = ExactMatrix(cols, cols, V, R)
    return S, Um, Vm


# ----------------------------------------------------------------------
# Lattices (canonical submodule representatives)
# ----------------------------------------------------------------------

class Lattice:
    """A submodule of a free module, held by a canonical basis matrix.

    Over Z the basis is in Hermite normal form, over fields in reduced row
    echelon form; two lattices are equal iff their basis matrices are equal.
    """

    __slots__ = ("ambient_rank", "basis")

    def __init__(self, ambient_rank: int, basis: ExactMatrix, *, canonical: bool = False):
        if basis.cols != ambient_rank:
            raise ValueError("basis width must equal ambient rank")
        self.ambient_rank = ambient_rank
        self.basis = basis if canonical else canonical_form(basis)

    @staticmethod
    def from_vectors(ambient_rank: int, vectors: Iterable[Iterable[Scalar]], ring: RingSpec) -> "Lattice":
        vecs = [list(v) for v in vectors]
        return Lattice(ambient_rank, ExactMatrix(len(vecs), ambient_rank, vecs, ring))

    @staticmethod
    def zero(ambient_rank: int, ring: RingSpec) -> "Lattice":
        return Lattice(ambient_rank, ExactMatrix(0, ambient_rank, [], ring), canonical=True)

    @staticmethod
    def full(ambient_rank: int, ring: RingSpec) -> "Lattice":
        return Lattice(ambient_rank, ExactMatrix.identity(ambient_rank, ring), canonical=True)

    @property
    def rank(self) -> int:
        return self.basis.rows

    @property
    def ring(self) -> RingSpec:
        return self.basis.ring

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.ambient_rank == other.ambient_rank
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_rank, self.basis))

    def __repr__(self):
        return f"Lattice(rank {self.rank} in ambient {self.ambient_rank} over {self.ring})"


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    if a.ambient_rank != b.ambient_rank:
        raise ValueError("ambient rank mismatch")
    return Lattice(a.ambient_rank, a.basis.stack(b.basis))


def lattice_membership(v: Iterable[Scalar], lat: Lattice) -> bool:
    return solve_left(lat.basis, list(v)) is not None


def lattice_contains(outer: Lattice, inner: Lattice) -> bool:
    return all(lattice_membership(row, outer) for row in inner.basis.data)


def lattice_intersection(a: Lattice, b: Lattice) -> Lattice:
    """Intersection, via the kernel of the stacked relation matrix."""
    if a.ambient_rank != b.ambient_rank:
        raise ValueError("ambient rank mismatch")
    if a.rank == 0 or b.rank == 0:
        return Lattice.zero(a.ambient_rank, a.ring)
    stacked = a.basis.stack(b.basis)
    ker = kernel_basis(stacked)  # rows (u | v) with u@A + v@B = 0
    rows = []
    for row in ker.basis.data:
        u = row[:a.rank]
        vec = [sum((a.ring.mul(u[i], a.basis.data[i][j]) for i in range(a.rank)),
                   a.ring.zero()) for j in range(a.ambient_rank)]
        rows.append(vec)
    return Lattice.from_vectors(a.ambient_rank, rows, a.ring)


# ----------------------------------------------------------------------
# Quotient presentations
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FGModulePresentation:
    """A finitely generated module over the session ring: free part + torsion."""

    free_rank: int
    invariant_factors: tuple = ()

    @property
    def is_free(self) -> bool:
        return not self.invariant_factors

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def describe(self, ring: RingSpec) -> str:
        parts = []
        if self.free_rank:
            base = str(ring)
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        parts.extend(f"Z/{f}" for f in self.invariant_factors)
        return " + ".join(parts) if parts else "0"


def quotient_presentation(ambient_rank: int, sub: Lattice) -> FGModulePresentation:
    """Invariant factors of (free module of rank ``ambient_rank``) / sub."""
    if sub.ambient_rank != ambient_rank:
        raise ValueError("ambient rank mismatch")
    if sub.rank == 0:
        return FGModulePresentation(ambient_rank)
    if sub.ring.is_field:
        return FGModulePresentation(ambient_rank - sub.rank)
    S, _, _ = snf(sub.basis)
    diag = [int(S.data[i][i]) for i in range(min(S.rows, S.cols)) if S.data[i][i] != 0]
    factors = tuple(x for x in diag if x != 1)
    return FGModulePresentation(ambient_rank - len(diag), factors)


def quotient_split(ambient_rank: int, sub: Lattice) -> tuple[ExactMatrix, ExactMatrix]:
    """Projection and section for a free quotient ambient/sub.

    Returns ``(proj, sect)`` with proj of shape ambient x q, sect of shape
    q x ambient, ``sect @ proj == I_q``, and ``row @ proj == 0`` exactly for
    rows of the sublattice.  Raises :class:`TorsionError` if the quotient is
    not free (Z case with nonunit invariant factors).
    """
    R = sub.ring
    r = sub.rank
    q = ambient_rank - r
    if r == 0:
        return ExactMatrix.identity(ambient_rank, R), ExactMatrix.identity(ambient_rank, R)
    S, U, V = snf(sub.basis)
    for i in range(r):
        if not R.is_unit(S.data[i][i]):
            raise TorsionError(f"quotient has torsion: invariant factor {S.data[i][i]}")
    # In coordinates y = x @ V the sublattice is spanned by the first r
    # coordinate rows, so the quotient coordinates are the last q entries.
    proj = ExactMatrix(ambient_rank, q, [row[r:] for row in V.data], R)
    Vinv = invert(V)
    sect = ExactMatrix(q, ambient_rank, [Vinv.data[r + i] for i in range(q)], R)
    return proj, sect


def invert(m: ExactMatrix) -> ExactMatrix:
    """Inverse of a matrix invertible over the session ring."""
    if m.rows != m.cols:
        raise ValueError("only square matrices invert")
    R = m.ring
    n = m.rows
    if n == 0:
        return m
    if R.kind == "Z":
        H, U, piv = _np.echelon_int(_np.as_array(m.data, n), transform=True)
        if len(piv) != n or any(int(H[i, i]) != 1 for i in range(n)):
            raise ValueError("matrix is not invertible over Z")
        return ExactMatrix(n, n, [[int(x) for x in row] for row in U], R)
    sol = [solve_left(m, [R.from_int(int(i == j)) for j in range(n)]) for i in range(n)]
    if any(s is None for s in sol):
        raise ValueError("matrix is not invertible")
    return ExactMatrix(n, n, sol, R)
