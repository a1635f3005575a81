"""Weyl modules, Schur modules, standard and costandard objects, simple heads.

The Weyl module W_lam(k^n) is the image of the composite through tensor space
(divided powers comultiplied, factors permuted, wedged); the standard object
Delta(lam) is the quotient of Gamma^lam by the traces from all partitions not
below lam in the dominance order.  Both are built here, together with the
canonical map identifying them, the explicit projective presentation of the
Weyl module, the costandard subobject of S^lam, and the simple head over a
field.

The rank oracle is the hook content formula, which shares no code with the
tableau enumeration; both must agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import combinat as cb
from . import exactla as la
from . import morphisms as mor
from . import polyfun as pf
from .rings import RingSpec


def hook_content_rank(lam, n: int) -> int:
    """Product over boxes of (n + j - i) / hook(i, j); 0 if lam has > n rows."""
    lam = cb.normalize_partition(lam)
    if len(lam) > n:
        return 0
    out = Fraction(1)
    for i, j in cb.boxes(lam):
        out *= Fraction(n + j - i, cb.hook_length(lam, i, j))
    assert out.denominator == 1
    return int(out)


def semistandard_tableaux(lam, n: int) -> list[cb.Filling]:
    """All SSYT of shape lam with entries in {1..n}, any content."""
    lam = cb.normalize_partition(lam)
    out = []
    for mu in cb.compositions(n, cb.weight(lam)):
        out.extend(cb.tableaux(lam, mu))
    return out


# ----------------------------------------------------------------------
# Weyl and Schur modules (image constructions)
# ----------------------------------------------------------------------

@dataclass
class WeylConstruction:
    lam: cb.Partition
    n: int
    module: pf.PolyModule          # image submodule of Lambda^{lam'}
    cover: pf.ModuleMap            # Gamma^lam -> module
    tableau_basis: list[cb.Filling]

    @property
    def rank(self) -> int:
        return self.module.rank


def weyl(lam, n: int, ring: RingSpec) -> WeylConstruction:
    """The Weyl module as the image of Gamma^lam in Lambda^{lam'}."""
    lam = cb.normalize_partition(lam)
    f = mor.weyl_map(lam, n, ring)
    image = f.image_lattice()
    module = pf.sub_module(f.target, image, name=f"W_{lam}")
    cover = pf.corestrict(f, module)
    ssyt = semistandard_tableaux(lam, n)
    if module.rank != hook_content_rank(lam, n) or module.rank != len(ssyt):
        raise AssertionError(f"Weyl rank mismatch for {lam}, n={n}")
    return WeylConstruction(lam, n, module, cover, ssyt)


def tableau_vectors(construction: WeylConstruction) -> list[tuple]:
    """The images of the row fillings v_T, T semistandard (a basis)."""
    out = []
    src = construction.cover.source
    for t in construction.tableau_basis:
        label = t.row_contents(construction.n)
        idx = src.label_index[label]
        w, vec = src.basis_vector(idx)
        out.append((w, construction.cover.apply_to(w, vec)))
    return out


def schur_module(lam, n: int, ring: RingSpec) -> pf.PolyModule:
    """The Schur module as the image of Lambda^{lam'} in S^lam."""
    lam = cb.normalize_partition(lam)
    f = mor.schur_map(lam, n, ring)
    image = f.image_lattice()
    module = pf.sub_module(f.target, image, name=f"S_{lam}")
    if module.rank != hook_content_rank(lam, n):
        raise AssertionError(f"Schur rank mismatch for {lam}, n={n}")
    return module


def schur_tableau_vectors(lam, n: int, ring: RingSpec) -> list[tuple]:
    """Images in S_lam of the column wedges of semistandard tableaux."""
    lam = cb.normalize_partition(lam)
    f = mor.schur_map(lam, n, ring)
    out = []
    for t in semistandard_tableaux(lam, n):
        cols = [tuple(t.rows[i][j] for i in range(len(t.rows)) if len(t.rows[i]) > j)
                for j in range(lam[0] if lam else 0)]
        label = tuple(mor._indicator(c, n) for c in cols)
        idx = f.source.label_index[label]
        w, vec = f.source.basis_vector(idx)
        out.append((w, f.apply_to(w, vec)))
    return out


# ----------------------------------------------------------------------
# Standard objects
# ----------------------------------------------------------------------

@dataclass
class StandardObject:
    lam: cb.Partition
    quotient: pf.PolyModule        # Gamma^lam / U(lam)
    U: pf.GradedLattice
    canonical_epi: pf.ModuleMap    # Gamma^lam -> quotient


def standard_kernel(lam, n: int, ring: RingSpec) -> pf.GradedLattice:
    """U(lam): the sum of traces from all partitions mu with mu not <= lam."""
    lam = cb.normalize_partition(lam)
    gamma_mod = pf.eval_divided(lam, n, ring)
    u = pf.GradedLattice.zero(gamma_mod)
    for mu in cb.partitions(cb.weight(lam)):
        if cb.dominance_leq(mu, lam) or len(mu) > n:
            continue
        u = u.sum(pf.trace(mu, gamma_mod))
    return u


_STANDARD_CACHE: dict = {}


def standard_object(lam, n: int, ring: RingSpec) -> StandardObject:
    """Delta(lam) as the trace quotient of Gamma^lam.

    Over Z a torsion quotient raises (the theory guarantees freeness; torsion
    would mean an implementation bug).
    """
    lam = cb.normalize_partition(lam)
    key = (lam, n, ring)
    if key not in _STANDARD_CACHE:
        gamma_mod = pf.eval_divided(lam, n, ring)
        u = standard_kernel(lam, n, ring)
        quot = pf.quotient_module(gamma_mod, u, name=f"Delta_{lam}")
        _STANDARD_CACHE[key] = StandardObject(lam, quot, u,
                                              pf.quotient_map(gamma_mod, quot))
    return _STANDARD_CACHE[key]


def canonical_delta_to_weyl(delta: StandardObject, w: WeylConstruction) -> pf.ModuleMap:
    """The map Delta(lam) -> W_lam induced by the cover of the Weyl module.

    Raises if the cover does not kill U(lam); the caller checks it is an iso.
    """
    return pf.descend(w.cover, delta.quotient)


# ----------------------------------------------------------------------
# The explicit projective presentation
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PresentationData:
    lam: cb.Partition
    relations: tuple  # ((lam(i,t) composition, margin matrix A), ...)


def presentation(lam) -> PresentationData:
    """Relations of the presentation of the Weyl module by divided powers."""
    lam = cb.normalize_partition(lam)
    ell = len(lam)
    rels = []
    for i in range(1, ell):  # 1-based row index; lam_{i+1} = lam[i]
        for t in range(1, lam[i] + 1):
            shifted = list(lam)
            shifted[i - 1] = lam[i - 1] + t
            shifted[i] = lam[i] - t
            a = [[lam[r] if r == c else 0 for c in range(ell)] for r in range(ell)]
            a[i][i - 1] += t
            a[i][i] -= t
            rels.append((tuple(shifted), tuple(tuple(r) for r in a)))
    return PresentationData(lam, tuple(rels))


def realize_presentation(lam, n: int, ring: RingSpec):
    """(P1, P0, alpha) with alpha : P1 -> P0 the sum of the standard morphisms.

    P0 is Gamma^lam and P1 the direct sum of the Gamma^{lam(i,t)}; the
    cokernel of alpha is the Weyl module / standard object.
    """
    pres = presentation(lam)
    p0 = pf.eval_divided(pres.lam, n, ring)
    if not pres.relations:
        p1 = pf.eval_divided((cb.weight(pres.lam),) if cb.weight(pres.lam) else (0,), n, ring)
        empty = pf.ModuleMap.zero(p1, p0)
        return p1, p0, empty, pres
    parts = []
    maps = []
    for shifted, a in pres.relations:
        g = mor.standard_morphism_gamma(a, n, ring)
        parts.append(g.source)
        maps.append(g)
    p1 = pf.direct_sum(parts)
    alpha = pf.dsum_map(maps, p1, p0)
    return p1, p0, alpha, pres


# ----------------------------------------------------------------------
# Costandard objects
# ----------------------------------------------------------------------

def costandard_object(lam, n: int, ring: RingSpec) -> pf.PolyModule:
    """nabla(lam): the intersection of the rejects inside S^lam."""
    lam = cb.normalize_partition(lam)
    s_mod = pf.eval_symmetric(lam, n, ring)
    lattice = pf.GradedLattice.full(s_mod)
    for mu in cb.partitions(cb.weight(lam)):
        if cb.dominance_leq(mu, lam) or len(mu) > n:
            continue
        lattice = lattice.intersect(pf.reject(mu, s_mod))
    return pf.sub_module(s_mod, lattice, name=f"nabla_{lam}")


# ----------------------------------------------------------------------
# Simple heads (fields only)
# ----------------------------------------------------------------------

def canonical_delta_to_nabla(lam, n: int, ring: RingSpec) -> pf.ModuleMap:
    """The canonical map Delta(lam) -> nabla(lam) (Hom is free of rank one)."""
    lam = cb.normalize_partition(lam)
    delta = standard_object(lam, n, ring)
    nabla = costandard_object(lam, n, ring)
    maps = pf.hom_space(delta.quotient, nabla)
    if len(maps) != 1:
        raise AssertionError(f"Hom(Delta, nabla) not of rank one for {lam}")
    return maps[0]


def simple_head(lam, n: int, ring: RingSpec) -> pf.PolyModule:
    """L(lam): the quotient of Delta(lam) by its radical.

    The radical is the kernel of the canonical map Delta(lam) -> nabla(lam)
    (nonzero, unique up to a scalar); over a field this is the unique maximal
    subobject.  The brute-force radical oracle in the test suite checks this
    against the sum of all proper weight-vector-generated submodules.
    """
    if not ring.is_field:
        raise ValueError("simple heads are computed over fields only")
    lam = cb.normalize_partition(lam)
    c = canonical_delta_to_nabla(lam, n, ring)
    rad = c.kernel_lattice()
    return pf.quotient_module(c.source, rad, name=f"L_{lam}")


def brute_force_radical(x: pf.PolyModule) -> pf.GradedLattice:
    """The sum of all proper submodules generated by a single weight vector.

    Exhaustive over F_p; over a field this equals the radical when x has a
    unique maximal subobject.  Oracle use only (exponential in block sizes).
    """
    ring = x.ring
    if ring.kind != "Fp":
        raise ValueError("the brute-force radical enumerates F_p vectors")
    import itertools as it
    rad = pf.GradedLattice.zero(x)
    for w, rng in x.blocks.items():
        dim = len(rng)
        for coeffs in it.product(range(ring.p), repeat=dim):
            if not any(coeffs):
                continue
            lat = pf.submodule_generated(x, [(w, coeffs)])
            if lat.rank != x.rank:
                rad = rad.sum(lat)
    return rad


def is_simple_brute_force(x: pf.PolyModule) -> bool:
    """No proper nonzero submodule generated by a single weight vector.

    Exhaustive over F_p (all nonzero weight vectors); over Q this checks the
    weight-space basis vectors and their small integer combinations.
    """
    ring = x.ring
    if x.rank == 0:
        return False
    candidates = []
    for w, rng in x.blocks.items():
        dim = len(rng)
        if ring.kind == "Fp":
            import itertools as it
            for coeffs in it.product(range(ring.p), repeat=dim):
                if any(coeffs):
                    candidates.append((w, coeffs))
        else:
            import itertools as it
            for coeffs in it.product((-1, 0, 1), repeat=dim):
                if any(coeffs):
                    candidates.append((w, coeffs))
    for w, coeffs in candidates:
        lat = pf.submodule_generated(x, [(w, coeffs)])
        if lat.rank != x.rank:
            return False
    return True
