"""Standard morphisms and the structural maps between power modules.

A nonnegative integer matrix A with row sums lam and column sums mu yields

* ``standard_morphism_gamma(A, ...)``: Gamma^mu -> Gamma^lam, the composite of
  comultiplication inclusions and divided power products (these form the
  Totaro basis of the Hom space);
* ``standard_morphism_sigma(A, ...)``: Gamma^mu -> S^lam, through tensor
  powers, with word-counting multinomial coefficients;
* ``exterior_standard_morphism(A, ...)``: Lambda^mu -> Lambda^lam, the
  exterior analogue with the sign normalization of the wedge basis (the
  regrouping of factors carries no extra sign; this gauge is validated by the
  functoriality and dimension checks in the Ringel module).

Also here: comultiplications into tensor space, multiplications onto
symmetric/exterior powers, the place permutation of a partition, and the
composite maps whose images are the Weyl and Schur modules.
"""

from __future__ import annotations

import itertools

from . import combinat as cb
from . import polyfun as pf
from .rings import RingSpec
from .schuralg import words_of_content


def _split_set(indicator, sizes):
    """Ordered splittings of a subset (as 0/1 vector) into parts of given sizes,
    with the unshuffle sign of each splitting."""
    out = []
    for pieces in pf._split_vector(tuple(indicator), tuple(sizes)):
        seq = []
        for piece in pieces:
            seq.extend(j + 1 for j, x in enumerate(piece) if x)
        sign, _ = pf._sort_sign(seq)
        out.append((sign, pieces))
    return out


def _elements(indicator):
    return [j + 1 for j, x in enumerate(indicator) if x]


def _indicator(elements, n):
    out = [0] * n
    for e in elements:
        out[e - 1] = 1
    return tuple(out)


# ----------------------------------------------------------------------
# Standard morphisms (label-level images, then ModuleMap builders)
# ----------------------------------------------------------------------

def gamma_image_of_label(a: cb.MarginMatrix, label, n: int):
    """Image of the Gamma^mu basis label under gamma_A, as (coeff, label) pairs.

    Usable pointwise: no module is materialized, so this also evaluates the
    large displayed examples.
    """
    lam, mu = cb.margins(a)
    rows_l, cols_m = len(lam), len(mu)
    per_j = []
    for j in range(cols_m):
        sizes = tuple(a[i][j] for i in range(rows_l))
        per_j.append(pf._split_vector(label[j], sizes))
    out = []
    for combo in itertools.product(*per_j):
        coeff = 1
        target = []
        for i in range(rows_l):
            pieces = [combo[j][i] for j in range(cols_m)]
            total = tuple(sum(p[t] for p in pieces) for t in range(n))
            for t in range(n):
                if total[t]:
                    coeff *= pf.multinomial(total[t], tuple(p[t] for p in pieces))
            target.append(total)
        out.append((coeff, tuple(target)))
    return out


def sigma_image_of_label(a: cb.MarginMatrix, label, n: int):
    """Image of the Gamma^mu basis label under sigma_A (target S^lam)."""
    lam, mu = cb.margins(a)
    rows_l, cols_m = len(lam), len(mu)
    per_j = []
    for j in range(cols_m):
        sizes = tuple(a[i][j] for i in range(rows_l))
        per_j.append(pf._split_vector(label[j], sizes))
    out = []
    for combo in itertools.product(*per_j):
        coeff = 1
        target = []
        for i in range(rows_l):
            pieces = [combo[j][i] for j in range(cols_m)]
            for j in range(cols_m):
                if a[i][j]:
                    coeff *= pf.multinomial(a[i][j], pieces[j])
            target.append(tuple(sum(p[t] for p in pieces) for t in range(n)))
        out.append((coeff, tuple(target)))
    return out


def regroup_koszul_sign(a: cb.MarginMatrix) -> int:
    """Sign of regrouping the (i, j)-indexed exterior factors from column-major
    to row-major order: factors of degrees a_{ij} and a_{i'j'} cross exactly
    when i > i' and j < j'.  This gauge makes the assignment functorial."""
    sign = 0
    rows = len(a)
    cols = len(a[0]) if a else 0
    for i in range(rows):
        for j in range(cols):
            if not a[i][j]:
                continue
            for i2 in range(i):
                for j2 in range(j + 1, cols):
                    sign += a[i][j] * a[i2][j2]
    return -1 if sign % 2 else 1


def exterior_image_of_label(a: cb.MarginMatrix, label, n: int):
    """Image of the Lambda^mu wedge label under the exterior analogue of gamma_A."""
    lam, mu = cb.margins(a)
    gauge = regroup_koszul_sign(a)
    rows_l, cols_m = len(lam), len(mu)
    per_j = []
    for j in range(cols_m):
        sizes = tuple(a[i][j] for i in range(rows_l))
        per_j.append(_split_set(label[j], sizes))
    out = []
    for combo in itertools.product(*per_j):
        coeff = gauge
        target = []
        dead = False
        for sign, _ in combo:
            coeff *= sign
        for i in range(rows_l):
            seq = []
            for j in range(cols_m):
                seq.extend(_elements(combo[j][1][i]))
            sgn, merged = pf._sort_sign(seq)
            if sgn == 0:
                dead = True
                break
            coeff *= sgn
            target.append(_indicator(merged, n))
        if not dead:
            out.append((coeff, tuple(target)))
    return out


def standard_morphism_gamma(a: cb.MarginMatrix, n: int, ring: RingSpec) -> pf.ModuleMap:
    """gamma_A : Gamma^mu -> Gamma^lam for A with row sums lam, column sums mu."""
    lam, mu = cb.margins(a)
    src = pf.eval_divided(mu, n, ring)
    tgt = pf.eval_divided(lam, n, ring)
    return pf.map_from_label_images(src, tgt, lambda lab: gamma_image_of_label(a, lab, n))


def standard_morphism_sigma(a: cb.MarginMatrix, n: int, ring: RingSpec) -> pf.ModuleMap:
    """sigma_A : Gamma^mu -> S^lam through tensor powers."""
    lam, mu = cb.margins(a)
    src = pf.eval_divided(mu, n, ring)
    tgt = pf.eval_symmetric(lam, n, ring)
    return pf.map_from_label_images(src, tgt, lambda lab: sigma_image_of_label(a, lab, n))


def exterior_standard_morphism(a: cb.MarginMatrix, n: int, ring: RingSpec) -> pf.ModuleMap:
    """The exterior analogue Lambda^mu -> Lambda^lam of gamma_A."""
    lam, mu = cb.margins(a)
    src = pf.eval_exterior(mu, n, ring)
    tgt = pf.eval_exterior(lam, n, ring)
    return pf.map_from_label_images(src, tgt, lambda lab: exterior_image_of_label(a, lab, n))


# ----------------------------------------------------------------------
# Structural maps through tensor space
# ----------------------------------------------------------------------

def word_label(word) -> tuple:
    """The label of a word in the tensor power module."""
    raise NotImplementedError  # bound below once n is known


def _label_to_word(label) -> tuple[int, ...]:
    return tuple(row.index(1) + 1 for row in label)


def _word_to_label(word, n) -> tuple:
    return tuple(tuple(1 if j == letter - 1 else 0 for j in range(n)) for letter in word)


def comult_gamma(r: int, n: int, ring: RingSpec) -> pf.ModuleMap:
    """Gamma^r -> tensor^r: a divided monomial to the sum of its words."""
    src = pf.eval_divided((r,), n, ring)
    tgt = pf.eval_tensor(r, n, ring)

    def image(label):
        return [(1, _word_to_label(w, n)) for w in words_of_content(label[0])]

    return pf.map_from_label_images(src, tgt, image)


def comult_ext(r: int, n: int, ring: RingSpec) -> pf.ModuleMap:
    """Lambda^r -> tensor^r: signed sum over all orderings of the wedge."""
    src = pf.eval_exterior((r,), n, ring)
    tgt = pf.eval_tensor(r, n, ring)

    def image(label):
        elems = _elements(label[0])
        out = []
        for perm in itertools.permutations(elems):
            sign, _ = pf._sort_sign(perm)
            out.append((sign, _word_to_label(perm, n)))
        return out

    return pf.map_from_label_images(src, tgt, image)


def mult_sym(r: int, n: int, ring: RingSpec) -> pf.ModuleMap:
    """tensor^r -> S^r: a word to its monomial."""
    src = pf.eval_tensor(r, n, ring)
    tgt = pf.eval_symmetric((r,), n, ring)

    def image(label):
        word = _label_to_word(label)
        content = tuple(sum(1 for x in word if x == j + 1) for j in range(n))
        return [(1, (content,))]

    return pf.map_from_label_images(src, tgt, image)


def mult_ext(r: int, n: int, ring: RingSpec) -> pf.ModuleMap:
    """tensor^r -> Lambda^r: sort with sign, zero on repeated letters."""
    src = pf.eval_tensor(r, n, ring)
    tgt = pf.eval_exterior((r,), n, ring)

    def image(label):
        word = _label_to_word(label)
        sign, merged = pf._sort_sign(word)
        if sign == 0:
            return []
        return [(sign, (_indicator(merged, n),))]

    return pf.map_from_label_images(src, tgt, image)


def s_perm(lam, n: int, ring: RingSpec) -> pf.ModuleMap:
    """The place permutation of tensor factors attached to a partition."""
    lam = cb.normalize_partition(lam)
    d = cb.weight(lam)
    sigma = cb.sigma_perm(lam)
    mod = pf.eval_tensor(d, n, ring)

    def image(label):
        word = _label_to_word(label)
        permuted = tuple(word[sigma[t] - 1] for t in range(d))
        return [(1, _word_to_label(permuted, n))]

    return pf.map_from_label_images(mod, mod, image)


# ----------------------------------------------------------------------
# Weyl / Schur composite maps
# ----------------------------------------------------------------------

def weyl_map(lam, n: int, ring: RingSpec) -> pf.ModuleMap:
    """Gamma^lam -> Lambda^{lam'}: comultiply, permute by sigma_{lam'}, wedge."""
    lam = cb.normalize_partition(lam)
    lamc = cb.conjugate(lam)
    d = cb.weight(lam)
    sigma = cb.sigma_perm(lamc)
    src = pf.eval_divided(lam, n, ring)
    tgt = pf.eval_exterior(lamc, n, ring)

    def image(label):
        out = []
        for words in itertools.product(*[words_of_content(row) for row in label]):
            flat = tuple(itertools.chain.from_iterable(words))
            permuted = tuple(flat[sigma[t] - 1] for t in range(d))
            coeff = 1
            target = []
            pos = 0
            dead = False
            for size in lamc:
                blockword = permuted[pos:pos + size]
                pos += size
                sign, merged = pf._sort_sign(blockword)
                if sign == 0:
                    dead = True
                    break
                coeff *= sign
                target.append(_indicator(merged, n))
            if not dead:
                out.append((coeff, tuple(target)))
        return out

    return pf.map_from_label_images(src, tgt, image)


def schur_map(lam, n: int, ring: RingSpec) -> pf.ModuleMap:
    """Lambda^{lam'} -> S^lam: expand wedges with signs, permute by sigma_lam,
    multiply into symmetric powers."""
    lam = cb.normalize_partition(lam)
    lamc = cb.conjugate(lam)
    d = cb.weight(lam)
    sigma = cb.sigma_perm(lam)
    src = pf.eval_exterior(lamc, n, ring)
    tgt = pf.eval_symmetric(lam, n, ring)

    def image(label):
        out = []
        column_sets = [_elements(row) for row in label]
        for perms in itertools.product(*[itertools.permutations(s) for s in column_sets]):
            coeff = 1
            for p in perms:
                sign, _ = pf._sort_sign(p)
                coeff *= sign
            flat = tuple(itertools.chain.from_iterable(perms))
            permuted = tuple(flat[sigma[t] - 1] for t in range(d))
            target = []
            pos = 0
            for size in lam:
                blockword = permuted[pos:pos + size]
                pos += size
                target.append(tuple(sum(1 for x in blockword if x == j + 1) for j in range(n)))
            out.append((coeff, tuple(target)))
        return out

    return pf.map_from_label_images(src, tgt, image)
