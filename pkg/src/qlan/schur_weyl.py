"""Linear algebra of the irreducible blocks.

The non-orthogonal basis vector labelled by an m-vector is the (normalized)
image of the row-sorted filling under the Young symmetrizer q p of the
row-reading standard tableau.  Every overlap used here reduces to orbit sums

    W(m, l; U) = sum over row rearrangements a of m, b of l
                 of <f_a| q U^(x n) f_b>,

with <f_a| q U^(x n) f_b> = prod over columns c of det U[a-entries, b-entries]
(columns with a repeated entry contribute zero).  Then

    <m| pi(U) |l> = W(m, l; U) / sqrt(W(m, m; I) W(l, l; I)),

all symmetrizer scale factors cancelling in the ratio.  The orbit sums are
evaluated exactly by a transfer over column-length classes: within the class
of columns of length L (there are lambda_L - lambda_{L+1} of them) a tableau
pair is described by the multiset of (a-modifier, b-modifier) pairs placed on
distinct columns, so the class contributes a small polynomial in the per-pair
determinant values with multinomial placement coefficients.  This avoids
enumerating orbits, whose size explodes combinatorially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache
from itertools import permutations, product

import numpy as np

from .errors import NearSingularGramError, ResourceLimitError
from . import tableaux as tb

DEFAULT_PAIR_BUDGET = 10**7

# ---------------------------------------------------------------------------
# determinants of tiny matrices, exact on integer entries


@cache
def _signed_perms(k: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    out = []
    for p in permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        out.append((-1 if inv % 2 else 1, p))
    return tuple(out)


def small_det(M) -> complex:
    """Leibniz determinant; exact for 0/1 matrices up to size ~6."""
    k = len(M)
    return sum(
        sign * math.prod(M[i][p[i]] for i in range(k))
        for sign, p in _signed_perms(k)
    )


def minor_det_product(U: np.ndarray, t_a: tb.Tableau, t_b: tb.Tableau) -> complex:
    """Product over columns c of det U[t_a-column entries, t_b-column entries];
    equals the overlap of f_a with the column-antisymmetrized U^(x n) f_b."""
    if tuple(len(r) for r in t_a) != tuple(len(r) for r in t_b):
        raise ValueError("tableaux must share a shape")
    out = 1.0 + 0.0j
    for ca, cb in zip(tb.columns_of(t_a), tb.columns_of(t_b)):
        M = [[U[i - 1, j - 1] for j in cb] for i in ca]
        out *= small_det(M)
        if out == 0:
            return 0.0 if _is_real(U) else 0.0 + 0.0j
    return out


def _is_real(U: np.ndarray) -> bool:
    return not np.iscomplexobj(U)


# ---------------------------------------------------------------------------
# column modifiers and the class transfer


@cache
def column_modifiers(length: int, d: int) -> tuple[tuple[tuple[tuple[int, int], ...], tuple[int, ...]], ...]:
    """Non-trivial ways to rewrite an identity column of the given length:
    each modifier is (bricks, column entries), a brick (i, j) replacing the
    entry i of row i <= length by some j > i, all resulting entries distinct.
    """
    rows = list(range(1, length + 1))
    out = []
    for mask in range(1, 2**length):
        sources = [r for r in rows if mask & (1 << (r - 1))]
        target_choices = [range(s + 1, d + 1) for s in sources]
        for targets in product(*target_choices):
            entries = list(range(1, length + 1))
            for s, t in zip(sources, targets):
                entries[s - 1] = t
            if len(set(entries)) != length:
                continue
            bricks = tuple(sorted(zip(sources, targets)))
            out.append((bricks, tuple(entries)))
    return tuple(out)


def _brick_vector(bricks, d: int) -> tuple[int, ...]:
    ps = tb.pairs(d)
    v = [0] * len(ps)
    for b in bricks:
        v[ps.index(b)] += 1
    return tuple(v)


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_le(a, b):
    return all(x <= y for x, y in zip(a, b))


def pairing_matrix(
    lam: tb.Diagram,
    d: int,
    U: np.ndarray,
    ms_a: list[tb.MVector],
    ms_b: list[tb.MVector],
) -> np.ndarray:
    """Matrix of orbit sums W(m, l; U) for m in ms_a, l in ms_b, computed by
    the per-column-class transfer described in the module docstring."""
    lam = tb.check_diagram(lam, d)
    npairs = len(tb.pairs(d))
    cap_a = tuple(max((m[k] for m in ms_a), default=0) for k in range(npairs))
    cap_b = tuple(max((m[k] for m in ms_b), default=0) for k in range(npairs))
    wcap_a = max((sum(m) for m in ms_a), default=0)
    wcap_b = max((sum(m) for m in ms_b), default=0)
    zero = tuple([0] * npairs)

    # accumulated generating function over classes: (used_a, used_b) -> value
    acc: dict[tuple, complex] = {(zero, zero): 1.0 + 0.0j}

    for length in range(1, d + 1):
        ncols = tb.row(lam, length) - tb.row(lam, length + 1)
        if ncols <= 0:
            continue
        v0 = small_det([[U[i, j] for j in range(length)] for i in range(length)])
        mods = [
            (_brick_vector(bricks, d), entries)
            for bricks, entries in column_modifiers(length, d)
        ]
        idcol = tuple(range(1, length + 1))
        pair_types = []
        for va, ea in [(zero, idcol)] + mods:
            if not _vec_le(va, cap_a) or sum(va) > wcap_a:
                continue
            for vb, eb in [(zero, idcol)] + mods:
                if va == zero and vb == zero:
                    continue
                if not _vec_le(vb, cap_b) or sum(vb) > wcap_b:
                    continue
                val = small_det([[U[i - 1, j - 1] for j in eb] for i in ea])
                if val == 0:
                    continue
                pair_types.append((va, vb, val))

        # inner transfer over this class: state (da, db, K) -> sum of
        # products of val^k / k! over chosen pair-type counts
        inner: dict[tuple, complex] = {(zero, zero, 0): 1.0 + 0.0j}
        for va, vb, val in pair_types:
            nxt = dict(inner)
            for (da, db, K), amp in inner.items():
                cda, cdb, cK = da, db, K
                term = amp
                k = 1
                while True:
                    cda = _vec_add(cda, va)
                    cdb = _vec_add(cdb, vb)
                    cK += 1
                    if (
                        cK > ncols
                        or not _vec_le(cda, cap_a)
                        or not _vec_le(cdb, cap_b)
                        or sum(cda) > wcap_a
                        or sum(cdb) > wcap_b
                    ):
                        break
                    term = term * val / k
                    key = (cda, cdb, cK)
                    nxt[key] = nxt.get(key, 0.0) + term
                    k += 1
            inner = nxt

        # attach placement counts and the unmodified-column factor
        class_poly: dict[tuple, complex] = {}
        for (da, db, K), amp in inner.items():
            weight = amp * math.perm(ncols, K) * v0 ** (ncols - K)
            key = (da, db)
            class_poly[key] = class_poly.get(key, 0.0) + weight

        # convolve with the classes already processed
        nxt_acc: dict[tuple, complex] = {}
        for (da, db), av in acc.items():
            for (ea, eb), bv in class_poly.items():
                fa, fb = _vec_add(da, ea), _vec_add(db, eb)
                if not (_vec_le(fa, cap_a) and _vec_le(fb, cap_b)):
                    continue
                if sum(fa) > wcap_a or sum(fb) > wcap_b:
                    continue
                key = (fa, fb)
                nxt_acc[key] = nxt_acc.get(key, 0.0) + av * bv
        acc = nxt_acc

    W = np.zeros((len(ms_a), len(ms_b)), dtype=complex)
    for r, ma in enumerate(ms_a):
        for c, mb in enumerate(ms_b):
            W[r, c] = acc.get((ma, mb), 0.0)
    return W


# ---------------------------------------------------------------------------
# direct orbit-sum evaluation (small cases; cross-checks the transfer)


def symmetrizer_pairing(
    lam: tb.Diagram,
    d: int,
    m: tb.MVector,
    l: tb.MVector,
    U: np.ndarray | None = None,
    budget: int = DEFAULT_PAIR_BUDGET,
) -> complex:
    """Orbit sum W(m, l; U) by explicit double enumeration of admissible
    row rearrangements.  With U omitted (identity), pairs whose column
    contents mismatch are skipped wholesale."""
    lam = tb.check_diagram(lam, d)
    size = tb.orbit_size(lam, m, d) * tb.orbit_size(lam, l, d)
    if size > budget:
        raise ResourceLimitError(f"orbit pair count {size} exceeds budget {budget}")
    orb_a = list(tb.orbit(lam, m, d, admissible_only=True, budget=None))
    orb_b = list(tb.orbit(lam, l, d, admissible_only=True, budget=None))
    if U is None:
        by_content: dict[tuple, list[tb.Tableau]] = {}
        for t in orb_b:
            key = tuple(frozenset(c) for c in tb.columns_of(t))
            by_content.setdefault(key, []).append(t)
        ident = np.eye(d)
        total = 0.0
        for ta in orb_a:
            key = tuple(frozenset(c) for c in tb.columns_of(ta))
            for tbl in by_content.get(key, ()):
                total += minor_det_product(ident, ta, tbl).real
        return total
    total = 0.0 + 0.0j
    for ta in orb_a:
        for tbl in orb_b:
            total += minor_det_product(U, ta, tbl)
    return total


# ---------------------------------------------------------------------------
# block basis, Gram matrix, block operators


def gram_matrix(lam: tb.Diagram, d: int, basis: list[tb.MVector]) -> np.ndarray:
    """Overlap matrix of the normalized symmetrizer-image vectors; entries
    across different total-multiplicity classes are exactly zero."""
    ident = np.eye(d)
    W = pairing_matrix(lam, d, ident, list(basis), list(basis)).real
    diag = np.sqrt(np.diag(W))
    G = W / np.outer(diag, diag)
    weights = [tb.total_multiplicities(lam, m, d) for m in basis]
    for r in range(len(basis)):
        for c in range(len(basis)):
            if weights[r] != weights[c]:
                G[r, c] = 0.0
    np.fill_diagonal(G, 1.0)
    return (G + G.T) / 2


def orthonormalize(G: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root of a positive definite Gram matrix."""
    vals, vecs = np.linalg.eigh(G)
    if vals.min() <= 1e-12:
        raise NearSingularGramError(
            f"smallest Gram eigenvalue {vals.min():.3e}; "
            "reduce the basis cutoff or increase n"
        )
    return (vecs * (1.0 / np.sqrt(vals))) @ vecs.T


@dataclass(frozen=True)
class BlockBasis:
    """Truncated basis of one irreducible block with its Gram data.

    Coordinates used everywhere downstream are the symmetrically
    orthonormalized ones: the vector labelled m has coordinates
    sqrt_gram[:, index[m]].
    """

    lam: tb.Diagram
    d: int
    mvectors: tuple[tb.MVector, ...]
    gram: np.ndarray
    inv_sqrt_gram: np.ndarray
    sqrt_gram: np.ndarray

    @property
    def size(self) -> int:
        return len(self.mvectors)

    def index(self, m: tb.MVector) -> int:
        return self.mvectors.index(m)

    def coords(self, m: tb.MVector) -> np.ndarray:
        """Orthonormal coordinates of the basis vector labelled m."""
        return self.sqrt_gram[:, self.index(m)].copy()


def block_basis(
    lam: tb.Diagram,
    d: int,
    max_weight: int | None = None,
    per_mode_cap: int | None = None,
) -> BlockBasis:
    lam = tb.check_diagram(lam, d)
    ms = tb.enumerate_m_vectors(lam, d, max_weight=max_weight)
    if per_mode_cap is not None:
        ms = [m for m in ms if max(m, default=0) <= per_mode_cap]
    G = gram_matrix(lam, d, ms)
    inv_sqrt = orthonormalize(G)
    vals, vecs = np.linalg.eigh(G)
    sqrt = (vecs * np.sqrt(vals)) @ vecs.T
    return BlockBasis(lam, d, tuple(ms), G, inv_sqrt, sqrt)


@dataclass(frozen=True)
class BlockOperator:
    """Matrix of an operator in the orthonormal coordinates of a BlockBasis,
    with the mass lost to basis truncation (for unitaries)."""

    lam: tb.Diagram
    matrix: np.ndarray
    truncation_defect: float


def mixed_overlap_matrix(
    lam: tb.Diagram, d: int, U: np.ndarray, basis: BlockBasis
) -> np.ndarray:
    """Overlaps <m| pi(U) |l> of the normalized non-orthogonal vectors."""
    ms = list(basis.mvectors)
    W = pairing_matrix(lam, d, U, ms, ms)
    Wd = pairing_matrix(lam, d, np.eye(d), ms, ms).real
    diag = np.sqrt(np.diag(Wd))
    return W / np.outer(diag, diag)


def block_unitary(lam: tb.Diagram, U: np.ndarray, basis: BlockBasis) -> BlockOperator:
    """Representation matrix of the d x d unitary U on the truncated block, in
    orthonormal coordinates; columns lose norm where the true image leaks
    outside the truncated basis."""
    M = mixed_overlap_matrix(lam, basis.d, U, basis)
    mat = basis.inv_sqrt_gram @ M @ basis.inv_sqrt_gram
    colnorms = np.linalg.norm(mat, axis=0) ** 2
    defect = float(max(0.0, 1.0 - colnorms.min()))
    return BlockOperator(tb.check_diagram(lam, basis.d), mat, defect)


def coherent_overlap(
    lam: tb.Diagram, d: int, m: tb.MVector, U: np.ndarray
) -> complex:
    """Overlap <m| pi(U) |0> with the rotated highest-weight vector."""
    zero = tuple([0] * len(tb.pairs(d)))
    W = pairing_matrix(lam, d, U, [m], [zero])[0, 0]
    Wmm = pairing_matrix(lam, d, np.eye(d), [m], [m])[0, 0].real
    return W / math.sqrt(Wmm)


# ---------------------------------------------------------------------------
# full tensor-space oracle


def _digit_table(n: int, d: int) -> np.ndarray:
    D = d**n
    idx = np.arange(D)
    digits = np.zeros((D, n), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        digits[:, k] = idx % d
        idx = idx // d
    return digits


def _perm_index_map(sigma: tuple[int, ...], digits: np.ndarray, d: int) -> np.ndarray:
    """Index map of the operator permuting tensor factors: factor k of the
    output is factor sigma^{-1}(k) of the input (0-based positions)."""
    n = digits.shape[1]
    inv = [0] * n
    for k, s in enumerate(sigma):
        inv[s] = k
    newdigits = digits[:, inv]
    powers = d ** np.arange(n - 1, -1, -1)
    return newdigits @ powers


def _standard_tableau_positions(lam: tb.Diagram) -> list[list[int]]:
    """0-based factor positions per row under row-reading numbering."""
    rows, k = [], 0
    for li in lam:
        rows.append(list(range(k, k + li)))
        k += li
    return rows


def _group_elements(blocks: list[list[int]], n: int):
    """All products of per-block permutations, as position maps sigma with
    sigma[k] = image of position k, plus the permutation sign."""
    out = [(list(range(n)), 1)]
    for block in blocks:
        nxt = []
        for perm in permutations(block):
            inv_count = sum(
                1
                for i in range(len(block))
                for j in range(i + 1, len(block))
                if perm[i] > perm[j]
            )
            sign = -1 if inv_count % 2 else 1
            for base, bsign in out:
                sigma = list(base)
                for src, dst in zip(block, perm):
                    sigma[src] = base[dst]
                nxt.append((sigma, bsign * sign))
        out = nxt
    return out


def row_symmetrizer_matrix(lam: tb.Diagram, n: int, d: int) -> np.ndarray:
    digits = _digit_table(n, d)
    rows = _standard_tableau_positions(lam)
    D = d**n
    P = np.zeros((D, D))
    src = np.arange(D)
    for sigma, _ in _group_elements(rows, n):
        P[_perm_index_map(tuple(sigma), digits, d), src] += 1.0
    return P


def column_antisymmetrizer_matrix(lam: tb.Diagram, n: int, d: int) -> np.ndarray:
    digits = _digit_table(n, d)
    rows = _standard_tableau_positions(lam)
    ncols = lam[0]
    cols = [
        [rows[i][c] for i in range(len(lam)) if c < lam[i]] for c in range(ncols)
    ]
    D = d**n
    Q = np.zeros((D, D))
    src = np.arange(D)
    for sigma, sign in _group_elements(cols, n):
        Q[_perm_index_map(tuple(sigma), digits, d), src] += sign
    return Q


def young_symmetrizer_matrix(lam: tb.Diagram, n: int, d: int) -> np.ndarray:
    return column_antisymmetrizer_matrix(lam, n, d) @ row_symmetrizer_matrix(
        lam, n, d
    )


def tableau_vector_index(t: tb.Tableau, d: int) -> int:
    """Tensor basis index of the product vector whose factor at box (i, c)
    (row-reading order) is the tableau entry."""
    idx = 0
    for trow in t:
        for e in trow:
            idx = idx * d + (e - 1)
    return idx


def brute_force_blocks(
    rho: np.ndarray, n: int, limit: int = 6561
) -> list[tuple[tb.Diagram, float, np.ndarray]]:
    """Decompose rho^(x n) on the full tensor space: for each diagram, build
    the Young symmetrizer explicitly, restrict rho^(x n) to its range (one
    copy of the irreducible block) and read off weight and spectrum."""
    d = rho.shape[0]
    if d**n > limit:
        raise ResourceLimitError(f"tensor dimension {d**n} exceeds limit {limit}")
    rho_n = rho
    for _ in range(n - 1):
        rho_n = np.kron(rho_n, rho)
    out = []
    for lam in tb.enumerate_diagrams(n, d):
        Y = young_symmetrizer_matrix(lam, n, d)
        dim = tb.dim_irrep(lam, d)
        Uleft, svals, _ = np.linalg.svd(Y)
        rank = int((svals > 1e-9 * svals[0]).sum())
        assert rank == dim, (lam, rank, dim)
        B = Uleft[:, :rank]
        block = B.conj().T @ rho_n @ B
        raw_trace = float(np.trace(block).real)
        weight = tb.multiplicity(lam, n, d) * raw_trace
        spectrum = np.sort(np.linalg.eigvalsh(block / raw_trace))[::-1]
        out.append((lam, weight, spectrum))
    return out
