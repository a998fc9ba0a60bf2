"""Enumeration of modular-group cosets keyed by bottom row.

Left translations do not change the bottom row (c, d), and within the
level-N subgroup (N >= 3, no nontrivial diagonal units) equal rows force
equal translation cosets, so cosets are keyed by (c, d) exactly.

Two independent routes to the row set:

1. Breadth-first word search over the generators with radius pruning,
   states kept as exact integer matrices, translation-reduced so
   coefficients stay small.  Pruning at the target radius is lossless by
   Euclidean descent: a unit translation step moves d along a straight
   lattice line (row norm is convex along it) and the inversion generator
   swaps the row entries, so every coset of row norm <= R is reachable
   through states of row norm <= R.  State count grows like R^{2(p+1)},
   which caps this route at moderate radii.

2. Arithmetic characterization: (c, d) in the congruence lattices with
   c rev(d) a paravector and 1 in the left ideal O rev(d) + O rev(c).
   The ideal condition is decided by the gcd of the maximal minors of the
   integer Bezout system (an ideal containing 1 is the whole order, so
   fullness of the image lattice is equivalent to solvability).  This
   route is polynomial in the output size and handles radius 20 at p = 2
   in seconds; route 1 validates it exactly at every feasible radius.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import Multivector
from .blades import algebra, blade_product_sign
from .vahlen import VahlenMatrix

_CHUNK = 120_000


def _gp_int(a, b, alg):
    """Exact integer geometric product on 1-d coefficient arrays."""
    out = np.zeros(alg.dim, dtype=np.int64)
    for i in np.nonzero(a)[0]:
        ai = a[i]
        for j in np.nonzero(b)[0]:
            out[i ^ j] += alg.sign_table[i, j] * ai * b[j]
    return out


def _conj_int(a, alg):
    return (a * alg.conjugation_signs).astype(np.int64)


@lru_cache(maxsize=None)
def _int_cayley(p):
    alg = algebra(p)
    cay = np.zeros((alg.dim, alg.dim, alg.dim), dtype=np.int64)
    for i in range(alg.dim):
        for j in range(alg.dim):
            cay[i, j, i ^ j] = alg.sign_table[i, j]
    return cay


@lru_cache(maxsize=None)
def _right_blade_action(p, j, s):
    """Permutation and sign arrays for x -> x * (s e_j) in Cl_p."""
    alg = algebra(p)
    if j == 0:
        perm = np.arange(alg.dim)
        sign = np.full(alg.dim, s, dtype=np.int64)
        return perm, sign
    bit = 1 << (j - 1)
    perm = np.arange(alg.dim) ^ bit
    sign = np.array(
        [s * blade_product_sign(i, bit) for i in range(alg.dim)], dtype=np.int64
    )
    return perm, sign


def _apply_right_blade(x, p, j, s):
    perm, sign = _right_blade_action(p, j, s)
    out = np.zeros_like(x)
    out[..., perm] = sign * x
    return out


def _paravector_indices(p):
    return [0] + [1 << (j - 1) for j in range(1, p + 1)]


def _lam_times(lam, x, alg, p):
    """Product lam * x for an integer paravector lam (components over e_0..e_p)."""
    out = np.zeros(alg.dim, dtype=np.int64)
    for j, lj in enumerate(lam):
        if lj == 0:
            continue
        if j == 0:
            out += lj * x
        else:
            bit = 1 << (j - 1)
            for i in np.nonzero(x)[0]:
                out[bit ^ i] += lj * alg.sign_table[bit, i] * x[i]
    return out


def _translation_reduce(mat, alg, p):
    """Left-multiply by a translation so the free entry is centred.

    Keeps a c^{-1} (or b d^{-1} when c = 0) inside the centred unit box.
    """
    a, b, c, d = mat
    if np.any(c):
        v = _gp_int(a, _conj_int(c, alg), alg)
        q = int(np.sum(c.astype(np.int64) ** 2))
    else:
        v = _gp_int(b, _conj_int(d, alg), alg)
        q = int(np.sum(d.astype(np.int64) ** 2))
    lam = []
    for idx in _paravector_indices(p):
        lam.append(-((2 * int(v[idx]) + q) // (2 * q)))
    if not any(lam):
        return mat
    lam = np.array(lam, dtype=np.int64)
    a2 = a + _lam_times(lam, c, alg, p)
    b2 = b + _lam_times(lam, d, alg, p)
    return np.stack([a2, b2, c, d])


def _expand(mat, p, alg):
    """All right-multiplications of a state by the generator set."""
    a, b, c, d = mat
    out = [np.stack([b, -a, d, -c]), np.stack([-b, a, -d, c])]
    for j in range(p + 1):
        for s in (1, -1):
            out.append(
                np.stack(
                    [
                        a,
                        _apply_right_blade(a, p, j, s) + b,
                        c,
                        _apply_right_blade(c, p, j, s) + d,
                    ]
                )
            )
    return out


def _row_norm_sq(mat):
    return int(np.sum(mat[2].astype(np.int64) ** 2) + np.sum(mat[3].astype(np.int64) ** 2))


def _row_key(mat):
    return mat[2].tobytes() + mat[3].tobytes()


@dataclass(frozen=True)
class CosetRep:
    """One translation coset, stored as an exact integer representative."""

    matrix: np.ndarray  # shape (4, 2**p), int64, rows a, b, c, d
    row_norm_sq: int
    p: int
    N: int

    def to_vahlen(self, n) -> VahlenMatrix:
        entries = []
        for row in self.matrix:
            coeffs = np.zeros(1 << n)
            coeffs[: row.shape[0]] = row
            entries.append(Multivector(n, coeffs))
        return VahlenMatrix(*entries, paravector_certified=True)


def _bfs_level_one(p, radius):
    """Scalar reference search; all cosets with row norm <= radius.

    Returns dict row_key -> reduced integer matrix.  Only usable at small
    radii; the array implementation below must agree with it exactly.
    """
    alg = algebra(p)
    prune_sq = int(np.floor(radius * radius + 1e-9))
    ident = np.zeros((4, alg.dim), dtype=np.int64)
    ident[0, 0] = 1
    ident[3, 0] = 1
    seen = {_row_key(ident): ident}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for mat in frontier:
            for cand in _expand(mat, p, alg):
                if _row_norm_sq(cand) > prune_sq:
                    continue
                key = _row_key(cand)
                if key in seen:
                    continue
                cand = _translation_reduce(cand, alg, p)
                seen[key] = cand
                new_frontier.append(cand)
        frontier = new_frontier
    return seen


# ----------------------------------------------------------------------
# array implementation of the same breadth-first search


def _gp_batch(A, B, cay):
    return np.einsum("mi,mj,ijk->mk", A, B, cay)


def _reduce_batch(S, p, step=1):
    """Translation-reduce a batch of states in place, shifts in step * Z.

    Centres a c^{-1} (or b d^{-1} when c = 0) into the step-sized box; the
    floor formula matches the scalar path so both searches produce
    identical representatives.
    """
    alg = algebra(p)
    cay = _int_cayley(p)
    pv = _paravector_indices(p)
    a, b, c, d = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
    has_c = np.any(c != 0, axis=1)
    left = np.where(has_c[:, None], a, b)
    right = np.where(has_c[:, None], c, d)
    v = _gp_batch(left, right * alg.conjugation_signs.astype(np.int64), cay)
    q = np.sum(right * right, axis=1)
    q = np.maximum(q, 1)
    denom = 2 * step * q
    lam_pc = -((2 * v[:, pv] + (step * q)[:, None]) // denom[:, None]) * step
    if not np.any(lam_pc):
        return S
    lam = np.zeros((S.shape[0], alg.dim), dtype=np.int64)
    lam[:, pv] = lam_pc
    S[:, 0] += _gp_batch(lam, c, cay)
    S[:, 1] += _gp_batch(lam, d, cay)
    return S


def _expand_batch(S, p):
    """Apply every generator on the right to a batch of states."""
    a, b, c, d = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
    out = [
        np.stack([b, -a, d, -c], axis=1),
        np.stack([-b, a, -d, c], axis=1),
    ]
    for j in range(p + 1):
        for s in (1, -1):
            perm, sign = _right_blade_action(p, j, s)
            b2 = np.empty_like(a)
            b2[:, perm] = sign * a
            d2 = np.empty_like(c)
            d2[:, perm] = sign * c
            out.append(np.stack([a, b2 + b, c, d2 + d], axis=1))
    return np.concatenate(out, axis=0)


def _keys_of(S, dim):
    cd = np.ascontiguousarray(S[:, 2:, :]).reshape(S.shape[0], 2 * dim)
    return cd.view(f"S{16 * dim}").ravel()


def _bfs_rows(p, radius, keep):
    """Array breadth-first search over translation cosets.

    keep(c, d) -> bool mask selects which discovered states must retain
    their full matrices (e.g. rows satisfying a congruence); all states
    contribute their (c, d) key to the dedup set either way.
    """
    alg = algebra(p)
    dim = alg.dim
    prune_sq = int(np.floor(radius * radius + 1e-9))
    ident = np.zeros((1, 4, dim), dtype=np.int64)
    ident[0, 0, 0] = 1
    ident[0, 3, 0] = 1
    seen = np.sort(_keys_of(ident, dim))
    frontier = ident
    kept = [ident[keep(ident[:, 2], ident[:, 3])]]
    while frontier.shape[0]:
        new_parts = []
        n_chunks = max(1, -(-frontier.shape[0] // _CHUNK))
        for chunk in np.array_split(frontier, n_chunks):
            E = _expand_batch(chunk, p)
            rn = np.sum(E[:, 2] ** 2, axis=1) + np.sum(E[:, 3] ** 2, axis=1)
            E = E[rn <= prune_sq]
            if not E.shape[0]:
                continue
            keys = _keys_of(E, dim)
            _, first = np.unique(keys, return_index=True)
            first.sort()
            E = E[first]
            keys = keys[first]
            pos = np.searchsorted(seen, keys)
            pos = np.minimum(pos, seen.shape[0] - 1)
            is_new = seen[pos] != keys
            if not np.any(is_new):
                continue
            E = _reduce_batch(E[is_new], p)
            new_parts.append(E)
        if not new_parts:
            break
        E = np.concatenate(new_parts, axis=0)
        keys = _keys_of(E, dim)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        frontier = E[first]
        seen = np.sort(np.concatenate([seen, keys[first]]))
        kept.append(frontier[keep(frontier[:, 2], frontier[:, 3])])
        del E, keys
    total = seen.shape[0]
    return np.concatenate(kept, axis=0), total


# ----------------------------------------------------------------------
# arithmetic route: rows from lattice boxes + ideal test


def _lattice_ball(step, rmax, dim):
    """Points of step * Z^dim with euclidean norm <= rmax, lexicographic."""
    hi = int(np.floor(rmax / step + 1e-9))
    rng = step * np.arange(-hi, hi + 1)
    grids = np.stack(np.meshgrid(*([rng] * dim), indexing="ij"), -1).reshape(-1, dim)
    keep = np.sum(grids.astype(float) ** 2, 1) <= rmax * rmax + 1e-9
    return grids[keep].astype(np.int64)

def _row_candidates(p, N, radius, d_radius=None):
    """Congruence-lattice pairs (c, d), ball or rectangular truncation.

    Default keeps |(c, d)| <= radius jointly; with d_radius the cuts are
    independent (|c| <= radius, |d| <= d_radius), which lets the d-sums of
    the small-|c| shells run much further than a joint ball affords.
    """
    dim = algebra(p).dim
    cs = _lattice_ball(N, radius, dim)
    ds = _lattice_ball(1, radius if d_radius is None else d_radius, dim)
    okd = (ds[:, 0] % N == 1 % N) & ~np.any(ds[:, 1:] % N, axis=1)
    ds = ds[okd]
    nd = np.sum(ds.astype(float) ** 2, 1)
    parts_c, parts_d = [], []
    for c in cs:
        if d_radius is None:
            room = radius * radius + 1e-9 - float(np.sum(c.astype(float) ** 2))
            if room < 0:
                continue
            sel = ds[nd <= room]
        else:
            sel = ds
        parts_c.append(np.repeat(c[None, :], sel.shape[0], 0))
        parts_d.append(sel)
    return np.concatenate(parts_c), np.concatenate(parts_d)

def _arithmetic_rows(p, N, radius, d_radius=None):
    """All bottom rows of the level-N subgroup within the truncation cut.

    Filters the candidate lattice pairs by the paravector pairing
    c rev(d) and by fullness of the left ideal O rev(d) + O rev(c),
    decided via the gcd of the maximal minors of the Bezout map
    (a, b) -> a rev(d) - b rev(c).  Validated against the word search.
    """
    alg = algebra(p)
    dim = alg.dim
    cay = _int_cayley(p)
    rev = alg.reversion_signs.astype(np.int64)
    C, D = _row_candidates(p, N, radius, d_radius)
    pv = _paravector_indices(p)
    nonpv = np.setdiff1d(np.arange(dim), pv)
    if nonpv.size:
        prod = np.einsum("mi,mj,ijk->mk", C, D * rev, cay)
        ok = ~np.any(prod[:, nonpv], axis=1)
        C, D = C[ok], D[ok]
    A = np.zeros((C.shape[0], dim, 2 * dim), dtype=np.int64)
    for i in range(dim):
        ei = np.zeros(dim, dtype=np.int64)
        ei[i] = 1
        A[:, :, i] = np.einsum("i,mj,ijk->mk", ei, D * rev, cay)
        A[:, :, dim + i] = -np.einsum("i,mj,ijk->mk", ei, C * rev, cay)
    g = np.zeros(C.shape[0], dtype=np.int64)
    # minors of 4x8 integer blocks stay far below 2^53, so float dets are exact
    for cols in itertools.combinations(range(2 * dim), dim):
        dets = np.abs(np.rint(np.linalg.det(A[:, :, cols].astype(float))))
        g = np.gcd(g, dets.astype(np.int64))
        if np.all(g == 1):
            break
    C, D = C[g == 1], D[g == 1]
    order = sorted(
        range(C.shape[0]),
        key=lambda t: (
            int(np.sum(C[t] ** 2) + np.sum(D[t] ** 2)),
            C[t].tolist(),
            D[t].tolist(),
        ),
    )
    return C[order], D[order]

@lru_cache(maxsize=64)
def _rows_cached(p, N, radius_key, d_radius_key=None):
    if N >= 2:
        return _arithmetic_rows(p, N, radius_key, d_radius_key)
    if d_radius_key is not None:
        raise ValueError("rectangular truncation needs a congruence level N >= 2")
    alg = algebra(p)
    mats, _ = _bfs_rows(p, radius_key, lambda c, d: np.ones(c.shape[0], bool))
    C = np.ascontiguousarray(mats[:, 2])
    D = np.ascontiguousarray(mats[:, 3])
    order = sorted(
        range(C.shape[0]),
        key=lambda t: (
            int(np.sum(C[t] ** 2) + np.sum(D[t] ** 2)),
            C[t].tolist(),
            D[t].tolist(),
        ),
    )
    return C[order], D[order]

def enumerate_rows(p, N, radius, d_radius=None):
    """Bottom rows (c, d) of the level-N translation cosets, deterministic.

    Returns two int arrays of shape (T, 2**p) sorted by (row norm, c, d).
    radius bounds |(c, d)| jointly, or just |c| when d_radius bounds |d|
    separately.  Weight-factor series need only this; use enumerate_cosets
    when the full matrices are required.
    """
    if N < 1 or p < 0:
        raise ValueError("need N >= 1 and p >= 0")
    return _rows_cached(int(p), int(N), float(radius),
                        None if d_radius is None else float(d_radius))

def _solve_int_columns(A, target):
    """One integer solution of A z = target for full-row-rank A (m <= n).

    Column Euclid reduction to lower-triangular form with a tracked
    unimodular transform, then forward substitution.
    """
    A = A.astype(np.int64).copy()
    m, n = A.shape
    U = np.eye(n, dtype=np.int64)
    for i in range(m):
        while True:
            nz = [j for j in range(i, n) if A[i, j] != 0]
            if not nz:
                raise ValueError("rank-deficient Bezout system")
            j0 = min(nz, key=lambda j: abs(A[i, j]))
            if j0 != i:
                A[:, [i, j0]] = A[:, [j0, i]]
                U[:, [i, j0]] = U[:, [j0, i]]
            if A[i, i] < 0:
                A[:, i] *= -1
                U[:, i] *= -1
            done = True
            for j in range(i + 1, n):
                q = A[i, j] // A[i, i]
                if q:
                    A[:, j] -= q * A[:, i]
                    U[:, j] -= q * U[:, i]
                if A[i, j]:
                    done = False
            if done:
                break
    y = np.zeros(n, dtype=np.int64)
    t = target.astype(np.int64).copy()
    for i in range(m):
        if t[i] % A[i, i]:
            raise ValueError("no integer solution")
        y[i] = t[i] // A[i, i]
        t = t - y[i] * A[:, i]
    return U @ y

def _lift_row(c, d, p, N, alg, rev):
    """Complete a row to a level-N group matrix (a, b; c, d).

    Solves the Bezout equation, straightens the non-paravector part of
    a c^{-1} by an integral order translation (valid lifts differ by
    T_lambda with lambda in the order; group membership forces the
    paravector part only), then searches the mod-N translation shift.
    """
    dim = alg.dim
    e1 = np.zeros(dim, dtype=np.int64)
    e1[0] = 1
    if not np.any(c):
        # d is a unit blade; pick a with a rev(d) = 1 among signed blades
        for idx in range(dim):
            for s in (1, -1):
                a = np.zeros(dim, dtype=np.int64)
                a[idx] = s
                if np.array_equal(_gp_int(a, d * rev, alg), e1):
                    return np.stack([a, np.zeros(dim, dtype=np.int64), c, d])
        raise ValueError("zero-c row without unit d")
    A = np.zeros((dim, 2 * dim), dtype=np.int64)
    for i in range(dim):
        ei = np.zeros(dim, dtype=np.int64)
        ei[i] = 1
        A[:, i] = _gp_int(ei, d * rev, alg)
        A[:, dim + i] = -_gp_int(ei, c * rev, alg)
    z = _solve_int_columns(A, e1)
    a, b = z[:dim], z[dim:]
    q = int(np.sum(c.astype(np.int64) ** 2))
    v = _gp_int(a, _conj_int(c, alg), alg)
    lam_star = np.zeros(dim, dtype=np.int64)
    for idx in np.setdiff1d(np.arange(dim), _paravector_indices(p)):
        if v[idx] % q:
            raise ValueError("row does not admit a group lift")
        lam_star[idx] = v[idx] // q
    if np.any(lam_star):
        a = a - _gp_int(lam_star, c, alg)
        b = b - _gp_int(lam_star, d, alg)
    mat = np.stack([a, b, c, d])
    lifted = _congruence_lift(mat, p, N, alg) if N > 1 else mat
    if lifted is None:
        raise ValueError("row admits no congruence lift")
    return _translation_reduce_step(lifted, alg, p, N)

def _translation_reduce_step(mat, alg, p, step):
    """Scalar translation reduction with shifts in step * Z."""
    out = mat[None, :, :].copy()
    _reduce_batch(out, p, step=step)
    return out[0]

@lru_cache(maxsize=64)
def _enumerate_cached(p, N, radius_key):
    alg = algebra(p)
    rev = alg.reversion_signs.astype(np.int64)
    reps = []
    if N >= 2:
        C, D = _rows_cached(p, N, radius_key)
        for c, d in zip(C, D):
            mat = _lift_row(c, d, p, N, alg, rev)
            reps.append(CosetRep(mat, _row_norm_sq(mat), p, N))
    else:
        mats, _ = _bfs_rows(p, radius_key, lambda c, d: np.ones(c.shape[0], bool))
        for mat in mats:
            reps.append(CosetRep(mat, _row_norm_sq(mat), p, N))
        reps.sort(
            key=lambda r: (r.row_norm_sq, r.matrix[2].tolist(), r.matrix[3].tolist())
        )
    return tuple(reps)


def _congruence_lift(mat, p, N, alg):
    """Translate a level-one representative into the level-N subgroup.

    The bottom row must already satisfy c = 0, d = 1 mod N.  Searches the
    translation shifts modulo N for one making a = 1 and b = 0 mod N; the
    shift, when it exists, is unique modulo N.
    """
    a, b, c, d = mat
    shifts = np.stack(
        np.meshgrid(*([np.arange(N)] * (p + 1)), indexing="ij"), -1
    ).reshape(-1, p + 1)
    target_a = np.zeros(alg.dim, dtype=np.int64)
    target_a[0] = 1
    for lam in shifts:
        a2 = a + _lam_times(lam.astype(np.int64), c, alg, p)
        if np.any((a2 - target_a) % N):
            continue
        b2 = b + _lam_times(lam.astype(np.int64), d, alg, p)
        if np.any(b2 % N):
            continue
        return np.stack([a2, b2, c, d])
    return None


def enumerate_cosets(p, N, radius, n=None):
    """Translation cosets of the level-N congruence subgroup, row norm <= radius.

    Returns a deterministic list of CosetRep sorted by (row norm, row
    coefficients).  The identity coset is always first.
    """
    if N < 1:
        raise ValueError("level N must be a positive integer")
    if p < 0:
        raise ValueError("p must be a nonnegative integer")
    return list(_enumerate_cached(int(p), int(N), float(radius)))


def coset_count_profile(p, N, radii):
    """Coset counts at several radii; used to calibrate tail estimates."""
    return {float(r): len(enumerate_cosets(p, N, r)) for r in radii}


def rows_as_arrays(reps, n):
    """Pack coset entries into Cl_n coefficient arrays (a, b, c, d).

    Subalgebra coefficients occupy the low blade slots of Cl_n, so the
    embedding is a zero-padded copy.  Returns four float arrays of shape
    (len(reps), 2**n).
    """
    dim = 1 << n
    count = len(reps)
    out = np.zeros((4, count, dim))
    for t, rep in enumerate(reps):
        width = rep.matrix.shape[1]
        if width > dim:
            raise ValueError("ambient dimension too small for these entries")
        out[:, t, :width] = rep.matrix
    return out[0], out[1], out[2], out[3]


def rows_packed(p, N, radius, n, d_radius=None):
    """Bottom rows embedded in Cl_n floats: (c, d) arrays of shape (T, 2**n)."""
    C, D = enumerate_rows(p, N, radius, d_radius)
    dim = 1 << n
    if C.shape[1] > dim:
        raise ValueError("ambient dimension too small for these entries")
    c_arr = np.zeros((C.shape[0], dim))
    d_arr = np.zeros((D.shape[0], dim))
    c_arr[:, : C.shape[1]] = C
    d_arr[:, : D.shape[1]] = D
    return c_arr, d_arr


def enumerate_group_elements(p, N, row_radius, shift_radius):
    """Level-N group elements T_lam M over coset reps M and lattice shifts lam.

    Every group element factors uniquely this way, so the list is free of
    duplicates.  Shifts run over the level-N paravector lattice inside the
    given Euclidean radius.
    """
    reps = enumerate_cosets(p, N, row_radius)
    alg = algebra(p)
    max_steps = int(np.floor(shift_radius / N + 1e-9))
    rng = np.arange(-max_steps, max_steps + 1) * N
    grids = np.stack(np.meshgrid(*([rng] * (p + 1)), indexing="ij"), -1).reshape(-1, p + 1)
    norms = np.sum(grids.astype(float) ** 2, axis=1)
    grids = grids[norms <= shift_radius * shift_radius + 1e-9]
    order = np.lexsort(tuple(grids[:, j] for j in reversed(range(p + 1))))
    grids = grids[order]
    out = []
    for rep in reps:
        a, b, c, d = rep.matrix
        for lam in grids:
            lam = lam.astype(np.int64)
            a2 = a + _lam_times(lam, c, alg, p)
            b2 = b + _lam_times(lam, d, alg, p)
            out.append(CosetRep(np.stack([a2, b2, c, d]), rep.row_norm_sq, p, N))
    return out


# ----------------------------------------------------------------------
# arithmetic reference for p = 0 (classical modular group)


def reference_rows_p0(N, radius):
    """Rows of the level-N classical modular subgroup with norm <= radius.

    Coprime integer pairs (c, d) with c = 0 and d = 1 mod N; translation
    cosets are in bijection with such rows.
    """
    import math

    rows = set()
    r = int(np.floor(radius + 1e-9))
    for c in range(-r, r + 1):
        for d in range(-r, r + 1):
            if c * c + d * d > radius * radius + 1e-9:
                continue
            if math.gcd(c, d) != 1:
                continue
            if c % N == 0 and d % N == 1 % N:
                rows.add((c, d))
    return rows


# ----------------------------------------------------------------------
# right cosets of the full group modulo the level-N subgroup


def _mod_keys(S, N, dim):
    flat = np.ascontiguousarray(S % N).reshape(S.shape[0], 4 * dim).astype(np.uint8)
    return flat.view(f"S{4 * dim}").ravel()


def _class_reduce_batch(S, p, N, rounds=3):
    """Shrink exact representatives by level-N moves within their classes.

    Alternates upper translations (a += N lam c, b += N lam d) with lower
    ones (c += N mu a, d += N mu b); both are level-N group elements acting
    on the left, so the right coset and the mod-N key are untouched.
    """
    alg = algebra(p)
    cay = _int_cayley(p)
    pv = _paravector_indices(p)
    conj = alg.conjugation_signs.astype(np.int64)
    for _ in range(rounds):
        changed = False
        for upper in (True, False):
            if upper:
                x, y, rx, ry = S[:, 0], S[:, 1], S[:, 2], S[:, 3]
            else:
                x, y, rx, ry = S[:, 2], S[:, 3], S[:, 0], S[:, 1]
            use_x = np.any(rx != 0, axis=1)
            left = np.where(use_x[:, None], x, y)
            right = np.where(use_x[:, None], rx, ry)
            v = _gp_batch(left, right * conj, cay)
            q = np.maximum(np.sum(right * right, axis=1), 1)
            lam_pc = -((2 * v[:, pv] + (N * q)[:, None]) // (2 * N * q)[:, None]) * N
            if not np.any(lam_pc):
                continue
            lam = np.zeros((S.shape[0], alg.dim), dtype=np.int64)
            lam[:, pv] = lam_pc
            x2 = x + _gp_batch(lam, rx, cay)
            y2 = y + _gp_batch(lam, ry, cay)
            better = (
                np.sum(x2**2, axis=1) + np.sum(y2**2, axis=1)
                < np.sum(x**2, axis=1) + np.sum(y**2, axis=1)
            )
            if np.any(better):
                x[better] = x2[better]
                y[better] = y2[better]
                changed = True
        if not changed:
            break
    return S


def quotient_representatives(p, N, max_classes=300_000):
    """Exact representatives for the right cosets (level-N subgroup) \\ (full group).

    Breadth-first closure of the generator images in the finite quotient;
    one reduced integer matrix is returned per class, sorted by their
    modular key for determinism.
    """
    alg = algebra(p)
    dim = alg.dim
    ident = np.zeros((1, 4, dim), dtype=np.int64)
    ident[0, 0, 0] = 1
    ident[0, 3, 0] = 1
    key_order = np.sort(_mod_keys(ident, N, dim))
    mats = ident
    frontier = ident
    while frontier.shape[0]:
        E = _expand_batch(frontier, p)
        E = _class_reduce_batch(E, p, N)
        if np.max(np.abs(E)) > 1 << 40:
            raise OverflowError("representative coefficients grew too large")
        keys = _mod_keys(E, N, dim)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        E = E[first]
        keys = keys[first]
        pos = np.searchsorted(key_order, keys)
        pos = np.minimum(pos, key_order.shape[0] - 1)
        is_new = key_order[pos] != keys
        frontier = E[is_new]
        if not frontier.shape[0]:
            break
        mats = np.concatenate([mats, frontier], axis=0)
        if mats.shape[0] > max_classes:
            raise RuntimeError(f"quotient exceeds {max_classes} classes")
        key_order = np.sort(np.concatenate([key_order, keys[is_new]]))
    all_keys = _mod_keys(mats, N, dim)
    order = np.argsort(all_keys)
    return [mats[i] for i in order]


def translation_orbit_classes(p, N, reps):
    """Group right-coset representatives into orbits under x -> x T_mu.

    Right translation shifts the argument of a slashed form by a lattice
    vector, so cusp data is constant along each orbit; returns one
    representative per orbit (the one with the smallest modular key).
    """
    dim = algebra(p).dim
    mats = np.stack(reps, axis=0)
    keys = _mod_keys(mats, N, dim)
    order = np.argsort(keys)
    keys_sorted = keys[order]
    maps = []
    for j in range(p + 1):
        for s in (1, -1):
            perm, sign = _right_blade_action(p, j, s)
            E = mats.copy()
            b2 = np.empty_like(E[:, 0])
            b2[:, perm] = sign * E[:, 0]
            d2 = np.empty_like(E[:, 2])
            d2[:, perm] = sign * E[:, 2]
            E[:, 1] += b2
            E[:, 3] += d2
            tkeys = _mod_keys(E, N, dim)
            pos = np.searchsorted(keys_sorted, tkeys)
            if np.any(keys_sorted[np.minimum(pos, len(order) - 1)] != tkeys):
                raise ValueError("representative list is not closed under shifts")
            maps.append(order[pos])
    parent = np.arange(mats.shape[0])

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return int(i)

    for mp in maps:
        for i, tgt in enumerate(mp):
            ri, rt = find(i), find(int(tgt))
            if ri != rt:
                parent[max(ri, rt)] = min(ri, rt)
    roots = {}
    for i in range(mats.shape[0]):
        r = find(i)
        cur = roots.get(r)
        if cur is None or keys[i] < keys[cur]:
            roots[r] = i
    picks = sorted(roots.values(), key=lambda i: keys[i])
    return [mats[i] for i in picks]


def rep_to_vahlen(mat, p, N, n) -> VahlenMatrix:
    return CosetRep(np.asarray(mat, dtype=np.int64), 0, p, N).to_vahlen(n)
