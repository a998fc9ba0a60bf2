"""Blade index tables for Clifford algebras Cl_n with negative-definite metric.

A basis blade of Cl_n is encoded as an integer bitmask over the generators
e_1 .. e_n: bit i-1 set means e_i occurs in the blade.  Index 0 is the
scalar.  A multivector is a dense coefficient vector of length 2**n laid
out in bitmask order.  All generators square to -1 and anticommute, so the
product of two blades is the XOR blade with a computable sign.

Tables are cached per dimension; n up to 8 is supported.
"""

from functools import lru_cache

import numpy as np

MAX_DIM = 8


def _popcount(m):
    return bin(m).count("1")


def _reorder_sign(a, b):
    """Sign from sorting the concatenation of blades a and b.

    Counts the generator transpositions needed to bring e_A e_B into
    canonical ascending order, before any e_i e_i contraction.
    """
    a >>= 1
    total = 0
    while a:
        total += _popcount(a & b)
        a >>= 1
    return -1 if total & 1 else 1


def blade_product_sign(a, b):
    """Sign s in e_A e_B = s e_{A xor B}, with e_i^2 = -1."""
    s = _reorder_sign(a, b)
    if _popcount(a & b) & 1:
        s = -s
    return s


class Algebra:
    """Cached sign/index tables for one Clifford algebra dimension."""

    def __init__(self, n):
        if not 0 <= n <= MAX_DIM:
            raise ValueError(f"dimension {n} outside supported range 0..{MAX_DIM}")
        self.n = n
        self.dim = 1 << n
        d = self.dim
        idx = np.arange(d)
        self.grades = np.array([_popcount(i) for i in range(d)], dtype=np.int8)
        self.xor_table = idx[:, None] ^ idx[None, :]
        sign = np.empty((d, d), dtype=np.int8)
        for i in range(d):
            for j in range(d):
                sign[i, j] = blade_product_sign(i, j)
        self.sign_table = sign
        r = self.grades.astype(np.int64)
        self.reversion_signs = np.where((r * (r - 1) // 2) % 2 == 0, 1.0, -1.0)
        self.conjugation_signs = np.where((r * (r + 1) // 2) % 2 == 0, 1.0, -1.0)
        self.involution_signs = np.where(r % 2 == 0, 1.0, -1.0)
        if n >= 1:
            top = 1 << (n - 1)
            self.star_signs = np.where((idx & top) != 0, -1.0, 1.0)
        else:
            self.star_signs = np.ones(1)
        self._cayley = None

    @property
    def cayley(self):
        """Dense tensor T with (a*b)[k] = sum_ij T[i,j,k] a[i] b[j].

        Cubic in 2**n memory, so only built for n <= 5; larger algebras
        go through the accumulation loop in gp().
        """
        if self._cayley is None:
            if self.n > 5:
                raise ValueError("cayley tensor only materialised for n <= 5")
            d = self.dim
            T = np.zeros((d, d, d))
            for i in range(d):
                T[i, np.arange(d), self.xor_table[i]] = self.sign_table[i]
            self._cayley = T
        return self._cayley


@lru_cache(maxsize=None)
def algebra(n):
    return Algebra(n)


def gp(a, b, alg):
    """Geometric product on coefficient arrays of shape (..., 2**n).

    Batch dimensions broadcast like numpy arithmetic.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if alg.n <= 5:
        return np.einsum("...i,...j,ijk->...k", a, b, alg.cayley, optimize=True)
    out_shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(out_shape, dtype=np.result_type(a, b))
    for j in range(alg.dim):
        bj = b[..., j]
        if not np.any(bj):
            continue
        out[..., alg.xor_table[:, j]] += alg.sign_table[:, j] * (a * bj[..., None])
    return out


def right_mult_blades(c, alg):
    """Stack of products c*e_j for j = 0..n, rows indexed by paravector axis.

    Row 0 is c itself (e_0 = 1); row j is c*e_j.  Used to evaluate c*x for
    a batch of paravectors x via a single matrix product.
    """
    c = np.asarray(c)
    rows = [c]
    for j in range(1, alg.n + 1):
        ej = np.zeros(alg.dim)
        ej[1 << (j - 1)] = 1.0
        rows.append(gp(c, ej, alg))
    return np.stack(rows, axis=-2)


def paravector_to_coeffs(x, alg):
    """Embed paravector components (..., n+1) into blade coefficients (..., 2**n)."""
    x = np.asarray(x)
    out = np.zeros(x.shape[:-1] + (alg.dim,), dtype=x.dtype)
    out[..., 0] = x[..., 0]
    for j in range(1, alg.n + 1):
        out[..., 1 << (j - 1)] = x[..., j]
    return out


def coeffs_to_paravector(a, alg):
    """Extract paravector components; non-paravector grades are dropped."""
    a = np.asarray(a)
    out = np.empty(a.shape[:-1] + (alg.n + 1,), dtype=a.dtype)
    out[..., 0] = a[..., 0]
    for j in range(1, alg.n + 1):
        out[..., j] = a[..., 1 << (j - 1)]
    return out


def paravector_mask(alg):
    mask = np.zeros(alg.dim, dtype=bool)
    mask[0] = True
    for j in range(1, alg.n + 1):
        mask[1 << (j - 1)] = True
    return mask


def pairwise_sum(arr, axis=0):
    """Deterministic pairwise (tree) reduction along an axis.

    Summation order depends only on the length of the axis, so results are
    reproducible regardless of chunking done by callers.
    """
    arr = np.asarray(arr)
    arr = np.moveaxis(arr, axis, 0)
    m = arr.shape[0]
    if m == 0:
        return np.zeros(arr.shape[1:], dtype=arr.dtype)
    while m > 1:
        half = m // 2
        head = arr[: 2 * half : 2] + arr[1 : 2 * half : 2]
        if m % 2:
            arr = np.concatenate([head, arr[2 * half : m]], axis=0)
        else:
            arr = head
        m = arr.shape[0]
    return arr[0]
