"""Clifford matrix groups acting on upper half-space by Mobius transforms.

A 2x2 matrix (a, b; c, d) over Cl_{n-1} acts on paravectors x in R^{n+1}
by x -> (a x + b)(c x + d)^{-1}.  Membership in the Ahlfors-Vahlen group
requires the entries to be products of paravectors; that property is
certified constructively (matrices built from generator words carry the
certificate through products) rather than decided after the fact, and
is_vahlen additionally verifies the checkable necessary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    Multivector,
    Paravector,
    conjugation,
    pseudo_norm,
    reversion,
    star,
)
from .blades import algebra, gp, paravector_mask, right_mult_blades


class VahlenMatrix:
    """2x2 Clifford matrix; entries live in the ambient algebra Cl_n."""

    __slots__ = ("n", "a", "b", "c", "d", "paravector_certified")

    def __init__(self, a, b, c, d, paravector_certified=False):
        self.n = a.n
        for entry in (b, c, d):
            if entry.n != self.n:
                raise ValueError("mixed algebra dimensions in matrix entries")
        self.a, self.b, self.c, self.d = a, b, c, d
        self.paravector_certified = paravector_certified

    @classmethod
    def identity(cls, n):
        one = Multivector.scalar(n, 1.0)
        zero = Multivector(n)
        return cls(one, zero, zero, one, paravector_certified=True)

    def __matmul__(self, other: "VahlenMatrix") -> "VahlenMatrix":
        if self.n != other.n:
            raise ValueError("mixed algebra dimensions")
        return VahlenMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            paravector_certified=self.paravector_certified and other.paravector_certified,
        )

    def inverse(self) -> "VahlenMatrix":
        """Inverse for pseudo-determinant 1: (rev d, -rev b; -rev c, rev a)."""
        return VahlenMatrix(
            reversion(self.d),
            -reversion(self.b),
            -reversion(self.c),
            reversion(self.a),
            paravector_certified=self.paravector_certified,
        )

    def entries(self):
        return self.a, self.b, self.c, self.d

    def __repr__(self):
        return f"VahlenMatrix(a={self.a!r}, b={self.b!r}, c={self.c!r}, d={self.d!r})"


# ----------------------------------------------------------------------
# membership checks


def pseudo_determinant(m: VahlenMatrix) -> Multivector:
    """a rev(d) - b rev(c); real and nonzero on the Ahlfors-Vahlen group."""
    return m.a * reversion(m.d) - m.b * reversion(m.c)


def pseudo_determinant_star(m: VahlenMatrix) -> Multivector:
    """Diagnostic variant a d* - b c* with the e_n-flip automorphism.

    On matrices over Cl_{n-1} the star fixes every entry, so this agrees
    with the reversion form only when entries are real; reported separately
    so the two normalisations can be compared.
    """
    return m.a * star(reversion(m.d)) - m.b * star(reversion(m.c))


def _is_paravector_mv(a: Multivector, tol) -> bool:
    mask = paravector_mask(algebra(a.n))
    scale = max(1.0, float(np.max(np.abs(a.coeffs))))
    return bool(np.all(np.abs(a.coeffs[~mask]) <= tol * scale))


def _is_real_scalar(a: Multivector, tol) -> bool:
    scale = max(1.0, abs(a.coeffs[0]))
    return bool(np.all(np.abs(a.coeffs[1:]) <= tol * scale))


def is_vahlen(m: VahlenMatrix, tol=1e-12) -> bool:
    """Necessary-conditions check plus the constructive certificate.

    Verifies: pseudo-determinant real and nonzero; a c^{-1} and c^{-1} d
    paravectors when c != 0 (b d^{-1} when c = 0); and the entry products
    a rev(b), c rev(d) paravectors.  The products-of-paravectors condition
    itself is taken from the certificate carried by the matrix.
    """
    det = pseudo_determinant(m)
    if not _is_real_scalar(det, tol) or abs(det.coeffs[0]) <= tol:
        return False
    c_norm = pseudo_norm(m.c)
    if c_norm > tol:
        cc = (m.c * conjugation(m.c)).coeffs[0]
        ac_inv = m.a * conjugation(m.c) / cc
        cd = conjugation(m.c) * m.d / cc
        if not (_is_paravector_mv(ac_inv, tol) and _is_paravector_mv(cd, tol)):
            return False
    else:
        dd = (m.d * conjugation(m.d)).coeffs[0]
        if abs(dd) <= tol:
            return False
        bd_inv = m.b * conjugation(m.d) / dd
        if not _is_paravector_mv(bd_inv, tol):
            return False
    if not (
        _is_paravector_mv(m.a * reversion(m.b), tol)
        and _is_paravector_mv(m.c * reversion(m.d), tol)
    ):
        return False
    return m.paravector_certified


def is_sav(m: VahlenMatrix, tol=1e-12) -> bool:
    """Vahlen with pseudo-determinant exactly one."""
    if not is_vahlen(m, tol):
        return False
    det = pseudo_determinant(m)
    return abs(det.coeffs[0] - 1.0) <= tol


# ----------------------------------------------------------------------
# Mobius action


def _entry_blade_tensor(entry: Multivector):
    """(n+2, 2**n) stack whose row j is entry * e_j (row 0: entry itself)."""
    return right_mult_blades(entry.coeffs, algebra(entry.n))


def matrix_eval_tensors(m: VahlenMatrix):
    """Precomputed right-multiplication tensors for batch evaluation."""
    return tuple(_entry_blade_tensor(e) for e in m.entries())


def as_point_array(points):
    """Component array (..., n+1) from Paravector(s) or raw arrays."""
    if isinstance(points, Paravector):
        return points.components
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], Paravector):
        return np.stack([q.components for q in points])
    return np.asarray(points, dtype=float)


def denominator_batch(m: VahlenMatrix, points):
    """c x + d for a batch of paravector points (..., n+1)."""
    pts = as_point_array(points)
    ce = _entry_blade_tensor(m.c)
    return pts @ ce + m.d.coeffs


def mobius_batch(m: VahlenMatrix, points, junk_tol=1e-9):
    """Apply the Mobius transform to points of shape (..., n+1).

    Returns (images (..., n+1), denominator_norm_sq (...)).  Raises if any
    denominator vanishes or the result has content outside the paravector
    grades beyond round-off.
    """
    alg = algebra(m.n)
    pts = as_point_array(points)
    ae = _entry_blade_tensor(m.a)
    ce = _entry_blade_tensor(m.c)
    num = pts @ ae + m.b.coeffs
    den = pts @ ce + m.d.coeffs
    den_nsq = np.sum(den * den, axis=-1)
    if np.any(den_nsq <= 0.0):
        raise ZeroDivisionError("Mobius denominator vanishes at some point")
    den_inv = (den * alg.conjugation_signs) / den_nsq[..., None]
    image = gp(num, den_inv, alg)
    mask = paravector_mask(alg)
    junk = np.max(np.abs(image[..., ~mask]), initial=0.0)
    scale = np.max(np.abs(image), initial=1.0)
    if junk > junk_tol * max(scale, 1.0):
        raise ValueError(f"Mobius image leaks outside paravector grades ({junk:.2e})")
    out = np.empty(pts.shape, dtype=float)
    out[..., 0] = image[..., 0]
    for j in range(1, m.n + 1):
        out[..., j] = image[..., 1 << (j - 1)]
    return out, den_nsq


def mobius_apply(m: VahlenMatrix, x, junk_tol=1e-9):
    """Single-point Mobius action; accepts Paravector or component array."""
    comps = x.components if hasattr(x, "components") else np.asarray(x, dtype=float)
    image, _ = mobius_batch(m, comps[None, :], junk_tol=junk_tol)
    from .algebra import Paravector

    return Paravector(m.n, image[0])


def transformed_height(m: VahlenMatrix, points):
    """e_n component of M<x>, equal to x_n / |c x + d|^2."""
    pts = as_point_array(points)
    den = denominator_batch(m, pts)
    return pts[..., -1] / np.sum(den * den, axis=-1)


def automorphy_factor(m: VahlenMatrix, x, k) -> Multivector:
    """conj(c x + d) / |c x + d|^{n+1-k}."""
    comps = x.components if hasattr(x, "components") else np.asarray(x, dtype=float)
    den = denominator_batch(m, comps)
    nsq = float(np.sum(den * den))
    if nsq <= 0.0:
        raise ZeroDivisionError("automorphy factor undefined: denominator vanishes")
    alg = algebra(m.n)
    coeffs = den * alg.conjugation_signs / nsq ** ((m.n + 1 - k) / 2.0)
    return Multivector(m.n, coeffs)


def automorphy_factor_batch(m: VahlenMatrix, points, k):
    """Batch form of automorphy_factor; returns (..., 2**n) coefficients."""
    alg = algebra(m.n)
    den = denominator_batch(m, points)
    nsq = np.sum(den * den, axis=-1)
    return den * alg.conjugation_signs / nsq[..., None] ** ((m.n + 1 - k) / 2.0)


# ----------------------------------------------------------------------
# generators and integral structure


def inversion_generator(n) -> VahlenMatrix:
    """J = (0, -1; 1, 0)."""
    one = Multivector.scalar(n, 1.0)
    zero = Multivector(n)
    return VahlenMatrix(zero, -one, one, zero, paravector_certified=True)


def translation(mu, n) -> VahlenMatrix:
    """T_mu = (1, mu; 0, 1) for a paravector shift mu."""
    if isinstance(mu, Paravector):
        mu = mu.components
    if isinstance(mu, Multivector):
        shift = mu
        if not shift.is_paravector(tol=0.0):
            raise ValueError("translation needs a paravector shift")
    else:
        shift = Multivector.from_paravector(n, mu)
    one = Multivector.scalar(n, 1.0)
    zero = Multivector(n)
    return VahlenMatrix(one, shift, zero, one, paravector_certified=True)


def generators(p, n):
    """J and the unit translations T_1, T_{e_1}, ..., T_{e_p} inside Cl_n.

    These generate the modular group of parameter p; its matrices have
    entries in the integral span of the blades of e_1 .. e_p.
    """
    if p >= n:
        raise ValueError("parameter p must stay below the ambient dimension n")
    gens = [inversion_generator(n)]
    for j in range(p + 1):
        comps = np.zeros(n + 1)
        comps[j] = 1.0
        gens.append(translation(comps, n))
    return gens


def order_blade_mask(p, n):
    """Boolean mask of blades generated by e_1..e_p inside Cl_n."""
    alg = algebra(n)
    allowed = (1 << p) - 1
    idx = np.arange(alg.dim)
    return (idx & ~allowed) == 0


def entry_in_order(a: Multivector, p, tol=1e-9) -> bool:
    """Integer coefficients supported on blades of e_1..e_p."""
    mask = order_blade_mask(p, a.n)
    if np.any(np.abs(a.coeffs[~mask]) > tol):
        return False
    vals = a.coeffs[mask]
    return bool(np.all(np.abs(vals - np.round(vals)) <= tol))


def in_congruence_subgroup(m: VahlenMatrix, N, p, tol=1e-9) -> bool:
    """a-1, b, c, d-1 all in N times the standard order of parameter p."""
    one = Multivector.scalar(m.n, 1.0)
    for entry in (m.a - one, m.b, m.c, m.d - one):
        if not entry_in_order(entry, p, tol):
            return False
        vals = np.round(entry.coeffs).astype(np.int64)
        if np.any(vals % N != 0):
            return False
    return True


MIN_ADMISSIBLE_LEVEL = 3


def excluded_units(p, n):
    """The diagonal unit matrices diag(u*, u^{-1}) for blades u of e_1..e_p.

    Together with -identity these are the obstruction to nontrivial forms
    at levels below MIN_ADMISSIBLE_LEVEL.
    """
    alg = algebra(n)
    units = []
    allowed = (1 << p) - 1
    for mask in range(alg.dim):
        if mask & ~allowed:
            continue
        for s in (1.0, -1.0):
            u = Multivector.blade(n, mask, s)
            # a basis blade squares to a sign, so u^{-1} = u / u^2
            usq = (u * u).coeffs[0]
            u_inv = u / usq
            units.append(
                VahlenMatrix(
                    star(u), Multivector(n), Multivector(n), u_inv,
                    paravector_certified=True,
                )
            )
    return units


# ----------------------------------------------------------------------
# translation lattices


@dataclass(frozen=True)
class PeriodLattice:
    """Paravector lattice N (Z + Z e_1 + ... + Z e_p) inside R^{n+1}."""

    p: int
    N: int
    n: int

    @property
    def rank(self):
        return self.p + 1

    def basis(self):
        """Rows are lattice basis vectors as paravector components."""
        out = np.zeros((self.rank, self.n + 1))
        for j in range(self.rank):
            out[j, j] = float(self.N)
        return out

    def dual(self) -> "PeriodLattice":
        """Dual under the Euclidean pairing; scaling 1/N on the same axes."""
        return DualLattice(self.p, self.N, self.n)

    def period_cell(self):
        """Edge lengths of the fundamental box [0, N]^{p+1}."""
        return np.full(self.rank, float(self.N))

    def is_self_dual(self):
        return self.N == 1

    def contains(self, comps, tol=1e-9):
        comps = np.asarray(comps, dtype=float)
        if np.any(np.abs(comps[self.rank :]) > tol):
            return False
        scaled = comps[: self.rank] / self.N
        return bool(np.all(np.abs(scaled - np.round(scaled)) <= tol))


@dataclass(frozen=True)
class DualLattice(PeriodLattice):
    def basis(self):
        out = np.zeros((self.rank, self.n + 1))
        for j in range(self.rank):
            out[j, j] = 1.0 / self.N
        return out

    def dual(self):
        return PeriodLattice(self.p, self.N, self.n)

    def period_cell(self):
        return np.full(self.rank, 1.0 / self.N)

    def contains(self, comps, tol=1e-9):
        comps = np.asarray(comps, dtype=float)
        if np.any(np.abs(comps[self.rank :]) > tol):
            return False
        scaled = comps[: self.rank] * self.N
        return bool(np.all(np.abs(scaled - np.round(scaled)) <= tol))


def lattice_for(p, N, n) -> PeriodLattice:
    if N < 1:
        raise ValueError("level N must be a positive integer")
    if p >= n:
        raise ValueError("parameter p must stay below the ambient dimension n")
    return PeriodLattice(p, N, n)


def frequency_grid(lat: PeriodLattice, max_index):
    """Dual-lattice frequencies with integer index up to max_index per axis.

    Returns an array of shape (count, n+1); the zero frequency is included
    as the first row, remaining rows sorted by (norm, components).
    """
    rng = range(-max_index, max_index + 1)
    rows = []
    for multi in np.stack(np.meshgrid(*([list(rng)] * lat.rank), indexing="ij"), -1).reshape(
        -1, lat.rank
    ):
        comps = np.zeros(lat.n + 1)
        comps[: lat.rank] = multi / lat.N
        rows.append(comps)
    rows = np.array(rows)
    norms = np.linalg.norm(rows, axis=1)
    order = np.lexsort(tuple(rows[:, j] for j in reversed(range(lat.n + 1))) + (norms,))
    return rows[order]
