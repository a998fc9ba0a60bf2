"""Finite-difference Dirac, Laplacian and Weinstein operators on half-space.

Fields are black boxes (truncated series are only available pointwise), so
all operators use central-difference stencils with Fornberg weights.
Composite operators (iterated Laplacians, Dirac after Laplacian) are built
by convolving one-dimensional stencils into a single offset table, so each
application costs one batched field evaluation.

Conventions: D = d/dx_0 + e_1 d/dx_1 + ... + e_n d/dx_n, conj-D flips the
vector part, and conj(D) D equals the Euclidean Laplacian.  The split
f = Pf + (Qf) e_n is taken in the last generator.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import Multivector
from .blades import algebra, pairwise_sum

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class StencilSpec:
    """Step size, accuracy order and the intended total derivative order."""

    h: float
    order: int = 4
    m: int = 1

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("step size must be positive")
        if self.order not in (2, 4):
            raise ValueError("accuracy order must be 2 or 4")
        if self.m < 0:
            raise ValueError("derivative order must be nonnegative")


@dataclass(frozen=True)
class FieldFn:
    """Batched field: maps points (..., n+1) to coefficients (..., 2**n).

    margin is the Euclidean radius around evaluation points on which the
    field stays smooth; stencils must fit inside it (and inside x_n > 0).
    """

    func: object
    n: int
    margin: float = np.inf

    def __call__(self, points):
        return np.asarray(self.func(points), dtype=float)

    @classmethod
    def from_pointwise(cls, fn, n, margin=np.inf):
        """Wrap a single-point callable returning a Multivector or coeffs."""
        dim = 1 << n

        def batched(points):
            pts = np.asarray(points, dtype=float)
            flat = pts.reshape(-1, pts.shape[-1])
            out = np.empty((flat.shape[0], dim))
            for i, row in enumerate(flat):
                val = fn(row)
                out[i] = val.coeffs if isinstance(val, Multivector) else val
            return out.reshape(pts.shape[:-1] + (dim,))

        return cls(batched, n, margin)


# ----------------------------------------------------------------------
# stencil construction


def fornberg_weights(m, offsets, z=0.0):
    """Weights of derivatives 0..m at z from the given nodes, shape (m+1, len).

    Standard recursion on one-dimensional interpolation nodes; exact for
    polynomials up to the full nodal degree.
    """
    x = np.asarray(offsets, dtype=float)
    npts = x.size
    c = np.zeros((m + 1, npts))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - z
    for i in range(1, npts):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[s, i] = c1 * (s * c[s - 1, i - 1] - c5 * c[s, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for s in range(mn, 0, -1):
                c[s, j] = (c4 * c[s, j] - s * c[s - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@lru_cache(maxsize=None)
def _axis_weights(d, order):
    """(offsets, weights) of the central d-th derivative at unit spacing."""
    npts = 2 * ((d + 1) // 2) - 1 + order
    offs = np.arange(npts) - npts // 2
    w = fornberg_weights(d, offs)[d]
    return tuple(int(o) for o in offs), tuple(float(v) for v in w)


@dataclass(frozen=True)
class Stencil:
    """Offset table for one unit-spacing difference operator.

    table maps integer offset tuples (one slot per coordinate) to weights;
    degree is the total derivative order, so applying at step h divides by
    h**degree.
    """

    table: tuple
    degree: int
    n: int

    def items(self):
        return self.table

    @property
    def weight_sum_abs(self):
        return sum(abs(w) for _, w in self.table)

    @property
    def max_radius(self):
        return max(np.sqrt(sum(o * o for o in off)) for off, _ in self.table)


def _freeze(table, degree, n):
    items = tuple(sorted(table.items()))
    return Stencil(items, degree, n)


@lru_cache(maxsize=None)
def identity_stencil(n):
    return _freeze({(0,) * (n + 1): 1.0}, 0, n)


@lru_cache(maxsize=None)
def axis_stencil(n, axis, d, order):
    offs, w = _axis_weights(d, order)
    table = {}
    for o, v in zip(offs, w):
        key = [0] * (n + 1)
        key[axis] = o
        table[tuple(key)] = v
    return _freeze(table, d, n)


def compose_stencils(s1, s2):
    """Convolution; the result applies s1 after s2."""
    table = {}
    for off1, w1 in s1.items():
        for off2, w2 in s2.items():
            key = tuple(a + b for a, b in zip(off1, off2))
            table[key] = table.get(key, 0.0) + w1 * w2
    return _freeze(table, s1.degree + s2.degree, s1.n)


def add_stencils(s1, s2):
    if s1.degree != s2.degree:
        raise ValueError("can only add stencils of equal derivative order")
    table = dict(s1.table)
    for off, w in s2.items():
        table[off] = table.get(off, 0.0) + w
    return _freeze(table, s1.degree, s1.n)


@lru_cache(maxsize=None)
def laplace_stencil(n, order):
    st = axis_stencil(n, 0, 2, order)
    for axis in range(1, n + 1):
        st = add_stencils(st, axis_stencil(n, axis, 2, order))
    return st


@lru_cache(maxsize=None)
def laplace_iter_stencil(n, j, order):
    st = identity_stencil(n)
    for _ in range(j):
        st = compose_stencils(laplace_stencil(n, order), st)
    return st


@lru_cache(maxsize=None)
def _stencil_arrays(st):
    offs = np.array([off for off, _ in st.items()], dtype=float)
    w = np.array([wv for _, wv in st.items()])
    return offs, w


# ----------------------------------------------------------------------
# stencil application


def _resolve_h(x, spec):
    """Explicit step from the spec, else 1e-2 x_n per point."""
    if spec is not None:
        return np.asarray(spec.h, dtype=float)
    return 0.01 * np.asarray(x, dtype=float)[..., -1]


def apply_stencil(f, x, st, h, with_scale=False):
    """Difference quotient sum_off w(off) f(x + h off) / h**degree.

    x has shape (..., n+1); h is a scalar or matches the batch shape.
    Raises when the stencil leaves the upper half-space or the declared
    smoothness margin of the field.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    offs, w = _stencil_arrays(st)
    if np.any(h * st.max_radius > f.margin * (1.0 + 1e-12)):
        raise ValueError("stencil exceeds the declared smoothness margin")
    pts = x[..., None, :] + h[..., None, None] * offs
    if np.any(pts[..., -1] <= 0.0):
        raise ValueError("stencil leaves the upper half-space")
    vals = f(pts)
    scaled = w[:, None] * vals
    out = pairwise_sum(scaled, axis=-2) / h[..., None] ** st.degree
    if with_scale:
        return out, np.max(np.abs(vals), axis=(-2, -1))
    return out


def _as_components(x):
    if hasattr(x, "components"):
        return np.asarray(x.components, dtype=float)
    return np.asarray(x, dtype=float)


def _left_blade(coeffs, axis, alg):
    """e_axis * coeffs for a single basis direction (axis 0 is the scalar)."""
    if axis == 0:
        return coeffs
    mask = 1 << (axis - 1)
    out = np.empty_like(coeffs)
    out[..., alg.xor_table[mask]] = alg.sign_table[mask] * coeffs
    return out


def _right_blade(coeffs, axis, alg):
    if axis == 0:
        return coeffs
    mask = 1 << (axis - 1)
    out = np.empty_like(coeffs)
    out[..., alg.xor_table[:, mask]] = alg.sign_table[:, mask] * coeffs
    return out


def _dirac_lap_at_step(f, x, lap_power, h, order, side="left", conj=False):
    """Coefficients of D (Laplacian**lap_power f) at batched points."""
    alg = algebra(f.n)
    lap = laplace_iter_stencil(f.n, lap_power, order)
    out = None
    for axis in range(f.n + 1):
        st = compose_stencils(axis_stencil(f.n, axis, 1, order), lap)
        part = apply_stencil(f, x, st, h)
        if conj and axis > 0:
            part = -part
        part = _left_blade(part, axis, alg) if side == "left" else _right_blade(part, axis, alg)
        out = part if out is None else out + part
    return out


def _dirac_coeffs(f, x, spec, lap_power=0, side="left", conj=False):
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    return _dirac_lap_at_step(f, x, lap_power, h, order, side=side, conj=conj)


def dirac(f, x, spec=None):
    """Left Dirac derivative sum_j e_j d_j f as a Multivector."""
    return Multivector(f.n, _dirac_coeffs(f, _as_components(x), spec))


def right_dirac(f, x, spec=None):
    """Right Dirac derivative sum_j (d_j f) e_j."""
    return Multivector(f.n, _dirac_coeffs(f, _as_components(x), spec, side="right"))


def dirac_conj(f, x, spec=None):
    """Conjugated operator d_0 f - sum_j e_j d_j f."""
    return Multivector(f.n, _dirac_coeffs(f, _as_components(x), spec, conj=True))


def laplacian_iter(f, x, j, spec=None):
    """j-fold Euclidean Laplacian as a Multivector (j = 0 returns f(x))."""
    if j < 0:
        raise ValueError("Laplacian iterate needs j >= 0")
    x = _as_components(x)
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    st = laplace_iter_stencil(f.n, j, order)
    return Multivector(f.n, apply_stencil(f, x, st, h))


def partial_derivative(f, x, axis, spec=None, d=1):
    """Plain coordinate derivative of the coefficient functions."""
    x = _as_components(x)
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    return apply_stencil(f, x, axis_stencil(f.n, axis, d, order), h)


# ----------------------------------------------------------------------
# defect functionals


def _norm(coeffs):
    return np.sqrt(np.sum(coeffs * coeffs, axis=-1))


def kholo_defect(f, x, k, spec=None, with_estimate=False):
    """Norm of D Laplacian**(k/2) f at x (batched over leading axes).

    k must be even and nonnegative: negative k is covered by the x_n**k
    scaling reduction in the series module, so it is refused here.  With
    with_estimate=True also returns the step-halving error estimate.
    """
    if k < 0:
        raise ValueError(
            "negative k is handled through the scaling map of the series module"
        )
    if k % 2:
        raise ValueError("k must be even")
    x = _as_components(x)
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    defect = _norm(_dirac_lap_at_step(f, x, k // 2, h, order))
    if not with_estimate:
        return defect
    fine = _norm(_dirac_lap_at_step(f, x, k // 2, h / 2.0, order))
    est = np.abs(defect - fine) / (2.0**order - 1.0)
    return fine, est


def hypermonogenic_defect(f, x, k, spec=None):
    """Norm of D f + k (Qf)' / x_n; k = 0 reduces to the Dirac defect."""
    x = _as_components(x)
    df = _dirac_coeffs(f, x, spec)
    if k != 0:
        half = (1 << f.n) >> 1
        vals = f(x)
        sub = algebra(f.n - 1)
        qprime = vals[..., half:] * sub.involution_signs
        df = df.copy()
        df[..., :half] += k * qprime / x[..., -1:]
    return _norm(df)


def weinstein_defect(u, x, k, spec=None, variant="homogeneous"):
    """Weinstein defect of a (componentwise) field u.

    homogeneous: |Delta u - (k/x_n) d_n u|; the inhomogeneous variants add
    the zeroth-order term k u / x_n**2 ("xn2", primary) or k u / x_n
    ("xn1", kept for comparison).
    """
    x = _as_components(x)
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    lap = apply_stencil(u, x, laplace_stencil(u.n, order), h)
    dn = apply_stencil(u, x, axis_stencil(u.n, u.n, 1, order), h)
    xn = x[..., -1:]
    out = lap - (k / xn) * dn
    if variant == "homogeneous":
        pass
    elif variant == "xn2":
        out = out + k * u(x) / xn**2
    elif variant == "xn1":
        out = out + k * u(x) / xn
    else:
        raise ValueError(f"unknown Weinstein variant {variant!r}")
    return _norm(out)


def lb_defect(g, x, lam, spec=None):
    """Hyperbolic eigen-defect |Delta g - ((n-1)/x_n) d_n g + lam g/x_n**2|."""
    x = _as_components(x)
    order = spec.order if spec is not None else 4
    h = _resolve_h(x, spec)
    lap = apply_stencil(g, x, laplace_stencil(g.n, order), h)
    dn = apply_stencil(g, x, axis_stencil(g.n, g.n, 1, order), h)
    xn = x[..., -1:]
    out = lap - ((g.n - 1) / xn) * dn + lam * g(x) / xn**2
    return _norm(out)


def maass_eigenvalue(n, k):
    """lam = (n**2 - (k+1)**2) / 4."""
    return 0.25 * (n * n - (k + 1) ** 2)


# ----------------------------------------------------------------------
# kernel membership report


def _defect_at(f, x, k, h, order):
    alg = algebra(f.n)
    lap = laplace_iter_stencil(f.n, k // 2, order)
    out = None
    scale = 0.0
    wsum = 0.0
    for axis in range(f.n + 1):
        st = compose_stencils(axis_stencil(f.n, axis, 1, order), lap)
        part, sc = apply_stencil(f, x, st, h, with_scale=True)
        scale = np.maximum(scale, sc)
        wsum += st.weight_sum_abs
        part = _left_blade(part, axis, alg)
        out = part if out is None else out + part
    floor = EPS * scale * wsum / h ** (k // 2 * 2 + 1)
    return _norm(out), floor


def kernel_membership(f, k, sample_points, h_rel=None, order=4, tol_floor=1e-6):
    """Test D Laplacian**(k/2) f = 0 on a sample set with convergence check.

    Per point: defect at h = h_rel x_n, plus a coarse pair (4h, 2h) whose
    ratio estimates the convergence order away from the round-off floor.
    Points whose coarse defects already sit at the floor are counted as
    converged (the defect cannot decrease further).  Passes when every
    defect stays below max(tol_floor, 100 x round-off floor) and the median
    measured order reaches order - 0.5.
    """
    if k < 0 or k % 2:
        raise ValueError("kernel test needs even k >= 0")
    pts = np.asarray(sample_points, dtype=float)
    if h_rel is None:
        # balance truncation against round-off for the total order k+1
        h_rel = min(5e-2, max(1e-2, EPS ** (1.0 / (2 * (k + 1)))))
    h = h_rel * pts[..., -1]
    defect, floor = _defect_at(f, pts, k, h, order)
    d2, floor2 = _defect_at(f, pts, k, 2.0 * h, order)
    d4, _ = _defect_at(f, pts, k, 4.0 * h, order)
    measurable = d2 > 10.0 * floor2
    with np.errstate(divide="ignore", invalid="ignore"):
        order_est = np.where(measurable & (d2 > 0), np.log2(d4 / d2), np.inf)
    tol = np.maximum(tol_floor, 100.0 * floor)
    passed_points = defect <= tol
    measured = order_est[measurable & np.isfinite(order_est)]
    agg_order = float(np.median(measured)) if measured.size else np.inf
    report = {
        "points": pts,
        "h": h,
        "defect": defect,
        "defect_2h": d2,
        "defect_4h": d4,
        "order_estimate": order_est,
        "roundoff_floor": floor,
        "tolerance": tol,
        "max_defect": float(np.max(defect)),
        "order": agg_order,
        "passed": bool(np.all(passed_points) and agg_order >= order - 0.5),
    }
    return report
