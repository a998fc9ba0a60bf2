"""Truncated Eisenstein and Poincare series over congruence subgroups.

Series are built from the coset / group enumerations of the cosets module
and evaluated batched: a TruncatedForm maps points (..., n+1) in the upper
half-space to Clifford coefficients (..., 2**n).  Terms are accumulated in
the fixed enumeration order with pairwise (tree) summation per component,
chunked at a constant size, so values are bit-reproducible for a given
truncation regardless of batch shape.

Truncation quality is tracked by a shell estimate: term magnitudes are
collected over the two outermost dyadic shells of the enumeration and the
tail is the geometric continuation of the shell masses (an integral
comparison whose constant is calibrated on the computed shells, with a
factor-2 headroom).  When the shell masses fail to decay the estimate is
reported as inf rather than silently clipped; see
SeriesSpec.absolutely_convergent for the shell-count criterion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Multivector, Paravector
from .blades import (
    algebra,
    coeffs_to_paravector,
    gp,
    pairwise_sum,
    paravector_mask,
    paravector_to_coeffs,
    right_mult_blades,
)
from .cosets import enumerate_group_elements, rep_to_vahlen, rows_as_arrays, rows_packed
from .diffops import FieldFn
from .vahlen import (
    MIN_ADMISSIBLE_LEVEL,
    VahlenMatrix,
    as_point_array,
    automorphy_factor_batch,
    mobius_batch,
)

_TERM_CHUNK = 32768
_POINT_BLOCK = 256
_KINDS = (
    "eisenstein",
    "eisenstein-positive",
    "eisenstein-hecke",
    "poincare",
    "poincare-positive",
    "poincare-slash",
)


@dataclass(frozen=True)
class SeriesSpec:
    """Parameters of one truncated series.

    k is the (even) weight parameter; for the positive kinds it is the
    exponent j > 1 of the height prefactor x_n^j.  radius bounds the row
    (c, d) norm of the summed cosets; with d_radius set the cuts decouple
    (|c| <= radius, |d| <= d_radius), which converges the d-sums of the
    low-|c| shells far enough for Fourier work.  shift_radius bounds the
    translation part for the full-group Poincare kinds (defaults to
    radius).  w is the base point of a Poincare series, given as n+1
    paravector components.
    """

    n: int
    k: int
    p: int
    N: int
    radius: float
    kind: str = "eisenstein"
    hecke_s: float = None
    w: tuple = None
    shift_radius: float = None
    d_radius: float = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("ambient dimension n must be at least 1")
        if not (0 <= self.p <= self.n - 1):
            raise ValueError("need 0 <= p <= n - 1")
        if int(self.k) != self.k or self.k % 2 != 0:
            raise ValueError("weight parameter k must be an even integer")
        if self.N < MIN_ADMISSIBLE_LEVEL:
            raise ValueError(f"level must be at least {MIN_ADMISSIBLE_LEVEL}")
        if not self.radius > 0:
            raise ValueError("truncation radius must be positive")
        if self.d_radius is not None:
            if self.kind.startswith("poincare"):
                raise ValueError("rectangular truncation applies to row-sum kinds only")
            if not self.d_radius >= self.radius:
                raise ValueError("d_radius must be at least the row radius")
        if self.kind == "eisenstein" and not self.k < self.n - self.p - 1:
            raise ValueError("eisenstein series requires k < n - p - 1")
        if self.kind == "eisenstein-positive" and not self.k > 1:
            raise ValueError("positive-exponent eisenstein requires k > 1")
        if self.kind == "eisenstein-hecke":
            if self.k != 0 or self.p != self.n - 1:
                raise ValueError("hecke regularization is the k = 0, p = n - 1 case")
            if self.hecke_s is None or not (0.0 < self.hecke_s <= 0.5):
                raise ValueError("hecke_s must lie in (0, 0.5]")
        if self.kind == "poincare" and not self.k < -1:
            raise ValueError("poincare series requires k < -1")
        if self.kind == "poincare-positive" and not self.k > 1:
            raise ValueError("positive-weight poincare requires k > 1")
        if self.kind == "poincare-slash" and not self.k > 1:
            raise ValueError("slash-orbit poincare requires k > 1")
        if self.kind.startswith("poincare"):
            w = self.w_components
            if w.shape != (self.n + 1,) or not w[-1] > 0:
                raise ValueError("poincare base point w must be n+1 components with positive height")
            object.__setattr__(self, "w", tuple(float(v) for v in w))
        elif self.w is not None:
            raise ValueError("base point w only applies to poincare kinds")

    @property
    def w_components(self):
        if self.w is None:
            raise ValueError("series spec has no base point")
        if isinstance(self.w, Paravector):
            return np.asarray(self.w.components, dtype=float)
        return np.asarray(self.w, dtype=float)

    @property
    def shift_bound(self):
        return self.radius if self.shift_radius is None else self.shift_radius

    @property
    def term_exponent(self):
        """Exponent on the denominator norm of one series factor."""
        if self.kind in ("eisenstein-positive", "poincare-positive"):
            return self.n + 1 + self.k
        return self.n + 1 - self.k

    @property
    def absolutely_convergent(self):
        """Shell-count criterion for the scalar majorant of the series.

        Rows populate radial shells like r^{2p+1} dr while one term decays
        like r^{-(exponent-1)}, so the majorant shells shrink only when
        exponent - 1 > 2p + 2.  Between this bound and the definition's
        acceptance threshold the truncated sum is still well defined (fixed
        summation order); tail estimates may then report inf.
        """
        return self.term_exponent - 1 > 2 * self.p + 2


# ----------------------------------------------------------------------
# term evaluation cores


def _flatten_points(points):
    pts = as_point_array(points)
    if pts.shape[-1] < 2:
        raise ValueError("points need at least two components")
    return pts.reshape(-1, pts.shape[-1]), pts.shape[:-1]


def _chunks(total, size=_TERM_CHUNK):
    for lo in range(0, total, size):
        yield lo, min(lo + size, total)


def _blocked(pts, block_fn):
    """Apply block_fn to point blocks of bounded size and concatenate.

    Per-point results are independent, so blocking changes nothing but the
    peak memory of the (points x terms) intermediates.
    """
    if pts.shape[0] <= _POINT_BLOCK:
        return block_fn(pts)
    return np.concatenate([block_fn(pts[lo:hi]) for lo, hi in _chunks(pts.shape[0], _POINT_BLOCK)], axis=0)


def _row_sum(pts, c_arr, d_arr, alg, power, s=None, majorant=False):
    """Sum conj(c x + d) / |c x + d|^power over rows, chunked and pairwise.

    With s set, each term carries the extra scalar factor (x_n / |cxd|^2)^s.
    majorant=True instead accumulates plain per-term magnitudes (..., T_kept)
    for the shell-based tail estimate; caller masks rows itself in that case.
    """
    if pts.shape[0] > _POINT_BLOCK:
        return _blocked(pts, lambda blk: _row_sum(blk, c_arr, d_arr, alg, power, s, majorant))
    conj = alg.conjugation_signs
    partials = []
    for lo, hi in _chunks(c_arr.shape[0]):
        rc = right_mult_blades(c_arr[lo:hi], alg)
        den = np.einsum("xj,tjd->xtd", pts, rc) + d_arr[lo:hi]
        nsq = np.sum(den * den, axis=-1)
        if np.any(nsq <= 0.0):
            raise ZeroDivisionError("series denominator vanishes at some point")
        if majorant:
            mags = nsq ** (-(power - 1) / 2.0)
            if s is not None:
                mags = mags * (pts[:, -1:] / nsq) ** s
            partials.append(mags)
            continue
        terms = den * conj * nsq[..., None] ** (-power / 2.0)
        if s is not None:
            terms = terms * ((pts[:, -1:] / nsq) ** s)[..., None]
        partials.append(pairwise_sum(terms, axis=-2))
    if majorant:
        return np.concatenate(partials, axis=-1)
    return pairwise_sum(np.stack(partials, axis=0), axis=0)


def _group_sum(pts, mats, alg, power, w_comps, majorant=False):
    """Sum J-factor times the shifted kernel over whole group elements.

    mats is the (4, T, dim) entry stack (a, b, c, d); each term is
    conj(c x + d) (w + M<x>)-kernel with both norms raised to -power.
    """
    if pts.shape[0] > _POINT_BLOCK:
        return _blocked(pts, lambda blk: _group_sum(blk, mats, alg, power, w_comps, majorant))
    a_arr, b_arr, c_arr, d_arr = mats
    conj = alg.conjugation_signs
    mask = paravector_mask(alg)
    w_row = np.asarray(w_comps, dtype=float)
    partials = []
    for lo, hi in _chunks(c_arr.shape[0]):
        ra = right_mult_blades(a_arr[lo:hi], alg)
        rc = right_mult_blades(c_arr[lo:hi], alg)
        num = np.einsum("xj,tjd->xtd", pts, ra) + b_arr[lo:hi]
        den = np.einsum("xj,tjd->xtd", pts, rc) + d_arr[lo:hi]
        nsq = np.sum(den * den, axis=-1)
        if np.any(nsq <= 0.0):
            raise ZeroDivisionError("series denominator vanishes at some point")
        image = gp(num, den * conj, alg) / nsq[..., None]
        junk = np.max(np.abs(image[..., ~mask]), initial=0.0)
        scale = np.max(np.abs(image), initial=1.0)
        if junk > 1e-9 * max(scale, 1.0):
            raise ValueError(f"Mobius image leaks outside paravector grades ({junk:.2e})")
        z = w_row + coeffs_to_paravector(image, alg)
        znsq = np.sum(z * z, axis=-1)
        if np.any(znsq <= 0.0):
            raise ZeroDivisionError("poincare kernel hits its pole; move the base point")
        if majorant:
            partials.append((nsq * znsq) ** (-(power - 1) / 2.0))
            continue
        zc = paravector_to_coeffs(z, alg) * conj
        terms = gp(den * conj, zc, alg)
        terms = terms * (nsq * znsq)[..., None] ** (-power / 2.0)
        partials.append(pairwise_sum(terms, axis=-2))
    if majorant:
        return np.concatenate(partials, axis=-1)
    return pairwise_sum(np.stack(partials, axis=0), axis=0)


def _shell_tail(norms, mags, radius, headroom=2.0):
    """Geometric continuation of the outer dyadic shell masses.

    norms: (T,) enumeration radii; mags: (..., T) per-term magnitudes.
    Returns per-point tail estimates; inf when the shells fail to decay or
    are too thin to calibrate.
    """
    inner = (norms > 0.25 * radius) & (norms <= 0.5 * radius)
    outer = (norms > 0.5 * radius) & (norms <= radius)
    if inner.sum() < 8 or outer.sum() < 8:
        return np.full(mags.shape[:-1], np.inf)
    m1 = np.sum(mags[..., inner], axis=-1)
    m2 = np.sum(mags[..., outer], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(m1 > 0, m2 / np.where(m1 > 0, m1, 1.0), np.inf)
        tail = np.where(q < 0.95, headroom * m2 * q / (1.0 - q), np.inf)
    return np.where(m2 == 0.0, 0.0, tail)


# ----------------------------------------------------------------------
# truncated form container


class TruncatedForm:
    """A finitely truncated series: callable evaluator plus tail report.

    count is the number of summed terms; tail_bound is the shell estimate of
    the dropped mass at the reference point the form was built with (never
    silently absorbed into values: callers compare it to their tolerance).
    """

    def __init__(self, spec, count, evaluator, tail_fn, reference=None):
        self.spec = spec
        self.count = count
        self._evaluator = evaluator
        self._tail_fn = tail_fn
        ref = np.zeros(spec.n + 1) if reference is None else as_point_array(reference)
        if ref.ndim == 1 and ref[-1] == 0.0:
            ref = ref.copy()
            ref[-1] = 1.0
        self.reference = ref
        self.tail_bound = float(np.max(tail_fn(ref.reshape(-1, spec.n + 1))))

    def __call__(self, points):
        pts = as_point_array(points)
        return self._evaluator(pts)

    @property
    def field(self):
        return FieldFn(self._evaluator, self.spec.n)

    def tail_at(self, points):
        """Per-point tail estimate of the truncation, same shell fit."""
        flat, lead = _flatten_points(points)
        return self._tail_fn(flat).reshape(lead)


# ----------------------------------------------------------------------
# kernels and elementary maps


def kernel_gk(x, k, n=None):
    """Weighted Cauchy kernel conj(x) / |x|^{n+1-k} as a Multivector."""
    if isinstance(x, Paravector):
        n = x.n
        comps = np.asarray(x.components, dtype=float)
    else:
        comps = np.atleast_1d(np.asarray(x, dtype=float))
        if n is None:
            raise ValueError("pass the ambient dimension n for raw components")
        if comps.shape == (1,):
            comps = np.concatenate([comps, np.zeros(n)])
    alg = algebra(n)
    coeffs = paravector_to_coeffs(comps, alg) * alg.conjugation_signs
    nsq = float(np.sum(comps * comps))
    if nsq <= 0.0:
        raise ZeroDivisionError("kernel pole at the origin")
    return Multivector(n, coeffs / nsq ** ((n + 1 - k) / 2.0))


def kernel_field(n, k, shift=None):
    """Batched field x -> conj(x - shift) / |x - shift|^{n+1-k}.

    Singular at the shift point; keep stencil footprints away from it.
    """
    alg = algebra(n)
    off = None if shift is None else np.asarray(as_point_array(shift), dtype=float)
    power = (n + 1 - k) / 2.0

    def evaluate(points):
        pts = np.asarray(points, dtype=float)
        if off is not None:
            pts = pts - off
        nsq = np.sum(pts * pts, axis=-1)
        return paravector_to_coeffs(pts, alg) * alg.conjugation_signs / nsq[..., None] ** power

    return FieldFn(evaluate, n)


def _as_field(f, n=None):
    """Coerce a TruncatedForm, FieldFn or plain callable to (callable, n)."""
    if isinstance(f, TruncatedForm):
        return f._evaluator, f.spec.n
    if isinstance(f, FieldFn):
        return f, f.n
    if callable(f):
        if n is None:
            raise ValueError("pass the ambient dimension n for plain callables")
        return f, n
    raise TypeError("expected a TruncatedForm, FieldFn or callable")


def slash_transform(f, m: VahlenMatrix, k):
    """Weight-k slash action: x -> J(m, x; k) f(m<x>) as a batched field.

    Composes as a right action: slash(slash(f, A), B) == slash(f, A B).
    """
    fn, _ = _as_field(f, m.n)
    alg = algebra(m.n)

    def evaluate(points):
        pts = np.asarray(points, dtype=float)
        image, _ = mobius_batch(m, pts)
        factor = automorphy_factor_batch(m, pts, k)
        return gp(factor, np.asarray(fn(image), dtype=float), alg)

    return FieldFn(evaluate, m.n)


def scale_map(f, k, n=None):
    """Divide a field by x_n^k; exchanges the parameter k with -k + 2.

    The exchange lands in the computable kernel only for k <= 0 sources
    (then -k + 2 >= 2); scaling a positive-k kernel member does not produce
    a kernel member, it re-expresses it as the formal negative-parameter
    object.  Roundtrip scale_map(scale_map(f, k), -k) is the identity.
    """
    fn, dim_n = _as_field(f, n)
    if k == 0:
        return fn if isinstance(fn, FieldFn) else FieldFn(fn, dim_n)

    def evaluate(points):
        pts = np.asarray(points, dtype=float)
        vals = np.asarray(fn(pts), dtype=float)
        return vals * pts[..., -1:] ** (-k)

    return FieldFn(evaluate, dim_n)


def maass_lift(f, k, n=None):
    """Multiply by x_n^{(n-1-k)/2}, turning k-hypermonogenic parts into
    eigenfunctions of the hyperbolic Laplace-Beltrami operator."""
    fn, dim_n = _as_field(f, n)
    power = (dim_n - 1 - k) / 2.0

    def evaluate(points):
        pts = np.asarray(points, dtype=float)
        return np.asarray(fn(pts), dtype=float) * pts[..., -1:] ** power

    return FieldFn(evaluate, dim_n)


# ----------------------------------------------------------------------
# series builders


def _row_data(spec):
    c_arr, d_arr = rows_packed(spec.p, spec.N, spec.radius, spec.n, spec.d_radius)
    norms = np.sqrt(np.sum(c_arr * c_arr, -1) + np.sum(d_arr * d_arr, -1))
    return c_arr, d_arr, norms


def eisenstein(spec: SeriesSpec, reference=None) -> TruncatedForm:
    """Truncated sum of conj(c x + d) / |c x + d|^{n+1-k} over coset rows."""
    if spec.kind != "eisenstein":
        raise ValueError("spec.kind must be 'eisenstein'")
    alg = algebra(spec.n)
    c_arr, d_arr, norms = _row_data(spec)
    power = spec.term_exponent

    def evaluate(points):
        flat, lead = _flatten_points(points)
        out = _row_sum(flat, c_arr, d_arr, alg, power)
        return out.reshape(lead + (alg.dim,))

    # rectangular cuts leave whole dropped |c| shells behind the joint-norm
    # front, so calibrate the shell continuation on that front instead
    tail_radius = spec.radius if spec.d_radius is None else float(np.max(norms, initial=spec.radius))

    def tail(flat_pts):
        mags = _row_sum(flat_pts, c_arr, d_arr, alg, power, majorant=True)
        return _shell_tail(norms, mags, tail_radius)

    return TruncatedForm(spec, c_arr.shape[0], evaluate, tail, reference)


def eisenstein_positive(spec: SeriesSpec, include_en=True, reference=None) -> TruncatedForm:
    """Positive-exponent series x_n^j sum conj(c x + d) e_n / |c x + d|^{n+1+j}.

    The trailing unit e_n is a constant right factor; include_en=False drops
    it (both versions transform identically, the factor commutes with the
    summation).
    """
    if spec.kind != "eisenstein-positive":
        raise ValueError("spec.kind must be 'eisenstein-positive'")
    alg = algebra(spec.n)
    c_arr, d_arr, norms = _row_data(spec)
    power = spec.term_exponent
    j = spec.k
    en = np.zeros(alg.dim)
    en[1 << (spec.n - 1)] = 1.0

    def evaluate(points):
        flat, lead = _flatten_points(points)
        out = _row_sum(flat, c_arr, d_arr, alg, power)
        if include_en:
            out = gp(out, en, alg)
        out = out * flat[:, -1:] ** j
        return out.reshape(lead + (alg.dim,))

    def tail(flat_pts):
        mags = _row_sum(flat_pts, c_arr, d_arr, alg, power, majorant=True)
        mags = mags * flat_pts[:, -1:] ** j
        return _shell_tail(norms, mags, spec.radius)

    return TruncatedForm(spec, c_arr.shape[0], evaluate, tail, reference)


def eisenstein_hecke(spec: SeriesSpec, reference=None) -> TruncatedForm:
    """Regularized k = 0 series on the critical line p = n - 1.

    Each term carries the factor (x_n / |c x + d|^2)^s; the evaluator runs
    the ladder {s, s/2, s/4} and Richardson-extrapolates to s -> 0+, which
    cancels the linear and quadratic s-dependence.  Ladder values are
    available through hecke_ladder for stability checks.
    """
    if spec.kind != "eisenstein-hecke":
        raise ValueError("spec.kind must be 'eisenstein-hecke'")
    alg = algebra(spec.n)
    c_arr, d_arr, norms = _row_data(spec)
    power = spec.term_exponent
    s0 = spec.hecke_s

    def ladder(points):
        flat, lead = _flatten_points(points)
        shape = lead + (alg.dim,)
        return {
            s: _row_sum(flat, c_arr, d_arr, alg, power, s=s).reshape(shape)
            for s in (s0, s0 / 2.0, s0 / 4.0)
        }

    def evaluate(points):
        vals = list(ladder(points).values())
        return (8.0 * vals[2] - 6.0 * vals[1] + vals[0]) / 3.0

    def tail(flat_pts):
        mags = _row_sum(flat_pts, c_arr, d_arr, alg, power, majorant=True)
        # Richardson weights (1, -6, 8)/3 can amplify the dropped mass 5x
        return 5.0 * _shell_tail(norms, mags, spec.radius)

    form = TruncatedForm(spec, c_arr.shape[0], evaluate, tail, reference)
    form.hecke_ladder = ladder
    return form


def _group_data(spec):
    els = enumerate_group_elements(spec.p, spec.N, spec.radius, spec.shift_bound)
    mats = np.stack(rows_as_arrays(els, spec.n), axis=0)
    norms = np.sqrt(np.sum(mats * mats, axis=(0, 2)))
    return mats, norms


def poincare(spec: SeriesSpec, reference=None) -> TruncatedForm:
    """Two-point series summed over whole group elements M = T_lam R:

        sum_M  conj(c x + d)/|c x + d|^{n+1-k} * K(w + M<x>),

    K the same-weight kernel.  Truncation keeps rows with |(c,d)| <= radius
    and translation parts with |lam| <= shift_radius; the element list is
    duplicate-free because the factorization T_lam R is unique.
    """
    if spec.kind != "poincare":
        raise ValueError("spec.kind must be 'poincare'")
    alg = algebra(spec.n)
    mats, norms = _group_data(spec)
    power = spec.term_exponent
    w_comps = spec.w_components

    def evaluate(points):
        flat, lead = _flatten_points(points)
        out = _group_sum(flat, mats, alg, power, w_comps)
        return out.reshape(lead + (alg.dim,))

    def tail(flat_pts):
        mags = _group_sum(flat_pts, mats, alg, power, w_comps, majorant=True)
        return _shell_tail(norms, mags, max(spec.radius, spec.shift_bound))

    return TruncatedForm(spec, mats.shape[1], evaluate, tail, reference)


def poincare_positive(spec: SeriesSpec, reference=None) -> TruncatedForm:
    """Positive-weight mirror of poincare: x_n^k prefactor and both norms
    raised to -(n+1+k)."""
    if spec.kind != "poincare-positive":
        raise ValueError("spec.kind must be 'poincare-positive'")
    alg = algebra(spec.n)
    mats, norms = _group_data(spec)
    power = spec.term_exponent
    w_comps = spec.w_components
    k = spec.k

    def evaluate(points):
        flat, lead = _flatten_points(points)
        out = _group_sum(flat, mats, alg, power, w_comps)
        out = out * flat[:, -1:] ** k
        return out.reshape(lead + (alg.dim,))

    def tail(flat_pts):
        mags = _group_sum(flat_pts, mats, alg, power, w_comps, majorant=True)
        mags = mags * flat_pts[:, -1:] ** k
        return _shell_tail(norms, mags, max(spec.radius, spec.shift_bound))

    return TruncatedForm(spec, mats.shape[1], evaluate, tail, reference)


def poincare_slash(spec: SeriesSpec, reference=None) -> TruncatedForm:
    """Weight-k slash orbit of the shifted kernel for positive k > 1:

        sum_M  conj(c x + d)/|c x + d|^{n+1-k} * K_k(w + M<x>),

    K_k(y) = conj(y)/|y|^{n+1-k}.  Every summand is the weight-k slash of a
    translate of K_k, so the truncation sits in the parameter k + 2 kernel
    exactly, term by term, while the e_n component of w breaks the
    height-weighted split.  The infinite sum has no scalar majorant for
    k > 1 (absolutely_convergent is False); the object is the truncation
    itself and tail estimates report inf when the shells grow.
    """
    if spec.kind != "poincare-slash":
        raise ValueError("spec.kind must be 'poincare-slash'")
    alg = algebra(spec.n)
    mats, norms = _group_data(spec)
    power = spec.term_exponent
    w_comps = spec.w_components

    def evaluate(points):
        flat, lead = _flatten_points(points)
        out = _group_sum(flat, mats, alg, power, w_comps)
        return out.reshape(lead + (alg.dim,))

    def tail(flat_pts):
        mags = _group_sum(flat_pts, mats, alg, power, w_comps, majorant=True)
        return _shell_tail(norms, mags, max(spec.radius, spec.shift_bound))

    return TruncatedForm(spec, mats.shape[1], evaluate, tail, reference)


# ----------------------------------------------------------------------
# cusp vanishing check


def cusp_test(f, k, reps, p, N, n, heights=(4.0, 8.0, 16.0), tol=1e-3, decay=0.95):
    """Check vanishing toward the cusp along every representative.

    For each representative R the values x_n^{-k} J(R, x_n e_n; k) f(R<x_n e_n>)
    are evaluated along the increasing height ladder (the x_n^{-k} factor is
    omitted for positive k, where J already supplies the decay).  A
    representative passes when the norms decay monotonically (ratio <= decay)
    and the final value sits below tol.  Returns a report dict; 'passed'
    requires every representative to pass.
    """
    fn, _ = _as_field(f, n)
    heights = np.asarray(sorted(heights), dtype=float)
    if heights.ndim != 1 or len(heights) < 2 or heights[0] <= 0:
        raise ValueError("need at least two positive heights")
    alg = algebra(n)
    pts = np.zeros((len(heights), n + 1))
    pts[:, -1] = heights
    prefactor = heights ** (-k) if k <= 0 else np.ones_like(heights)
    mats = [rep if isinstance(rep, VahlenMatrix) else rep_to_vahlen(rep, p, N, n) for rep in reps]
    images = np.empty((len(mats), len(heights), n + 1))
    factors = np.empty((len(mats), len(heights), alg.dim))
    for i, m in enumerate(mats):
        images[i], _ = mobius_batch(m, pts)
        factors[i] = automorphy_factor_batch(m, pts, k)
    # one batched field evaluation over every representative's ladder
    values = np.asarray(fn(images.reshape(-1, n + 1)), dtype=float)
    values = gp(factors, values.reshape(images.shape[:2] + (alg.dim,)), alg)
    norms = prefactor * np.sqrt(np.sum(values * values, axis=-1))
    per_rep = []
    for nrm in norms:
        floor = 1e-13 * max(np.max(nrm), 1.0)
        monotone = bool(np.all(nrm[1:] <= decay * nrm[:-1] + floor))
        per_rep.append(
            {
                "values": nrm.tolist(),
                "passed": monotone and nrm[-1] < tol,
            }
        )
    failing = [i for i, r in enumerate(per_rep) if not r["passed"]]
    return {
        "heights": heights.tolist(),
        "tol": tol,
        "k": k,
        "count": len(per_rep),
        "per_rep": per_rep,
        "failing": failing,
        "passed": not failing,
    }
