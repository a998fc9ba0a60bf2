"""Fourier analysis of lattice-periodic Clifford fields on upper half-space.

Coefficients are extracted with a tensor trapezoid rule over one period
cell (spectrally accurate for periodic integrands) and fitted against the
height profiles that solve the frequency-space ODE system: modified Bessel
K at half-integer order for nonzero frequencies, power laws for the zero
mode.  The zero-mode exponents are the indicial roots {0, k+1} on the P
channels and {1, k} on the Q channels; the roots only collide at odd k,
which even weights exclude.

All Fourier data is complex.  The structure tensors of the algebra are
real, so geometric products extend to complex coefficient arrays as-is.
"""

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_k_half
from .blades import algebra, gp, paravector_to_coeffs
from .diffops import FieldFn
from .series import _as_field, slash_transform
from .cosets import rep_to_vahlen
from .vahlen import VahlenMatrix

DEFAULT_HEIGHTS = (0.5, 0.75, 1.0, 1.5, 2.0, 3.0)

__all__ = [
    "DEFAULT_HEIGHTS",
    "FourierRecord",
    "ZeroFreqProfile",
    "coupled_profile_residual",
    "coupling_defect",
    "cusp_coefficient_test",
    "dual_frequencies",
    "exponential_profile_fit",
    "fit_bessel_profile",
    "fit_zero_frequency",
    "fourier_coefficient",
    "fourier_coefficients",
    "idempotent_split",
    "monogenic_plane_wave",
]


def dual_frequencies(N, n, max_norm, include_zero=False):
    """Frequencies of N-periodic fields: (1/N) Z^n up to |omega| <= max_norm.

    Returned as an (M, n) array sorted by (norm, lex order) so downstream
    consumers see a deterministic ordering.
    """
    if max_norm <= 0:
        raise ValueError("max_norm must be positive")
    reach = int(np.floor(max_norm * N))
    axes = [np.arange(-reach, reach + 1)] * n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    omegas = grid / float(N)
    norms = np.linalg.norm(omegas, axis=1)
    keep = norms <= max_norm + 1e-12
    if not include_zero:
        keep &= norms > 1e-12
    omegas, norms = omegas[keep], norms[keep]
    order = np.lexsort(tuple(omegas[:, j] for j in reversed(range(n))) + (norms,))
    return omegas[order]


def _check_periodic(fn, N, n, tol):
    rng = np.random.default_rng(0)
    probes = np.column_stack([rng.uniform(0.0, N, (3, n)), rng.uniform(0.9, 1.4, 3)])
    base = np.asarray(fn(probes))
    scale = max(float(np.max(np.abs(base))), 1.0)
    for axis in range(n):
        shifted = probes.copy()
        shifted[:, axis] += N
        dev = np.max(np.abs(np.asarray(fn(shifted)) - base))
        if dev > tol * scale:
            raise ValueError(
                f"field is not {N}-periodic along axis {axis} (defect {dev:.2e})"
            )


def fourier_coefficients(f, omegas, heights, N, n=None, m=8, check_periodic=True,
                         periodic_tol=1e-2):
    """Trapezoid-rule coefficients c(omega; x_n) on the m^n period grid.

    Returns a complex array of shape (len(omegas), len(heights), 2^n).
    The grid must resolve the requested frequencies: m >= 4 max index + 2.
    """
    fn, n = _as_field(f, n)
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    if omegas.shape[1] != n:
        raise ValueError(f"frequencies must have {n} components")
    heights = np.asarray(heights, dtype=float)
    max_index = int(np.max(np.abs(np.round(omegas * N)), initial=0))
    if m < 4 * max_index + 2:
        raise ValueError(f"grid m={m} cannot resolve frequency index {max_index}")
    if check_periodic:
        # truncated series wobble at the cell boundary; reject only gross breaks
        _check_periodic(fn, N, n, periodic_tol)
    ticks = np.arange(m) * (N / m)
    mesh = np.stack(np.meshgrid(*([ticks] * n), indexing="ij"), axis=-1).reshape(-1, n)
    pts = np.empty((len(heights), mesh.shape[0], n + 1))
    pts[..., :n] = mesh
    pts[..., n] = heights[:, None]
    vals = np.asarray(fn(pts.reshape(-1, n + 1)))
    vals = vals.reshape(len(heights), mesh.shape[0], -1)
    phases = np.exp(-2j * np.pi * (mesh @ omegas.T))  # (grid, M)
    return np.einsum("gM,hgd->Mhd", phases, vals, optimize=True) / mesh.shape[0]


def fourier_coefficient(f, omega, x_n, N, n=None, m=8, check_periodic=True,
                        periodic_tol=1e-2):
    """Single coefficient; see fourier_coefficients."""
    out = fourier_coefficients(
        f, np.asarray(omega, dtype=float)[None], [float(x_n)], N, n=n, m=m,
        check_periodic=check_periodic, periodic_tol=periodic_tol,
    )
    return out[0, 0]


# ----------------------------------------------------------------------
# profile fits


@dataclass
class ZeroFreqProfile:
    """Zero-frequency height profile a + alpha x^{k+1} + (b x + beta x^k) e_n.

    Coefficients live in Cl_{n-1} (complex); exponents records the indicial
    roots actually used per channel group.
    """

    a: np.ndarray
    alpha: np.ndarray
    b: np.ndarray
    beta: np.ndarray
    k: int
    exponents: tuple
    residual: float
    merged: bool

    def reconstruct(self, heights):
        heights = np.asarray(heights, dtype=float)
        e0, e1, e2, e3 = self.exponents
        p_part = self.a[None] * heights[:, None] ** e0 + self.alpha[None] * heights[:, None] ** e1
        q_part = self.b[None] * heights[:, None] ** e2 + self.beta[None] * heights[:, None] ** e3
        return np.concatenate([p_part, q_part], axis=1)


def _lstsq_profiles(design, targets, guard_label):
    """Least squares per column with conditioning guard; returns coeffs, rank."""
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0.0):
        raise ValueError(f"{guard_label}: degenerate profile column")
    cond = np.linalg.cond(design / scale)
    if cond > 1e8:
        raise ValueError(f"{guard_label}: height set is ill-conditioned ({cond:.2e})")
    coeffs, _, rank, _ = np.linalg.lstsq(design / scale, targets, rcond=None)
    return coeffs / scale[:, None], rank


def fit_zero_frequency(heights, coeffs, k, n):
    """Fit the zero-mode power laws; coeffs has shape (H, 2^n), complex ok."""
    heights = np.asarray(heights, dtype=float)
    coeffs = np.asarray(coeffs)
    if len(heights) < 4:
        raise ValueError("need at least four heights for the four-parameter fit")
    if len(np.unique(heights)) != len(heights):
        raise ValueError("heights must be distinct")
    half = 1 << (n - 1)
    exps = (0, k + 1, 1, k)
    p_design = np.column_stack([heights ** exps[0], heights ** exps[1]])
    q_design = np.column_stack([heights ** exps[2], heights ** exps[3]])
    p_fit, p_rank = _lstsq_profiles(p_design, coeffs[:, :half], "zero-mode P fit")
    q_fit, q_rank = _lstsq_profiles(q_design, coeffs[:, half:], "zero-mode Q fit")
    profile = ZeroFreqProfile(
        a=p_fit[0], alpha=p_fit[1], b=q_fit[0], beta=q_fit[1], k=k,
        exponents=exps, residual=0.0, merged=(p_rank < 2 or q_rank < 2),
    )
    recon = profile.reconstruct(heights)
    scale = max(float(np.max(np.linalg.norm(coeffs, axis=1))), 1e-300)
    profile.residual = float(np.max(np.linalg.norm(coeffs - recon, axis=1)) / scale)
    return profile


@dataclass
class FourierRecord:
    """One frequency: raw coefficients per height and the fitted K-profiles."""

    omega: np.ndarray
    heights: np.ndarray
    coeffs: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    k: int
    residual: float

    def reconstruct(self):
        f1, f2 = _bessel_pair(self.heights, self.omega, self.k)
        return np.concatenate(
            [f1[:, None] * self.alpha[None], f2[:, None] * self.beta[None]], axis=1
        )


def _bessel_pair(heights, omega, k):
    heights = np.asarray(heights, dtype=float)
    arg = 2.0 * np.pi * np.linalg.norm(omega) * heights
    pref = heights ** ((k + 1) / 2.0)
    return (
        pref * bessel_k_half((k + 1) / 2.0, arg),
        pref * bessel_k_half((k - 1) / 2.0, arg),
    )


def fit_bessel_profile(heights, coeffs, omega, k, n):
    """Fit c(omega; x_n) against the two half-integer K profiles.

    P channels carry x^{(k+1)/2} K_{(k+1)/2}(2 pi |omega| x) alpha and Q
    channels x^{(k+1)/2} K_{(k-1)/2}(...) beta; alpha, beta are returned as
    Cl_{n-1} coefficient vectors and the residual is relative to the
    largest coefficient norm over the heights.
    """
    heights = np.asarray(heights, dtype=float)
    coeffs = np.asarray(coeffs)
    if len(heights) < 3:
        raise ValueError("need at least three heights")
    omega = np.asarray(omega, dtype=float)
    if np.linalg.norm(omega) <= 0:
        raise ValueError("zero frequency has its own fit")
    f1, f2 = _bessel_pair(heights, omega, k)
    cos = abs(np.dot(f1, f2)) / (np.linalg.norm(f1) * np.linalg.norm(f2))
    if cos > 1.0 - 1e-10:
        raise ValueError("the two K profiles are collinear at these heights")
    half = 1 << (n - 1)
    alpha, _ = _lstsq_profiles(f1[:, None], coeffs[:, :half], "K profile fit")
    beta, _ = _lstsq_profiles(f2[:, None], coeffs[:, half:], "K profile fit")
    record = FourierRecord(
        omega=omega, heights=heights, coeffs=coeffs,
        alpha=alpha[0], beta=beta[0], k=k, residual=0.0,
    )
    recon = record.reconstruct()
    scale = max(float(np.max(np.linalg.norm(coeffs, axis=1))), 1e-300)
    record.residual = float(np.max(np.linalg.norm(coeffs - recon, axis=1)) / scale)
    return record


def exponential_profile_fit(heights, coeffs, omega):
    """Fit c(omega; x_n) = A e^{-2 pi |omega| x_n}, the k = 0 profile.

    At k = 0 both half-integer orders coincide, K_{1/2} = K_{-1/2}, and the
    height prefactor cancels the Bessel envelope exactly, leaving a pure
    exponential.  Returns (A, residual) with the residual relative to the
    largest coefficient norm, like fit_bessel_profile.
    """
    heights = np.asarray(heights, dtype=float)
    coeffs = np.asarray(coeffs)
    prof = np.exp(-2.0 * np.pi * np.linalg.norm(omega) * heights)
    amp = (prof[:, None] * coeffs).sum(axis=0) / (prof**2).sum()
    scale = max(float(np.max(np.linalg.norm(coeffs, axis=1))), 1e-300)
    resid = float(np.max(np.linalg.norm(coeffs - prof[:, None] * amp, axis=1)) / scale)
    return amp, resid


def _omega_hat_coeffs(omega, n):
    comps = np.zeros(n + 1)
    comps[:n] = np.asarray(omega, dtype=float)
    nrm = np.linalg.norm(comps)
    if nrm <= 0:
        raise ValueError("zero frequency has no direction")
    return paravector_to_coeffs(comps / nrm, algebra(n))


def coupling_defect(record, n):
    """Height-split coupling: beta e_n == -i e_n omega_hat alpha, relative.

    Functions with the height-weighted split satisfy this with one free
    coefficient per frequency; generic superpositions violate it.
    """
    alg = algebra(n)
    half = 1 << (n - 1)
    en = np.zeros(alg.dim)
    en[half] = 1.0
    full = np.zeros(alg.dim, dtype=complex)
    full[:half] = record.beta
    lhs = gp(full, en, alg)
    alpha_full = np.zeros(alg.dim, dtype=complex)
    alpha_full[:half] = record.alpha
    rhs = -1j * gp(gp(en, _omega_hat_coeffs(record.omega, n), alg), alpha_full, alg)
    scale = max(float(np.linalg.norm(record.alpha)), 1e-300)
    return float(np.linalg.norm(lhs - rhs) / scale)


def coupled_profile_residual(record, n):
    """Residual of the profile with beta forced onto the coupling relation.

    Rebuilds the height profile from alpha alone, with beta e_n replaced by
    -i e_n omega_hat alpha, and measures it against the raw coefficients on
    the same scale as record.residual.  For a height-split form the two
    residuals agree up to the numerical noise of the input.
    """
    alg = algebra(n)
    half = 1 << (n - 1)
    en = np.zeros(alg.dim)
    en[half] = 1.0
    alpha_full = np.zeros(alg.dim, dtype=complex)
    alpha_full[:half] = record.alpha
    forced = -1j * gp(gp(en, _omega_hat_coeffs(record.omega, n), alg), alpha_full, alg)
    # beta = (beta e_n) e_n^{-1} and e_n^{-1} = -e_n
    beta = -gp(forced, en, alg)[:half]
    coupled = FourierRecord(
        omega=record.omega, heights=record.heights, coeffs=record.coeffs,
        alpha=record.alpha, beta=beta, k=record.k, residual=0.0,
    )
    recon = coupled.reconstruct()
    scale = max(float(np.max(np.linalg.norm(record.coeffs, axis=1))), 1e-300)
    return float(np.max(np.linalg.norm(record.coeffs - recon, axis=1)) / scale)


# ----------------------------------------------------------------------
# idempotents and plane waves


def idempotent_split(omega, n, sign=1):
    """(1 - sign * i e_n omega/|omega|)/2 as complex coefficients."""
    alg = algebra(n)
    en = np.zeros(alg.dim)
    en[1 << (n - 1)] = 1.0
    out = np.zeros(alg.dim, dtype=complex)
    out[0] = 0.5
    out = out - 0.5j * sign * gp(en, _omega_hat_coeffs(omega, n), alg)
    return out


def monogenic_plane_wave(omega, n):
    """(1 - i e_n omega/|omega|) e^{2 pi i <omega, x> - 2 pi |omega| x_n}.

    Returns a complex-valued batched field; the real and imaginary parts
    are each annihilated by the first-order operator of the family.
    """
    omega = np.asarray(omega, dtype=float)
    nrm = np.linalg.norm(omega)
    front = 2.0 * idempotent_split(omega, n)

    def evaluate(points):
        pts = np.asarray(points, dtype=float)
        phase = np.exp(
            2j * np.pi * (pts[..., :n] @ omega) - 2.0 * np.pi * nrm * pts[..., n]
        )
        return phase[..., None] * front

    return evaluate


# ----------------------------------------------------------------------
# cusp criterion via vanishing zero modes


def cusp_coefficient_test(
    f, k, reps, p, N, n, heights=DEFAULT_HEIGHTS, m=8, tol=1e-3
):
    """True iff every representative's zero-frequency power-law content
    vanishes: fitted (a, alpha, b, beta) norms all below tol.

    Each representative R contributes the slashed field J(R, x; k) f(R<x>);
    its zero mode is fitted over the heights and every coefficient group
    must fall below tol for the representative to count as vanishing.
    """
    fn, _ = _as_field(f, n)
    heights = np.asarray(heights, dtype=float)
    zero = np.zeros((1, n))
    per_rep = []
    for rep in reps:
        mat = rep if isinstance(rep, VahlenMatrix) else rep_to_vahlen(rep, p, N, n)
        slashed = slash_transform(FieldFn(fn, n), mat, k)
        c0 = fourier_coefficients(
            slashed, zero, heights, N, n=n, m=m, check_periodic=False
        )[0]
        prof = fit_zero_frequency(heights, c0, k, n)
        sizes = {
            "a": float(np.linalg.norm(prof.a)),
            "alpha": float(np.linalg.norm(prof.alpha)),
            "b": float(np.linalg.norm(prof.b)),
            "beta": float(np.linalg.norm(prof.beta)),
        }
        per_rep.append(
            {"sizes": sizes, "residual": prof.residual,
             "vanishes": max(sizes.values()) < tol}
        )
    return {
        "per_rep": per_rep,
        "tol": tol,
        "failing": [i for i, r in enumerate(per_rep) if not r["vanishes"]],
        "passed": all(r["vanishes"] for r in per_rep),
    }
