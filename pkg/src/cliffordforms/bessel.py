"""Modified Bessel functions of the second kind at half-integer order.

Only half-integer orders occur here (even weights keep (k +- 1)/2 in
Z + 1/2), where K reduces to elementary closed forms:

    K_{1/2}(z) = sqrt(pi/(2 z)) e^{-z}
    K_{3/2}(z) = sqrt(pi/(2 z)) e^{-z} (1 + 1/z)

with the upward recurrence K_{nu+1}(z) = K_{nu-1}(z) + (2 nu / z) K_nu(z)
and the reflection K_{-nu} = K_nu.  No general-order implementation is
provided on purpose; the closed forms avoid a special-function dependency
and stay exact in the recurrence to machine precision.
"""

import numpy as np

__all__ = ["bessel_k_half"]


def bessel_k_half(nu, z):
    """K_nu(z) for half-integer nu and z > 0 (scalar or array)."""
    two_nu = 2.0 * float(nu)
    if abs(two_nu - round(two_nu)) > 1e-12 or round(two_nu) % 2 == 0:
        raise ValueError("order must be a half-integer (odd multiple of 1/2)")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ValueError("argument must be positive")
    half_steps = (abs(int(round(two_nu))) - 1) // 2  # K_{1/2} upward to |nu|
    k_lo = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z)
    if half_steps == 0:
        return k_lo
    k_hi = k_lo * (1.0 + 1.0 / z)
    for j in range(1, half_steps):
        order = j + 0.5
        k_lo, k_hi = k_hi, k_lo + (2.0 * order / z) * k_hi
    return k_hi
