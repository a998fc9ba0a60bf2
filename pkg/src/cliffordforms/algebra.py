"""Multivector arithmetic for Cl_n, paravectors, and upper half-space points.

The generators e_1 .. e_n all square to -1.  Scalars are float64 by default
and complex128 when any operand is complex (needed by the Fourier layer).
Multivectors are value objects: every operation returns a fresh instance.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .blades import (
    algebra,
    coeffs_to_paravector,
    gp,
    paravector_mask,
    paravector_to_coeffs,
)


class Multivector:
    """Dense element of Cl_n stored as 2**n blade coefficients."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None, dtype=float):
        alg = algebra(n)
        self.n = n
        if coeffs is None:
            self.coeffs = np.zeros(alg.dim, dtype=dtype)
        else:
            arr = np.asarray(coeffs)
            if arr.shape != (alg.dim,):
                raise ValueError(f"expected {alg.dim} coefficients for Cl_{n}, got {arr.shape}")
            if not np.iscomplexobj(arr):
                arr = arr.astype(float)
            self.coeffs = arr.copy()

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def scalar(cls, n, value):
        mv = cls(n, dtype=complex if isinstance(value, complex) else float)
        mv.coeffs[0] = value
        return mv

    @classmethod
    def basis_vector(cls, n, i):
        """e_i for 1 <= i <= n."""
        if not 1 <= i <= n:
            raise ValueError(f"basis index {i} outside 1..{n}")
        mv = cls(n)
        mv.coeffs[1 << (i - 1)] = 1.0
        return mv

    @classmethod
    def blade(cls, n, mask, value=1.0):
        mv = cls(n, dtype=complex if isinstance(value, complex) else float)
        mv.coeffs[mask] = value
        return mv

    @classmethod
    def from_paravector(cls, n, components):
        comps = np.asarray(components)
        if comps.shape != (n + 1,):
            raise ValueError(f"paravector in Cl_{n} needs {n + 1} components")
        return cls(n, paravector_to_coeffs(comps, algebra(n)))

    # ------------------------------------------------------------------
    # arithmetic

    def _wrap(self, coeffs):
        out = Multivector.__new__(Multivector)
        out.n = self.n
        out.coeffs = coeffs
        return out

    def _coerce(self, other):
        if isinstance(other, Multivector):
            if other.n != self.n:
                raise ValueError("mixed algebra dimensions")
            return other
        if np.isscalar(other):
            return Multivector.scalar(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(other.coeffs - self.coeffs)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return self._wrap(self.coeffs * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(gp(self.coeffs, other.coeffs, algebra(self.n)))

    def __rmul__(self, other):
        if np.isscalar(other):
            return self._wrap(other * self.coeffs)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._wrap(gp(other.coeffs, self.coeffs, algebra(self.n)))

    def __truediv__(self, other):
        if np.isscalar(other):
            return self._wrap(self.coeffs / other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))

    # ------------------------------------------------------------------
    # structure

    def grade_project(self, r):
        alg = algebra(self.n)
        out = np.where(alg.grades == r, self.coeffs, 0.0)
        return self._wrap(out)

    @property
    def scalar_part(self):
        return self.coeffs[0]

    def is_paravector(self, tol=0.0):
        mask = paravector_mask(algebra(self.n))
        junk = self.coeffs[~mask]
        return np.all(np.abs(junk) <= tol)

    def paravector_components(self):
        return coeffs_to_paravector(self.coeffs, algebra(self.n))

    def __repr__(self):
        return f"Multivector({self.n}, {format_text(self)!r})"


# ----------------------------------------------------------------------
# involutions and norms


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def reversion(a: Multivector) -> Multivector:
    alg = algebra(a.n)
    return a._wrap(a.coeffs * alg.reversion_signs)


def conjugation(a: Multivector) -> Multivector:
    alg = algebra(a.n)
    return a._wrap(a.coeffs * alg.conjugation_signs)


def main_involution(a: Multivector) -> Multivector:
    """Grade involution: e_i -> -e_i on every generator."""
    alg = algebra(a.n)
    return a._wrap(a.coeffs * alg.involution_signs)


def star(a: Multivector) -> Multivector:
    """Algebra automorphism fixing e_1..e_{n-1} and sending e_n -> -e_n."""
    alg = algebra(a.n)
    return a._wrap(a.coeffs * alg.star_signs)


def pq_split(a: Multivector):
    """Write a = P + Q e_n with P, Q in Cl_{n-1}; returns (P, Q).

    Blades containing e_n occupy the upper half of the coefficient vector
    and e_A e_n carries no reordering sign for A in Cl_{n-1}, so the split
    is a plain slice.
    """
    if a.n < 1:
        raise ValueError("pq_split needs n >= 1")
    half = 1 << (a.n - 1)
    p = Multivector(a.n - 1, a.coeffs[:half])
    q = Multivector(a.n - 1, a.coeffs[half:])
    return p, q


def pq_join(p: Multivector, q: Multivector) -> Multivector:
    """Inverse of pq_split: build P + Q e_n in Cl_{n+1}."""
    if p.n != q.n:
        raise ValueError("mixed algebra dimensions")
    return Multivector(p.n + 1, np.concatenate([p.coeffs, q.coeffs]))


def pseudo_norm(a: Multivector) -> float:
    """Coefficient 2-norm; multiplicative on products of paravectors."""
    return float(np.linalg.norm(a.coeffs))


def euclid_norm_sq(a: Multivector) -> float:
    return float(np.real(np.vdot(a.coeffs, a.coeffs)))


def paravector_inverse(a: Multivector) -> Multivector:
    """Inverse of a nonzero paravector: conj(a) / |a|^2."""
    if not a.is_paravector(tol=0.0):
        raise ValueError("paravector_inverse needs a paravector")
    nsq = euclid_norm_sq(a)
    if nsq == 0.0:
        raise ZeroDivisionError("zero paravector has no inverse")
    return conjugation(a) / nsq


def clifford_group_inverse(a: Multivector, tol=1e-12) -> Multivector:
    """Inverse of a product of nonzero paravectors: conj(a) / (a conj(a)).

    For such elements a * conj(a) is a positive scalar equal to the squared
    pseudo-norm; a residual in other grades means the input was not a
    paravector product.
    """
    prod = a * conjugation(a)
    scal = prod.scalar_part
    rest = np.linalg.norm(prod.coeffs[1:])
    if abs(scal) <= tol or rest > tol * max(1.0, abs(scal)):
        raise ValueError("element is not an invertible paravector product")
    return conjugation(a) / scal


# ----------------------------------------------------------------------
# paravectors and half-space points


class Paravector:
    """Element of R + R e_1 + ... + R e_n."""

    __slots__ = ("n", "components")

    def __init__(self, n, components):
        comps = np.asarray(components, dtype=float)
        if comps.shape != (n + 1,):
            raise ValueError(f"paravector in Cl_{n} needs {n + 1} components")
        self.n = n
        self.components = comps.copy()

    @property
    def x0(self):
        return self.components[0]

    @property
    def height(self):
        """Coefficient of e_n."""
        return self.components[-1]

    def to_multivector(self):
        return Multivector.from_paravector(self.n, self.components)

    def norm(self):
        return float(np.linalg.norm(self.components))

    def __repr__(self):
        return f"Paravector({self.n}, {self.components.tolist()})"


class HalfSpacePoint(Paravector):
    """Paravector with strictly positive e_n component."""

    def __init__(self, n, components):
        super().__init__(n, components)
        if not self.components[-1] > 0:
            raise ValueError("half-space point needs positive e_n component")


# ----------------------------------------------------------------------
# serialization: text and JSON wire formats


def _blade_name(mask):
    if mask == 0:
        return ""
    return "".join(f"e{i + 1}" for i in range(mask.bit_length()) if mask & (1 << i))


_BLADE_RE = re.compile(r"^(e[1-9])+$")
_TERM_SPLIT_RE = re.compile(r"(?=[+-])")


def format_text(a: Multivector) -> str:
    """Render like '1.0 + 2.0*e1 - 0.5*e1e2'; zero renders as '0.0'."""
    parts = []
    for mask, coeff in enumerate(a.coeffs):
        if coeff == 0:
            continue
        name = _blade_name(mask)
        if np.iscomplexobj(a.coeffs):
            body = f"({coeff.real!r}{coeff.imag:+}j)"
            sign = "+"
        else:
            sign = "-" if coeff < 0 else "+"
            body = repr(abs(float(coeff)))
        if name:
            body = f"{body}*{name}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    if not parts:
        return "0.0"
    return "".join(parts)


def parse_text(text: str, n: int) -> Multivector:
    mv = Multivector(n)
    body = text.replace(" ", "")
    if body in ("", "0", "0.0"):
        return mv
    for term in filter(None, _TERM_SPLIT_RE.split(body)):
        sign = 1.0
        if term[0] == "+":
            term = term[1:]
        elif term[0] == "-":
            sign = -1.0
            term = term[1:]
        if "*" in term:
            coeff_str, blade_str = term.split("*", 1)
            coeff = float(coeff_str)
        elif term[0] == "e":
            coeff, blade_str = 1.0, term
        else:
            coeff, blade_str = float(term), ""
        mask = 0
        if blade_str:
            if not _BLADE_RE.match(blade_str):
                raise ValueError(f"bad blade token {blade_str!r}")
            for idx in re.findall(r"e([1-9])", blade_str):
                bit = 1 << (int(idx) - 1)
                if mask & bit:
                    raise ValueError(f"repeated generator in {blade_str!r}")
                if int(idx) > n:
                    raise ValueError(f"generator e{idx} outside Cl_{n}")
                mask |= bit
        mv.coeffs[mask] += sign * coeff
    return mv


def to_json_dict(a: Multivector) -> dict:
    coeffs = {}
    for mask, coeff in enumerate(a.coeffs):
        if coeff == 0:
            continue
        if np.iscomplexobj(a.coeffs):
            coeffs[str(mask)] = [float(coeff.real), float(coeff.imag)]
        else:
            coeffs[str(mask)] = float(coeff)
    return {"dim": a.n, "coeffs": coeffs}


def from_json_dict(data: dict) -> Multivector:
    n = int(data["dim"])
    entries = data.get("coeffs", {})
    is_complex = any(isinstance(v, (list, tuple)) for v in entries.values())
    mv = Multivector(n, dtype=complex if is_complex else float)
    for key, value in entries.items():
        mask = int(key)
        if not 0 <= mask < (1 << n):
            raise ValueError(f"blade index {mask} outside Cl_{n}")
        if isinstance(value, (list, tuple)):
            mv.coeffs[mask] = complex(value[0], value[1])
        else:
            mv.coeffs[mask] = value
    return mv


def to_json(a: Multivector) -> str:
    return json.dumps(to_json_dict(a), sort_keys=True)


def from_json(text: str) -> Multivector:
    return from_json_dict(json.loads(text))
