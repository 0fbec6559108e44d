"""The resonant kernel: diagonal modes cos(j t) sin(j x).

Every solution of the linearized problem at omega = 1 is a superposition of
travelling-wave pairs,

    v(t, x) = sum_j xi_j cos(j t) sin(j x) = eta(t + x) - eta(t - x),

with eta(s) = sum_j (xi_j / 2) sin(j s) odd and 2pi-periodic.  A KernelVector
stores xi.  The index-dilation map L_n sends xi_j to the (n j)-th slot; it
multiplies the H1 norm by exactly n and leaves the L2 norm unchanged, which is
the engine behind the multiplicity-in-n results downstream.
"""

import math

import numpy as np

from . import fields
from .errors import ResowaveError

__all__ = [
    "KernelVector",
    "embed",
    "project_V",
    "project_W",
    "eta_coeffs",
    "eta_eval",
    "rescale",
    "normalize_sign",
    "minimal_time_period_index",
]

SUPPORT_RTOL = 1e-8  # relative threshold deciding which modes count as present


class KernelVector:
    """Coefficients xi_j, j = 1..len(xi), of a kernel element."""

    __slots__ = ("xi",)

    def __init__(self, xi):
        arr = np.array(xi, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ResowaveError("xi must be a nonempty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ResowaveError("non-finite kernel coefficient")
        arr.flags.writeable = False
        object.__setattr__(self, "xi", arr)

    def __setattr__(self, name, value):
        raise AttributeError("KernelVector is immutable")

    def __len__(self):
        return self.xi.size

    def __eq__(self, other):
        return isinstance(other, KernelVector) and np.array_equal(self.xi, other.xi)

    def __repr__(self):
        return f"KernelVector(dim={len(self)})"

    def h1(self):
        j = np.arange(1, len(self) + 1)
        return float(np.pi * np.sqrt(np.sum(j**2 * self.xi**2)))

    def l2(self):
        return float(np.pi / np.sqrt(2.0) * np.sqrt(np.sum(self.xi**2)))


def embed(v):
    """The kernel vector as a SpectralField on the diagonal l = j."""
    n = len(v)
    c = np.zeros((n + 1, n))
    for j in range(1, n + 1):
        c[j, j - 1] = v.xi[j - 1]
    return fields.SpectralField(c)


def project_V(u):
    """Diagonal part of a field, as a KernelVector (length min(lt, lx))."""
    d = fields.diagonal_of(u)
    if d.size == 0:
        d = np.zeros(1)
    return KernelVector(d)


def project_W(u):
    """Field with the diagonal pinned to zero (complement of the kernel)."""
    return fields.zero_diagonal(u)


def eta_coeffs(v):
    """Sine coefficients of the profile eta: eta_j = xi_j / 2."""
    return v.xi / 2.0


def eta_eval(v, s):
    s = np.asarray(s, dtype=float)
    j = np.arange(1, len(v) + 1)
    return np.sin(np.multiply.outer(s, j)) @ (v.xi / 2.0)


def rescale(v, n):
    """Index dilation L_n: place xi_j at slot n j.  ||L_n v||_H1 = n ||v||_H1."""
    if n < 1 or int(n) != n:
        raise ResowaveError(f"dilation index must be a positive integer, got {n}")
    n = int(n)
    out = np.zeros(n * len(v))
    out[n - 1 :: n] = v.xi
    return KernelVector(out)


def normalize_sign(v):
    """Flip the overall sign so the first nonzero coefficient is positive.

    Solutions come in (v, -v) pairs; this fixes a deterministic representative.
    """
    for val in v.xi:
        if val != 0.0:
            return v if val > 0.0 else KernelVector(-v.xi)
    return v


def support(v, rtol=SUPPORT_RTOL):
    """Indices j (1-based) with |xi_j| above rtol * max|xi|."""
    m = np.max(np.abs(v.xi))
    if m == 0.0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(np.abs(v.xi) > rtol * m) + 1


def minimal_time_period_index(v, rtol=SUPPORT_RTOL):
    """gcd of the supported mode indices: v is 2pi/n periodic in t with this n."""
    idx = support(v, rtol)
    if idx.size == 0:
        raise ResowaveError("zero kernel vector has no minimal period")
    return int(math.gcd(*idx.tolist())) if idx.size > 1 else int(idx[0])
