"""Time-domain verification by direct integration of the wave equation.

This is the one check that shares no analytical machinery with the spectral
construction: a catalogued solution is handed to a sine-pseudospectral
velocity Verlet integrator for u_tautau = u_xx - f(u) in physical time, and
periodicity is judged by the state distance after one full period 2 pi/omega.
A genuine solution returns to its initial state; probing at a fraction of the
period gives the non-return contrast that shows the test has teeth.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import fields, kernel
from .errors import ResowaveError

__all__ = [
    "EvolutionConfig",
    "EvolutionResult",
    "initial_state",
    "integrate",
    "return_error",
    "nonreturn_probe",
]


@dataclass(frozen=True)
class EvolutionConfig:
    steps_per_period: int = 4096
    mode_factor: int = 4
    min_modes: int = 32
    energy_probes: int = 9


@dataclass
class EvolutionResult:
    t_final: float
    dt: float
    steps: int
    n_modes: int
    a: np.ndarray             # sine coefficients of u at t_final
    b: np.ndarray             # sine coefficients of u_tau at t_final
    energy_drift: float


def initial_state(u, n_modes):
    """State (a, b) at t = 0: cosine rows sum to a, the velocity vanishes."""
    a = np.zeros(n_modes)
    cols = min(u.lx, n_modes)
    a[:cols] = u.coeffs[:, :cols].sum(axis=0)
    return a, np.zeros(n_modes)


def _plan(n_modes, f):
    j2 = np.arange(1, n_modes + 1, dtype=float) ** 2
    poly = np.asarray(f.poly, dtype=float)
    norm = n_modes + 1

    def acceleration(a):
        vals = sfft.dst(a, type=1) / 2.0
        fv = np.polynomial.polynomial.polyval(vals, poly)
        return -j2 * a - sfft.dst(fv, type=1) / norm

    return acceleration


def _energy(a, b, f):
    j = np.arange(1, a.size + 1, dtype=float)
    quad = 0.25 * np.pi * float(np.sum(b * b) + np.sum((j * a) ** 2))
    return quad + fields.integrate_x_poly(a, f.primitive)


def integrate(u, omega, f, t_final, config=None):
    """Velocity Verlet from the t = 0 slice of u up to physical time t_final.

    The step is tuned so the final time is hit exactly; stability of the
    explicit scheme requires dt * j_max < 2, which is checked up front.
    """
    config = config or EvolutionConfig()
    n_modes = max(config.min_modes, config.mode_factor * u.lx)
    period = 2.0 * np.pi / omega
    dt0 = period / config.steps_per_period
    steps = max(1, round(t_final / dt0))
    dt = t_final / steps
    if dt * n_modes >= 2.0:
        raise ResowaveError(
            f"unstable step: dt*jmax = {dt * n_modes:.3f} (need < 2); "
            "raise steps_per_period"
        )
    acc = _plan(n_modes, f)
    a, b = initial_state(u, n_modes)
    g = acc(a)
    probe_every = max(1, steps // max(config.energy_probes - 1, 1))
    energies = [_energy(a, b, f)]
    for k in range(steps):
        a = a + dt * b + 0.5 * dt * dt * g
        g_new = acc(a)
        b = b + 0.5 * dt * (g + g_new)
        g = g_new
        if (k + 1) % probe_every == 0 or k + 1 == steps:
            energies.append(_energy(a, b, f))
    energies = np.asarray(energies)
    scale = max(float(np.max(np.abs(energies))), 1e-30)
    drift = float((energies.max() - energies.min()) / scale)
    return EvolutionResult(
        t_final=float(t_final),
        dt=float(dt),
        steps=int(steps),
        n_modes=int(n_modes),
        a=a,
        b=b,
        energy_drift=drift,
    )


def _state_distance(a, a0):
    """Relative L2 distance of the position fields (Parseval, sine basis).

    The velocity is deliberately excluded: at a return time the modal phases
    sit at cosine peaks, so position errors cancel to second order in the
    per-mode phase error while velocity errors stay first order.  Position
    distance is the honest reading of "the solution returns"; integration
    quality is certified separately by the energy drift.
    """
    den = np.sum(a0**2)
    if den == 0.0:
        raise ResowaveError("empty initial state")
    return float(np.sqrt(np.sum((a - a0) ** 2) / den))


def return_error(u, omega, f, periods=1, config=None):
    """Relative L2 distance to the initial field after full periods."""
    config = config or EvolutionConfig()
    period = 2.0 * np.pi / omega
    res = integrate(u, omega, f, periods * period, config)
    a0, _ = initial_state(u, res.n_modes)
    return _state_distance(res.a, a0), res


def nonreturn_probe(u, omega, f, n, config=None):
    """State distance at the deliberately wrong time 2 pi/((n+1) omega).

    For a level-n solution this probe time is off the lattice of its minimal
    period, so the distance should be large; the ratio against the true
    return error is the contrast of the time-domain test.
    """
    config = config or EvolutionConfig()
    t_bad = 2.0 * np.pi / ((n + 1) * omega)
    res = integrate(u, omega, f, t_bad, config)
    a0, _ = initial_state(u, res.n_modes)
    return _state_distance(res.a, a0), res


def record_field(record):
    """Rebuild the full spectral field of a catalogued record."""
    v = kernel.KernelVector(np.asarray(record.xi, dtype=float))
    w = fields.SpectralField(np.asarray(record.w_coeffs, dtype=float))
    return kernel.embed(v) + w
