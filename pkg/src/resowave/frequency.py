"""Frequency admissibility: small divisors and the strongly non-resonant set.

The rescaled problem divides by omega^2 l^2 - j^2 for every off-diagonal mode,
so a usable frequency must keep |omega l - j| >= gamma / l for all l != j.  On
a finite temporal truncation L the sharp constant is

    gamma^(L) = min_{1 <= l <= L} l * min_{j >= 1, j != l} |omega l - j|,

computed here exactly.  Rational omega hit resonances (omega = 3/2 dies at
l = 2, j = 3); near omega = 1 the truncated gamma approaches 1, which is what
makes many dilation indices n admissible simultaneously.
"""

import numpy as np
from dataclasses import dataclass

from .errors import ResowaveError

__all__ = [
    "FrequencyContext",
    "AdmissibilityReport",
    "make_context",
    "truncated_gamma",
    "minimal_n",
    "side_required",
    "admissible",
    "max_admissible_n",
    "scan_frequencies",
    "omega_for_eps",
]

OMEGA_RANGE = (0.5, 1.5)
DEFAULT_C = 0.05


@dataclass(frozen=True)
class FrequencyContext:
    omega: float
    eps: float      # (omega^2 - 1)/2
    gamma: float    # truncated non-resonance constant gamma^(L)
    L: int          # temporal truncation gamma was computed for


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    n: int
    case: str
    bound: float          # the smallness quantity compared against C
    constant: float       # the C it was compared against
    side_required: str    # "omega>1" | "omega<1" | "either"
    side_ok: bool
    n_min: int
    gamma: float
    notes: tuple = ()


def truncated_gamma(omega, L):
    """Exact gamma^(L); zero signals a resonance inside the truncation."""
    if L < 1:
        raise ResowaveError(f"temporal truncation must be >= 1, got {L}")
    best = np.inf
    for l in range(1, L + 1):
        target = omega * l
        cand = {int(np.floor(target)), int(np.ceil(target))}
        cand |= {c + 1 for c in cand} | {c - 1 for c in cand}
        gaps = [abs(target - j) for j in cand if j >= 1 and j != l]
        best = min(best, l * min(gaps))
    return float(best)


def make_context(omega, L):
    lo, hi = OMEGA_RANGE
    if not (lo <= omega <= hi):
        raise ResowaveError(f"omega = {omega} outside [{lo}, {hi}]")
    eps = 0.5 * (omega**2 - 1.0)
    return FrequencyContext(omega=float(omega), eps=eps, gamma=truncated_gamma(omega, L), L=int(L))


def omega_for_eps(eps):
    """The frequency with exactly this eps = (omega^2 - 1)/2."""
    if eps <= -0.5:
        raise ResowaveError("eps <= -1/2 has no real frequency")
    return float(np.sqrt(1.0 + 2.0 * eps))


def _bound_exponent(f):
    """The bound is (|omega - 1| n^2)^e / gamma with this e."""
    if f.case == "odd-power":
        return 1.0
    if f.case == "n1":
        return (f.p - 1.0) / (f.d - 1.0)
    return 0.5


def _side_required(f, omega=None):
    if f.case == "odd-power":
        return "omega>1" if f.a > 0 else "omega<1"
    if f.case == "n1":
        return "omega>1" if f.b > 0 else "omega<1"
    if f.case == "n2":
        return "omega<1"
    # n3: b < 0 forces omega < 1; b > 0 always admits omega > 1 and, below
    # the kappa(p) = pi^2 threshold, omega < 1 as well.
    if f.b < 0:
        return "omega<1"
    if f.b < f.p * np.pi**2 * f.a**2 / 24.0:
        return "either"
    return "omega>1"


def _n_min(f):
    if f.case in ("odd-power", "n1"):
        return 1
    return 1 if f.p == 2 else 2


def minimal_n(f):
    """Smallest dilation index the existence argument covers for this case."""
    return _n_min(f)


def side_required(f):
    """Which side of omega = 1 the case bifurcates to ("either" when both)."""
    return _side_required(f)


def admissible(ctx, n, f, C=DEFAULT_C):
    """Can the dilation index n be used at this frequency for this f?"""
    if n < 1 or int(n) != n:
        raise ResowaveError(f"dilation index must be a positive integer, got {n}")
    n = int(n)
    notes = []
    side_req = _side_required(f)
    if ctx.omega > 1.0:
        side_ok = side_req in ("omega>1", "either")
    elif ctx.omega < 1.0:
        side_ok = side_req in ("omega<1", "either")
    else:
        side_ok = False
        notes.append("omega = 1 excluded (degenerate eps = 0)")
    e = _bound_exponent(f)
    n_min = _n_min(f)
    if ctx.gamma > 0.0:
        bound = (abs(ctx.omega - 1.0) * n**2) ** e / ctx.gamma
    else:
        bound = np.inf
        notes.append("resonant frequency (gamma = 0)")
    if n < n_min:
        notes.append(f"n below the minimal index {n_min} for case {f.case}")
    # boundary-inclusive with a few ulps of slack, so exact-threshold examples
    # like |omega - 1| = 1/100, C = gamma = 1, n = 10 do not fail to rounding
    ok = side_ok and ctx.gamma > 0.0 and n >= n_min and bound <= C * (1.0 + 1e-12)
    return AdmissibilityReport(
        ok=ok,
        n=n,
        case=f.case,
        bound=float(bound),
        constant=float(C),
        side_required=side_req,
        side_ok=side_ok,
        n_min=n_min,
        gamma=ctx.gamma,
        notes=tuple(notes),
    )


def max_admissible_n(ctx, f, C=DEFAULT_C):
    """Largest admissible n (0 if none); the bound is monotone in n."""
    probe = admissible(ctx, max(_n_min(f), 1), f, C)
    if not probe.ok:
        return 0
    e = _bound_exponent(f)
    n_cap = int(np.floor(np.sqrt((C * ctx.gamma) ** (1.0 / e) / abs(ctx.omega - 1.0))))
    while n_cap > 0 and not admissible(ctx, n_cap, f, C).ok:
        n_cap -= 1
    return n_cap


def scan_frequencies(omega_lo, omega_hi, step, L, f, C=DEFAULT_C, n=None):
    """Admissibility survey over a frequency grid; rows sorted by omega.

    Each row is a dict with the context, the count of admissible indices, and
    (when n is given) the report for that specific n.
    """
    if step <= 0:
        raise ResowaveError("step must be positive")
    omegas = np.arange(omega_lo, omega_hi + 0.5 * step, step)
    rows = []
    for om in omegas:
        if not (OMEGA_RANGE[0] <= om <= OMEGA_RANGE[1]):
            continue
        ctx = make_context(float(om), L)
        row = {
            "omega": ctx.omega,
            "eps": ctx.eps,
            "gamma": ctx.gamma,
            "n_max": max_admissible_n(ctx, f, C) if ctx.omega != 1.0 else 0,
        }
        if n is not None:
            row["report"] = admissible(ctx, n, f, C)
        rows.append(row)
    return rows
