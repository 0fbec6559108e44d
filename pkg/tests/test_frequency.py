"""Non-resonance margins and dilation admissibility."""

import numpy as np
import pytest

from resowave import frequency, nonlinearity
from resowave.errors import ResowaveError


def gamma_brute(omega, L):
    """Independent gamma^(L): scan a wide j window per l."""
    best = np.inf
    for l in range(1, L + 1):
        gaps = [
            abs(omega * l - j)
            for j in range(1, int(np.ceil(1.6 * L)) + 5)
            if j != l
        ]
        best = min(best, l * min(gaps))
    return best


def test_truncated_gamma_matches_brute_force():
    rng = np.random.default_rng(20)
    for _ in range(25):
        omega = rng.uniform(0.5, 1.5)
        L = int(rng.integers(1, 40))
        assert abs(frequency.truncated_gamma(omega, L) - gamma_brute(omega, L)) < 1e-12


def test_gamma_known_values():
    # omega = 3/2 resonates at l = 2 (omega l = 3)
    assert frequency.truncated_gamma(1.5, 2) == 0.0
    assert frequency.truncated_gamma(1.5, 1) == 0.5
    # omega = 1.06, L = 5: the binding pair is l = 1 against j = 2
    assert abs(frequency.truncated_gamma(1.06, 5) - 0.94) < 1e-12


def test_make_context_populates_eps_and_gamma():
    ctx = frequency.make_context(1.1, L=6)
    assert abs(ctx.eps - 0.5 * (1.1**2 - 1.0)) < 1e-15
    assert ctx.gamma == frequency.truncated_gamma(1.1, 6)
    with pytest.raises(ResowaveError):
        frequency.make_context(1.8, L=4)
    with pytest.raises(ResowaveError):
        frequency.make_context(0.4, L=4)


def test_omega_for_eps_round_trip():
    for eps in (1e-3, -2e-4, 0.1):
        om = frequency.omega_for_eps(eps)
        assert abs(0.5 * (om**2 - 1.0) - eps) < 1e-15
    with pytest.raises(ResowaveError):
        frequency.omega_for_eps(-0.6)


def test_admissibility_boundary_is_inclusive():
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.FrequencyContext(omega=1.01, eps=0.5 * (1.01**2 - 1), gamma=1.0, L=10)
    # bound = |omega - 1| n^2 / gamma = 0.01 * 100 = 1.0 exactly at C = 1
    assert frequency.admissible(ctx, 10, f, C=1.0).ok
    assert not frequency.admissible(ctx, 11, f, C=1.0).ok


def test_side_gating():
    f_pos = nonlinearity.classify({3: 1.0})     # needs omega > 1
    f_neg = nonlinearity.classify({3: -1.0})    # needs omega < 1
    above = frequency.make_context(1.001, L=16)
    below = frequency.make_context(0.999, L=16)
    assert frequency.admissible(above, 1, f_pos).ok
    assert not frequency.admissible(below, 1, f_pos).ok
    assert frequency.admissible(below, 1, f_neg).ok
    assert not frequency.admissible(above, 1, f_neg).ok
    f_quad = nonlinearity.classify({2: 1.0})    # quadratic case lives below 1
    assert frequency.admissible(below, 1, f_quad).ok
    assert not frequency.admissible(above, 1, f_quad).ok


def test_mixed_case_side_window():
    # d = 2p - 1 with b < 0: below 1 only
    f_bneg = nonlinearity.classify({2: 1.0, 3: -1.0})
    assert frequency.side_required(f_bneg) == "omega<1"
    # small positive b: both sides; large positive b: above only
    thr = 2 * np.pi**2 / 24.0
    f_small = nonlinearity.classify({2: 1.0, 3: 0.5 * thr})
    f_large = nonlinearity.classify({2: 1.0, 3: 2.0 * thr})
    assert frequency.side_required(f_small) == "either"
    assert frequency.side_required(f_large) == "omega>1"


def test_minimal_n_per_case():
    assert frequency.minimal_n(nonlinearity.classify({3: 1.0})) == 1
    assert frequency.minimal_n(nonlinearity.classify({4: 1.0, 5: 1.0})) == 1
    assert frequency.minimal_n(nonlinearity.classify({2: 1.0})) == 1
    assert frequency.minimal_n(nonlinearity.classify({4: 1.0})) == 2
    assert frequency.minimal_n(nonlinearity.classify({4: 1.0, 7: 1.0})) == 2


def test_max_admissible_n_is_sharp():
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.make_context(1.0001, L=32)
    cap = frequency.max_admissible_n(ctx, f, C=0.05)
    assert cap >= 5
    assert frequency.admissible(ctx, cap, f, C=0.05).ok
    assert not frequency.admissible(ctx, cap + 1, f, C=0.05).ok
    # wrong side: no admissible indices at all
    below = frequency.make_context(0.9999, L=32)
    assert frequency.max_admissible_n(below, f, C=0.05) == 0


def test_resonant_frequency_blocks_everything():
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.make_context(1.5, L=8)
    assert ctx.gamma == 0.0
    rep = frequency.admissible(ctx, 1, f)
    assert not rep.ok
    assert any("resonant" in note for note in rep.notes)


def test_scan_rows_sorted_and_bounded():
    f = nonlinearity.classify({3: 1.0})
    rows = frequency.scan_frequencies(1.0005, 1.002, 0.0005, L=16, f=f)
    oms = [r["omega"] for r in rows]
    assert oms == sorted(oms)
    assert all(r["n_max"] >= 1 for r in rows)
    with pytest.raises(ResowaveError):
        frequency.scan_frequencies(1.0, 1.1, -0.1, L=8, f=f)
