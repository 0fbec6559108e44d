"""Time-domain integrator and the return/non-return contrast."""

import numpy as np
import pytest

from resowave import evolve, fields, frequency, kernel, nonlinearity, search
from resowave.errors import ResowaveError


def test_initial_state_sums_cosine_rows():
    coeffs = np.zeros((3, 2))
    coeffs[0, 0] = 0.5
    coeffs[2, 0] = -0.2    # cos(2t) contributes at t = 0
    coeffs[1, 1] = 0.3
    a, b = evolve.initial_state(fields.SpectralField(coeffs), 5)
    assert np.allclose(a, [0.3, 0.3, 0.0, 0.0, 0.0])
    assert np.all(b == 0.0)


def test_linear_single_mode_reproduces_cosine():
    # with f = 0 unavailable, use a tiny amplitude so the linear part dominates:
    # u(t, x) ~ c cos(j t) sin(j x) evolves exactly at frequency j
    f = nonlinearity.classify({3: 1.0})
    c = 1e-5
    coeffs = np.zeros((3, 2))
    coeffs[2, 1] = c
    u = fields.SpectralField(coeffs)
    t_final = 0.77
    res = evolve.integrate(u, 1.0, f, t_final)
    expect = np.zeros(res.n_modes)
    expect[1] = c * np.cos(2.0 * t_final)
    # the Verlet phase error c * 2 t (dt j)^2 / 24 is about 6e-12 here
    assert np.max(np.abs(res.a - expect)) < 2e-11
    assert res.energy_drift < 1e-5


def test_self_convergence_order_two_at_generic_time():
    # coarse-vs-fine state differences at a generic (non-return) time scale
    # like dt^2 for velocity Verlet, so successive halvings give ratio 4
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.make_context(frequency.omega_for_eps(1e-3), L=24)
    br = search.solve_branch(ctx, f, n_max=1, dim=3, seed=0, restarts=3)
    u = evolve.record_field(br.records[0])
    t_star = 0.37 * 2.0 * np.pi / ctx.omega
    states = []
    for spp in (256, 512, 1024):
        cfg = evolve.EvolutionConfig(steps_per_period=spp)
        states.append(evolve.integrate(u, ctx.omega, f, t_star, cfg).a)
    d1 = np.linalg.norm(states[1] - states[0])
    d2 = np.linalg.norm(states[2] - states[1])
    assert abs(d1 / d2 - 4.0) < 0.2


def test_catalogued_solution_returns():
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.make_context(frequency.omega_for_eps(1e-3), L=24)
    br = search.solve_branch(ctx, f, n_max=1, dim=3, seed=0, restarts=3)
    u = evolve.record_field(br.records[0])
    err, res = evolve.return_error(u, ctx.omega, f)
    assert err < 1e-6
    assert res.energy_drift < 1e-5
    off, _ = evolve.nonreturn_probe(u, ctx.omega, f, br.records[0].n)
    assert off > 1e-3
    assert off / max(err, 1e-30) > 1e3


def test_stability_guard_raises():
    f = nonlinearity.classify({3: 1.0})
    coeffs = np.zeros((2, 1))
    coeffs[1, 0] = 0.1
    u = fields.SpectralField(coeffs)
    cfg = evolve.EvolutionConfig(steps_per_period=4, min_modes=64)
    with pytest.raises(ResowaveError, match="unstable"):
        evolve.integrate(u, 1.0, f, 10.0, cfg)


def test_step_is_retuned_to_hit_final_time():
    f = nonlinearity.classify({3: 1.0})
    coeffs = np.zeros((2, 1))
    coeffs[1, 0] = 1e-4
    u = fields.SpectralField(coeffs)
    res = evolve.integrate(u, 1.0, f, 1.0)
    assert res.steps * res.dt == res.t_final
    assert res.t_final == 1.0


def test_empty_initial_state_rejected():
    with pytest.raises(ResowaveError):
        evolve._state_distance(np.zeros(4), np.zeros(4))


def test_record_field_reconstruction():
    f = nonlinearity.classify({3: 1.0})
    ctx = frequency.make_context(frequency.omega_for_eps(1e-3), L=24)
    br = search.solve_branch(ctx, f, n_max=1, dim=3, seed=0, restarts=3)
    rec = br.records[0]
    u = evolve.record_field(rec)
    assert fields.sup_norm(u) == rec.sup
    d = fields.diagonal_of(u)
    assert np.allclose(d, rec.xi[: d.size])
