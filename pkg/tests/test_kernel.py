"""Kernel vectors: travelling-wave identity, norms, dilation, projections."""

import numpy as np
import pytest

from resowave import fields, kernel
from resowave.errors import ResowaveError


def test_embed_places_diagonal_coefficients():
    v = kernel.KernelVector([0.5, 0.0, -0.25])
    u = kernel.embed(v)
    assert u.coeffs[1, 0] == 0.5
    assert u.coeffs[2, 1] == 0.0
    assert u.coeffs[3, 2] == -0.25
    off = u.coeffs.copy()
    for j in range(1, 4):
        off[j, j - 1] = 0.0
    assert np.all(off == 0.0)


def test_norm_formulas_match_parseval():
    """h1 = pi sqrt(sum j^2 xi^2) and l2 = (pi/sqrt 2) sqrt(sum xi^2)."""
    rng = np.random.default_rng(10)
    xi = rng.standard_normal(5)
    v = kernel.KernelVector(xi)
    j = np.arange(1, 6)
    assert abs(v.h1() - np.pi * np.sqrt(np.sum(j**2 * xi**2))) < 1e-13
    assert abs(v.l2() - (np.pi / np.sqrt(2.0)) * np.sqrt(np.sum(xi**2))) < 1e-13
    u = kernel.embed(v)
    assert abs(v.h1() ** 2 - fields.inner_h1(u, u)) < 1e-11
    assert abs(v.l2() ** 2 - fields.inner_l2(u, u)) < 1e-11


def test_travelling_wave_identity():
    """embed(v)(t, x) = eta(t+x) - eta(t-x) with eta the odd profile of v."""
    rng = np.random.default_rng(11)
    xi = rng.standard_normal(4) / np.arange(1, 5) ** 2
    v = kernel.KernelVector(xi)
    u = kernel.embed(v)
    t = rng.uniform(0.0, 2.0 * np.pi, size=9)
    x = rng.uniform(0.0, np.pi, size=9)
    vals = np.array([fields.eval_field(u, t[i], x[i])[0, 0] for i in range(9)])
    want = kernel.eta_eval(v, t + x) - kernel.eta_eval(v, t - x)
    assert np.max(np.abs(vals - want)) < 1e-13


def test_eta_coeffs_are_half_xi():
    v = kernel.KernelVector([2.0, -1.0])
    eta = kernel.eta_coeffs(v)
    assert np.allclose(eta, [1.0, -0.5])
    s = np.linspace(0.1, 6.0, 5)
    want = 1.0 * np.sin(s) - 0.5 * np.sin(2 * s)
    assert np.max(np.abs(kernel.eta_eval(v, s) - want)) < 1e-14


def test_rescale_moves_support_and_scales_h1():
    v = kernel.KernelVector([1.0, 0.0, 0.3])
    v3 = kernel.rescale(v, 3)
    assert len(v3) == 9
    assert v3.xi[2] == 1.0 and v3.xi[8] == 0.3
    assert np.count_nonzero(v3.xi) == 2
    assert abs(v3.h1() - 3.0 * v.h1()) < 1e-13
    assert abs(v3.l2() - v.l2()) < 1e-13
    with pytest.raises(ResowaveError):
        kernel.rescale(v, 0)


def test_rescale_is_time_dilation():
    """(L_n v)(t, x) = eta_n(t+x) - eta_n(t-x) with eta_n(s) = eta(n s)."""
    rng = np.random.default_rng(12)
    xi = rng.standard_normal(3)
    v = kernel.KernelVector(xi)
    vn = kernel.rescale(v, 2)
    s = rng.uniform(0.0, 2.0 * np.pi, size=11)
    assert np.max(np.abs(kernel.eta_eval(vn, s) - kernel.eta_eval(v, 2 * s))) < 1e-13


def test_minimal_time_period_index():
    v = kernel.KernelVector([1.0, 0.0, 0.5])
    assert kernel.minimal_time_period_index(v) == 1
    assert kernel.minimal_time_period_index(kernel.rescale(v, 2)) == 2
    assert kernel.minimal_time_period_index(kernel.rescale(v, 5)) == 5
    only6 = kernel.KernelVector([0, 0, 0, 0, 0, 1.0])
    assert kernel.minimal_time_period_index(only6) == 6
    mixed = kernel.KernelVector([0, 0, 1.0, 0, 0, 0.2, 0, 0, 0.1])
    assert kernel.minimal_time_period_index(mixed) == 3


def test_projections_split_fields():
    rng = np.random.default_rng(13)
    arr = rng.standard_normal((5, 5))
    u = fields.SpectralField(arr)
    v = kernel.project_V(u)
    w = kernel.project_W(u)
    back = kernel.embed(v) + w
    assert np.max(np.abs(back.padded(4, 5) - arr)) < 1e-14
    assert np.all(fields.diagonal_of(w) == 0.0)
    # projection of a pure range field has no kernel part
    assert np.all(kernel.project_V(w).xi == 0.0)


def test_normalize_sign():
    v = kernel.KernelVector([0.0, -0.3, 0.8])
    n1 = kernel.normalize_sign(v)
    assert n1.xi[1] > 0.0
    n2 = kernel.normalize_sign(kernel.KernelVector(-v.xi))
    assert np.all(n1.xi == n2.xi)
    assert np.all(kernel.normalize_sign(n1).xi == n1.xi)


def test_support():
    v = kernel.KernelVector([0.0, 1.0, 0.0, 1e-30, 2.0])
    assert list(kernel.support(v)) == [2, 5]
