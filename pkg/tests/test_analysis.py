import numpy as np
import pytest

from confdg.analysis import (ErrorRecord, convergence_rates, energy_error,
                             energy_norm, h1h_norm, l2_error, l2_interp_error,
                             norm_equivalence_probe)
from confdg.basis import dg_space, interpolate
from confdg.mesh import base_mesh
from confdg.weakgrad import WeakGradientFactory

from conftest import mesh_level

RNG = np.random.default_rng(21)


def sinsin(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def test_l2_error_of_zero_against_sinsin():
    # ||sin(pi x) sin(pi y)|| = 1/2 exactly.
    space = dg_space(mesh_level(3), 2)
    err = l2_error(space, np.zeros(space.n_dofs), sinsin, degree=14)
    assert err == pytest.approx(0.5, rel=1e-8)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_l2_error_zero_for_interpolated_polynomial(k):
    space = dg_space(mesh_level(2), k)
    p = lambda x, y: (x - 0.3 * y) ** k + 1.0
    v = interpolate(space, p)
    assert l2_error(space, v, p, degree=2 * k) < 1e-12
    assert l2_interp_error(space, v, p) < 1e-13


def test_l2_interp_error_measures_distance_to_interpolant():
    # Perturb one DOF of the interpolant: the distance must be positive and
    # equal to the L2 norm of that single perturbed basis function.
    space = dg_space(mesh_level(2), 1)
    p = lambda x, y: x + y
    v = interpolate(space, p)
    v[7] += 1.0
    d = l2_interp_error(space, v, p)
    e = np.zeros(space.n_dofs)
    e[7] = 1.0
    assert d == pytest.approx(l2_error(space, e, lambda x, y: 0.0 * x, degree=2), rel=1e-12)
    assert d > 0.01


def test_energy_norm_of_linear_interpolant_is_one():
    # |||I_h x||| = ||grad x|| = 1 on the unit square.
    mesh = mesh_level(3)
    space = dg_space(mesh, 2)
    fac = WeakGradientFactory(mesh, space)
    v = interpolate(space, lambda x, y: x)
    assert energy_norm(space, fac, v) == pytest.approx(1.0, abs=1e-12)
    assert energy_error(space, fac, v, lambda x, y: x) < 1e-12


def test_energy_norm_homogeneous_and_zero_on_constants():
    mesh = mesh_level(2)
    space = dg_space(mesh, 1)
    fac = WeakGradientFactory(mesh, space)
    assert energy_norm(space, fac, np.ones(space.n_dofs)) < 1e-10
    v = RNG.uniform(-1, 1, space.n_dofs)
    n1 = energy_norm(space, fac, v)
    assert energy_norm(space, fac, -3.0 * v) == pytest.approx(3.0 * n1, rel=1e-12)


def test_h1h_norm_continuous_interpolant_equals_gradient_norm():
    # For a continuous piecewise polynomial the jump terms vanish.
    mesh = mesh_level(3)
    space = dg_space(mesh, 2)
    v = interpolate(space, lambda x, y: x)
    assert h1h_norm(space, v) == pytest.approx(1.0, abs=1e-12)
    w = interpolate(space, lambda x, y: x * y)
    # ||grad(xy)||^2 = int x^2 + y^2 = 2/3
    assert h1h_norm(space, w) == pytest.approx(np.sqrt(2.0 / 3.0), abs=1e-12)


def test_h1h_norm_pure_jump_indicator():
    # v = 1 on one base-mesh element, 0 on the other: only the jump term
    # remains and h_e^{-1} ||[v]||^2_e = 1 for the unit-length jump on the
    # diagonal edge, independent of its length.
    mesh = base_mesh()
    space = dg_space(mesh, 1)
    v = np.zeros(space.n_dofs)
    v[space.elem_dofs[1]] = 1.0
    assert h1h_norm(space, v) == pytest.approx(1.0, abs=1e-12)


def test_h1h_zero_only_for_zero():
    mesh = mesh_level(2)
    space = dg_space(mesh, 1)
    assert h1h_norm(space, np.zeros(space.n_dofs)) == 0.0
    v = RNG.uniform(-1, 1, space.n_dofs)
    assert h1h_norm(space, v) > 0


def test_convergence_rates():
    recs = [ErrorRecord(level=5, h=1.0, ndof=1, l2_error=1e-2, energy_error=4e-2),
            ErrorRecord(level=6, h=0.5, ndof=4, l2_error=2.5e-3, energy_error=2e-2)]
    out = convergence_rates(recs)
    assert out[0].l2_rate is None
    assert out[1].l2_rate == pytest.approx(2.0, abs=1e-12)
    assert out[1].energy_rate == pytest.approx(1.0, abs=1e-12)


def test_convergence_rates_guard_rails():
    recs = [ErrorRecord(level=5, h=1.0, ndof=1, l2_error=0.0, energy_error=1.0),
            ErrorRecord(level=6, h=0.5, ndof=4, l2_error=1.0, energy_error=1.0)]
    out = convergence_rates(recs)
    assert out[1].l2_rate is None            # zero error: rate undefined
    assert out[1].energy_rate == pytest.approx(0.0, abs=0)
    bad = [ErrorRecord(level=5, h=1.0, ndof=1, l2_error=1.0, energy_error=1.0),
           ErrorRecord(level=7, h=0.25, ndof=16, l2_error=1.0, energy_error=1.0)]
    with pytest.raises(ValueError):
        convergence_rates(bad)


def test_norm_equivalence_probe():
    mesh = mesh_level(3)
    space = dg_space(mesh, 1)
    fac = WeakGradientFactory(mesh, space)
    lo, hi = norm_equivalence_probe(space, fac, samples=25, seed=99)
    assert 0 < lo <= hi
    assert hi / lo < 10.0
    lo2, hi2 = norm_equivalence_probe(space, fac, samples=25, seed=99)
    assert (lo, hi) == (lo2, hi2)            # seeded, deterministic
    with pytest.raises(ValueError):
        norm_equivalence_probe(space, fac, samples=0, seed=1)
