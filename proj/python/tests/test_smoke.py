import math

import numpy as np
import pytest

import nlkg


def fixed(dt, t_max, stride=1):
    c = nlkg.SolverConfig()
    c.dt_init = dt
    c.dt_min = dt * 1e-3
    c.t_max = t_max
    c.adaptive = False
    c.snapshot_stride = stride
    return c


def test_grid_and_critical_exponent():
    g = nlkg.Grid(2, 32, 8.0)
    assert g.spacing == pytest.approx(0.25)
    assert g.coordinates()[0] == pytest.approx(-4.0)
    cp = nlkg.critical_exponent(2, 4.0)
    assert cp.s_c == pytest.approx(0.5)
    assert cp.regime == nlkg.Regime.conformal
    with pytest.raises(nlkg.DomainError):
        nlkg.Grid(2, 30, 8.0)


def test_state_roundtrip_and_shape_checks():
    g = nlkg.Grid(2, 16, 4.0)
    ph = nlkg.Physics(0.5, 2.0)
    u = np.random.default_rng(1).normal(size=(16, 16))
    s = nlkg.State(g, ph, u, np.zeros_like(u))
    assert np.array_equal(s.u, u)
    with pytest.raises(nlkg.DomainError):
        nlkg.State(g, ph, np.zeros((16, 8)), np.zeros((16, 8)))


def test_zero_data_stays_zero():
    g = nlkg.Grid(2, 16, 8.0)
    traj = nlkg.evolve(nlkg.zero_state(g, nlkg.Physics(0.0, 2.0)), fixed(0.05, 0.5))
    assert traj.termination == nlkg.Termination.reached_t_max
    assert np.all(traj.last.u == 0.0)
    _, e = traj.series("energy")
    assert np.all(e == 0.0)


def test_energy_is_conserved_for_small_data():
    g = nlkg.Grid(2, 64, 16.0)
    init = nlkg.gaussian(g, nlkg.Physics(0.5, 2.0), 0.5, 1.0)
    traj = nlkg.evolve(init, fixed(1e-3, 0.2, 50))
    _, e = traj.series("energy")
    assert abs(e[-1] - e[0]) <= 1e-6 * abs(e[0])


def test_constant_data_blows_up_at_ode_lifespan():
    g = nlkg.Grid(2, 16, 8.0)
    c = nlkg.SolverConfig()
    c.dt_init = 1e-3
    c.dt_min = 1e-16
    c.t_max = 10.0
    c.blowup_threshold = 1e6
    traj = nlkg.evolve(nlkg.constant(g, nlkg.Physics(0.0, 2.0), 1.0), c)
    assert traj.termination == nlkg.Termination.blowup_detected
    rep = nlkg.detect_and_fit(traj)
    assert rep.detected
    # K(1/sqrt 2), the complete elliptic integral
    assert nlkg.lifespan_upper(1.0, 2.0) == pytest.approx(1.8540746773013719, rel=1e-10)
    assert rep.t_star == pytest.approx(nlkg.lifespan_upper(1.0, 2.0), rel=1e-2)


def test_littlewood_paley_split_is_identity():
    g = nlkg.Grid(2, 32, 10.0)
    f = np.random.default_rng(3).normal(size=(32, 32))
    for N in nlkg.dyadic_frequencies(g):
        lo = nlkg.lp_project(g, f, N, "leq")
        hi = nlkg.lp_project(g, f, N, "gt")
        assert np.max(np.abs(lo + hi - f)) <= 1e-12 * np.max(np.abs(f))


def test_norms_of_constant():
    g = nlkg.Grid(2, 16, 4.0)
    f = np.full((16, 16), 2.0)
    assert nlkg.lebesgue_norm(g, f, 2.0) == pytest.approx(2.0 * 4.0)
    assert nlkg.sobolev_norm(g, f, 1.0, True) == pytest.approx(0.0, abs=1e-12)


def test_charge_slab_on_standing_wave():
    g = nlkg.Grid(2, 16, 2 * math.pi)
    c = fixed(0.005, 1.0)
    c.nonlinear = False
    traj = nlkg.evolve(nlkg.plane_wave(g, nlkg.Physics(1.0, 2.0), (2, 1, 0), 1.0), c)
    assert nlkg.charge_slab_identity(traj, 0.0, 1.0).gap <= 1e-4


def test_decompose_three_bubbles():
    g = nlkg.Grid(2, 512, 64.0)
    h = g.spacing
    members, centers = nlkg.synthetic_family(g, [(1.0, 6 * h), (0.8, 9 * h), (0.6, 12 * h)], [40, 80, 160])
    out = nlkg.decompose(g, members, 2.0, 3, 1e-6)
    assert len(out["profiles"]) == 3
    gaps = out["gaps"]
    assert max(gaps.h1, gaps.hsc, gaps.lp) <= 0.05
    assert gaps.separation_nondecreasing
