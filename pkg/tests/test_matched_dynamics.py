import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bowtie_mech import sl2c as S
from bowtie_mech.matched_algebra import coadjoint_raw, so3_direct_sum, so3_left_trivial, so3_right_trivial
from bowtie_mech.matched_dynamics import (GeneralLagrangian, GroupTermProvider, IntegratorConfig, LagrangianOnH,
                                          NumericalAbort, QuadraticLagrangian, ReducedState, el_rhs_on_H, ep_rhs,
                                          integrate, integrate_on_H, legendre_inverse, lie_ep_rhs,
                                          linear_potential, march, momenta, reduced_energy, semidirect_ep_rhs)

K = np.array([0, 0, 1.0])
vec3 = st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3).map(np.array)


def so3_constants():
    C = np.zeros((3, 3, 3))
    E = np.eye(3)
    for i in range(3):
        for j in range(3):
            C[i, j] = np.cross(E[i], E[j])
    return C


def test_momenta_examples():
    L = QuadraticLagrangian.identity()
    mu, nu = momenta(L, ReducedState([1, 0, 0], K))
    np.testing.assert_array_equal(mu, [2, 0, 0])
    np.testing.assert_array_equal(nu, [0, 0, 2])
    mu, nu = momenta(L, ReducedState(np.zeros(3), np.zeros(3)))
    assert not mu.any() and not nu.any()
    mu, _ = momenta(QuadraticLagrangian(np.diag([1.0, 2, 3]), np.eye(3)), ReducedState([1, 1, 1], np.zeros(3)))
    np.testing.assert_array_equal(mu, [2, 4, 6])


def test_legendre_inverse_examples():
    xi, _ = legendre_inverse(QuadraticLagrangian.identity(), [2, 0, 0], np.zeros(3))
    np.testing.assert_allclose(xi, [1, 0, 0])
    xi, _ = legendre_inverse(QuadraticLagrangian(2 * np.eye(3), np.eye(3)), [4, 0, 0], np.zeros(3))
    np.testing.assert_allclose(xi, [1, 0, 0])


def test_quadratic_lagrangian_rejects_non_spd():
    with pytest.raises(ValueError):
        QuadraticLagrangian(np.diag([1.0, -1, 1]), np.eye(3))
    with pytest.raises(ValueError):
        QuadraticLagrangian(np.array([[1.0, 2, 0], [0, 1, 0], [0, 0, 1]]), np.eye(3))


def test_general_lagrangian_matches_quadratic(rng):
    I1, I2 = np.diag([1.0, 2, 3]), np.diag([0.5, 1, 1.5])
    G = GeneralLagrangian(3, 3, lambda x, e: x @ I1 @ x + e @ I2 @ e,
                          lambda x, e: 2 * I1 @ x, lambda x, e: 2 * I2 @ e)
    Q = QuadraticLagrangian(I1, I2)
    mu, nu = rng.normal(size=3), rng.normal(size=3)
    for a, b in zip(G.inverse(mu, nu), Q.inverse(mu, nu)):
        np.testing.assert_allclose(a, b, atol=1e-12)
    st0 = ReducedState([0.2, 0.1, -0.3], [0.4, 0, 0.1])
    conf = IntegratorConfig(1e-2, 0.5)
    s = S.sl2c_structure()
    tg, tq = integrate(s, G, st0, conf), integrate(s, Q, st0, conf)
    assert np.abs(tg.xi - tq.xi).max() < 1e-10
    assert np.abs(tg.energy - tq.energy).max() < 1e-10


def test_general_lagrangian_rejects_wrong_derivative():
    with pytest.raises(ValueError):
        GeneralLagrangian(3, 3, lambda x, e: x @ x + e @ e, lambda x, e: x, lambda x, e: 2 * e)


def test_reduced_energy_examples():
    L = QuadraticLagrangian.identity()
    assert reduced_energy(L, ReducedState([1, 0, 0], K)) == 2.0
    assert reduced_energy(L, ReducedState(np.zeros(3), np.zeros(3))) == 0.0


def test_ep_rhs_examples():
    s, L = S.sl2c_structure(), QuadraticLagrangian.identity()
    mu, nu = ep_rhs(s, L, ReducedState(np.zeros(3), np.zeros(3)))
    assert not mu.any() and not nu.any()
    mu, nu = ep_rhs(s, L, ReducedState(K, K))
    np.testing.assert_allclose(mu, 0, atol=1e-15)
    np.testing.assert_allclose(nu, 0, atol=1e-15)
    mu, nu = ep_rhs(s, L, ReducedState([1, 0, 0], K))
    np.testing.assert_allclose(mu, [2, 0, 0], atol=1e-15)
    np.testing.assert_allclose(nu, [0, 2, -2], atol=1e-15)


def test_ep_rhs_is_exactly_minus_coadjoint(rng):
    s = S.sl2c_structure()
    L = QuadraticLagrangian(np.diag([1.0, 2, 3]), np.eye(3))
    X, Y = rng.normal(size=3), rng.normal(size=3)
    mu, nu = momenta(L, ReducedState(X, Y))
    g, h = coadjoint_raw(s, X, Y, mu, nu)
    a, b = ep_rhs(s, L, ReducedState(X, Y))
    assert np.array_equal(a, -g) and np.array_equal(b, -h)


@settings(max_examples=100)
@given(vec3, vec3)
def test_energy_pairing_vanishes(X, Y):
    s, L = S.sl2c_structure(), QuadraticLagrangian.identity()
    mu, nu = ep_rhs(s, L, ReducedState(X, Y))
    assert abs(mu @ X + nu @ Y) < 1e-12 * max(1.0, (X @ X + Y @ Y) ** 1.5)


def test_semidirect_forms_equal_ep_exactly(rng):
    L = QuadraticLagrangian(np.diag([1.0, 2, 3]), np.diag([2.0, 1, 0.5]))
    for s, which in ((so3_left_trivial(), "left_trivial"), (so3_right_trivial(), "right_trivial")):
        for _ in range(50):
            st0 = ReducedState(rng.normal(size=3), rng.normal(size=3))
            a = ep_rhs(s, L, st0)
            b = semidirect_ep_rhs(s, L, st0, which)
            assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_semidirect_rejects_nonzero_action():
    with pytest.raises(ValueError):
        semidirect_ep_rhs(S.sl2c_structure(), QuadraticLagrangian.identity(),
                          ReducedState(np.ones(3), np.ones(3)), "left_trivial")


def test_direct_sum_is_two_rigid_bodies(rng):
    s = so3_direct_sum()
    C = so3_constants()
    L = QuadraticLagrangian(np.diag([1.0, 2, 3]), np.diag([0.5, 1, 4]))
    X, Y = rng.normal(size=3), rng.normal(size=3)
    mu, nu = momenta(L, ReducedState(X, Y))
    a, b = ep_rhs(s, L, ReducedState(X, Y))
    np.testing.assert_allclose(a, lie_ep_rhs(C, X, mu), atol=1e-15)
    np.testing.assert_allclose(b, lie_ep_rhs(C, Y, nu), atol=1e-15)
    # rigid body form dPi/dt = Pi x Omega
    np.testing.assert_allclose(a, np.cross(mu, X), atol=1e-14)


def test_el_on_H_zero_force_equals_ep(rng):
    s = S.sl2c_structure()
    L_full = LagrangianOnH(QuadraticLagrangian.identity(), *linear_potential(np.zeros(3)))
    st0 = ReducedState(rng.normal(size=3), rng.normal(size=3))
    dmu, dnu, _ = el_rhs_on_H(s, L_full, st0, S.KElement(0.3, 0.1, 0.2), S.el_provider())
    a, b = ep_rhs(s, L_full.kinetic, st0)
    np.testing.assert_array_equal(dmu, a)
    np.testing.assert_array_equal(dnu, b)


def test_el_on_H_zero_provider_stays_on_ep_flow():
    s = S.sl2c_structure()
    L_full = LagrangianOnH(QuadraticLagrangian.identity(), *linear_potential([1.0, 2, 3]))
    prov = GroupTermProvider(terms=lambda h, d: (np.zeros(3), np.zeros(3)), velocity=lambda h, x, e: 0 * h)
    conf = IntegratorConfig(1e-2, 1.0)
    st0 = ReducedState([1, 0, 0], K)
    a = integrate_on_H(s, L_full, st0, np.zeros(3), conf, prov)
    b = integrate(s, L_full.kinetic, st0, conf)
    assert np.abs(a.xi - b.xi).max() < 1e-14


def test_el_on_H_energy_conserved():
    L = QuadraticLagrangian.identity()
    L_full = LagrangianOnH(L, *linear_potential([0.1, 0.1, 0.1]))
    tr, _, Bs = S.integrate_with_group(L, [0.3, -0.2, 0.4], [0.1, 0, -0.1], S.SU2Element.identity(),
                                       S.KElement.identity(), IntegratorConfig(1e-3, 5.0), L_full=L_full)
    assert tr.energy_drift() < 1e-8
    assert Bs[:, 2].min() > -1


def test_integrate_zero_state_constant():
    tr = integrate(S.sl2c_structure(), QuadraticLagrangian.identity(),
                   ReducedState(np.zeros(3), np.zeros(3)), IntegratorConfig(0.1, 1.0))
    assert len(tr.t) == 11
    assert not tr.xi.any() and not tr.eta.any() and not tr.energy.any()


def test_row_count():
    for step, t_end in ((0.1, 1.0), (0.3, 1.0), (1e-3, 0.05)):
        tr = integrate(so3_direct_sum(), QuadraticLagrangian.identity(), ReducedState([1, 0, 0], K),
                       IntegratorConfig(step, t_end))
        assert len(tr.t) == int(np.floor(t_end / step + 1e-9)) + 1


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(2.0, 1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(0.1, 1.0, "leapfrog")


def test_march_aborts_on_blow_up():
    with pytest.raises(NumericalAbort) as exc:
        march(lambda y: y * y, np.array([1.0]), IntegratorConfig(0.5, 100.0))
    assert exc.value.step > 0


def test_euler_is_first_order():
    s, L = S.sl2c_structure(), QuadraticLagrangian.identity()
    st0 = ReducedState([1, 0, 0], K)
    ref = integrate(s, L, st0, IntegratorConfig(1e-4, 0.5)).final_state()
    errs = [np.abs(integrate(s, L, st0, IntegratorConfig(h, 0.5, "euler")).final_state() - ref).max()
            for h in (1e-2, 5e-3)]
    assert 0.9 < np.log2(errs[0] / errs[1]) < 1.2


def test_reconstruction_body_velocity_along_path():
    L = QuadraticLagrangian(np.diag([1.0, 2, 3]), np.eye(3))
    A0 = S.su2_exp([0.3, 0.2, -0.1])
    tr, As, Bs = S.integrate_with_group(L, [0.3, -0.7, 0.2], [0.1, 0.4, -0.5], A0, S.KElement(0.2, -0.1, 0.3),
                                        IntegratorConfig(1e-3, 2.0))
    dt = 1e-3
    worst = 0.0
    for i in range(1, len(tr.t) - 1, 97):
        dA = (As[i + 1] - As[i - 1]) / (2 * dt)
        dB = (Bs[i + 1] - Bs[i - 1]) / (2 * dt)
        x, y = S.body_velocity(As[i], Bs[i], dA, dB)
        worst = max(worst, np.abs(x - tr.xi[i]).max(), np.abs(y - tr.eta[i]).max())
    assert worst < 1e-5
    # SU(2) factor stays unitary after projection
    A = As[-1]
    assert np.abs(A.conj().T @ A - np.eye(2)).max() < 1e-13


def test_trajectory_csv_round_trip(tmp_path):
    tr = integrate(S.sl2c_structure(), QuadraticLagrangian.identity(), ReducedState([1, 0, 0], K),
                   IntegratorConfig(0.01, 0.1))
    p = tmp_path / "t.csv"
    tr.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0].split(",") == tr.header()
    data = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.array_equal(data, tr.rows())
