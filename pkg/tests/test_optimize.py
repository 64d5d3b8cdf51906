import numpy as np
import pytest

from swiptsec import optimize as o
from swiptsec.energy import harvested_eve, harvested_user
from swiptsec.secrecy import secrecy_bound_closed
from swiptsec.sysmodel import table1_config

LIVE = table1_config(d_user=(2.0, 2.4, 2.8, 3.2), d_eve=2.6, funding="steady")


def test_pilot_powers(cfg):
    p, q = o.pilot_powers(cfg, 0.7, 1e-5, 2e-5)
    assert p == pytest.approx(0.7 * 1e-5 / 4) and q == pytest.approx(0.5 * 2e-5 / 4)


def test_dead_network():
    c = table1_config(P_sen=1e3, funding="steady")
    st = o.steady_state_energy(c, 0.4, 0.7)
    assert st.dead and st.iterations <= 2 and not np.any(st.Q_user) and st.Q_eve == 0


def test_table1_steady_state_is_dead(cfg):
    assert o.steady_state_energy(cfg.replace(funding="steady"), 0.4, 0.7).dead


def test_saturated_steady_state():
    c = table1_config(d_user=(0.1,) * 4, d_eve=0.1, P_sen=1e-9, funding="steady")
    st = o.steady_state_energy(c, 0.4, 0.7)
    assert st.converged and not st.dead
    np.testing.assert_array_equal(st.Q_user, c.eh.P_s_user * c.harvest_time)


def test_live_steady_state_self_consistent():
    st = o.steady_state_energy(LIVE, 0.4, 0.7)
    assert st.converged and not st.dead
    assert st.p_t == 0.7 * st.Q_user[0] / LIVE.eta and st.q_t == LIVE.zeta * st.Q_eve / LIVE.eta
    nu = harvested_user(LIVE, st.p_t, st.q_t, 0.4)
    ne = harvested_eve(LIVE, st.p_t, st.q_t)
    np.testing.assert_allclose(nu, st.Q_user, rtol=1e-9)
    assert ne == pytest.approx(st.Q_eve, rel=1e-9)


def test_steady_state_stable_under_perturbation():
    st = o.steady_state_energy(LIVE, 0.4, 0.7)
    again = o.steady_state_energy(LIVE, 0.4, 0.7, start=(st.Q_user * 1.01, st.Q_eve * 0.99))
    np.testing.assert_allclose(again.Q_user, st.Q_user, rtol=1e-8)
    assert again.Q_eve == pytest.approx(st.Q_eve, rel=1e-8)


def test_nonconvergence_carries_last_iterate():
    with pytest.raises(o.NonConvergenceError) as exc:
        o.steady_state_energy(LIVE, 0.4, 0.7, max_iter=3)
    assert exc.value.last.iterations == 3 and not exc.value.last.converged
    with pytest.raises(ValueError):
        o.steady_state_energy(LIVE, 0.4, 0.7, tol=0)


@pytest.mark.parametrize("config", [table1_config(), LIVE], ids=["budget", "steady"])
def test_rho_max(config):
    assert o.rho_max(config, 0.7, 0.0) == 1.0
    Q0 = o.operating_point(config, 0.0, 0.7)[2][0]
    with pytest.raises(o.InfeasibleError):
        o.rho_max(config, 0.7, Q0 * 1.001)
    assert o.rho_max(config, 0.7, Q0 * (1 - 1e-9)) < 1e-3
    r = o.rho_max(config, 0.7, 0.5 * Q0)
    Qr = o.operating_point(config, r, 0.7)[2][0]
    assert 0.5 * Q0 <= Qr <= 0.5 * Q0 * (1 + 1e-6)


def test_theta_min(cfg):
    Q0 = o.operating_point(cfg, 0.4, 0.0)[3]
    assert o.theta_min(cfg, 0.4, Q0) == 0.0
    # the eavesdropper falls below sensitivity at theta = 1, so any positive cap is reachable
    assert o.operating_point(cfg, 0.4, 1.0)[3] == 0.0
    assert o.theta_min(cfg, 0.4, 1e-30) < 1.0
    with pytest.raises(o.InfeasibleError):
        o.theta_min(cfg.replace(d_eve=10.0, d_user=(19.0,) * 4), 0.4, 1e-30)
    t = o.theta_min(cfg, 0.4, 0.8 * Q0)
    Qt = o.operating_point(cfg, 0.4, t)[3]
    assert Qt <= 0.8 * Q0 * (1 + 1e-6)
    assert Qt == pytest.approx(0.8 * Q0, rel=1e-6)
    with pytest.raises(ValueError):
        o.theta_min(cfg, 0.4, 0.0)


def test_unconstrained_optimum(cfg):
    rep = o.maximize_secrecy(cfg, audit=0)
    assert rep.theta_star == 1.0 and rep.rho_star == 1 - o.EPS and not rep.binding
    p, q, _, _ = o.operating_point(cfg, rep.rho_star, 1.0)
    assert rep.R_star == pytest.approx(secrecy_bound_closed(cfg, p, q, rep.rho_star), abs=1e-12)


def test_constrained_optimum_border(cfg):
    Qu = o.operating_point(cfg, 0.0, 1.0)[2][0]
    Qe = o.operating_point(cfg, 0.4, 0.0)[3]
    rep = o.maximize_secrecy(cfg, 0.5 * Qu, 0.8 * Qe)
    assert rep.binding == ["Q_min", "Q_max"]
    assert rep.audit_points > 0 and rep.border_optimal
    assert rep.theta_min <= rep.theta_star and rep.rho_star <= rep.rho_max


def test_steady_mode_border_is_not_optimal():
    # with self-funded pilots a larger rho starves the next frame's training;
    # the audit exposes that the border point is not the maximum
    Qu = o.operating_point(LIVE, 0.0, 1.0)[2][0]
    rep = o.maximize_secrecy(LIVE, 0.5 * Qu, np.inf, audit=20)
    assert not rep.border_optimal


def test_monotonicity_budget(cfg):
    rep = o.monotonicity_check(cfg, np.linspace(0.06, 1, 12), np.linspace(0.01, 0.99, 12))
    assert rep.all_positive and rep.sign_agree and rep.max_rel_err < 1e-4


def test_monotonicity_steady_rho_derivative_changes_sign():
    rep = o.monotonicity_check(LIVE, np.linspace(0.1, 1, 5), np.linspace(0.05, 0.95, 5))
    assert rep.min_d_rho < 0 and rep.sign_agree
