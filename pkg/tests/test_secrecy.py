import numpy as np
import pytest

from swiptsec import secrecy as s
from swiptsec.optimize import operating_point, secrecy_at
from swiptsec.sysmodel import ConfigError, draw_scenario, table1_config

P, Q = 1.75e-6, 1.25e-6      # budget pilot powers at theta = 0.7


def small_instance(M=4, K=2):
    """Unit-order scenario: distance 0.1 m gives beta = 1."""
    d = tuple(0.1 * (1 + 0.1 * i) for i in range(K))
    return table1_config(M=M, K=K, eta=max(K, 2), d_user=d, d_eve=0.105, sigma2=0.5,
                         sigma2_ant=0.1, sigma2_s=0.1)


def test_passive_eve_has_no_rate(cfg):
    assert s.eve_rate_bound(cfg, P, 0.0) == 0.0
    assert s.secrecy_bound_closed(cfg, P, 0.0, 0.4) == pytest.approx(s.user_rate_bound(cfg, P, 0.0, 0.4))


def test_user_term_vanishes_with_rho(cfg):
    assert s.user_rate_bound(cfg, P, Q, 1e-12) < 1e-6


def test_prelog_drives_rates_to_zero(cfg):
    c = cfg.replace(tau=cfg.T * (1 - 1e-12))
    assert abs(s.secrecy_bound_closed(c, P, Q, 0.4)) < 1e-9


def test_bound_matches_hand_transcription(fig34_cfg):
    c, k, rho = fig34_cfg, 1, 0.4
    b, bw = c.betas, c.beta_w
    D = c.sigma2 + Q * bw + c.eta * P * b
    sinr_u = rho * c.M * c.eta * P * b[k] ** 2 / D[k] / (
        rho * (c.K * b[k] + (c.K - 1) * b[k] * c.W_E + c.W_E * b[k] * (Q * bw + c.sigma2) / D[k]
               + c.sigma2_ant) + c.sigma2_s)
    A = c.M * Q * bw ** 2 / D
    sinr_e = c.rho_eve * A[k] / (c.rho_eve * ((c.K * bw + A.sum()) * (c.W_E + 1) - A[k] + c.sigma2_ant)
                                  + c.sigma2_s)
    ref = c.prelog * (np.log2(1 + sinr_u) - np.log2(1 + sinr_e))
    assert s.secrecy_bound_closed(c, P, Q, rho, k=k) == pytest.approx(ref, rel=1e-13)


def test_bound_broadcasts(cfg):
    ps = np.array([1e-6, 2e-6])
    out = s.secrecy_bound_closed(cfg, ps[:, None], Q, np.array([0.2, 0.4, 0.6])[None, :])
    assert out.shape == (2, 3)
    assert out[1, 2] == pytest.approx(s.secrecy_bound_closed(cfg, 2e-6, Q, 0.6))


def test_bound_below_mc(fig34_cfg):
    c = fig34_cfg.replace(d_user=(13.0,) * 4)
    mc = s.mc_secrecy_rate(c, P, Q, 0.4, n_trials=4000, seed=2)
    bound = s.secrecy_bound_closed(c, P, Q, 0.4)
    assert bound <= mc.secrecy.mean + 3 * mc.secrecy.stderr
    assert (mc.secrecy.mean - bound) / mc.secrecy.mean < 0.15
    assert s.eve_rate_bound(c, P, Q) == pytest.approx(mc.eve_rate.mean, rel=0.15)


def test_mc_huge_noise_is_zero():
    c = table1_config(M=1, K=1, eta=1, d_user=(15.0,), d_eve=15.0, sigma2_ant=1e3, sigma2_s=1e3)
    mc = s.mc_secrecy_rate(c, P, Q, 0.4, n_trials=2000, seed=1)
    assert abs(mc.secrecy.mean) <= 3 * mc.secrecy.stderr + 1e-9


def test_stderr_shrinks_like_sqrt_n(cfg):
    a = s.mc_secrecy_rate(cfg, P, Q, 0.4, n_trials=2000, seed=4).secrecy.stderr
    b = s.mc_secrecy_rate(cfg, P, Q, 0.4, n_trials=4000, seed=4).secrecy.stderr
    assert a / b == pytest.approx(np.sqrt(2), rel=0.1)


def test_mc_all_users_consistent(cfg):
    res = s.mc_secrecy_all(cfg, P, Q, 0.4, 1000, seed=3)
    one = s.mc_secrecy_rate(cfg, P, Q, 0.4, n_trials=1000, seed=3, k=2)
    assert res[2].secrecy.mean == one.secrecy.mean
    assert len(res) == cfg.K


def test_report_flags(cfg):
    rep = s.secrecy_report(cfg, P, Q, 0.4, n_trials=500, seed=1)
    assert rep.bound == pytest.approx(rep.user_rate_bound - rep.eve_rate_bound)
    assert rep.mc_estimate is not None and not rep.flags
    c = cfg.replace(d_user=(19.0, 11.0, 11.0, 11.0), d_eve=10.0)
    rep = s.secrecy_report(c, 1e-9, 1e-3, 0.4)
    assert rep.bound < 0 and rep.flags == ["negative-bound"]


def test_jensen_constant():
    assert s.jensen_constant(1) == pytest.approx(3 / 8)
    assert s.jensen_constant(2) == pytest.approx(5 / 24)
    assert s.jensen_constant(np.inf) == 0.0
    assert s.jensen_constant(1e9) < 1e-9
    with pytest.raises(ConfigError):
        s.jensen_constant(0.5)


def test_gaussian_moments_closed():
    assert s.entry_quartic_moment(1.0) == 2.0
    assert s.gaussian_moments(1, 1.0, 2) == 2.0
    assert s.gaussian_moments(2, 1.0, 2) == 6.0
    for M in (1, 3, 7):
        for m in (1, 2, 3, 4):
            ref = np.prod([M + j for j in range(m)]) * 0.3 ** m
            assert s.gaussian_moments(M, 0.3, m) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(ValueError):
        s.gaussian_moments(2, 1.0, 5)


def test_gaussian_moment_mc_m2():
    rng = np.random.default_rng(12)
    g = (rng.standard_normal((1_000_000, 2)) + 1j * rng.standard_normal((1_000_000, 2))) / np.sqrt(2)
    r = np.sum(np.abs(g) ** 2, axis=1)
    assert np.mean(r ** 2) == pytest.approx(6.0, rel=0.01)


@pytest.mark.parametrize("M,K", [(4, 2), (2, 1)])
def test_sigma_z_small_instance(M, K):
    c = small_instance(M, K)
    p, q = 0.8, 0.6
    x = s.leakage_sum_samples(c, p, q, 300_000, seed=5)
    brute = c.rho_eve ** 2 * (c.W_E + 1) ** 2 * np.var(x)
    assert s.sigma_z_sq(c, p, q) == pytest.approx(brute, rel=0.05)


def test_sigma_z_scaling():
    # scaling (beta_k, beta_w, sigma2) by c: the oracle agrees at both scales
    for cscale in (1.0, 10.0):
        base = small_instance(4, 2)
        d = tuple(x / cscale ** (1 / 3) for x in base.geometry.d_user)
        c = base.replace(d_user=d, d_eve=base.geometry.d_eve / cscale ** (1 / 3), sigma2=base.sigma2 * cscale)
        x = s.leakage_sum_samples(c, 0.8, 0.6, 200_000, seed=6)
        brute = c.rho_eve ** 2 * (c.W_E + 1) ** 2 * np.var(x)
        assert s.sigma_z_sq(c, 0.8, 0.6) == pytest.approx(brute, rel=0.05)


def test_sigma_z_vanishes_with_gains():
    c = small_instance(4, 2).replace(d_eve=1e5)
    assert s.sigma_z_sq(c, 0.8, 0.6) < 1e-20
    with pytest.raises(ConfigError):
        s.sigma_z_sq(c, 0.0, 0.6)


def test_unbalanced_sigma_z_disagrees(cfg):
    # the alternative arrangement is dimensionally inconsistent; kept as a diagnostic only
    assert s.sigma_z_sq_unbalanced(cfg, P, Q) / s.sigma_z_sq(cfg, P, Q) > 100


def test_moment_bundle(cfg):
    mb = s.moment_bundle(cfg, P, Q)
    assert mb.jensen_C == 3 / 8 and len(mb.norm_moments) == 4 and mb.delta > 0


def test_asymptotic_properties():
    c = table1_config(M=4096)
    full = s.secrecy_bound_closed(c, P, Q, 0.4)
    assert abs(s.secrecy_asymptotic(c, P, Q, 0.4) / full - 1) < 0.05
    _, e1 = s.secrecy_asymptotic_terms(c, P, Q, 0.4)
    _, e2 = s.secrecy_asymptotic_terms(c.replace(M=64), P, Q, 0.4)
    assert e1 == e2
    u1, _ = s.secrecy_asymptotic_terms(c, P, Q, 0.4)
    u2, _ = s.secrecy_asymptotic_terms(c.replace(M=8192), P, Q, 0.4)
    assert (u2 - u1) / c.prelog == pytest.approx(1.0, abs=0.05)
    assert s.secrecy_asymptotic_terms(c, P, 0.0, 0.4)[1] == 0.0


def test_d_bound_d_rho(cfg):
    h = 1e-6
    for rho in (0.05, 0.4, 0.9):
        fd = (s.secrecy_bound_closed(cfg, P, Q, rho + h) - s.secrecy_bound_closed(cfg, P, Q, rho - h)) / (2 * h)
        assert s.d_bound_d_rho(cfg, P, Q, rho) == pytest.approx(fd, rel=1e-4)
        assert s.d_bound_d_rho_high_sinr(cfg, P, Q, rho) > 0


def test_positivity_region():
    c = table1_config()
    thetas = np.linspace(0.0505, 1, 60)
    worst = np.inf
    for i in range(1000):
        g = draw_scenario(17, c.K, (10, 20), i)
        cc = c.replace(d_user=g.d_user, d_eve=g.d_eve)
        worst = min(worst, float(np.min(secrecy_at(cc, 0.4, thetas))))
    assert worst > 0


def test_jensen_term_negligible_on_grid(cfg):
    C = s.jensen_constant(1.0)
    for theta in np.linspace(0.1, 1, 10):
        for rho in (0.2, 0.5, 0.8):
            p, q, _, _ = operating_point(cfg, rho, theta)
            assert C * s.sigma_z_sq(cfg, p, q) < 0.01 * s.eve_rate_bound(cfg, p, q)
