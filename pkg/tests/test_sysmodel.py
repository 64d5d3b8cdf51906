import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swiptsec.sysmodel import (ConfigError, SystemConfig, config_from_mapping, dbm_to_watts,
                               draw_scenario, load_config, pathloss, substream, table1_config,
                               watts_to_dbm)


@pytest.mark.parametrize("dbm, watts", [(-70, 1e-10), (0, 1e-3), (30, 1.0), (-90, 1e-12)])
def test_dbm_to_watts(dbm, watts):
    assert dbm_to_watts(dbm) == pytest.approx(watts, rel=1e-12)


@given(st.floats(min_value=-200, max_value=100, allow_nan=False))
def test_dbm_roundtrip(x):
    assert watts_to_dbm(dbm_to_watts(x)) == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_dbm_vectorized():
    np.testing.assert_allclose(dbm_to_watts(np.array([0.0, -70.0])), [1e-3, 1e-10], rtol=1e-12)


@pytest.mark.parametrize("d, beta", [(10, 1e-6), (20, 1.25e-7), (1, 1e-3)])
def test_pathloss(d, beta):
    assert pathloss(d) == pytest.approx(beta, rel=1e-12)


@pytest.mark.parametrize("d", [0.0, -1.0, np.inf])
def test_pathloss_rejects(d):
    with pytest.raises(ConfigError):
        pathloss(d)


def test_default_config_values(cfg):
    assert (cfg.M, cfg.K, cfg.eta) == (200, 4, 4)
    assert cfg.T == 5e-3 and cfg.rho_eve == 0.5 and cfg.zeta == 0.5
    assert cfg.sigma2 == pytest.approx(dbm_to_watts(-90))
    assert cfg.sigma2_ant == pytest.approx(dbm_to_watts(-70))
    assert cfg.sigma2_s == pytest.approx(dbm_to_watts(-50))
    assert cfg.eh.a == 150 and cfg.eh.b == 0.014 and cfg.eh.P_sen == pytest.approx(2.4e-5)
    assert cfg.prelog == pytest.approx((5e-3 - 4e-5) / 5e-3)
    np.testing.assert_allclose(cfg.betas, 1e-3 * np.array([11.0, 13, 16, 18]) ** -3)


@pytest.mark.parametrize("change", [dict(eta=3), dict(tau=5e-3), dict(tau=0.0), dict(sigma2=0.0),
                                   dict(sigma2_ant=-1.0), dict(P_s_user=0.0), dict(rho_eve=1.0),
                                   dict(zeta=1.5), dict(M=0), dict(funding="free")])
def test_config_validation(cfg, change):
    with pytest.raises(ConfigError):
        cfg.replace(**change)


def test_replace_resizes_geometry(cfg):
    c2 = cfg.replace(K=2)
    assert c2.K == 2 and len(c2.geometry.d_user) == 2
    with pytest.raises(ConfigError):
        SystemConfig(K=3)


def test_draw_scenario_deterministic():
    assert draw_scenario(5, 4) == draw_scenario(5, 4)
    assert draw_scenario(5, 4, index=1) != draw_scenario(5, 4)


def test_draw_scenario_degenerate():
    g = draw_scenario(1, 3, (10, 10))
    assert g.d_user == (10.0, 10.0, 10.0) and g.d_eve == 10.0


def test_draw_scenario_mean():
    g = draw_scenario(11, 100_000 - 1)
    d = np.array(g.d_user + (g.d_eve,))
    assert d.min() >= 10 and d.max() <= 20
    assert abs(d.mean() - 15.0) < 0.05


def test_draw_scenario_rejects():
    with pytest.raises(ConfigError):
        draw_scenario(0, 2, (20, 10))


def test_substream_independent_of_call_order():
    a = substream(3, 1, 2).standard_normal(4)
    substream(3, 9).standard_normal(100)
    np.testing.assert_array_equal(a, substream(3, 1, 2).standard_normal(4))
    assert not np.array_equal(a, substream(3, 2, 1).standard_normal(4))
    with pytest.raises(ConfigError):
        substream(-1)


def test_config_from_mapping_sections_and_dbm():
    c = config_from_mapping({"M": 64, "sigma2_dbm": -80, "eh": {"a": 100},
                             "geometry": {"d_user": [10, 12], "d_eve": 11}})
    assert c.M == 64 and c.K == 2 and c.eh.a == 100 and c.geometry.d_eve == 11
    assert c.sigma2 == pytest.approx(1e-11)
    with pytest.raises(ConfigError):
        config_from_mapping({"bogus": 1})
    with pytest.raises(ConfigError):
        config_from_mapping({"sigma2": 1e-12, "sigma2_dbm": -90})


def test_load_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('M = 128\nfunding = "steady"\n[geometry]\nd_user = [11, 13, 16, 18]\nd_eve = 12\n')
    c = load_config(p)
    assert c.M == 128 and c.funding == "steady" and c.geometry.d_eve == 12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(0, 4))
def test_flat_dict_roundtrip(K, extra):
    c = table1_config(K=K, eta=K + extra)
    assert config_from_mapping(c.as_flat_dict()) == c
