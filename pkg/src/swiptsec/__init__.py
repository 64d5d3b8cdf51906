"""Secure SWIPT in downlink massive MIMO with an active, energy-harvesting eavesdropper.

Closed-form harvested-energy and secrecy-rate bounds, a seeded Monte Carlo
simulator that validates them, and the constrained secrecy maximization.
"""
from .sysmodel import (ConfigError, EhParams, Geometry, SystemConfig, dbm_to_watts, draw_scenario,
                       load_config, pathloss, table1_config, watts_to_dbm)
from .energy import (harvested_eve, harvested_user, nonlinear_eh, rf_power_eve_closed,
                     rf_power_user_closed)
from .secrecy import (mc_secrecy_rate, secrecy_asymptotic, secrecy_bound_closed, sigma_z_sq)
from .optimize import (InfeasibleError, maximize_secrecy, rho_max, steady_state_energy, theta_min)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigError", "EhParams", "Geometry", "InfeasibleError", "SystemConfig",
    "dbm_to_watts", "draw_scenario", "harvested_eve", "harvested_user", "load_config",
    "maximize_secrecy", "mc_secrecy_rate", "nonlinear_eh", "pathloss", "rf_power_eve_closed",
    "rf_power_user_closed", "rho_max", "secrecy_asymptotic", "secrecy_bound_closed",
    "sigma_z_sq", "steady_state_energy", "table1_config", "theta_min", "watts_to_dbm",
]
