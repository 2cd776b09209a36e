"""Robust secure multi-user beamforming under norm-bounded channel errors."""

from ._core import (
    ChannelSet,
    Error,
    herm_to_real,
    lemma1_extreme,
    quad_bounds,
    real_to_herm,
    run_sca,
    select_users,
    selftest,
    simulate,
    slnr_beamformers,
    ssr_exact,
    ssr_lower_bound,
    waterfill,
    zf_design,
)

__all__ = [
    "ChannelSet",
    "Error",
    "herm_to_real",
    "lemma1_extreme",
    "quad_bounds",
    "real_to_herm",
    "run_sca",
    "select_users",
    "selftest",
    "simulate",
    "slnr_beamformers",
    "ssr_exact",
    "ssr_lower_bound",
    "waterfill",
    "zf_design",
]
