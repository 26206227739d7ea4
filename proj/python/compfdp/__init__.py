"""Target-decoy competition with FDP control and FDP upper bounds.

Reports are returned as dicts with the same fields the command line tool
writes (procedure, alpha, gamma, m, k, num_targets, num_decoys, indices,
bound). A given seed produces the same report here and on the command line.
"""

import json

from ._compfdp import (
    DEFAULT_SEED,
    ConfigError,
    DataError,
    DomainError,
    binom_cdf_half,
    compute_d_max_tdc,
    compute_i0,
    delta_table,
    kr_constant,
    nb_cdf_half,
    nb_quantile,
    nb_upper_tail,
    precompute,
    simulate_generic_null,
    simulate_spectrum_id,
)
from . import _compfdp

__all__ = [
    "DEFAULT_SEED",
    "ConfigError",
    "DataError",
    "DomainError",
    "binom_cdf_half",
    "bound",
    "cli",
    "compute_d_max_tdc",
    "compute_i0",
    "delta_table",
    "fdp_band",
    "fdp_sd",
    "kr_constant",
    "nb_cdf_half",
    "nb_quantile",
    "nb_upper_tail",
    "precompute",
    "simulate_generic_null",
    "simulate_spectrum_id",
    "tdc",
]


def tdc(targets, decoys, alpha=0.05, seed=DEFAULT_SEED, tie_policy="random"):
    return json.loads(_compfdp._tdc(list(targets), list(decoys), alpha, seed, tie_policy))


def fdp_sd(targets, decoys, alpha=0.05, gamma=0.05, randomized=False, seed=DEFAULT_SEED, tie_policy="random"):
    return json.loads(_compfdp._fdp_sd(list(targets), list(decoys), alpha, gamma, randomized, seed, tie_policy))


def fdp_band(targets, decoys, alpha=0.05, gamma=0.05, band="kr", uniform_table="", standardized_table="",
             draw="randomized", seed=DEFAULT_SEED, tie_policy="random"):
    """band is "uniform", "standardized" or "kr"; the first two need a table
    written by precompute()."""
    return json.loads(_compfdp._fdp_band(list(targets), list(decoys), alpha, gamma, band, str(uniform_table),
                                         str(standardized_table), draw, seed, tie_policy))


def bound(targets, decoys, alpha=0.05, gamma=0.05, method="krb", uniform_table="", standardized_table="",
          draw="randomized", seed=DEFAULT_SEED, tie_policy="random"):
    """Runs TDC at alpha and bounds the FDP of its list with confidence 1 - gamma."""
    return json.loads(_compfdp._bound(list(targets), list(decoys), alpha, gamma, method, str(uniform_table),
                                      str(standardized_table), draw, seed, tie_policy))


def cli(args):
    """Runs one command line invocation in-process; returns (exit_code, stdout_bytes, stderr_text)."""
    return _compfdp._cli([str(a) for a in args])
