"""Certify mutually unbiased bases from 2^d -> 1 QRAC statistics."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import (MubcertError, _certify, _certify_counts, _mub_metrics,
                    calibrate_noise_sigma as _calibrate, mean_fringe_visibility as _visibility,
                    rounds_for_detections as _rounds, simulate_counts_csv as _simulate)

__version__ = "0.3.0"


def _config_text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else _json.dumps(config)


def certify(asp, sigma=0.0, d=4):
    """Full certificate for a directly supplied ASP estimate, as a dict."""
    return _json.loads(_certify(asp, sigma, d))


def certify_counts(csv_text):
    """Full certificate for a counts table given as CSV text."""
    return _json.loads(_certify_counts(csv_text))


def mub_metrics(pair):
    return _json.loads(_mub_metrics(pair))


def simulate_counts_csv(rounds, seed, config=None, threads=0):
    return _simulate(rounds, seed, _config_text(config), threads)


def rounds_for_detections(detections, config=None):
    return _rounds(detections, _config_text(config))


def mean_fringe_visibility(config, seed=0):
    return _visibility(_config_text(config), seed)


def calibrate_noise_sigma(config, target_visibility, seed=0):
    return _calibrate(_config_text(config), target_visibility, seed)
