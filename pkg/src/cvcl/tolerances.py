"""Global numerical tolerances.

All values are multiplied by the ``CVCL_TOLERANCE_SCALE`` environment variable
(default 1), read on every lookup so tests can stress the thresholds.
"""
import os

DEFAULTS = {
    "hermitian": 1e-12,
    "trace": 1e-10,
    "positivity": 1e-10,
    "normalization": 1e-10,
    "weights": 1e-12,
    "kernel_bound": 1e-12,
    "completeness": 1e-10,
    "eig_floor": 1e-14,
    "support_defect": 1e-8,
    "inverse_state": 1e-8,
    "overlap": 1e-8,
    "covariance": 1e-8,
    "monotonicity": 1e-8,
    "psd_sector": 1e-12,
}


def scale():
    raw = os.environ.get("CVCL_TOLERANCE_SCALE", "1")
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"CVCL_TOLERANCE_SCALE must be a number, got {raw!r}") from exc
    if not value > 0:
        raise ValueError("CVCL_TOLERANCE_SCALE must be positive")
    return value


def get(name):
    return DEFAULTS[name] * scale()
