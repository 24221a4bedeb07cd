"""Log-log power-law fits for growth-rate checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerFit:
    slope: float
    intercept: float
    r2: float


def fit_power_law(x, y) -> PowerFit:
    """Ordinary least squares of ``log y`` on ``log x``.

    A perfectly flat series has no variance to explain; it is reported with
    ``r2 = 1`` when the residuals are equally negligible.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2 or np.ptp(lx) == 0:
        raise ValueError("need at least two distinct x values to fit an exponent")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    tiny = 1e-20 * lx.size
    if ss_tot <= tiny:
        r2 = 1.0 if ss_res <= tiny else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerFit(float(slope), float(intercept), r2)
