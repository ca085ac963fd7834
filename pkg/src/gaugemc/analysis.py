"""Locating transitions and extrapolating them to infinite size.

The third-moment ratio B3 of the order parameter changes sign at an
ordering transition, so its highest-temperature zero crossing (scanning
from hot to cold) estimates T_c directly. The susceptibility peak gives a
second estimate. Finite-size estimates are extrapolated with
T_c(L) = a L^(-b) + T_c(inf), fitted by a golden-section search over the
exponent with the linear pair (a, T_c) solved exactly at each step.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .couplings import (ModelKind, NoiseRates, nishimori_coupling_set)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TransitionEstimate:
    """A finite-size transition temperature with one-sigma error."""

    t_c: float
    t_c_err: float
    method: str
    found: bool = True

    def interval(self, n_sigma: float = 1.0) -> tuple:
        return self.t_c - n_sigma * self.t_c_err, self.t_c + n_sigma * self.t_c_err


def _sorted_descending(temperatures, *columns):
    t = np.asarray(temperatures, dtype=np.float64)
    order = np.argsort(t)[::-1]
    return (t[order],) + tuple(np.asarray(c, dtype=np.float64)[order]
                               for c in columns if c is not None)


def find_b3_zero_crossing(temperatures, b3, b3_err=None) -> TransitionEstimate:
    """Highest-temperature sign change of B3, linearly interpolated.

    Returns found=False when B3 keeps one sign over the whole scan. With
    several crossings the hottest one is used and a warning is issued.
    """
    if b3_err is None:
        t, y = _sorted_descending(temperatures, b3)
        err = np.zeros_like(y)
    else:
        t, y, err = _sorted_descending(temperatures, b3, b3_err)
    if t.size < 2:
        raise ValueError("need at least two temperatures")
    crossings = []
    for i in range(t.size - 1):
        if y[i] == 0.0:
            crossings.append((t[i], 0.0))
        elif y[i] * y[i + 1] < 0.0:
            dt = t[i + 1] - t[i]
            frac = y[i] / (y[i] - y[i + 1])
            t_c = t[i] + dt * frac
            denom = (y[i] - y[i + 1]) ** 2
            var = dt * dt * ((y[i + 1] * err[i]) ** 2
                             + (y[i] * err[i + 1]) ** 2) / denom ** 2
            crossings.append((float(t_c), float(math.sqrt(var))))
    if y[-1] == 0.0:
        crossings.append((t[-1], 0.0))
    if not crossings:
        return TransitionEstimate(math.nan, math.nan, "b3_zero", found=False)
    if len(crossings) > 1:
        warnings.warn(f"B3 crosses zero {len(crossings)} times; "
                      "using the highest-temperature crossing", stacklevel=2)
    t_c, t_err = crossings[0]
    return TransitionEstimate(t_c, t_err, "b3_zero")


def _parabola_vertex(x, y):
    d21 = x[1] - x[0]
    d23 = x[1] - x[2]
    num = d21 * d21 * (y[1] - y[2]) - d23 * d23 * (y[1] - y[0])
    den = d21 * (y[1] - y[2]) - d23 * (y[1] - y[0])
    if den == 0.0:
        return x[1]
    return x[1] - 0.5 * num / den


def find_chi_peak(temperatures, chi, chi_err=None) -> TransitionEstimate:
    """Susceptibility maximum refined by a parabola through the peak point
    and its two neighbors. A peak at the scan edge is returned as-is with
    the local grid spacing as the error."""
    if chi_err is None:
        t, y = _sorted_descending(temperatures, chi)
        err = np.zeros_like(y)
    else:
        t, y, err = _sorted_descending(temperatures, chi, chi_err)
    if t.size < 3:
        raise ValueError("need at least three temperatures")
    k = int(np.argmax(y))
    if k == 0 or k == t.size - 1:
        other = 1 if k == 0 else t.size - 2
        return TransitionEstimate(float(t[k]), abs(float(t[k] - t[other])),
                                  "chi_peak")
    xs = t[k - 1:k + 2]
    ys = y[k - 1:k + 2]
    t_c = _parabola_vertex(xs, ys)
    var = 0.0
    scale = max(np.max(np.abs(ys)), 1e-30)
    for j in range(3):
        if err[k - 1 + j] == 0.0:
            continue
        h = 1e-6 * scale
        bumped = ys.copy()
        bumped[j] += h
        dv = (_parabola_vertex(xs, bumped) - t_c) / h
        var += (dv * err[k - 1 + j]) ** 2
    return TransitionEstimate(float(t_c), float(math.sqrt(var)), "chi_peak")


@dataclass(frozen=True)
class ScalingFit:
    """Power-law drift fit T_c(L) = amplitude L^(-exponent) + t_inf."""

    amplitude: float
    exponent: float
    t_inf: float
    amplitude_err: float
    exponent_err: float
    t_inf_err: float
    chi2: float
    n_points: int

    def predict(self, lsize) -> np.ndarray:
        lsize = np.asarray(lsize, dtype=np.float64)
        return self.amplitude * lsize ** (-self.exponent) + self.t_inf


def _linear_at_exponent(lsizes, values, weights, b):
    """Weighted least squares for (a, c) in y = a L^-b + c. Returns
    (a, c, weighted SSE)."""
    basis = lsizes ** (-b)
    design = np.stack([basis, np.ones_like(basis)], axis=1)
    w = np.sqrt(weights)
    coef, *_ = np.linalg.lstsq(design * w[:, None], values * w, rcond=None)
    resid = values - design @ coef
    return coef[0], coef[1], float(np.sum(weights * resid * resid))


def fit_finite_size(lsizes, t_cs, t_c_errs=None, exponent_range=(0.1, 5.0),
                    tol: float = 1e-6) -> ScalingFit:
    """Fit T_c(L) = a L^(-b) + T_c by golden-section search over b with the
    linear parameters solved exactly at each trial exponent.

    Parameter errors come from the Jacobian covariance at the minimum. With
    t_c_errs given the fit is weighted by 1/err^2 and the covariance is used
    as-is; otherwise residual variance rescales it.
    """
    lsizes = np.asarray(lsizes, dtype=np.float64)
    values = np.asarray(t_cs, dtype=np.float64)
    if lsizes.size != values.size or lsizes.size < 3:
        raise ValueError("need at least three sizes")
    if np.any(lsizes <= 1):
        raise ValueError("sizes must exceed 1")
    if t_c_errs is None:
        weights = np.ones_like(values)
        known_errors = False
    else:
        errs = np.asarray(t_c_errs, dtype=np.float64)
        if np.any(errs <= 0):
            raise ValueError("errors must be positive")
        weights = 1.0 / (errs * errs)
        known_errors = True

    def sse(b):
        return _linear_at_exponent(lsizes, values, weights, b)[2]

    lo, hi = exponent_range
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = sse(x1), sse(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = sse(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = sse(x2)
    b = 0.5 * (lo + hi)
    a, c, chi2 = _linear_at_exponent(lsizes, values, weights, b)

    basis = lsizes ** (-b)
    jac = np.stack([basis, -a * np.log(lsizes) * basis,
                    np.ones_like(basis)], axis=1)
    jtj = jac.T @ (weights[:, None] * jac)
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.full((3, 3), np.inf)
    dof = max(lsizes.size - 3, 1)
    if not known_errors:
        cov = cov * (chi2 / dof)
    sigmas = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return ScalingFit(float(a), float(b), float(c), float(sigmas[0]),
                      float(sigmas[1]), float(sigmas[2]), chi2,
                      int(lsizes.size))


def nishimori_temperature(rates: NoiseRates, kind: ModelKind,
                          normalized: bool = True) -> float:
    """Temperature at which the disorder couplings sit on the Nishimori
    line. In the normalized convention (reference coupling scaled to 1)
    this is the inverse magnitude of the unnormalized reference coupling;
    unnormalized runs live at T = 1 by construction."""
    if not normalized:
        return 1.0
    unnorm = nishimori_coupling_set(kind, rates, normalized=False)
    return 1.0 / abs(unnorm["jx_x"])


def threshold_verdict(estimate: TransitionEstimate, t_nishimori: float,
                      n_sigma: float = 1.0) -> str:
    """Classify a run against its Nishimori temperature.

    'below' means the transition sits above T_N with margin, so the noise
    rate is below threshold. 'above' means no ordering transition was found
    (or the crossing is consistent with T <= 0). Anything else is
    'inconclusive'.
    """
    if not estimate.found:
        return "above"
    if estimate.t_c + n_sigma * estimate.t_c_err <= 0.0:
        return "above"
    if estimate.t_c - n_sigma * estimate.t_c_err > t_nishimori:
        return "below"
    return "inconclusive"
