"""Order parameters, cumulants, and disorder-average error estimates.

The 3D order parameter is the Polyakov line averaged over spatial columns,
P = (1/L^2) sum_{i,j} prod_k sigma_t(i,j,k). Planar site models use the
plain magnetization instead. Cumulants are built from fluctuations
of the recorded |P| values around their thermal mean, chi = <ptilde^2> and
B3 = <ptilde^3> / <ptilde^2>^(3/2), evaluated per disorder sample and then
averaged over samples with jackknife errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeState


def mean_abs_polyakov(state: LatticeState, sublattice: int = 0) -> float:
    """|column-averaged Polyakov line| of one sublattice (3D only)."""
    if state.dim != 3:
        raise ValueError("Polyakov lines need a 3D lattice")
    lines = np.prod(state.spins[sublattice, 2], axis=0, dtype=np.int64)
    return abs(float(np.mean(lines)))


def magnetization_2d(state: LatticeState, sublattice: int = 0) -> float:
    """|site magnetization| of one sublattice of a planar model."""
    if state.dim != 2:
        raise ValueError("magnetization_2d needs a 2D lattice")
    return abs(float(np.mean(state.spins[sublattice, 0], dtype=np.float64)))


def order_parameter(state: LatticeState, sublattice: int = 0) -> float:
    """Dimension-appropriate order parameter for one sublattice."""
    if state.dim == 3:
        return mean_abs_polyakov(state, sublattice)
    return magnetization_2d(state, sublattice)


def _central_moments(values: np.ndarray, orders: tuple[int, ...]) -> list[float]:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empty series")
    d = v - v.mean()
    return [float(np.mean(d**n)) for n in orders]


def susceptibility(values) -> float:
    """Thermal variance of the recorded order parameter, <ptilde^2>."""
    (m2,) = _central_moments(np.asarray(values), (2,))
    return m2


def cumulant_b3(values) -> float:
    """Skewness-type cumulant <ptilde^3> / <ptilde^2>^(3/2).

    Zero for a symmetric distribution; returns 0.0 when the variance
    vanishes (a frozen series has no defined skew direction). Variances at
    the rounding floor of the mean count as vanished, otherwise the ratio
    would amplify pure roundoff into an order-one number.
    """
    v = np.asarray(values, dtype=np.float64)
    m2, m3 = _central_moments(v, (2, 3))
    scale = float(np.max(np.abs(v), initial=1.0))
    floor = (8.0 * np.finfo(np.float64).eps * scale) ** 2
    if m2 <= floor:
        return 0.0
    return m3 / m2**1.5


def binder_u4(values) -> float:
    """Fourth-order Binder cumulant 1 - <m^4> / (3 <m^2>^2)."""
    v = np.asarray(values, dtype=np.float64)
    m2 = float(np.mean(v**2))
    if m2 == 0.0:
        return 0.0
    m4 = float(np.mean(v**4))
    return 1.0 - m4 / (3.0 * m2 * m2)


def jackknife(per_sample_values) -> tuple[float, float]:
    """Leave-one-out mean and error over disorder samples.

    Returns (mean, err). With a single sample the error is reported as 0.
    """
    v = np.asarray(per_sample_values, dtype=np.float64)
    n = v.size
    if n == 0:
        raise ValueError("no samples")
    mean = float(v.mean())
    if n == 1:
        return mean, 0.0
    loo = (v.sum() - v) / (n - 1)
    var = (n - 1) / n * float(np.sum((loo - loo.mean()) ** 2))
    return mean, float(np.sqrt(var))


@dataclass
class ObservableSeries:
    """Per-temperature record of one disorder sample's measurements.

    order_param[b] and energy[b] are the values at the b-th recording, taken
    every bin_interval sweeps after thermalization.
    """

    temperature: float
    bin_interval: int
    order_param: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)

    @property
    def n_bins(self) -> int:
        return int(self.order_param.size)

    def chi(self) -> float:
        return susceptibility(self.order_param)

    def b3(self) -> float:
        return cumulant_b3(self.order_param)

    def u4(self) -> float:
        return binder_u4(self.order_param)

    def mean_order(self) -> float:
        return float(np.mean(self.order_param))

    def mean_energy(self) -> float:
        return float(np.mean(self.energy))


def disorder_average(per_sample_series: list["ObservableSeries"],
                     pooled_moments: bool = False) -> dict[str, float]:
    """Combine one temperature's series across disorder samples.

    Default form evaluates chi and B3 within each sample and jackknifes the
    sample values (ratio first, average second). pooled_moments=True instead
    averages the central moments over samples before taking the B3 ratio,
    which weighs samples with larger fluctuations more strongly.
    """
    if not per_sample_series:
        raise ValueError("no series")
    temps = {s.temperature for s in per_sample_series}
    if len(temps) != 1:
        raise ValueError("series mix temperatures")
    out: dict[str, float] = {"temperature": temps.pop()}
    for name, fn in (("order", lambda s: s.mean_order()),
                     ("energy", lambda s: s.mean_energy()),
                     ("chi", lambda s: s.chi())):
        mean, err = jackknife([fn(s) for s in per_sample_series])
        out[name], out[name + "_err"] = mean, err
    if pooled_moments:
        m2s, m3s = [], []
        for s in per_sample_series:
            m2, m3 = _central_moments(s.order_param, (2, 3))
            m2s.append(m2)
            m3s.append(m3)
        n = len(m2s)
        b3_loo = []
        for drop in range(n):
            m2 = np.mean([m for idx, m in enumerate(m2s) if idx != drop])
            m3 = np.mean([m for idx, m in enumerate(m3s) if idx != drop])
            b3_loo.append(m3 / m2**1.5 if m2 > 0 else 0.0)
        m2, m3 = float(np.mean(m2s)), float(np.mean(m3s))
        out["b3"] = m3 / m2**1.5 if m2 > 0 else 0.0
        if n > 1:
            loo = np.asarray(b3_loo)
            out["b3_err"] = float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
        else:
            out["b3_err"] = 0.0
    else:
        mean, err = jackknife([s.b3() for s in per_sample_series])
        out["b3"], out["b3_err"] = mean, err
    return out
