"""Inner Metropolis and energy kernels.

Compiled with numba when available, otherwise the same code runs as plain
Python (orders of magnitude slower, still correct, enough for tiny tests).
All kernels walk spins in the canonical flat order (sublattice, direction,
k, j, i) and consume one uniform per visited spin so runs replay exactly.

Geometry (3D). Site (i, j, k) on an L^3 torus, array axes (k, j, i). Per
anchor site the sigma sector has a (y,t) plaquette [coupling jx_x], a (t,x)
plaquette [jy_x] and a space-like (x,y) plaquette [jq_s]; the tau sector
mirrors these [jx_z, jy_z, jq_t]; the x coupler [jx_y] multiplies the sigma
(y,t) plaquette at (i,j,k) with the tau (t,x) plaquette at (i+1,j,k), the y
coupler [jy_y] the sigma (t,x) plaquette with the tau (y,t) plaquette at
(i,j+1,k).

Geometry (2D). Site spins in the x-direction slot. Per anchor the sigma
bonds are (i,j)-(i+1,j) [jx_x] and (i,j)-(i,j+1) [jy_x]; the crossing tau
bonds are (i,j-1)-(i,j) [jx_z] and (i-1,j)-(i,j) [jy_z]; couplers [jx_y,
jy_y] multiply each sigma bond with its crossing tau bond.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True, inline="always")
def _plq_yt(a, b, i, j, k, L):
    """(y,t) plaquette a_y(i,j,k) b_t(i,j+1,k) a_y(i,j,k+1) b_t(i,j,k)."""
    j1 = j + 1 if j + 1 < L else 0
    k1 = k + 1 if k + 1 < L else 0
    return a[k, j, i] * b[k, j1, i] * a[k1, j, i] * b[k, j, i]


@njit(cache=True, inline="always")
def _plq_tx(a, b, i, j, k, L):
    """(t,x) plaquette a_t(i,j,k) b_x(i,j,k+1) a_t(i+1,j,k) b_x(i,j,k)."""
    i1 = i + 1 if i + 1 < L else 0
    k1 = k + 1 if k + 1 < L else 0
    return a[k, j, i] * b[k1, j, i] * a[k, j, i1] * b[k, j, i]


@njit(cache=True, inline="always")
def _plq_xy(a, b, i, j, k, L):
    """(x,y) plaquette a_x(i,j,k) b_y(i+1,j,k) a_x(i,j+1,k) b_y(i,j,k)."""
    i1 = i + 1 if i + 1 < L else 0
    j1 = j + 1 if j + 1 < L else 0
    return a[k, j, i] * b[k, j, i1] * a[k, j1, i] * b[k, j, i]


@njit(cache=True, inline="always")
def _coupler_x(sy, st, tx, tt, i, j, k, L):
    i1 = i + 1 if i + 1 < L else 0
    return _plq_yt(sy, st, i, j, k, L) * _plq_tx(tt, tx, i1, j, k, L)


@njit(cache=True, inline="always")
def _coupler_y(sx, st, ty, tt, i, j, k, L):
    j1 = j + 1 if j + 1 < L else 0
    return _plq_tx(st, sx, i, j, k, L) * _plq_yt(ty, tt, i, j1, k, L)


@njit(cache=True)
def site_energy_3d(spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy, has_y, out):
    """Fill out[k, j, i] with the energy of all terms anchored at each site."""
    L = spins.shape[2]
    has_tau = spins.shape[0] == 2
    sx, sy, st = spins[0, 0], spins[0, 1], spins[0, 2]
    for k in range(L):
        for j in range(L):
            for i in range(L):
                e = jxx[k, j, i] * _plq_yt(sy, st, i, j, k, L)
                e += jyx[k, j, i] * _plq_tx(st, sx, i, j, k, L)
                e += jqs[k, j, i] * _plq_xy(sx, sy, i, j, k, L)
                if has_tau:
                    tx, ty, tt = spins[1, 0], spins[1, 1], spins[1, 2]
                    e += jxz[k, j, i] * _plq_yt(ty, tt, i, j, k, L)
                    e += jyz[k, j, i] * _plq_tx(tt, tx, i, j, k, L)
                    e += jqt[k, j, i] * _plq_xy(tx, ty, i, j, k, L)
                    if has_y:
                        e += jxy[k, j, i] * _coupler_x(sy, st, tx, tt, i, j, k, L)
                        e += jyy[k, j, i] * _coupler_y(sx, st, ty, tt, i, j, k, L)
                out[k, j, i] = -e


@njit(cache=True, inline="always")
def _local_field_3d(spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy, has_y,
                    s, d, i, j, k):
    """Sum of J * P over every term containing spin (s, d, i, j, k)."""
    L = spins.shape[2]
    im = i - 1 if i > 0 else L - 1
    jm = j - 1 if j > 0 else L - 1
    km = k - 1 if k > 0 else L - 1
    sx, sy, st = spins[0, 0], spins[0, 1], spins[0, 2]
    h = 0.0
    if s == 0:
        if d == 0:
            h += jyx[k, j, i] * _plq_tx(st, sx, i, j, k, L)
            h += jyx[km, j, i] * _plq_tx(st, sx, i, j, km, L)
            h += jqs[k, j, i] * _plq_xy(sx, sy, i, j, k, L)
            h += jqs[k, jm, i] * _plq_xy(sx, sy, i, jm, k, L)
            if has_y:
                tx, ty, tt = spins[1, 0], spins[1, 1], spins[1, 2]
                h += jyy[k, j, i] * _coupler_y(sx, st, ty, tt, i, j, k, L)
                h += jyy[km, j, i] * _coupler_y(sx, st, ty, tt, i, j, km, L)
        elif d == 1:
            h += jxx[k, j, i] * _plq_yt(sy, st, i, j, k, L)
            h += jxx[km, j, i] * _plq_yt(sy, st, i, j, km, L)
            h += jqs[k, j, i] * _plq_xy(sx, sy, i, j, k, L)
            h += jqs[k, j, im] * _plq_xy(sx, sy, im, j, k, L)
            if has_y:
                tx, ty, tt = spins[1, 0], spins[1, 1], spins[1, 2]
                h += jxy[k, j, i] * _coupler_x(sy, st, tx, tt, i, j, k, L)
                h += jxy[km, j, i] * _coupler_x(sy, st, tx, tt, i, j, km, L)
        else:
            h += jxx[k, j, i] * _plq_yt(sy, st, i, j, k, L)
            h += jxx[k, jm, i] * _plq_yt(sy, st, i, jm, k, L)
            h += jyx[k, j, i] * _plq_tx(st, sx, i, j, k, L)
            h += jyx[k, j, im] * _plq_tx(st, sx, im, j, k, L)
            if has_y:
                tx, ty, tt = spins[1, 0], spins[1, 1], spins[1, 2]
                h += jxy[k, j, i] * _coupler_x(sy, st, tx, tt, i, j, k, L)
                h += jxy[k, jm, i] * _coupler_x(sy, st, tx, tt, i, jm, k, L)
                h += jyy[k, j, i] * _coupler_y(sx, st, ty, tt, i, j, k, L)
                h += jyy[k, j, im] * _coupler_y(sx, st, ty, tt, im, j, k, L)
    else:
        tx, ty, tt = spins[1, 0], spins[1, 1], spins[1, 2]
        im2 = im - 1 if im > 0 else L - 1
        jm2 = jm - 1 if jm > 0 else L - 1
        if d == 0:
            h += jyz[k, j, i] * _plq_tx(tt, tx, i, j, k, L)
            h += jyz[km, j, i] * _plq_tx(tt, tx, i, j, km, L)
            h += jqt[k, j, i] * _plq_xy(tx, ty, i, j, k, L)
            h += jqt[k, jm, i] * _plq_xy(tx, ty, i, jm, k, L)
            if has_y:
                h += jxy[k, j, im] * _coupler_x(sy, st, tx, tt, im, j, k, L)
                h += jxy[km, j, im] * _coupler_x(sy, st, tx, tt, im, j, km, L)
        elif d == 1:
            h += jxz[k, j, i] * _plq_yt(ty, tt, i, j, k, L)
            h += jxz[km, j, i] * _plq_yt(ty, tt, i, j, km, L)
            h += jqt[k, j, i] * _plq_xy(tx, ty, i, j, k, L)
            h += jqt[k, j, im] * _plq_xy(tx, ty, im, j, k, L)
            if has_y:
                h += jyy[k, jm, i] * _coupler_y(sx, st, ty, tt, i, jm, k, L)
                h += jyy[km, jm, i] * _coupler_y(sx, st, ty, tt, i, jm, km, L)
        else:
            h += jxz[k, j, i] * _plq_yt(ty, tt, i, j, k, L)
            h += jxz[k, jm, i] * _plq_yt(ty, tt, i, jm, k, L)
            h += jyz[k, j, i] * _plq_tx(tt, tx, i, j, k, L)
            h += jyz[k, j, im] * _plq_tx(tt, tx, im, j, k, L)
            if has_y:
                h += jxy[k, j, im] * _coupler_x(sy, st, tx, tt, im, j, k, L)
                h += jxy[k, j, im2] * _coupler_x(sy, st, tx, tt, im2, j, k, L)
                h += jyy[k, jm, i] * _coupler_y(sx, st, ty, tt, i, jm, k, L)
                h += jyy[k, jm2, i] * _coupler_y(sx, st, ty, tt, i, jm2, k, L)
    return h


@njit(cache=True)
def delta_energy_3d(spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy, has_y,
                    s, d, i, j, k):
    h = _local_field_3d(spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy, has_y,
                        s, d, i, j, k)
    return 2.0 * h


@njit(cache=True)
def sweep_3d(spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy, has_y, beta, u):
    """One Metropolis sweep in canonical scan order. Returns accept count."""
    L = spins.shape[2]
    n_sub = spins.shape[0]
    accepted = 0
    idx = 0
    for s in range(n_sub):
        for d in range(3):
            for k in range(L):
                for j in range(L):
                    for i in range(L):
                        de = 2.0 * _local_field_3d(
                            spins, jxx, jyx, jqs, jxz, jyz, jqt, jxy, jyy,
                            has_y, s, d, i, j, k)
                        if de <= 0.0 or u[idx] < np.exp(-beta * de):
                            spins[s, d, k, j, i] = -spins[s, d, k, j, i]
                            accepted += 1
                        idx += 1
    return accepted


@njit(cache=True)
def site_energy_2d(spins, jxx, jyx, jxz, jyz, jxy, jyy, has_y, out):
    L = spins.shape[2]
    has_tau = spins.shape[0] == 2
    sg = spins[0, 0]
    for j in range(L):
        for i in range(L):
            i1 = i + 1 if i + 1 < L else 0
            j1 = j + 1 if j + 1 < L else 0
            jm = j - 1 if j > 0 else L - 1
            im = i - 1 if i > 0 else L - 1
            bx = sg[j, i] * sg[j, i1]
            by = sg[j, i] * sg[j1, i]
            e = jxx[j, i] * bx + jyx[j, i] * by
            if has_tau:
                tg = spins[1, 0]
                cbx = tg[jm, i] * tg[j, i]
                cby = tg[j, im] * tg[j, i]
                e += jxz[j, i] * cbx + jyz[j, i] * cby
                if has_y:
                    e += jxy[j, i] * bx * cbx + jyy[j, i] * by * cby
            out[j, i] = -e


@njit(cache=True, inline="always")
def _local_field_2d(spins, jxx, jyx, jxz, jyz, jxy, jyy, has_y, s, i, j):
    L = spins.shape[2]
    i1 = i + 1 if i + 1 < L else 0
    j1 = j + 1 if j + 1 < L else 0
    im = i - 1 if i > 0 else L - 1
    jm = j - 1 if j > 0 else L - 1
    sg = spins[0, 0]
    h = 0.0
    if s == 0:
        h += jxx[j, i] * sg[j, i] * sg[j, i1]
        h += jxx[j, im] * sg[j, im] * sg[j, i]
        h += jyx[j, i] * sg[j, i] * sg[j1, i]
        h += jyx[jm, i] * sg[jm, i] * sg[j, i]
        if has_y:
            tg = spins[1, 0]
            h += jxy[j, i] * sg[j, i] * sg[j, i1] * tg[jm, i] * tg[j, i]
            h += jxy[j, im] * sg[j, im] * sg[j, i] * tg[jm, im] * tg[j, im]
            h += jyy[j, i] * sg[j, i] * sg[j1, i] * tg[j, im] * tg[j, i]
            h += jyy[jm, i] * sg[jm, i] * sg[j, i] * tg[jm, im] * tg[jm, i]
    else:
        tg = spins[1, 0]
        h += jxz[j, i] * tg[jm, i] * tg[j, i]
        h += jxz[j1, i] * tg[j, i] * tg[j1, i]
        h += jyz[j, i] * tg[j, im] * tg[j, i]
        h += jyz[j, i1] * tg[j, i] * tg[j, i1]
        if has_y:
            h += jxy[j, i] * sg[j, i] * sg[j, i1] * tg[jm, i] * tg[j, i]
            h += jxy[j1, i] * sg[j1, i] * sg[j1, i1] * tg[j, i] * tg[j1, i]
            h += jyy[j, i] * sg[j, i] * sg[j1, i] * tg[j, im] * tg[j, i]
            h += jyy[j, i1] * sg[j, i1] * sg[j1, i1] * tg[j, i] * tg[j, i1]
    return h


@njit(cache=True)
def delta_energy_2d(spins, jxx, jyx, jxz, jyz, jxy, jyy, has_y, s, i, j):
    return 2.0 * _local_field_2d(spins, jxx, jyx, jxz, jyz, jxy, jyy, has_y,
                                 s, i, j)


@njit(cache=True)
def sweep_2d(spins, jxx, jyx, jxz, jyz, jxy, jyy, has_y, beta, u):
    """Metropolis sweep over the site spins of each sublattice."""
    L = spins.shape[2]
    n_sub = spins.shape[0]
    accepted = 0
    idx = 0
    for s in range(n_sub):
        for j in range(L):
            for i in range(L):
                de = 2.0 * _local_field_2d(spins, jxx, jyx, jxz, jyz, jxy,
                                           jyy, has_y, s, i, j)
                if de <= 0.0 or u[idx] < np.exp(-beta * de):
                    spins[s, 0, j, i] = -spins[s, 0, j, i]
                    accepted += 1
                idx += 1
    return accepted
