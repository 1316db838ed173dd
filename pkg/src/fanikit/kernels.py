"""Floating-point hot loops for the amoeba side, in numba and numpy flavours.

Dispatch goes through :func:`distance_to_complex`, :func:`eval_laurent` and
:func:`grid_scan3`; the ``_nb_``/``_np_`` variants are public enough for the
benchmark and the agreement tests.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

# --------------------------------------------------------------------------
# distance from points to a polyhedral complex
#
# Cells of dim <= 1 are "pieces" p + t v with 0 <= t <= tmax (tmax = inf for
# rays, 0 for points). Higher cells are given by a base point, an orthonormal
# basis of their direction space (rows, padded with zeros) and inequalities
# G x <= h (padded with zero rows and h = inf). Their contribution is the
# distance to the affine hull when the projection lands inside the cell.


@njit(cache=True)
def _nb_distance(X, seg_p, seg_v, seg_tmax, base, basis, G, h, tol):
    k, d = X.shape
    out = np.empty(k)
    for i in range(k):
        best = np.inf
        for s in range(seg_p.shape[0]):
            vv = 0.0
            t = 0.0
            for j in range(d):
                vv += seg_v[s, j] * seg_v[s, j]
                t += (X[i, j] - seg_p[s, j]) * seg_v[s, j]
            if vv > 0.0:
                t /= vv
            else:
                t = 0.0
            if t < 0.0:
                t = 0.0
            if t > seg_tmax[s]:
                t = seg_tmax[s]
            acc = 0.0
            for j in range(d):
                r = X[i, j] - seg_p[s, j] - t * seg_v[s, j]
                acc += r * r
            if acc < best:
                best = acc
        for f in range(base.shape[0]):
            y = base[f].copy()
            for b in range(basis.shape[1]):
                c = 0.0
                for j in range(d):
                    c += (X[i, j] - base[f, j]) * basis[f, b, j]
                for j in range(d):
                    y[j] += c * basis[f, b, j]
            inside = True
            for r in range(G.shape[1]):
                g = 0.0
                for j in range(d):
                    g += G[f, r, j] * y[j]
                if g > h[f, r] + tol:
                    inside = False
                    break
            if inside:
                acc = 0.0
                for j in range(d):
                    acc += (X[i, j] - y[j]) ** 2
                if acc < best:
                    best = acc
        out[i] = np.sqrt(best)
    return out


def _np_distance(X, seg_p, seg_v, seg_tmax, base, basis, G, h, tol):
    best = np.full(X.shape[0], np.inf)
    if seg_p.shape[0]:
        diff = X[:, None, :] - seg_p[None, :, :]
        vv = np.einsum("sj,sj->s", seg_v, seg_v)
        t = np.einsum("ksj,sj->ks", diff, seg_v) / np.where(vv > 0, vv, 1.0)
        t = np.clip(t, 0.0, seg_tmax[None, :])
        r = diff - t[:, :, None] * seg_v[None, :, :]
        best = np.minimum(best, np.einsum("ksj,ksj->ks", r, r).min(axis=1))
    if base.shape[0]:
        diff = X[:, None, :] - base[None, :, :]
        coef = np.einsum("kfj,fbj->kfb", diff, basis)
        y = base[None, :, :] + np.einsum("kfb,fbj->kfj", coef, basis)
        g = np.einsum("frj,kfj->kfr", G, y)
        inside = np.all(g <= h[None, :, :] + tol, axis=2)
        dd = np.einsum("kfj,kfj->kf", X[:, None, :] - y, X[:, None, :] - y)
        best = np.minimum(best, np.where(inside, dd, np.inf).min(axis=1))
    return np.sqrt(best)


def distance_to_complex(X, seg_p, seg_v, seg_tmax, base, basis, G, h, tol=1e-12):
    fn = _nb_distance if _accel.enabled() else _np_distance
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (X, seg_p, seg_v, seg_tmax, base, basis, G, h)]
    return fn(*args, tol)


# --------------------------------------------------------------------------
# Laurent polynomial evaluation with compensated (Neumaier) summation


@njit(cache=True)
def _nb_eval(coeffs, exps, Z):
    k, d = Z.shape
    out = np.empty(k, dtype=np.complex128)
    for i in range(k):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for t in range(coeffs.shape[0]):
            term = coeffs[t]
            for j in range(d):
                e = exps[t, j]
                if e > 0:
                    for _ in range(e):
                        term *= Z[i, j]
                elif e < 0:
                    for _ in range(-e):
                        term /= Z[i, j]
            x = term.real
            s2 = sr + x
            if abs(sr) >= abs(x):
                cr += (sr - s2) + x
            else:
                cr += (x - s2) + sr
            sr = s2
            x = term.imag
            s2 = si + x
            if abs(si) >= abs(x):
                ci += (si - s2) + x
            else:
                ci += (x - s2) + si
            si = s2
        out[i] = complex(sr + cr, si + ci)
    return out


def _neumaier(cols):
    s = np.zeros(cols.shape[0])
    c = np.zeros(cols.shape[0])
    for x in cols.T:
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + c


def _np_eval(coeffs, exps, Z):
    terms = coeffs[None, :] * np.prod(Z[:, None, :] ** exps[None, :, :], axis=2)
    return _neumaier(terms.real) + 1j * _neumaier(terms.imag)


def eval_laurent(coeffs, exps, Z):
    Z = np.ascontiguousarray(np.atleast_2d(Z), dtype=np.complex128)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    fn = _nb_eval if _accel.enabled() else _np_eval
    return fn(coeffs, exps, Z)


# --------------------------------------------------------------------------
# coarse 3-D scan: is some phase choice nearly a zero at this Log point?


@njit(cache=True)
def _nb_scan3(coeffs, exps, xs, ys, zs, phases, eps):
    T = coeffs.shape[0]
    n = phases.shape[0]
    rot = np.empty((n * n * n, T), dtype=np.complex128)
    k = 0
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for t in range(T):
                    ang = exps[t, 0] * phases[p] + exps[t, 1] * phases[q] + exps[t, 2] * phases[r]
                    rot[k, t] = complex(np.cos(ang), np.sin(ang))
                k += 1
    out = np.zeros((xs.shape[0], ys.shape[0], zs.shape[0]), dtype=np.bool_)
    logmod = np.empty(T)
    w = np.empty(T, dtype=np.complex128)
    for a in range(xs.shape[0]):
        for b in range(ys.shape[0]):
            for c in range(zs.shape[0]):
                for t in range(T):
                    logmod[t] = exps[t, 0] * xs[a] + exps[t, 1] * ys[b] + exps[t, 2] * zs[c]
                top = logmod.max()
                total = 0.0
                for t in range(T):
                    w[t] = coeffs[t] * np.exp(logmod[t] - top)
                    total += abs(w[t])
                for j in range(rot.shape[0]):
                    acc = 0j
                    for t in range(T):
                        acc += w[t] * rot[j, t]
                    if abs(acc) < eps * total:
                        out[a, b, c] = True
                        break
    return out


def _np_scan3(coeffs, exps, xs, ys, zs, phases, eps):
    L = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)  # (a, b, c, 3)
    logmod = L @ exps.T.astype(float)  # (a, b, c, T)
    logmod = logmod - logmod.max(axis=-1, keepdims=True)
    mods = np.abs(coeffs) * np.exp(logmod)
    total = mods.sum(axis=-1)
    P = np.stack(np.meshgrid(phases, phases, phases, indexing="ij"), axis=-1).reshape(-1, 3)
    rot = np.exp(1j * (P @ exps.T.astype(float)))  # (phases^3, T)
    unit = coeffs / np.where(np.abs(coeffs) > 0, np.abs(coeffs), 1.0)
    out = np.zeros(total.shape, dtype=bool)
    flat_m = mods.reshape(-1, mods.shape[-1])
    flat_t = total.reshape(-1)
    res = out.reshape(-1)
    for start in range(0, flat_m.shape[0], 256):
        blk = flat_m[start:start + 256] * unit  # (B, T)
        vals = np.abs(blk @ rot.T)  # (B, phases^3)
        res[start:start + 256] = (vals < eps * flat_t[start:start + 256, None]).any(axis=1)
    return out


def grid_scan3(coeffs, exps, xs, ys, zs, phases, eps=1e-3):
    fn = _nb_scan3 if _accel.enabled() else _np_scan3
    return fn(np.ascontiguousarray(coeffs, dtype=np.complex128),
              np.ascontiguousarray(exps, dtype=np.int64),
              *(np.ascontiguousarray(a, dtype=np.float64) for a in (xs, ys, zs, phases)), float(eps))
