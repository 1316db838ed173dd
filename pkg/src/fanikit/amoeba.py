"""Numerical amoebas of W_t(z) = sum c_a t^(-mu(a)) z^a and their distance
to the tropical complex after rescaling by log t."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from ._accel import thread_cap
from .lattice import as_fraction, nullspace, rref
from .tropical import TropicalComplex

RESIDUAL_TOL = 1e-8


class AmoebaError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentFamily:
    terms: tuple[tuple[complex, tuple[int, ...], Fraction], ...]
    t: float

    def __post_init__(self):
        terms = tuple((complex(c), tuple(int(a) for a in alpha), as_fraction(mu))
                      for c, alpha, mu in self.terms)
        if len(terms) < 2:
            raise AmoebaError("a Laurent family needs at least two terms")
        if len({len(a) for _, a, _ in terms}) != 1:
            raise AmoebaError("exponent vectors have different lengths")
        if not self.t > 1:
            raise AmoebaError("t must exceed 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pl(cls, vertices, mu, t: float, coeffs=None) -> "LaurentFamily":
        coeffs = coeffs or [1] * len(vertices)
        return cls(tuple(zip(coeffs, vertices, mu)), t)

    @property
    def rank(self) -> int:
        return len(self.terms[0][1])

    def at(self, t: float) -> "LaurentFamily":
        return LaurentFamily(self.terms, t)

    def coefficients(self) -> np.ndarray:
        return np.array([c * float(self.t) ** -float(mu) for c, _, mu in self.terms])

    def exponents(self) -> np.ndarray:
        return np.array([a for _, a, _ in self.terms], dtype=np.int64)


def eval_W(fam: LaurentFamily, z) -> complex | np.ndarray:
    """W_t at one point (returns complex) or at rows of a (k, rank) array."""
    Z = np.asarray(z, dtype=np.complex128)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[1] != fam.rank:
        raise AmoebaError("point has the wrong dimension")
    if np.any(Z == 0):
        raise AmoebaError("W_t is only defined on the torus (zero coordinate)")
    out = kernels.eval_laurent(fam.coefficients(), fam.exponents(), Z)
    return complex(out[0]) if single else out


# --------------------------------------------------------------------------
# sampling curves


@dataclass
class SampleCloud:
    z: np.ndarray  # (k, rank) complex; empty for coarse scans
    logs: np.ndarray  # (k, rank)
    log_t: float
    skipped: list = field(default_factory=list)  # (slice index, reason)
    rejected: int = 0
    coarse: bool = False

    @property
    def rescaled(self) -> np.ndarray:
        return self.logs / self.log_t

    def __len__(self):
        return len(self.logs)


def _slice_poly(fam: LaurentFamily, z1: complex):
    """Coefficients (highest degree first) of z2^(-lo) W(z1, z2) and lo."""
    coeffs = fam.coefficients()
    by_e: dict[int, complex] = {}
    for c, (_, (a1, a2), _) in zip(coeffs, fam.terms):
        by_e[a2] = by_e.get(a2, 0j) + c * z1 ** a1
    lo, hi = min(by_e), max(by_e)
    poly = [by_e.get(e, 0j) for e in range(hi, lo - 1, -1)]
    return np.array(poly), lo


def _solve_slice(fam: LaurentFamily, z1: complex, newton_steps: int, tol: float):
    poly, lo = _slice_poly(fam, z1)
    if not np.any(poly != 0):
        return None, "slice polynomial is identically zero", 0
    roots = np.roots(poly)
    dpoly = np.polyder(poly) if len(poly) > 1 else np.zeros(1)
    kept, rejected = [], 0
    for r in roots:
        for _ in range(newton_steps):
            d = np.polyval(dpoly, r)
            if d == 0:
                break
            r = r - np.polyval(poly, r) / d
        if r == 0 or not np.isfinite(r):
            rejected += 1
            continue
        kept.append(r)
    if not kept:
        return [], "no nonzero roots", rejected
    Z = np.array([[z1, r] for r in kept], dtype=np.complex128)
    res = np.abs(eval_W(fam, Z))
    good = Z[res < tol]
    rejected += int(np.sum(res >= tol))
    return good, None if len(good) else "no root met the residual bound", rejected


def sample_curve(fam: LaurentFamily, radii: int = 64, phases: int = 64, span: float = 2.0,
                 newton_steps: int = 2, tol: float = RESIDUAL_TOL,
                 threads: int | None = None) -> SampleCloud:
    """Solve W_t(z1, .) = 0 over a log-radial x phase grid of z1 values.

    Radii are log-spaced over [t^-span, t^span]. Slices run through a
    thread pool (FANIKIT_THREADS caps it) and are merged in grid order.
    """
    if fam.rank != 2:
        raise AmoebaError("curve sampling needs rank 2")
    lt = math.log(fam.t)
    rs = np.exp(np.linspace(-span * lt, span * lt, radii))
    th = 2 * np.pi * np.arange(phases) / phases
    z1s = [r * np.exp(1j * a) for r in rs for a in th]
    threads = threads or thread_cap()

    def work(z1):
        return _solve_slice(fam, complex(z1), newton_steps, tol)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, z1s))
    else:
        results = [work(z) for z in z1s]
    pts, skipped, rejected = [], [], 0
    for i, (good, reason, rej) in enumerate(results):
        rejected += rej
        if reason:
            skipped.append((i, reason))
        if good is not None and len(good):
            pts.append(good)
    Z = np.concatenate(pts) if pts else np.zeros((0, 2), dtype=np.complex128)
    return SampleCloud(Z, np.log(np.abs(Z)), lt, skipped, rejected)


def scan_surface(fam: LaurentFamily, n: int = 24, phases: int = 8, span: float = 2.0,
                 eps: float = 1e-3) -> SampleCloud:
    """Coarse Log-grid scan for rank 3: keep grid points where some phase
    choice makes |W| < eps times the sum of the term moduli."""
    if fam.rank != 3:
        raise AmoebaError("surface scan needs rank 3")
    lt = math.log(fam.t)
    axis = np.linspace(-span * lt, span * lt, n)
    ph = 2 * np.pi * np.arange(phases) / phases
    hit = kernels.grid_scan3(fam.coefficients(), fam.exponents(), axis, axis, axis, ph, eps)
    idx = np.argwhere(hit)
    logs = axis[idx]
    return SampleCloud(np.zeros((0, 3), dtype=np.complex128), logs, lt, coarse=True)


# --------------------------------------------------------------------------
# distances


def _orthonormal(vectors, d) -> np.ndarray:
    if not vectors:
        return np.zeros((0, d))
    basis = np.array([[float(a) for a in r] for r in rref(vectors)[0]])
    q, _ = np.linalg.qr(basis.T)
    return q.T


def complex_arrays(PC: TropicalComplex):
    """Float description of the cells for the distance kernel."""
    d = PC.dim
    seg_p, seg_v, seg_t = [], [], []
    base, bases, Gs, hs = [], [], [], []
    for c in PC.cells:
        if c.dim == 0:
            seg_p.append([float(a) for a in c.vertices[0]])
            seg_v.append([0.0] * d)
            seg_t.append(0.0)
        elif c.dim == 1:
            if c.rays:
                p0 = c.vertices[0] if c.vertices else _any_point(c, d)
                for r in c.rays:
                    seg_p.append([float(a) for a in p0])
                    seg_v.append([float(a) for a in r])
                    seg_t.append(np.inf)
            else:
                a, b = c.vertices
                seg_p.append([float(x) for x in a])
                seg_v.append([float(y - x) for x, y in zip(a, b)])
                seg_t.append(1.0)
        else:
            eq = [list(u) for u, _ in c.equations]
            dirs = nullspace(eq, d) if eq else [tuple(int(i == j) for j in range(d)) for i in range(d)]
            p0 = c.vertices[0] if c.vertices else _any_point(c, d)
            base.append([float(a) for a in p0])
            bases.append(_orthonormal(dirs, d))
            Gs.append([[float(a) for a in u] for u, _ in c.inequalities])
            hs.append([float(k) for _, k in c.inequalities])
    kmax = max((b.shape[0] for b in bases), default=0)
    mmax = max((len(g) for g in Gs), default=0)
    F = len(base)
    B = np.zeros((F, kmax, d))
    G = np.zeros((F, mmax, d))
    H = np.full((F, mmax), np.inf)
    for f in range(F):
        B[f, :bases[f].shape[0]] = bases[f]
        if Gs[f]:
            G[f, :len(Gs[f])] = Gs[f]
            H[f, :len(hs[f])] = hs[f]
    return (np.array(seg_p, dtype=float).reshape(-1, d), np.array(seg_v, dtype=float).reshape(-1, d),
            np.array(seg_t, dtype=float), np.array(base, dtype=float).reshape(-1, d), B, G, H)


def _any_point(c, d):
    from .tropical import _relint_point

    return _relint_point(c.equations, c.inequalities, d)


@dataclass
class DistanceReport:
    sup: float
    mean: float
    distances: np.ndarray
    worst: np.ndarray


def distances_to(points: np.ndarray, PC: TropicalComplex) -> np.ndarray:
    X = np.asarray(points, dtype=float).reshape(-1, PC.dim)
    return kernels.distance_to_complex(X, *complex_arrays(PC))


def rescaled_distance(cloud: SampleCloud, PC: TropicalComplex) -> DistanceReport:
    """sup and mean of dist(Log z / log t, Pi) over the cloud."""
    if len(cloud) == 0:
        raise AmoebaError("empty sample cloud")
    X = cloud.rescaled
    dist = distances_to(X, PC)
    k = int(np.argmax(dist))
    return DistanceReport(float(dist[k]), float(dist.mean()), dist, X[k])


@dataclass
class ConvergenceRow:
    t: float
    samples: int
    sup: float
    mean: float
    max_residual: float
    skipped: int


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    sup_decreasing: bool
    mean_trend_ok: bool

    @property
    def ok(self) -> bool:
        return self.sup_decreasing and self.mean_trend_ok


def convergence_report(fam: LaurentFamily, PC: TropicalComplex, ts: Sequence[float],
                       allowance: float = 0.10, **sample_kw) -> ConvergenceReport:
    if fam.rank != PC.dim:
        raise AmoebaError(f"family has rank {fam.rank}, complex lives in rank {PC.dim}")
    ts = list(ts)
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise AmoebaError("t values must increase")
    rows = []
    for t in ts:
        f = fam.at(t)
        cloud = sample_curve(f, **sample_kw)
        rep = rescaled_distance(cloud, PC)
        res = float(np.abs(eval_W(f, cloud.z)).max()) if len(cloud) else float("nan")
        rows.append(ConvergenceRow(t, len(cloud), rep.sup, rep.mean, res, len(cloud.skipped)))
    sup_dec = all(b.sup < a.sup for a, b in zip(rows, rows[1:]))
    mean_ok = all(b.mean <= a.mean * (1 + allowance) for a, b in zip(rows, rows[1:]))
    return ConvergenceReport(rows, sup_dec, mean_ok)
