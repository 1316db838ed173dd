"""Local models of the torus fibrations: the staged retraction of M_R onto
|Sigma|, fiber descriptors, and a finite-difference Poisson bracket check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fan import Fan, is_complete
from .fanifold import FanifoldData, FanifoldError
from .lattice import as_fraction, det, rref, solve

QVector = tuple[Fraction, ...]


@dataclass(frozen=True)
class RetractionContext:
    fan: Fan
    gram: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        n = self.fan.rank
        G = self.gram
        if G is None:
            G = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        G = tuple(tuple(as_fraction(a) for a in row) for row in G)
        if len(G) != n or any(len(r) != n for r in G):
            raise ValueError("inner product matrix has the wrong shape")
        if any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
            raise ValueError("inner product matrix is not symmetric")
        if any(det([row[:k] for row in G[:k]]) <= 0 for k in range(1, n + 1)):
            raise ValueError("inner product matrix is not positive definite")
        object.__setattr__(self, "gram", G)

    def ip(self, u, v) -> Fraction:
        G = self.gram
        return sum((u[i] * G[i][j] * v[j] for i in range(len(u)) for j in range(len(v))
                    if u[i] and v[j]), Fraction(0))

    def project(self, m: Sequence, gens: Sequence[Sequence[int]]) -> QVector:
        """Orthogonal projection of m onto span(gens) for this inner product."""
        n = len(m)
        if not gens:
            return tuple([Fraction(0)] * n)
        basis = [tuple(r) for r in rref(gens)[0]]
        k = len(basis)
        A = [[self.ip(basis[i], basis[j]) for j in range(k)] for i in range(k)]
        b = [self.ip(basis[i], m) for i in range(k)]
        c = solve(A, b)
        return tuple(sum((c[i] * basis[i][j] for i in range(k)), Fraction(0)) for j in range(n))


def _as_point(ctx: RetractionContext, m) -> QVector:
    m = tuple(as_fraction(a) for a in m)
    if len(m) != ctx.fan.rank:
        raise ValueError(f"point has dimension {len(m)}, fan has rank {ctx.fan.rank}")
    return m


def _star_rays(F: Fan, i: int) -> list:
    rays = set()
    for j in F.containing(i):
        rays.update(F.cones[j])
    return [F.rays[k] for k in sorted(rays)]


def retract(ctx: RetractionContext, m) -> QVector:
    """Staged retraction of M_R onto |Sigma|.

    A point outside the support is captured by the cone tau such that its
    projection p onto span(tau) lies in relint(tau) and m - p points out of
    the star of tau. The lowest-dimensional capturing cone wins (then the
    lowest index); points nobody captures go to the origin.
    """
    m = _as_point(ctx, m)
    F = ctx.fan
    if is_complete(F) or F.contains_point(m):
        return m
    for i in sorted(range(len(F.cones)), key=lambda i: (F.dims[i], i)):
        tau = F.cone(i)
        p = ctx.project(m, tau.rays)
        if tau.rays and not tau.in_relint(p):
            continue
        v = tuple(a - b for a, b in zip(m, p))
        if all(ctx.ip(v, g) <= 0 for g in _star_rays(F, i)):
            return p
    return tuple([Fraction(0)] * F.rank)


def nearest_point(ctx: RetractionContext, m) -> QVector:
    """Exact nearest point of |Sigma| (min over per-cone projections)."""
    m = _as_point(ctx, m)
    F = ctx.fan
    best, best_d = None, None
    for i in range(len(F.cones)):
        tau = F.cone(i)
        p = ctx.project(m, tau.rays)
        if tau.rays and not tau.contains(p):
            continue
        v = tuple(a - b for a, b in zip(m, p))
        d = ctx.ip(v, v)
        if best_d is None or d < best_d:
            best, best_d = p, d
    return best


@dataclass
class OracleReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def retract_oracle_check(ctx: RetractionContext, samples) -> OracleReport:
    rep = OracleReport()
    for m in samples:
        a, b = retract(ctx, m), nearest_point(ctx, m)
        rep.checked += 1
        if a != b:
            rep.mismatches.append((tuple(m), a, b))
    return rep


# --------------------------------------------------------------------------
# fibers


MODES = ("pi", "pi_bar", "pi_underline")


@dataclass(frozen=True)
class FiberDescriptor:
    stratum: str
    torus_rank: int
    base: str
    mode: str
    dual_cell: str | None = None

    def describe(self) -> str:
        return f"T^{self.torus_rank} x {self.base}"


def fiber_over(phi: FanifoldData, sid: str, mode: str = "pi", dual=None) -> FiberDescriptor:
    """Fiber of pi / pi_bar (T^d x S) or pi_underline (T^d x T*S over S-perp)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if sid not in phi.fans:
        raise FanifoldError(f"unknown stratum {sid!r}")
    d = phi.fans[sid].rank
    if mode != "pi_underline":
        return FiberDescriptor(sid, d, sid, mode)
    if dual is None:
        raise FanifoldError("pi_underline needs the dual stratified space")
    cell = dual.cell_of(sid)
    base = "point" if phi.stratum(sid).dim == 0 else f"T*{sid}"
    return FiberDescriptor(sid, d, base, mode, cell.label)


# --------------------------------------------------------------------------
# Poisson brackets


@dataclass
class PoissonResult:
    max_bracket: float
    brackets: np.ndarray  # (samples, k, k)


def _component(n: int, spec) -> Callable[[np.ndarray], float]:
    if callable(spec):
        return spec
    kind, idx = spec[0], int(spec[1:]) - 1
    if kind not in "qp" or not 0 <= idx < n:
        raise ValueError(f"bad component {spec!r}")
    off = 0 if kind == "q" else n
    return lambda x: x[off + idx]


def poisson_check(n: int, components: Sequence, samples, h: float = 1e-4) -> PoissonResult:
    """Central-difference Poisson brackets {f_a, f_b} of the given functions of
    (q_1..q_n, p_1..p_n); components are "q<i>"/"p<i>" names or callables."""
    fs = [_component(n, c) for c in components]
    X = np.asarray(samples, dtype=float).reshape(-1, 2 * n)
    k = len(fs)
    out = np.zeros((len(X), k, k))
    eye = np.eye(2 * n) * h
    for s, x in enumerate(X):
        grads = np.array([[(f(x + e) - f(x - e)) / (2 * h) for e in eye] for f in fs])
        dq, dp = grads[:, :n], grads[:, n:]
        out[s] = dq @ dp.T - dp @ dq.T
    off = out[:, ~np.eye(k, dtype=bool)] if k > 1 else np.zeros(1)
    return PoissonResult(float(np.max(np.abs(off))) if off.size else 0.0, out)
