"""FLTZ skeleta as lattice data.

The Lagrangian L(Sigma) is the union of sigma-perp x sigma. Each piece is
recorded by the saturated tangent lattice of the subtorus sigma-perp inside
the dual lattice, plus the number of its components in the stacky case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fan import Cone, Fan, StackyFan, quotient_fan
from .fanifold import FanifoldData, FanifoldError
from .lattice import IntMatrix, Sublattice, cokernel, integer_kernel


@dataclass(frozen=True)
class FltzStratum:
    annihilator: Sublattice  # inside the dual lattice
    cone: Cone
    component_order: int = 1
    index: int = -1  # cone index in the fan

    @property
    def torus_dim(self) -> int:
        return self.annihilator.rank


def annihilator(sigma: Cone) -> Sublattice:
    """{x in M^vee : <x, v> = 0 for all v in sigma}, saturated."""
    A = IntMatrix.from_rows([list(r) for r in sigma.rays], sigma.ambient)
    return integer_kernel(A)


def component_order(SF: StackyFan, i: int) -> int:
    """|torsion of M / beta(<sigma~>)| for cone i of the upstairs fan."""
    up = SF.fan_tilde.cone(i).span()
    img = SF.beta @ up.basis if up.rank else IntMatrix.zeros(SF.beta.nrows, 0)
    if img.ncols == 0:
        return 1
    return cokernel(img).torsion_order


def fltz_skeleton(sigma: Fan | StackyFan) -> list[FltzStratum]:
    """One stratum per cone of the (downstairs) fan, in cone order."""
    if isinstance(sigma, StackyFan):
        F = sigma.fan
        orders = {sigma.cone_map[i]: component_order(sigma, i) for i in range(len(sigma.fan_tilde.cones))}
    else:
        F = sigma
        orders = {}
    out = []
    for i in range(len(F.cones)):
        c = F.cone(i)
        out.append(FltzStratum(annihilator(c), c, orders.get(i, 1), i))
    return out


@dataclass
class FactorizationReport:
    sigma: int
    checked: list[int] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def local_factorization(F: Fan, sigma: Cone | int) -> FactorizationReport:
    """Check ann(tau) = P^T ann(tau/sigma) for every tau >= sigma, where P is
    the projection M -> M/<sigma>, so P^T is the inclusion of dual lattices."""
    s = sigma if isinstance(sigma, int) else F.find(sigma)
    q = quotient_fan(F, s)
    PT = q.projection.T
    rep = FactorizationReport(s)
    for t in F.containing(s):
        rep.checked.append(t)
        mine = annihilator(F.cone(t))
        down = annihilator(q.fan.cone(q.cone_map[t]))
        pushed = [PT @ g for g in down.generators()]
        pushed_lat = Sublattice.span(F.rank, pushed)
        if not (pushed_lat == mine):
            rep.mismatches.append(f"tau = {sorted(F.cones[t])}: annihilator {mine.generators()} "
                                  f"!= pushed {pushed}")
    return rep


@dataclass(frozen=True)
class ChartDescriptor:
    stratum: str
    codim: int
    strata: tuple[FltzStratum, ...]


def chart_data(phi: FanifoldData, sid: str) -> ChartDescriptor:
    if sid not in phi.fans:
        raise FanifoldError(f"unknown stratum {sid!r}")
    F = phi.fans[sid]
    return ChartDescriptor(sid, F.rank, tuple(fltz_skeleton(F)))
