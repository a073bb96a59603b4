"""Pursuit chains: feasibility propagation, speed schedules, length bounds.

In a chain, robot k+1 keeps robot k inside its own visibility window.  The
pair conditions propagate along the chain: each link forces a minimum speed
ratio on its follower and sandwiches every interior robot's turn-rate bound
between the demands of its two neighbouring links.  The propagation also
yields a hard upper bound on how many robots any parameter progression can
sustain, and rules out closed (cyclic) chains outright.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

from .scenarios import (
    BasicScenario,
    ConditionMargin,
    FeasibilityReport,
    _report,
)


class LinkGeometry(NamedTuple):
    a: float
    b: float
    d: float


class RobotLimits(NamedTuple):
    V: float
    Omega: float


@dataclass(frozen=True)
class ChainSpec:
    """Chain of n robots: link k (window of robot k+1) uses links[k-1]."""

    n: int
    links: tuple[LinkGeometry, ...]
    robots: tuple[RobotLimits, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a chain needs at least two robots")
        if len(self.links) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} links, got {len(self.links)}")
        if len(self.robots) != self.n:
            raise ValueError(f"expected {self.n} robots, got {len(self.robots)}")
        for g in self.links:
            if not (g.a > 0 and g.d > g.a and 0 < g.b <= math.pi / 2 + 1e-12):
                raise ValueError(f"bad link geometry {g}")
        for r in self.robots:
            if not (0 < r.V < 1 and r.Omega > 0):
                raise ValueError(f"bad robot limits {r}")

    @classmethod
    def make(cls, links: Sequence, robots: Sequence) -> "ChainSpec":
        return cls(
            n=len(robots),
            links=tuple(LinkGeometry(*g) for g in links),
            robots=tuple(RobotLimits(*r) for r in robots),
        )

    def link_scenario(self, k: int) -> BasicScenario:
        """Pair scenario of link k (robot k+1 pursuing robot k), 1-based."""
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"link index {k} out of range")
        g = self.links[k - 1]
        return BasicScenario(
            a=g.a, b=g.b, d=g.d,
            V_F=self.robots[k].V, V_L=self.robots[k - 1].V,
            Omega_F=self.robots[k].Omega, Omega_L=self.robots[k - 1].Omega,
        )


@dataclass(frozen=True)
class ParameterMaps:
    """Window geometry progression along the chain (index k >= 2)."""

    f_a: Callable[[int], float]
    f_b: Callable[[int], float]
    f_d: Callable[[int], float]

    @classmethod
    def constant(cls, a: float, b: float, d: float) -> "ParameterMaps":
        return cls(lambda k: a, lambda k: b, lambda k: d)


def _speed_floor(V_prev: float, g: LinkGeometry) -> float:
    """Minimum follower speed bound over one link."""
    return V_prev * (1 + g.a * math.sin(g.b) / (g.d - g.a)) \
        + 1 - math.cos(g.b) + g.a * g.b / (g.d - g.a)


def _omega_lower(V_prev: float, g: LinkGeometry) -> float:
    return (V_prev * math.sin(g.b) + g.b) / (g.d - g.a)


def _omega_upper(V: float, g: LinkGeometry) -> float:
    return (1 - V) * math.sin(g.b) / (g.d + g.a)


def feasible_chain(spec: ChainSpec) -> FeasibilityReport:
    """Propagated pair conditions along the whole chain.

    Conditions: one speed floor per link, the guide robot's turn-rate cap,
    the tail robot's turn-rate floor, and a two-sided sandwich for every
    interior robot.
    """
    conds: list[ConditionMargin] = []
    V = [r.V for r in spec.robots]
    Om = [r.Omega for r in spec.robots]
    for k in range(1, spec.n):  # link k: robot k+1 follows robot k
        bound = _speed_floor(V[k - 1], spec.links[k - 1])
        conds.append(
            ConditionMargin(f"speed_{k + 1}", V[k], bound, V[k] - bound)
        )
    up1 = _omega_upper(V[0], spec.links[0])
    conds.append(ConditionMargin("turn_rate_1_upper", Om[0], up1, up1 - Om[0]))
    for k in range(2, spec.n):  # interior robots
        lo = _omega_lower(V[k - 2], spec.links[k - 2])
        hi = _omega_upper(V[k - 1], spec.links[k - 1])
        conds.append(
            ConditionMargin(f"turn_rate_{k}_lower", Om[k - 1], lo, Om[k - 1] - lo)
        )
        conds.append(
            ConditionMargin(f"turn_rate_{k}_upper", Om[k - 1], hi, hi - Om[k - 1])
        )
    lo_n = _omega_lower(V[spec.n - 2], spec.links[spec.n - 2])
    conds.append(
        ConditionMargin(
            f"turn_rate_{spec.n}_lower", Om[spec.n - 1], lo_n,
            Om[spec.n - 1] - lo_n,
        )
    )
    return _report(conds)


class SaturationError(ValueError):
    """Speed recursion reached 1 (unit nominal speed) at robot `index`."""

    def __init__(self, index: int, speeds: list[float]):
        super().__init__(f"speed schedule saturates at robot {index}")
        self.index = index
        self.speeds = speeds


def min_speed_schedule(links: Sequence, V_1: float) -> list[float]:
    """Speeds obtained by running the per-link floor with equality.

    `links` holds (a, b, d) for robots 2..n.  Raises
    :class:`SaturationError` as soon as a speed reaches 1.
    """
    if not 0 < V_1 < 1:
        raise ValueError("V_1 must lie in (0, 1)")
    speeds = [V_1]
    for i, g in enumerate(links, start=2):
        nxt = _speed_floor(speeds[-1], LinkGeometry(*g))
        speeds.append(nxt)
        if nxt >= 1:
            raise SaturationError(i, speeds)
    return speeds


class ChainLengthResult(NamedTuple):
    max_robots: int
    capped: bool  # True when the search hit n_max without reaching the bound


def max_chain_length(maps: ParameterMaps, n_max: int) -> ChainLengthResult:
    """Largest N with the propagated-growth sum still below one.

    Evaluates, by direct summation for each N,
    ``sum_{i=2..N} (1 - cos b_i + a_i b_i / (d_i - a_i))
    * prod_{k=i+1..N} (1 + a_k sin b_k / (d_k - a_k)) < 1``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    best = 1
    for N in range(2, n_max + 1):
        total = 0.0
        for i in range(2, N + 1):
            a, b, d = maps.f_a(i), maps.f_b(i), maps.f_d(i)
            term = 1 - math.cos(b) + a * b / (d - a)
            for k in range(i + 1, N + 1):
                ak, bk, dk = maps.f_a(k), maps.f_b(k), maps.f_d(k)
                term *= 1 + ak * math.sin(bk) / (dk - ak)
            total += term
        if total < 1:
            best = N
        else:
            return ChainLengthResult(best, False)
    return ChainLengthResult(best, True)


def closed_chain_check(
    spec: ChainSpec, wrap: Optional[LinkGeometry] = None
) -> FeasibilityReport:
    """Append the wrap-around link (robot 1 pursuing robot n).

    The chain conditions cap the guide speed from above while the wrap link
    demands it exceed the tail speed; the report carries that contradicting
    pair alongside the open-chain conditions.  Defaults the wrap geometry to
    the first link's, since a ring gives robot 1 no window of its own.
    """
    if wrap is None:
        wrap = spec.links[0]
    else:
        wrap = LinkGeometry(*wrap)
    open_report = feasible_chain(spec)
    V = [r.V for r in spec.robots]
    # invert the speed floors from the tail back to robot 1
    x = V[-1]
    for g in reversed(spec.links):
        alpha = g.a * math.sin(g.b) / (g.d - g.a)
        c = 1 - math.cos(g.b) + g.a * g.b / (g.d - g.a)
        x = (x - c) / (1 + alpha)
    chain_upper = x
    wrap_lower = _speed_floor(V[-1], wrap)
    conds = list(open_report.conditions)
    conds.append(
        ConditionMargin("speed_1_chain_upper", V[0], chain_upper, chain_upper - V[0])
    )
    conds.append(
        ConditionMargin("speed_1_wrap_lower", V[0], wrap_lower, V[0] - wrap_lower)
    )
    conds.append(
        ConditionMargin(
            "closure_gap", chain_upper, wrap_lower, chain_upper - wrap_lower
        )
    )
    return _report(conds)


class ScheduleInfeasibleError(ValueError):
    """No schedule of the requested length; `achievable` robots fit."""

    def __init__(self, achievable: int, reason: str):
        super().__init__(
            f"no feasible schedule at the requested length; "
            f"achievable prefix: {achievable} robots ({reason})"
        )
        self.achievable = achievable


def generate_schedule(
    a: float,
    d: float,
    n: int,
    V_1: float,
    safety: float = 0.1,
    b_start: float = 0.02,
) -> ChainSpec:
    """Heuristic feasible chain for fixed window sizes a and standoff d.

    Window angles widen just enough that each interior robot's turn-rate
    sandwich keeps a relative width of at least `safety`; speeds follow the
    per-link floor inflated by (1 + safety); turn rates sit at the geometric
    mean of their sandwich (guide and tail robots use the single-sided bound
    scaled by the safety margin).  The sandwich forces the window angles to
    grow by roughly (d + a) / ((d - a)(1 - safety)) per link, so `b_start`
    must be modest for long chains.  Raises
    :class:`ScheduleInfeasibleError` with the achievable prefix length when
    the requested length cannot be met.
    """
    if not (d > a > 0):
        raise ValueError("need d > a > 0")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < V_1 < 1:
        raise ValueError("V_1 must lie in (0, 1)")
    if not 0 < safety < 1:
        raise ValueError("safety must lie in (0, 1)")

    b = [b_start]
    V = [V_1]

    def speed_after(V_prev: float, bk: float) -> float:
        # inflate the per-link increment; keeps every speed floor slack
        # positive without compounding the whole recursion
        floor = _speed_floor(V_prev, LinkGeometry(a, bk, d))
        return floor + safety * (floor - V_prev)

    V.append(speed_after(V[0], b[0]))
    if V[-1] >= 1:
        raise ScheduleInfeasibleError(1, "first link saturates the speed")
    for k in range(2, n):
        # choose b_{k+1} so the sandwich for robot k keeps relative width
        lo = _omega_lower(V[k - 2], LinkGeometry(a, b[k - 2], d))
        need = lo * (d + a) / ((1 - V[k - 1]) * (1 - safety))
        if need > 1:
            raise ScheduleInfeasibleError(k, f"robot {k} sandwich closes")
        b_next = max(b[-1], math.asin(need))
        if b_next > math.pi / 2:
            raise ScheduleInfeasibleError(k, f"robot {k} window exceeds pi/2")
        b.append(b_next)
        V.append(speed_after(V[k - 1], b_next))
        if V[-1] >= 1:
            raise ScheduleInfeasibleError(k, f"speed saturates at robot {k + 1}")

    omegas = [(1 - safety) * _omega_upper(V[0], LinkGeometry(a, b[0], d))]
    for k in range(2, n):
        lo = _omega_lower(V[k - 2], LinkGeometry(a, b[k - 2], d))
        hi = _omega_upper(V[k - 1], LinkGeometry(a, b[k - 1], d))
        if not lo < hi:
            raise ScheduleInfeasibleError(k, f"robot {k} sandwich empty")
        omegas.append(math.sqrt(lo * hi))
    omegas.append((1 + safety) * _omega_lower(V[n - 2], LinkGeometry(a, b[n - 2], d)))

    spec = ChainSpec.make(
        links=[(a, bk, d) for bk in b],
        robots=list(zip(V, omegas)),
    )
    report = feasible_chain(spec)
    if not report.feasible:
        raise ScheduleInfeasibleError(n - 1, f"verification failed: {report.worst()}")
    return spec


# ----------------------------------------------------------------------
# JSON chain files: {n, links: [{a,b,d}...], robots: [{V,Omega}...]}
# ----------------------------------------------------------------------


def chain_to_json_dict(spec: ChainSpec, provenance: Optional[dict] = None) -> dict:
    out = {
        "n": spec.n,
        "links": [{"a": g.a, "b": g.b, "d": g.d} for g in spec.links],
        "robots": [{"V": r.V, "Omega": r.Omega} for r in spec.robots],
    }
    if provenance:
        out["provenance"] = provenance
    return out


def chain_from_json_dict(data: dict) -> ChainSpec:
    try:
        links = [LinkGeometry(g["a"], g["b"], g["d"]) for g in data["links"]]
        robots = [RobotLimits(r["V"], r["Omega"]) for r in data["robots"]]
        return ChainSpec(n=data["n"], links=tuple(links), robots=tuple(robots))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad chain spec: {exc}") from exc


def load_chain(path) -> ChainSpec:
    with open(path) as fh:
        return chain_from_json_dict(json.load(fh))


def save_chain(spec: ChainSpec, path, provenance: Optional[dict] = None):
    with open(path, "w") as fh:
        json.dump(chain_to_json_dict(spec, provenance), fh, indent=2, sort_keys=True)
        fh.write("\n")
