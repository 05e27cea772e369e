"""Secrecy-transmission-capacity maximization: outage-equality root for the
rate gap, Lambert-W closed forms for the code rates, and grid searches over
altitude and guard-zone radius.

The outage constraint binds with equality at any optimum (outage and
capacity both fall as the rate gap grows), so the gap comes from a 1D root;
the codeword rate then maximizes the large-threshold surrogate objective in
closed form. Reported capacities always use the full closed-form connection
probability at the candidate rates, not the surrogate; the surrogate/full
ratio is surfaced in the diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analytic, mathkit
from .model import GuardZone, NetworkParams

__all__ = [
    "InfeasibleError",
    "OptimumReport",
    "RE_FLOOR",
    "RE_CEILING",
    "solve_re",
    "re_closed_zone",
    "rt_star",
    "rs_star",
    "large_zone_limit",
    "default_h_grid",
    "default_d_grid",
    "optimize_no_zone",
    "optimize_zone",
]

# The outage form is singular at beta_e = 0, so the rate gap is floored just
# above it; the constraint is inactive in that regime anyway.
RE_FLOOR = 1e-6
RE_CEILING = 40.0

_LN2 = math.log(2.0)


class InfeasibleError(RuntimeError):
    """The outage target is unreachable; carries the best outage achieved."""

    def __init__(self, message, achieved_outage):
        super().__init__(message)
        self.achieved_outage = achieved_outage


@dataclass(frozen=True)
class OptimumReport:
    """Solution of a capacity maximization: rates (bps/Hz), altitude,
    optional zone radius, capacity (bps/Hz/m^2), achieved outage, and
    search diagnostics."""

    rt: float
    rs: float
    re: float
    h: float
    cs: float
    pso: float
    d: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


def _beta_e(re: float) -> float:
    return 2.0 ** re - 1.0


def _pso_at(params: NetworkParams, re: float,
            zone: Optional[GuardZone]) -> float:
    be = _beta_e(re)
    if zone is None:
        return analytic.pso_approx(params, be)
    return analytic.pso_zone_approx(params, be, zone)


def solve_re(params: NetworkParams, epsilon: float,
             zone: Optional[GuardZone] = None, tol: float = 1e-12) -> float:
    """Smallest admissible rate gap: the root of P_so(re) = epsilon, or the
    floor when the constraint is already slack there."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if params.lambda_e == 0.0:
        return RE_FLOOR
    f = lambda re: _pso_at(params, re, zone) - epsilon
    if f(RE_FLOOR) <= 0.0:
        return RE_FLOOR
    hi = RE_CEILING
    if f(hi) > 0.0:
        hi = 2.0 * RE_CEILING          # one automatic bracket expansion
        if f(hi) > 0.0:
            achieved = _pso_at(params, hi, zone)
            raise InfeasibleError(
                f"outage target {epsilon:g} unreachable: minimum outage "
                f"{achieved:g} at re = {hi:g} bps/Hz", achieved)
    return mathkit.bisect_root(f, RE_FLOOR, hi, tol)


def re_closed_zone(params: NetworkParams, epsilon: float,
                   zone: GuardZone) -> float:
    """Closed-form rate gap for a guard zone covering the LoS disk (d >= K):
    only the NLoS tail beyond d contributes, which inverts through the
    Lambert W function."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if zone.d < params.los_radius * (1.0 - 1e-12):
        raise ValueError("re_closed_zone requires d >= the LoS radius")
    if params.lambda_e == 0.0:
        return RE_FLOOR
    s = params.h ** 2 + zone.d ** 2
    arg = (math.pi * params.lambda_e * s
           * math.exp(math.pi * params.lambda_u * params.h ** 2)
           / (-math.log1p(-epsilon)))
    try:
        w = mathkit.lambert_w0(arg)
    except ValueError as exc:
        raise InfeasibleError(f"closed-form rate gap undefined: {exc}",
                              float("nan")) from exc
    beta_e = 4.0 * w * w / (math.pi ** 4 * params.lambda_u ** 2 * s * s)
    return max(math.log1p(beta_e) / _LN2, RE_FLOOR)


def _w_argument(params: NetworkParams, re_star: float) -> float:
    if params.lambda_u <= 0.0:
        raise ValueError("codeword-rate optimum needs lambda_u > 0")
    return (math.sqrt(params.eta_los / params.eta_nlos)
            * 2.0 ** (1.0 - re_star / 2.0)
            / (math.pi ** 2 * params.lambda_u * params.h))


def rt_star(params: NetworkParams, re_star: float) -> float:
    """Codeword rate maximizing the surrogate objective
    (rt - re*) * Pbar_c(rt): rt* = re* + (2/ln 2) W0(z) with
    z = sqrt(eta_los/eta_nlos) * 2^(1 - re*/2) / (pi^2 lambda_u H)."""
    if re_star < 0:
        raise ValueError("re_star must be nonnegative")
    return re_star + (2.0 / _LN2) * mathkit.lambert_w0(
        _w_argument(params, re_star))


def rs_star(params: NetworkParams, re_star: float) -> float:
    """Secrecy rate at the optimum: rt* - re*."""
    if re_star < 0:
        raise ValueError("re_star must be nonnegative")
    return (2.0 / _LN2) * mathkit.lambert_w0(_w_argument(params, re_star))


def large_zone_limit(params: NetworkParams) -> tuple[float, float]:
    """Limiting rates for an unboundedly large guard zone (rate gap -> 0):
    rt = rs = (2/ln 2) W0(2 sqrt(eta_los/eta_nlos) / (pi^2 lambda_u H));
    independent of the eavesdropper density and the zone radius."""
    r = (2.0 / _LN2) * mathkit.lambert_w0(_w_argument(params, 0.0))
    return r, r


def default_h_grid(params: NetworkParams, step: float = 1.0) -> np.ndarray:
    return np.arange(params.h_min, params.h_max + step / 2.0, step)


def default_d_grid(params: NetworkParams, step: float = 1.0) -> np.ndarray:
    """Zone radii 0..D_max in 1 m steps, with D_max = 5/sqrt(pi*lambda_e)
    (density thinning e^-25 there, so larger zones are pointless)."""
    if params.lambda_e <= 0.0:
        return np.array([0.0])
    d_max = 5.0 / math.sqrt(math.pi * params.lambda_e)
    return np.arange(0.0, d_max + step / 2.0, step)


def _evaluate_cell(params: NetworkParams, epsilon: float,
                   zone: Optional[GuardZone]):
    re = solve_re(params, epsilon, zone)
    rt = rt_star(params, re)
    rs = rt - re
    pc = analytic.pc_approx(params, 2.0 ** rt - 1.0)
    density = analytic.effective_density(params.lambda_u, params.lambda_e,
                                         zone)
    return re, rt, rs, analytic.stc(rs, pc, density)


def _finish(params: NetworkParams, epsilon: float, best, zone_d,
            diagnostics) -> OptimumReport:
    h, d, re, rt, rs, cs = best
    p = params.with_altitude(h)
    zone = GuardZone(d) if d is not None else None
    pso = _pso_at(p, re, zone)
    beta_t = 2.0 ** rt - 1.0
    diagnostics = dict(diagnostics)
    diagnostics["surrogate_pc_ratio"] = (
        analytic.pc_simplified(p, rt) / analytic.pc_approx(p, beta_t))
    diagnostics["constraint_active"] = re > RE_FLOOR
    return OptimumReport(rt=rt, rs=rs, re=re, h=h, cs=cs, pso=pso, d=d,
                         diagnostics=diagnostics)


def optimize_no_zone(params: NetworkParams, epsilon: float,
                     h_grid=None) -> OptimumReport:
    """Maximize rs * Pc * lambda_u over the altitude grid, with the rates
    solved per altitude (ties resolved toward the lowest altitude)."""
    if h_grid is None:
        h_grid = default_h_grid(params)
    h_grid = np.asarray(h_grid, dtype=float)
    if h_grid.size == 0:
        raise ValueError("empty altitude grid")
    best = None
    failures = []
    for h in np.sort(h_grid):
        p = params.with_altitude(float(h))
        try:
            re, rt, rs, cs = _evaluate_cell(p, epsilon, None)
        except InfeasibleError as exc:
            failures.append((h, exc))
            continue
        if best is None or cs > best[5]:
            best = (float(h), None, re, rt, rs, cs)
    if best is None:
        raise InfeasibleError(
            f"outage target {epsilon:g} unreachable at every altitude",
            min(e.achieved_outage for _, e in failures))
    return _finish(params, epsilon, best, None,
                   {"h_grid_size": int(h_grid.size)})


def optimize_zone(params: NetworkParams, epsilon: float, h_grid=None,
                  d_grid=None) -> OptimumReport:
    """Maximize rs * Pc * lambda_u' over the (altitude, zone-radius) grid
    (ties resolved toward the lowest altitude, then the smallest zone)."""
    if h_grid is None:
        h_grid = default_h_grid(params)
    if d_grid is None:
        d_grid = default_d_grid(params)
    h_grid = np.asarray(h_grid, dtype=float)
    d_grid = np.asarray(d_grid, dtype=float)
    if h_grid.size == 0 or d_grid.size == 0:
        raise ValueError("empty search grid")
    best = None
    failures = []
    for h in np.sort(h_grid):
        p = params.with_altitude(float(h))
        for d in np.sort(d_grid):
            zone = GuardZone(float(d))
            try:
                re, rt, rs, cs = _evaluate_cell(p, epsilon, zone)
            except InfeasibleError as exc:
                failures.append((h, d, exc))
                continue
            if best is None or cs > best[5]:
                best = (float(h), float(d), re, rt, rs, cs)
    if best is None:
        raise InfeasibleError(
            f"outage target {epsilon:g} unreachable on the whole grid",
            min(e.achieved_outage for _, _, e in failures))
    return _finish(params, epsilon, best, best[1],
                   {"h_grid_size": int(h_grid.size),
                    "d_grid_size": int(d_grid.size)})
