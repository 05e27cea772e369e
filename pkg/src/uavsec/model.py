"""Network domain types, PPP sampling, and the elevation-angle-dependent
LoS/NLoS channel and SIR computations.

Geometry: the typical legitimate receiver sits at the origin of the ground
plane with its serving transmitter directly overhead at altitude H. A ground
node at horizontal distance r sees the transmitter at elevation angle
arcsin(H / sqrt(r^2 + H^2)); the link is line-of-sight iff that angle exceeds
theta_c, i.e. iff r < K = H*cot(theta_c). LoS links are deterministic with
path-loss exponent alpha_los; NLoS links carry unit-mean exponential
(Rayleigh power) fading with exponent alpha_nlos. The transmit power p_t
cancels in every SIR and is carried only for completeness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FadingModel",
    "ExactLoSNLoS",
    "AllRayleigh",
    "NetworkParams",
    "WiretapCode",
    "GuardZone",
    "Realization",
    "los_radius",
    "sample_ppp",
    "link_gain",
    "sir_legitimate",
    "sir_eavesdropper",
    "rule_window_radius",
    "default_window_radius",
    "outage_window_radius",
]


class FadingModel:
    """Marker for the fading treatment of LoS links.

    ExactLoSNLoS: LoS links deterministic, NLoS links Rayleigh.
    AllRayleigh: every link Rayleigh with its branch's path loss.
    """

    name = "base"
    los_faded = False


class ExactLoSNLoS(FadingModel):
    name = "exact-los-nlos"
    los_faded = False


class AllRayleigh(FadingModel):
    name = "all-rayleigh"
    los_faded = True


def los_radius(h: float, theta_c: float) -> float:
    """Horizontal radius K = H*cot(theta_c) of the LoS disk."""
    if h <= 0:
        raise ValueError("los_radius: altitude must be positive")
    if not 0.0 < theta_c < math.pi / 2:
        raise ValueError("los_radius: theta_c must lie in (0, pi/2)")
    return h / math.tan(theta_c)


@dataclass(frozen=True)
class NetworkParams:
    """Densities, channel constants and altitude bounds of the network.

    Units: densities per m^2, angles in radians, altitudes in metres,
    reference gains linear (dimensionless at 1 m).
    """

    lambda_u: float            # transmitter/legitimate-receiver density
    lambda_e: float            # eavesdropper density
    h: float = 10.0            # transmitter altitude
    theta_c: float = math.pi / 4
    h_min: float = 10.0
    h_max: float = 50.0
    eta_los: float = 1.0
    eta_nlos: float = 0.01     # 20 dB LoS advantage at 1 m by default
    alpha_los: float = 2.0
    alpha_nlos: float = 4.0
    p_t: float = 1.0           # cancels in all SIRs; kept for completeness

    def __post_init__(self):
        if self.lambda_u < 0 or self.lambda_e < 0:
            raise ValueError("densities must be nonnegative")
        if not 0.0 < self.theta_c < math.pi / 2:
            raise ValueError("theta_c must lie in (0, pi/2)")
        if not self.h_min <= self.h <= self.h_max:
            raise ValueError(f"altitude {self.h} outside [{self.h_min}, {self.h_max}]")
        if not self.eta_los >= self.eta_nlos > 0:
            raise ValueError("need eta_los >= eta_nlos > 0")
        if self.alpha_los <= 0 or self.alpha_nlos <= 0:
            raise ValueError("path-loss exponents must be positive")
        if self.p_t <= 0:
            raise ValueError("transmit power must be positive")

    @property
    def los_radius(self) -> float:
        return los_radius(self.h, self.theta_c)

    def with_altitude(self, h: float) -> "NetworkParams":
        from dataclasses import replace
        return replace(self, h=h)


@dataclass(frozen=True)
class WiretapCode:
    """Wiretap code rate pair (bps/Hz): codeword rate rt, secrecy rate rs."""

    rt: float
    rs: float

    def __post_init__(self):
        if not self.rt >= self.rs >= 0.0:
            raise ValueError("need rt >= rs >= 0")

    @classmethod
    def from_gap(cls, rt: float, re: float) -> "WiretapCode":
        """Build from the codeword rate and the secrecy gap re = rt - rs."""
        return cls(rt=rt, rs=rt - re)

    @property
    def re(self) -> float:
        return self.rt - self.rs

    @property
    def beta_t(self) -> float:
        return 2.0 ** self.rt - 1.0

    @property
    def beta_e(self) -> float:
        return 2.0 ** self.re - 1.0


@dataclass(frozen=True)
class GuardZone:
    """Eavesdropper-free disk of radius d around each transmitter's ground
    projection; transmitters with a detected eavesdropper inside stay silent
    (emitting indistinguishable artificial noise), thinning the transmitter
    density to lambda_u * exp(-pi * lambda_e * d^2)."""

    d: float

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("guard-zone radius must be nonnegative")


def sample_ppp(density: float, r_in: float, r_out: float,
               rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on the annulus r_in <= r < r_out around the origin.

    Returns an (n, 2) array; n is Poisson with mean density*pi*(r_out^2-r_in^2)
    and positions are uniform on the annulus. Deterministic given rng state.
    """
    if not 0.0 <= r_in <= r_out:
        raise ValueError("need 0 <= r_in <= r_out")
    if density < 0:
        raise ValueError("density must be nonnegative")
    area = math.pi * (r_out ** 2 - r_in ** 2)
    n = rng.poisson(density * area) if area > 0 and density > 0 else 0
    if n == 0:
        return np.empty((0, 2))
    r = np.sqrt(r_in ** 2 + (r_out ** 2 - r_in ** 2) * rng.random(n))
    phi = rng.random(n) * (2.0 * math.pi)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def link_gain(r: float, h: float, params: NetworkParams, model: type,
              fading_draw: float = 1.0) -> float:
    """Received power factor eta*S*D^-alpha for a link of horizontal span r.

    LoS branch (r < K): eta_los, alpha_los, S = 1 under ExactLoSNLoS or the
    draw under AllRayleigh. NLoS branch (r >= K, ties to NLoS): eta_nlos,
    alpha_nlos, S = draw under both models.
    """
    d2 = r * r + h * h
    if r < los_radius(h, params.theta_c):
        s = fading_draw if model.los_faded else 1.0
        return params.eta_los * s * d2 ** (-params.alpha_los / 2.0)
    return params.eta_nlos * fading_draw * d2 ** (-params.alpha_nlos / 2.0)


# Link-key spaces for the counter-based fading streams.
_LINK_SIG0 = 0
_LINK_U0 = 1
_LINK_0E = 2
_LINK_UE = 3


@dataclass
class Realization:
    """One sampled snapshot of the point processes around the typical pair.

    `interferers` and `eavesdroppers` are (n, 2) horizontal positions inside
    the declared window; the typical receiver is at the origin with its
    transmitter at (0, 0, H). Fading draws are materialized lazily, indexed
    by (seed, realization index, link endpoints) through a counter-based
    generator, so both fading models re-running the same realization share
    the NLoS draws.
    """

    interferers: np.ndarray
    eavesdroppers: np.ndarray
    seed: int = 0
    index: int = 0
    _fading: dict = field(default_factory=dict, repr=False)

    @classmethod
    def sample(cls, params: NetworkParams, window_radius: float, seed: int,
               index: int = 0, zone: GuardZone | None = None) -> "Realization":
        """Draw interferers on [0, R_w) and eavesdroppers on [d, R_w)."""
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
        interferers = sample_ppp(params.lambda_u, 0.0, window_radius, rng)
        d = zone.d if zone is not None else 0.0
        eavesdroppers = sample_ppp(params.lambda_e, min(d, window_radius),
                                   window_radius, rng)
        return cls(interferers=interferers, eavesdroppers=eavesdroppers,
                   seed=seed, index=index)

    def fading(self, space: int, i: int = 0, j: int = 0) -> float:
        """Unit-mean exponential draw for one link, cached per realization."""
        key = (space, i, j)
        val = self._fading.get(key)
        if val is None:
            counter = (space << 48) | (i << 24) | j
            bitgen = np.random.Philox(
                key=np.array([self.seed & 0xFFFFFFFFFFFFFFFF, self.index],
                             dtype=np.uint64),
                counter=np.array([counter, 0, 0, 0], dtype=np.uint64))
            val = float(np.random.Generator(bitgen).standard_exponential())
            self._fading[key] = val
        return val


def sir_legitimate(real: Realization, params: NetworkParams,
                   model: type = ExactLoSNLoS) -> float:
    """SIR at the typical receiver; +inf when there are no interferers."""
    sig_draw = real.fading(_LINK_SIG0) if model.los_faded else 1.0
    signal = params.eta_los * sig_draw * (params.h ** 2) ** (-params.alpha_los / 2.0)
    interference = 0.0
    for i, (x, y) in enumerate(np.atleast_2d(real.interferers)
                               if real.interferers.size else []):
        r = math.hypot(x, y)
        interference += link_gain(r, params.h, params, model,
                                  real.fading(_LINK_U0, i))
    if interference == 0.0:
        return math.inf
    return signal / interference


def sir_eavesdropper(real: Realization, e_index: int, params: NetworkParams,
                     model: type = ExactLoSNLoS) -> float:
    """SIR at eavesdropper `e_index`; eavesdroppers decode individually."""
    ex, ey = real.eavesdroppers[e_index]
    r0 = math.hypot(ex, ey)
    signal = link_gain(r0, params.h, params, model,
                       real.fading(_LINK_0E, 0, e_index))
    interference = 0.0
    for i, (x, y) in enumerate(np.atleast_2d(real.interferers)
                               if real.interferers.size else []):
        r = math.hypot(x - ex, y - ey)
        interference += link_gain(r, params.h, params, model,
                                  real.fading(_LINK_UE, i, e_index))
    if interference == 0.0:
        return math.inf
    return signal / interference


# ---------------------------------------------------------------------------
# Simulation-window policies
# ---------------------------------------------------------------------------

def rule_window_radius(params: NetworkParams) -> float:
    """Interferer-window radius at which the expected truncated interference
    is < 0.1% of the expected in-window NLoS interference (alpha_nlos = 4
    tail bound): R^2 + H^2 >= 1001 * (K^2 + H^2)."""
    k2 = params.los_radius ** 2
    h2 = params.h ** 2
    return math.sqrt(1001.0 * (k2 + h2) - h2)


def default_window_radius(params: NetworkParams) -> float:
    """Conservative default: max(50 K, 2000 m, 0.1%-tail rule radius)."""
    return max(50.0 * params.los_radius, 2000.0, rule_window_radius(params))


def connection_window_radius(params: NetworkParams, beta_t: float,
                             n_realizations: int) -> float:
    """Interferer window for connection simulation, sized so the closed-form
    truncation bias is at most 5% of the binomial half-width.

    Truncating at R removes NLoS interference whose effect on the
    all-Rayleigh connection probability is exactly a factor
    exp(pi*lambda_u*c/(R^2+H^2)) with c = beta_t*eta_nlos*H^2/eta_los, so
    P_c * pi*lambda_u*c/(R^2+H^2) <= 0.05*hw pins R. Never below
    max(3K, 60 m) and never above the 0.1% interference-tail radius
    (pointless beyond it).
    """
    floor = max(3.0 * params.los_radius, 60.0)
    cap = rule_window_radius(params)
    if params.lambda_u <= 0.0 or beta_t <= 0.0:
        return max(floor, min(100.0, cap))
    if params.alpha_los == 2.0 and params.alpha_nlos == 4.0:
        from .analytic import pc_approx
        pc = pc_approx(params, beta_t)
    else:
        return cap
    hw = 1.96 * math.sqrt(max(pc * (1.0 - pc), 1e-12) / n_realizations)
    c = beta_t * params.eta_nlos * params.h ** 2 / params.eta_los
    r2 = (math.pi * params.lambda_u * c * pc / (0.05 * hw)
          - params.h ** 2)
    if r2 <= floor ** 2:
        return floor
    return min(math.sqrt(r2), cap)


def outage_window_radius(params: NetworkParams, beta_e: float,
                         residual: float = 1e-6) -> float:
    """Eavesdropper sampling radius for outage simulation.

    Sized so the closed-form outage contributed by eavesdroppers beyond the
    window is <= `residual` (solved from the large-radius tail of the
    guard-zone outage form), with a 25% margin; never below 3 K + 30 m.
    """
    floor = 3.0 * params.los_radius + 30.0
    if params.lambda_e <= 0.0 or beta_e <= 0.0 or params.lambda_u <= 0.0:
        return max(floor, 100.0)
    q1 = params.lambda_u * math.pi ** 2 * math.sqrt(beta_e) / 2.0
    k = -math.log1p(-residual)
    r2 = (math.log(math.pi * params.lambda_e / (q1 * k))
          + math.pi * params.lambda_u * params.h ** 2) / q1 - params.h ** 2
    if r2 <= 0.0:
        return floor
    return max(floor, 1.25 * math.sqrt(r2))
