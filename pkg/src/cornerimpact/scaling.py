"""Corner-layer scaling: from physical data to the O(1) radial system.

At the first crossing time t0 the face-1 rebound has shrunk the normal
coordinate to the scale eta/sqrt(k) with

    eta = exp(xi1 t0 sqrt(k) / 2),    eps = exp((xi2 - xi1) t0 sqrt(k)),

eps being the (tiny) relative weight of the fast root.  Zooming in by

    tau = (t - t0) sqrt(k),    r = eta R / sqrt(k)

turns the vertex passage into the scaled central-force problem

    R'' - E (1-eps)^2 / R^3 + 2 alpha R' + R = 0,
    Theta' = sqrt(E) (1-eps) / R^2,

with energy-like constant E = dr0^2 ds0^2 / (4 D) and angular momentum
sqrt(E)(1-eps) conserved exactly.  Initial values at tau = 0:

    R(0)  = eta dr0 (1-eps) / (2 sqrt D),
    R'(0) = eta dr0 xi1 (1 - eps xi2/xi1) / (2 sqrt D),
    Theta(0) = 0.

Derived reference quantities: W = R'(0)^2 + E/R(0)^2 (first integral of the
undamped comparison flow), the turning time tau0 = -R'(0) R(0) / W and the
corner timescale kappa = sqrt(E)/W.

The same system can be posed scale-free by prescribing eta (and an eps
policy) directly; then no physical stiffness exists and Gamma/k-dependent
reconstruction is unavailable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInput, ScaleUnderflow
from .linear_phase import DampingParams, InitialData, first_crossing_time

__all__ = [
    "ScaledParams",
    "ScaledState",
    "scaled_params_from_physical",
    "scaled_params_direct",
]

# Beyond this exponent, tau0 ~ eta^4 goes subnormal and W^2 ~ eta^-4
# overflows, so derived quantities stop being representable.
_UNDERFLOW_EXPONENT = -350.0


@dataclass(frozen=True)
class ScaledState:
    """Instantaneous scaled corner state."""

    tau: float
    R: float
    dR: float
    Theta: float


@dataclass(frozen=True)
class ScaledParams:
    """Parameters of the scaled corner flow.

    ``k`` and ``Gamma`` are ``None`` for scale-free runs; when derived from
    a physical stiffness, Gamma * sqrt(k) = eta^2 (1-eps) sqrt(E).
    """

    eta: float
    eps: float
    E: float
    R0: float
    dR0: float
    W: float
    tau0: float
    kappa: float
    damping: DampingParams
    init: InitialData
    k: float | None = None
    Gamma: float | None = None

    @property
    def momentum(self) -> float:
        """Conserved scaled angular momentum R^2 Theta' = sqrt(E)(1-eps)."""
        return math.sqrt(self.E) * (1.0 - self.eps)


def _finish(eta: float, eps: float, damping: DampingParams, init: InitialData,
            k: float | None) -> ScaledParams:
    sd = damping.sqrt_delta
    E = (init.dr0 * init.ds0) ** 2 / (4.0 * damping.delta)
    R0 = eta * init.dr0 * (1.0 - eps) / (2.0 * sd)
    dR0 = eta * init.dr0 * (damping.xi1 - eps * damping.xi2) / (2.0 * sd)
    W = dR0 * dR0 + E / (R0 * R0)
    tau0 = -dR0 * R0 / W
    kappa = math.sqrt(E) / W
    Gamma = None
    if k is not None:
        Gamma = eta * eta * (1.0 - eps) * math.sqrt(E) / math.sqrt(k)
    return ScaledParams(eta=eta, eps=eps, E=E, R0=R0, dR0=dR0, W=W,
                        tau0=tau0, kappa=kappa, damping=damping, init=init,
                        k=k, Gamma=Gamma)


def scaled_params_from_physical(init: InitialData, damping: DampingParams,
                                k: float) -> ScaledParams:
    """Derive the corner-layer parameters from a physical stiffness."""
    if not (math.isfinite(k) and k > 0.0):
        raise InvalidInput(f"stiffness k must be positive, got {k!r}")
    t0 = first_crossing_time(init)
    sk = math.sqrt(k)
    exponent = damping.xi1 * t0 * sk
    if exponent < _UNDERFLOW_EXPONENT:
        raise ScaleUnderflow(
            f"eta = exp({exponent / 2.0:.3g}) leaves double range; "
            "use the scale-free parameterisation (eta given directly)"
        )
    eta = math.exp(exponent / 2.0)
    eps = math.exp((damping.xi2 - damping.xi1) * t0 * sk)
    return _finish(eta, eps, damping, init, k)


def scaled_params_direct(eta: float, eps: float | str, init: InitialData,
                         damping: DampingParams) -> ScaledParams:
    """Build scaled parameters from eta directly (scale-free run).

    ``eps`` may be a number in [0, 1), or ``"derive"`` to use the
    consistency relation eps = eta^{2 (xi2 - xi1)/xi1} implied by a shared
    physical origin, or ``"zero"`` for the idealised limit.
    """
    if not (math.isfinite(eta) and 0.0 < eta < 1.0):
        raise InvalidInput(f"eta must lie in (0, 1), got {eta!r}")
    if isinstance(eps, str):
        policy = eps.strip().lower()
        if policy == "derive":
            eps_val = eta ** (2.0 * (damping.xi2 - damping.xi1) / damping.xi1)
        elif policy == "zero":
            eps_val = 0.0
        else:
            raise InvalidInput(
                f"eps policy must be 'derive' or 'zero', got {eps!r}"
            )
    else:
        eps_val = float(eps)
        if not (math.isfinite(eps_val) and 0.0 <= eps_val < 1.0):
            raise InvalidInput(f"eps must lie in [0, 1), got {eps!r}")
    return _finish(eta, eps_val, damping, init, None)
