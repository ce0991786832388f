"""Closed forms for the linear phases (face 1 approach, face 2 exit).

While the particle penetrates a single face, the penalty system decouples
into a scalar over-damped oscillator normal to the face and free motion
along it.  With stiffness k and damping ratio alpha > 1 the normal equation

    q'' + 2 alpha sqrt(k) q' + k q = 0

has characteristic roots sqrt(k) xi_{1,2}, xi_{1,2} = -alpha +- sqrt(D),
D = alpha^2 - 1, with xi1 xi2 = 1 and xi1 + xi2 = -2 alpha.  Its
fundamental solutions in the fast time tau = t sqrt(k) are

    K2(tau) = (e^{xi1 tau} - e^{xi2 tau}) / (2 sqrt(D))      K2(0)=0, K2'(0)=1
    H2(tau) = (-xi2 e^{xi1 tau} + xi1 e^{xi2 tau}) / (2 sqrt(D))   H2(0)=1

with H2' = -K2 (because xi1 xi2 = 1).  Both are evaluated via an expm1
rearrangement that is cancellation-free for small tau and overflow-free for
large tau.

Initial data: the particle starts on face 1 at (0, s0), s0 < 0, with
velocity (dr0, ds0), dr0 > 0 (into the wall), ds0 > 0 (sliding toward the
vertex), so the normal coordinate is r = x1 and the slide s = x2 reaches
the vertex at t0 = -s0/ds0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NoCrossing, NotOverDamped, OutOfPhase

__all__ = [
    "DampingParams",
    "InitialData",
    "characteristic_roots",
    "first_crossing_time",
    "kernels_K2_H2",
    "kernel_K2_dot",
    "r1_phase_state",
    "face_phase_state",
]


@dataclass(frozen=True)
class DampingParams:
    """Damping ratio with its derived characteristic quantities."""

    alpha: float
    delta: float        # alpha^2 - 1 > 0
    sqrt_delta: float
    xi1: float          # slow root, in (-1, 0)
    xi2: float          # fast root, xi1 * xi2 = 1


def characteristic_roots(alpha: float) -> DampingParams:
    a = float(alpha)
    if not math.isfinite(a) or a <= 1.0:
        raise NotOverDamped(f"alpha must exceed 1, got {alpha!r}")
    delta = a * a - 1.0
    sd = math.sqrt(delta)
    return DampingParams(alpha=a, delta=delta, sqrt_delta=sd,
                         xi1=-a + sd, xi2=-a - sd)


@dataclass(frozen=True)
class InitialData:
    """Face-1 start state: position (0, s0), velocity (dr0, ds0)."""

    s0: float = -1.0
    dr0: float = 1.0
    ds0: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s0) and self.s0 < 0.0):
            raise InvalidInput(f"s0 must be negative, got {self.s0!r}")
        if not (math.isfinite(self.dr0) and self.dr0 > 0.0):
            raise InvalidInput(f"dr0 must be positive, got {self.dr0!r}")
        if not (math.isfinite(self.ds0) and self.ds0 > 0.0):
            raise InvalidInput(f"ds0 must be positive, got {self.ds0!r}")


def first_crossing_time(init) -> float:
    """Time t0 = -s0/ds0 at which the slide coordinate reaches the vertex."""
    if init.ds0 <= 0.0:
        raise NoCrossing(f"ds0 must be positive to reach the vertex, got {init.ds0!r}")
    return -init.s0 / init.ds0


def kernels_K2_H2(damping: DampingParams, tau):
    """Fundamental solutions (K2, H2) at fast time tau (scalar or array).

    Extended by zero for tau < 0.
    """
    tau = np.asarray(tau, dtype=float)
    sd = damping.sqrt_delta
    grow = np.exp(damping.xi1 * tau)      # slow envelope, <= 1 for tau >= 0
    gap = np.exp(-2.0 * sd * tau)         # e^{(xi2-xi1) tau}, in (0, 1]
    K2 = grow * (-np.expm1(-2.0 * sd * tau)) / (2.0 * sd)
    H2 = grow * (-damping.xi2 + damping.xi1 * gap) / (2.0 * sd)
    neg = tau < 0.0
    if np.any(neg):
        K2 = np.where(neg, 0.0, K2)
        H2 = np.where(neg, 0.0, H2)
    if K2.ndim == 0:
        return float(K2), float(H2)
    return K2, H2


def kernel_K2_dot(damping: DampingParams, tau):
    """d K2 / d tau, used for velocity reconstruction; K2'(0) = 1."""
    tau = np.asarray(tau, dtype=float)
    sd = damping.sqrt_delta
    grow = np.exp(damping.xi1 * tau)
    gap = np.exp(-2.0 * sd * tau)
    out = grow * (damping.xi1 - damping.xi2 * gap) / (2.0 * sd)
    out = np.where(tau < 0.0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def r1_phase_state(init: InitialData, damping: DampingParams, k: float, t):
    """State (r, rdot, s, sdot) during the face-1 phase, 0 <= t <= t0.

    r(t) = dr0 K2(t sqrt k)/sqrt k decays after one fast oscillation-free
    rebound; the slide is free: s(t) = s0 + t ds0.
    """
    if not (math.isfinite(k) and k > 0.0):
        raise InvalidInput(f"stiffness k must be positive, got {k!r}")
    t0 = first_crossing_time(init)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > t0 * (1.0 + 1e-12)):
        raise OutOfPhase(f"t must lie in [0, t0={t0:g}] for the face-1 phase")
    sk = math.sqrt(k)
    tau = t_arr * sk
    K2, _ = kernels_K2_H2(damping, tau)
    r = init.dr0 * np.asarray(K2) / sk
    rdot = init.dr0 * np.asarray(kernel_K2_dot(damping, tau))
    s = init.s0 + t_arr * init.ds0
    sdot = np.full_like(t_arr, init.ds0)
    if t_arr.ndim == 0:
        return float(r), float(rdot), float(s), float(sdot)
    return r, rdot, s, sdot


def face_phase_state(y1_0: float, dy1_0: float, dy2_0: float,
                     damping: DampingParams, k: float, tp):
    """State (y1, y1dot, y2, y2dot) on face 2, elapsed time tp >= 0.

    y1 is the normal penetration (over-damped spring), y2 the free slide
    away from the vertex starting at the vertex:

        y1(tp) = dy1_0 K2(tau)/sqrt k + y1_0 H2(tau),  tau = tp sqrt k,
        y2(tp) = tp dy2_0.

    Requires y1_0 >= 0 (the particle exits the corner outside K).
    """
    if not (math.isfinite(k) and k > 0.0):
        raise InvalidInput(f"stiffness k must be positive, got {k!r}")
    if y1_0 < 0.0:
        raise InvalidInput(f"y1_0 must be non-negative, got {y1_0!r}")
    tp_arr = np.asarray(tp, dtype=float)
    if np.any(tp_arr < 0.0):
        raise OutOfPhase("tp must be non-negative for the face-2 phase")
    sk = math.sqrt(k)
    tau = tp_arr * sk
    K2, H2 = kernels_K2_H2(damping, tau)
    K2 = np.asarray(K2)
    H2 = np.asarray(H2)
    y1 = dy1_0 * K2 / sk + y1_0 * H2
    # H2' = -K2, so y1dot = dy1_0 K2' + y1_0 sqrt(k) H2'
    y1dot = dy1_0 * np.asarray(kernel_K2_dot(damping, tau)) - y1_0 * sk * K2
    y2 = tp_arr * dy2_0
    y2dot = np.full_like(tp_arr, dy2_0)
    if tp_arr.ndim == 0:
        return float(y1), float(y1dot), float(y2), float(y2dot)
    return y1, y1dot, y2, y2dot
