"""Adaptive Dormand-Prince 5(4) cores for the scaled corner flow.

Integrates the reduced radial system

    R'     = V
    V'     = c3 / R^3 - 2 alpha V - R        c3  = E (1-eps)^2
    Theta' = cth / R^2                       cth = sqrt(E) (1-eps)

The angle rides along as a quadrature, so the conserved momentum
R^2 Theta' = cth holds by construction and the drift diagnostic downstream
measures pure round-off.

Everything is scalar arithmetic on purpose: the identical source compiles
under numba (CORNERIMPACT_BACKEND=numba/auto) and runs unmodified as plain
Python.  No allocation happens inside the step loop except for sample-array
growth.

Event handling: the first sample with Theta >= theta_target brackets the
crossing; bisection with single-RK-step re-evaluation from the bracket
start refines it until the bracket is below 1e-12 wide AND the angle
mismatch is below 1e-10.  Both bounds are needed: at acute exits
Theta' ~ W can be huge, so a narrow bracket alone does not pin the angle.

Status codes returned by ``integrate_radial``:
    0  horizon reached
    1  stopped at the theta event
    2  step-size underflow (failure)
    3  step budget exhausted (failure)
"""
from __future__ import annotations

import numpy as np

from ._backend import jit

# Dormand-Prince 5(4) tableau.
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                      64448.0 / 6561.0, -212.0 / 729.0)
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                           46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                      -2187.0 / 6784.0, 11.0 / 84.0)
# b(5th) - b(4th), for the embedded error estimate.
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

EVENT_TAU_WIDTH = 1e-12
EVENT_THETA_TOL = 1e-10


@jit
def _rhs(R, V, c3, alpha, cth):
    return V, c3 / (R * R * R) - 2.0 * alpha * V - R, cth / (R * R)


@jit
def _attempt(R, V, T, f1R, f1V, f1T, h, c3, alpha, cth):
    """One trial step of size h from (R, V, T) with cached first stage.

    Returns (ok, R5, V5, T5, f7R, f7V, f7T, eR, eV, eT): ok is False when a
    stage radius left (0, inf); e* are the raw embedded error components.
    """
    bad = (False, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    R2 = R + h * (A21 * f1R)
    if not (R2 > 0.0 and np.isfinite(R2)):
        return bad
    V2 = V + h * (A21 * f1V)
    T2 = T + h * (A21 * f1T)
    f2R, f2V, f2T = _rhs(R2, V2, c3, alpha, cth)

    R3 = R + h * (A31 * f1R + A32 * f2R)
    if not (R3 > 0.0 and np.isfinite(R3)):
        return bad
    V3 = V + h * (A31 * f1V + A32 * f2V)
    f3R, f3V, f3T = _rhs(R3, V3, c3, alpha, cth)

    R4 = R + h * (A41 * f1R + A42 * f2R + A43 * f3R)
    if not (R4 > 0.0 and np.isfinite(R4)):
        return bad
    V4 = V + h * (A41 * f1V + A42 * f2V + A43 * f3V)
    f4R, f4V, f4T = _rhs(R4, V4, c3, alpha, cth)

    R5s = R + h * (A51 * f1R + A52 * f2R + A53 * f3R + A54 * f4R)
    if not (R5s > 0.0 and np.isfinite(R5s)):
        return bad
    V5s = V + h * (A51 * f1V + A52 * f2V + A53 * f3V + A54 * f4V)
    f5R, f5V, f5T = _rhs(R5s, V5s, c3, alpha, cth)

    R6 = R + h * (A61 * f1R + A62 * f2R + A63 * f3R + A64 * f4R + A65 * f5R)
    if not (R6 > 0.0 and np.isfinite(R6)):
        return bad
    V6 = V + h * (A61 * f1V + A62 * f2V + A63 * f3V + A64 * f4V + A65 * f5V)
    f6R, f6V, f6T = _rhs(R6, V6, c3, alpha, cth)

    # 5th-order solution (b row equals the 7th stage row: FSAL).
    R5 = R + h * (B1 * f1R + B3 * f3R + B4 * f4R + B5 * f5R + B6 * f6R)
    if not (R5 > 0.0 and np.isfinite(R5)):
        return bad
    V5 = V + h * (B1 * f1V + B3 * f3V + B4 * f4V + B5 * f5V + B6 * f6V)
    T5 = T + h * (B1 * f1T + B3 * f3T + B4 * f4T + B5 * f5T + B6 * f6T)
    f7R, f7V, f7T = _rhs(R5, V5, c3, alpha, cth)

    eR = h * (E1 * f1R + E3 * f3R + E4 * f4R + E5 * f5R + E6 * f6R + E7 * f7R)
    eV = h * (E1 * f1V + E3 * f3V + E4 * f4V + E5 * f5V + E6 * f6V + E7 * f7V)
    eT = h * (E1 * f1T + E3 * f3T + E4 * f4T + E5 * f5T + E6 * f6T + E7 * f7T)
    return True, R5, V5, T5, f7R, f7V, f7T, eR, eV, eT


@jit
def _substep(R, V, T, f1R, f1V, f1T, h, c3, alpha, cth):
    """5th-order state at offset h from a step start (no error control)."""
    ok, R5, V5, T5, _, _, _, _, _, _ = _attempt(
        R, V, T, f1R, f1V, f1T, h, c3, alpha, cth)
    return ok, R5, V5, T5


@jit
def _err_norm(eR, eV, eT, R, V, T, Rn, Vn, Tn, atol, rtol):
    sR = atol + rtol * max(abs(R), abs(Rn))
    sV = atol + rtol * max(abs(V), abs(Vn))
    sT = atol + rtol * max(abs(T), abs(Tn))
    a = eR / sR
    b = eV / sV
    c = eT / sT
    return np.sqrt((a * a + b * b + c * c) / 3.0)


@jit
def integrate_radial(R0, V0, c3, cth, alpha, theta_target, tau_end,
                     rtol, atol, h0, max_step, max_steps, tau_eval,
                     stop_at_event):
    """Adaptive DP45 integration of the scaled corner flow from tau = 0.

    theta_target = NaN disables the event.  tau_eval must be sorted,
    strictly positive offsets; states there are produced by single-step
    re-evaluation from the covering step's start, so their accuracy matches
    the step tolerance.
    """
    cap = 4096
    ts = np.empty(cap)
    Rs = np.empty(cap)
    Vs = np.empty(cap)
    Ths = np.empty(cap)
    ts[0] = 0.0
    Rs[0] = R0
    Vs[0] = V0
    Ths[0] = 0.0
    n = 1

    n_ev = tau_eval.shape[0]
    ev_R = np.empty(n_ev)
    ev_V = np.empty(n_ev)
    ev_T = np.empty(n_ev)
    iev = 0

    has_event = not np.isnan(theta_target)
    exit_found = False
    exit_tau = np.nan
    exR = np.nan
    exV = np.nan
    exT = np.nan

    status = 0
    nacc = 0
    nrej = 0
    last_reject_bad = False

    tau = 0.0
    R = R0
    V = V0
    Th = 0.0

    if tau_end <= 0.0:
        return (status, n, ts, Rs, Vs, Ths, exit_found, exit_tau,
                exR, exV, exT, iev, ev_R, ev_V, ev_T, nacc, nrej)

    f1R, f1V, f1T = _rhs(R, V, c3, alpha, cth)
    h = h0
    if h > tau_end:
        h = tau_end
    if h > max_step:
        h = max_step

    while tau < tau_end:
        if nacc + nrej >= max_steps:
            status = 3
            break
        if h > max_step:
            h = max_step
        if tau + h > tau_end:
            h = tau_end - tau
        if tau + h == tau:
            status = 2
            break

        ok, Rn, Vn, Tn, f7R, f7V, f7T, eR, eV, eT = _attempt(
            R, V, Th, f1R, f1V, f1T, h, c3, alpha, cth)
        if not ok:
            h *= 0.25
            nrej += 1
            last_reject_bad = True
            continue
        err = _err_norm(eR, eV, eT, R, V, Th, Rn, Vn, Tn, atol, rtol)
        if not np.isfinite(err):
            h *= 0.25
            nrej += 1
            last_reject_bad = True
            continue
        if err > 1.0:
            fac = 0.9 * err ** -0.2
            if fac < 0.1:
                fac = 0.1
            h *= fac
            nrej += 1
            last_reject_bad = False
            continue

        # Step accepted.
        nacc += 1
        last_reject_bad = False
        bound = tau + h

        if has_event and (not exit_found) and Tn >= theta_target:
            lo = 0.0
            hi = h
            Th_hi = Tn
            for _ in range(200):
                if hi - lo <= EVENT_TAU_WIDTH and \
                        abs(Th_hi - theta_target) <= EVENT_THETA_TOL:
                    break
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break  # bracket at floating-point resolution
                okm, Rm, Vm, Tm = _substep(
                    R, V, Th, f1R, f1V, f1T, mid, c3, alpha, cth)
                if (not okm) or Tm >= theta_target:
                    hi = mid
                    if okm:
                        Th_hi = Tm
                else:
                    lo = mid
            oke, Re, Ve, Te = _substep(
                R, V, Th, f1R, f1V, f1T, hi, c3, alpha, cth)
            exit_found = True
            exit_tau = tau + hi
            if oke:
                exR, exV, exT = Re, Ve, Te
            else:
                exR, exV, exT = Rn, Vn, Tn
            if stop_at_event:
                bound = exit_tau

        while iev < n_ev and tau_eval[iev] <= bound:
            s = tau_eval[iev] - tau
            if s <= 0.0:
                ev_R[iev] = R
                ev_V[iev] = V
                ev_T[iev] = Th
            else:
                okm, Rm, Vm, Tm = _substep(
                    R, V, Th, f1R, f1V, f1T, s, c3, alpha, cth)
                if okm:
                    ev_R[iev] = Rm
                    ev_V[iev] = Vm
                    ev_T[iev] = Tm
                else:
                    ev_R[iev] = Rn
                    ev_V[iev] = Vn
                    ev_T[iev] = Tn
            iev += 1

        if exit_found and stop_at_event:
            if n == cap:
                cap *= 2
                ts2 = np.empty(cap)
                Rs2 = np.empty(cap)
                Vs2 = np.empty(cap)
                Ths2 = np.empty(cap)
                ts2[:n] = ts[:n]
                Rs2[:n] = Rs[:n]
                Vs2[:n] = Vs[:n]
                Ths2[:n] = Ths[:n]
                ts, Rs, Vs, Ths = ts2, Rs2, Vs2, Ths2
            ts[n] = exit_tau
            Rs[n] = exR
            Vs[n] = exV
            Ths[n] = exT
            n += 1
            status = 1
            break

        tau += h
        R = Rn
        V = Vn
        Th = Tn
        f1R, f1V, f1T = f7R, f7V, f7T  # FSAL

        if n == cap:
            cap *= 2
            ts2 = np.empty(cap)
            Rs2 = np.empty(cap)
            Vs2 = np.empty(cap)
            Ths2 = np.empty(cap)
            ts2[:n] = ts[:n]
            Rs2[:n] = Rs[:n]
            Vs2[:n] = Vs[:n]
            Ths2[:n] = Ths[:n]
            ts, Rs, Vs, Ths = ts2, Rs2, Vs2, Ths2
        ts[n] = tau
        Rs[n] = R
        Vs[n] = V
        Ths[n] = Th
        n += 1

        if err < 1e-30:
            fac = 5.0
        else:
            fac = 0.9 * err ** -0.2
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
        h *= fac

    # Consume eval points stranded within a final-step ulp of the horizon.
    if status == 0:
        while iev < n_ev and tau_eval[iev] <= tau_end * (1.0 + 1e-12):
            ev_R[iev] = R
            ev_V[iev] = V
            ev_T[iev] = Th
            iev += 1

    if status == 2 and last_reject_bad:
        status = 4  # underflow driven by a singular radius

    return (status, n, ts, Rs, Vs, Ths, exit_found, exit_tau,
            exR, exV, exT, iev, ev_R, ev_V, ev_T, nacc, nrej)
