"""Numpy implementations of the hot loops; reference for the compiled kernels."""

import math

import numpy as np

ZERO, CONSTANT, IMPULSE, SINUSOID = 0, 1, 2, 3
TANH, LOGISTIC, ALGEBRAIC = 0, 1, 2


def channel_values(kind, par, t):
    """Open-loop channel amplitudes at time ``t``; ``par`` rows are (a, b, c, 0)."""
    out = np.zeros(len(kind))
    for k in range(len(kind)):
        code = kind[k]
        if code == CONSTANT:
            out[k] = par[k, 0]
        elif code == IMPULSE:
            if 0.0 <= t < par[k, 1]:
                out[k] = par[k, 0]
        elif code == SINUSOID:
            out[k] = par[k, 0] * math.sin(par[k, 1] * t + par[k, 2])
    return out


def rk4_slot(M, const, cols, kind, par, x0, t0, dt, nsteps, out):
    """Classical RK4 for ``x' = M x + const + cols @ s(t)``; fills ``out[0..nsteps]``."""
    x = np.array(x0, dtype=float)
    out[0] = x
    h2 = 0.5 * dt
    for step in range(nsteps):
        t = t0 + step * dt
        th = t0 + (step + 0.5) * dt
        t1 = t0 + (step + 1) * dt
        d0 = const + cols @ channel_values(kind, par, t)
        dh = const + cols @ channel_values(kind, par, th)
        d1 = const + cols @ channel_values(kind, par, t1)
        k1 = M @ x + d0
        k2 = M @ (x + h2 * k1) + dh
        k3 = M @ (x + h2 * k2) + dh
        k4 = M @ (x + dt * k3) + d1
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[step + 1] = x


def activation(y, code):
    if code == TANH:
        return np.tanh(y)
    if code == LOGISTIC:
        # 2 / (1 + e^-y) - 1 written without the overflowing exponential
        return np.tanh(0.5 * y)
    return y / np.sqrt(1.0 + y * y)


def hebbian_step(A, ei, ej, sign, x, ca_plus, ca_minus, lo_plus, hi_plus, lo_minus, hi_minus, phi_code):
    """Clipped Hebbian map over the edge list, in place on the symmetric ``A``."""
    if len(ei) == 0:
        return
    a = A[ei, ej]
    drive = activation(x[ei] * x[ej], phi_code)
    pos = sign > 0
    new = np.where(
        pos,
        np.clip(ca_plus * a + drive, lo_plus, hi_plus),
        np.clip(ca_minus * a + drive, lo_minus, hi_minus),
    )
    A[ei, ej] = new
    A[ej, ei] = new
