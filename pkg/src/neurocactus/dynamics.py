"""Hybrid simulation: linear neural-state ODE with slot-wise frozen weights.

Within a slot of length ``tau`` the weights are constant and the state
obeys ``x' = -c_n x + A x + B u``, integrated with fixed-step RK4.  At each
slot boundary the weights take one clipped Hebbian step driven by the
state at that instant and are frozen again.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _kernels
from .errors import BadInterval, ConditionViolated, DimensionMismatch, StepMismatch
from .graph import SignedGraph, WeightBounds, max_out_degree

SYMMETRY_TOL = 1e-12
# relative slack for the state-bound monitor; RK4 may graze the boundary
STATE_BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class NetworkParams:
    c_n: float = 4.1
    c_a_plus: float = 0.9
    c_a_minus: float = 0.9
    tau: float = 0.2
    bounds: WeightBounds = field(default_factory=WeightBounds)
    phi: str = "tanh"
    dt: float | None = None

    def __post_init__(self):
        if self.c_n <= 0:
            raise ValueError(f"c_n must be positive, got {self.c_n}")
        for name in ("c_a_plus", "c_a_minus"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.phi not in _kernels.PHI_CODES:
            raise ValueError(f"unknown activation {self.phi!r}; choose from {sorted(_kernels.PHI_CODES)}")
        if self.dt is None:
            object.__setattr__(self, "dt", self.tau / 20.0)
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        steps = round(self.tau / self.dt)
        if steps < 1 or abs(steps * self.dt - self.tau) > 1e-9 * self.tau:
            raise StepMismatch(f"dt={self.dt} does not divide tau={self.tau}")

    @property
    def steps_per_slot(self) -> int:
        return round(self.tau / self.dt)

    def to_dict(self) -> dict:
        return {
            "c_n": self.c_n,
            "c_a_plus": self.c_a_plus,
            "c_a_minus": self.c_a_minus,
            "tau": self.tau,
            "dt": self.dt,
            "phi": self.phi,
            "bounds": self.bounds.to_dict(),
        }


@dataclass(frozen=True)
class NetworkState:
    t: float
    x: np.ndarray
    A: np.ndarray


# ---------------------------------------------------------------------------
# inputs


@dataclass(frozen=True)
class Zero:
    @property
    def amplitude(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Constant:
    value: float

    @property
    def amplitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class Impulse:
    """``amplitude`` held on ``[0, hold)``; ``hold=None`` means one integration step."""

    amplitude: float
    hold: float | None = None


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    angular_frequency: float
    phase: float = 0.0


@dataclass
class Feedback:
    """State feedback ``u = feedforward - K (x - target)``.

    ``resynthesize``, when set, maps the current weight matrix to a fresh
    ``(K, feedforward)`` pair and is called at every slot start.
    """

    K: np.ndarray
    target: np.ndarray
    feedforward: np.ndarray
    resynthesize: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    target_residual: float = 0.0


@dataclass(frozen=True)
class InputSignal:
    """One open-loop channel per control node, plus optional state feedback."""

    channels: tuple
    feedback: Feedback | None = None

    @classmethod
    def zero(cls, g: SignedGraph) -> "InputSignal":
        return cls(tuple(Zero() for _ in g.control_nodes))

    def amplitudes(self) -> np.ndarray:
        return np.array([abs(getattr(c, "amplitude", 0.0)) for c in self.channels])

    def encode(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        kind = np.zeros(len(self.channels), dtype=np.int32)
        par = np.zeros((len(self.channels), 4))
        for k, ch in enumerate(self.channels):
            if isinstance(ch, Constant):
                kind[k] = _kernels.CONSTANT
                par[k, 0] = ch.value
            elif isinstance(ch, Impulse):
                kind[k] = _kernels.IMPULSE
                par[k, 0] = ch.amplitude
                par[k, 1] = dt if ch.hold is None else ch.hold
            elif isinstance(ch, Sinusoid):
                kind[k] = _kernels.SINUSOID
                par[k, :3] = ch.amplitude, ch.angular_frequency, ch.phase
            elif not isinstance(ch, Zero):
                raise TypeError(f"unsupported channel {ch!r}")
        return kind, par

    def open_loop(self, t: float, dt: float) -> np.ndarray:
        kind, par = self.encode(dt)
        return _kernels.python_backend.channel_values(kind, par, t)

    def evaluate(self, t: float, x: np.ndarray, dt: float) -> np.ndarray:
        u = self.open_loop(t, dt)
        if self.feedback is not None:
            fb = self.feedback
            u = u + fb.feedforward - fb.K @ (np.asarray(x) - fb.target)
        return u


def input_bound(g: SignedGraph, u: InputSignal) -> float:
    """sup_t ||B u(t)||_inf from the declared channel amplitudes (open loop only)."""
    if len(u.channels) != len(g.control_nodes):
        raise DimensionMismatch(
            f"{len(u.channels)} input channels for {len(g.control_nodes)} control nodes"
        )
    amps = u.amplitudes() * np.abs(np.asarray(g.gains))
    return float(amps.max()) if len(amps) else 0.0


# ---------------------------------------------------------------------------
# elementary maps


def clip(y: float, lo: float, hi: float) -> float:
    if lo > hi:
        raise BadInterval(f"empty interval [{lo}, {hi}]")
    if y > hi:
        return hi
    if y < lo:
        return lo
    return y


def phi(y, kind: str = "tanh"):
    """Odd, increasing activation onto (-1, 1) with phi(0) = 0."""
    return _kernels.python_backend.activation(np.asarray(y, dtype=float), _kernels.PHI_CODES[kind])


def hebbian_update(state: NetworkState, g: SignedGraph, p: NetworkParams) -> np.ndarray:
    A = np.array(state.A, dtype=float, order="C")
    ei, ej, sg = g.edge_arrays()
    b = p.bounds
    _kernels.hebbian_step(
        A, ei, ej, sg, np.ascontiguousarray(state.x, dtype=float),
        p.c_a_plus, p.c_a_minus, b.a_plus_lo, b.a_plus_hi, b.a_minus_lo, b.a_minus_hi,
        _kernels.PHI_CODES[p.phi],
    )
    return A


def state_derivative(x, A, u, p: NetworkParams, g: SignedGraph) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    A = np.asarray(A, dtype=float)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if x.shape != (g.n,) or A.shape != (g.n, g.n) or u.shape != (len(g.control_nodes),):
        raise DimensionMismatch(
            f"expected x ({g.n},), A ({g.n},{g.n}), u ({len(g.control_nodes)},); "
            f"got {x.shape}, {A.shape}, {u.shape}"
        )
    return -p.c_n * x + A @ x + g.input_matrix() @ u


# ---------------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class SlotResult:
    state: NetworkState
    times: np.ndarray
    xs: np.ndarray


def _steps_for(horizon: float, dt: float) -> int:
    steps = round(horizon / dt)
    if abs(steps * dt - horizon) > 1e-9 * max(horizon, dt):
        raise StepMismatch(f"horizon {horizon} is not a multiple of dt={dt}")
    return steps


def _slot_system(g: SignedGraph, p: NetworkParams, A: np.ndarray, u: InputSignal):
    B = g.input_matrix()
    M = A - p.c_n * np.eye(g.n)
    const = np.zeros(g.n)
    if u.feedback is not None:
        fb = u.feedback
        M = M - B @ fb.K
        const = B @ (fb.feedforward + fb.K @ fb.target)
    kind, par = u.encode(p.dt)
    return np.ascontiguousarray(M), const, np.ascontiguousarray(B), kind, par


def integrate_slot(
    state: NetworkState, u: InputSignal, p: NetworkParams, g: SignedGraph, horizon: float
) -> SlotResult:
    """Advance ``state.x`` over ``horizon`` (at most one slot) with ``A`` frozen."""
    if horizon > p.tau * (1 + 1e-9):
        raise StepMismatch(f"horizon {horizon} exceeds the slot length {p.tau}")
    steps = _steps_for(horizon, p.dt)
    x0 = np.ascontiguousarray(state.x, dtype=float)
    if x0.shape != (g.n,):
        raise DimensionMismatch(f"state has shape {x0.shape}, graph has {g.n} nodes")
    M, const, cols, kind, par = _slot_system(g, p, np.asarray(state.A, dtype=float), u)
    out = np.empty((steps + 1, g.n))
    _kernels.rk4_slot(M, const, cols, kind, par, x0, float(state.t), float(p.dt), steps, out)
    times = state.t + p.dt * np.arange(steps + 1)
    end = NetworkState(float(times[-1]), out[-1].copy(), state.A)
    return SlotResult(end, times, out)


@dataclass
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    snapshot_times: np.ndarray
    weights: np.ndarray  # (snapshots, edges), canonical edge order
    edges: list
    flags: np.ndarray  # True where the state-bound monitor fired
    x_max: float | None
    violations: list = field(default_factory=list)
    gains: list = field(default_factory=list)

    def weight_matrix(self, g: SignedGraph, index: int = -1) -> np.ndarray:
        return g.weight_matrix(self.weights[index])


def _decimal(v: float) -> Fraction:
    # shortest round-trip decimal, so 4.1 - 4 is exactly 1/10
    return Fraction(repr(float(v)))


def decay_slack(g: SignedGraph, p: NetworkParams) -> Fraction:
    """``c_n - max(d_max * a_plus_hi, d_max * |a_minus_lo|)`` in exact arithmetic."""
    d = max_out_degree(g)
    worst = max(d * _decimal(p.bounds.a_plus_hi), d * abs(_decimal(p.bounds.a_minus_lo)))
    return _decimal(p.c_n) - worst


def x_max_bound(g: SignedGraph, p: NetworkParams, bu_inf: float) -> float:
    """Radius of the forward-invariant box ``|x_i| <= x_max``.

    The ratio is formed exactly from the decimal parameter values and
    rounded once.
    """
    slack = decay_slack(g, p)
    if slack <= 0:
        raise ConditionViolated(
            f"c_n={p.c_n} does not exceed max(d_max*a_plus_hi, d_max*|a_minus_lo|) "
            f"(slack {float(slack)})"
        )
    return float(_decimal(bu_inf) / slack)


def equilibrium(g: SignedGraph, bounds: WeightBounds) -> tuple[np.ndarray, np.ndarray]:
    w = [bounds.a_plus_lo if e.sign == "plus" else bounds.a_minus_hi for e in g.edges]
    return np.zeros(g.n), g.weight_matrix(w)


def _check_weights(g, p, A, t, violations):
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_TOL:
        violations.append({"kind": "symmetry", "t": t, "value": float(np.abs(A - A.T).max())})
    mask = g.sign_matrix() != 0
    off = A[~mask]
    if np.any(off != 0.0):
        violations.append({"kind": "zero_pattern", "t": t, "value": float(np.abs(off).max())})
    for e in g.edges:
        lo, hi = p.bounds.interval(e.sign)
        w = A[e.i - 1, e.j - 1]
        if not lo <= w <= hi:
            violations.append({"kind": "weight_bound", "t": t, "edge": [e.i, e.j], "value": float(w)})


def simulate(
    g: SignedGraph,
    p: NetworkParams,
    u: InputSignal,
    x0,
    t_end: float,
    A0: np.ndarray | None = None,
) -> Trajectory:
    """Alternate RK4 slots and Hebbian updates from ``(x0, A0)`` up to ``t_end``.

    ``A0`` defaults to the graph's initial weights.  The state-bound
    monitor uses ``x_max`` from the declared open-loop amplitudes and is
    disabled (``x_max is None``) for feedback inputs or when the decay rate
    does not dominate.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (g.n,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, graph has {g.n} nodes")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if len(u.channels) != len(g.control_nodes):
        raise DimensionMismatch(
            f"{len(u.channels)} input channels for {len(g.control_nodes)} control nodes"
        )
    total = _steps_for(t_end, p.dt)
    sps = p.steps_per_slot
    full_slots, rem = divmod(total, sps)

    x_max = None
    if u.feedback is None:
        try:
            x_max = x_max_bound(g, p, input_bound(g, u))
        except ConditionViolated:
            x_max = None

    A = np.array(g.weight_matrix() if A0 is None else A0, dtype=float)
    ei, ej, _ = g.edge_arrays()
    xs = np.empty((total + 1, g.n))
    snaps = [A[ei, ej].copy()]
    snap_t = [0.0]
    violations: list = []
    gains: list = []
    _check_weights(g, p, A, 0.0, violations)

    x = x0.copy()
    xs[0] = x
    pos = 0
    signal = u
    for slot in range(full_slots + (1 if rem else 0)):
        steps = sps if slot < full_slots else rem
        if u.feedback is not None and u.feedback.resynthesize is not None:
            K, uff = u.feedback.resynthesize(A)
            signal = replace(u, feedback=replace(u.feedback, K=K, feedforward=uff))
        if signal.feedback is not None:
            gains.append(signal.feedback.K.copy())
        t0 = pos * p.dt
        res = integrate_slot(NetworkState(t0, x, A), signal, p, g, steps * p.dt)
        xs[pos + 1 : pos + steps + 1] = res.xs[1:]
        pos += steps
        x = res.xs[-1].copy()
        if steps == sps:
            t_b = pos * p.dt
            A = hebbian_update(NetworkState(t_b, x, A), g, p)
            snaps.append(A[ei, ej].copy())
            snap_t.append(t_b)
            _check_weights(g, p, A, t_b, violations)

    times = p.dt * np.arange(total + 1)
    if x_max is not None:
        flags = np.any(np.abs(xs) > x_max * (1 + STATE_BOUND_RTOL), axis=1)
        for k in np.flatnonzero(flags)[:1000]:
            node = int(np.argmax(np.abs(xs[k])))
            violations.append(
                {"kind": "state_bound", "t": float(times[k]), "node": node + 1, "value": float(xs[k, node])}
            )
    else:
        flags = np.zeros(total + 1, dtype=bool)
    return Trajectory(
        times=times,
        x=xs,
        snapshot_times=np.array(snap_t),
        weights=np.array(snaps),
        edges=g.pairs(),
        flags=flags,
        x_max=x_max,
        violations=violations,
        gains=gains,
    )


def monitor_report(traj: Trajectory, g: SignedGraph, p: NetworkParams) -> dict:
    _, A_eq = equilibrium(g, p.bounds)
    A_end = traj.weight_matrix(g)
    return {
        "x_max": traj.x_max,
        "max_abs_state": float(np.abs(traj.x).max()),
        "violations": traj.violations,
        "final_state_norm": float(np.abs(traj.x[-1]).max()),
        "final_weight_gap": float(np.abs(A_end - A_eq).max(initial=0.0)),
    }


def write_trajectory_csv(traj: Trajectory, path) -> None:
    n = traj.x.shape[1]
    with open(path, "w") as fh:
        fh.write(",".join(["t"] + [f"x_{i}" for i in range(1, n + 1)]) + "\n")
        for t, row in zip(traj.times, traj.x):
            fh.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")


def write_weights_csv(traj: Trajectory, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(["t"] + [f"w_{i}_{j}" for i, j in traj.edges]) + "\n")
        for t, row in zip(traj.snapshot_times, traj.weights):
            fh.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")


def snapshot_count(t_end: float, tau: float) -> int:
    return math.floor(t_end / tau + 1e-9) + 1
