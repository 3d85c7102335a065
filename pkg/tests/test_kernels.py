import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neurocactus import _kernels, _pykernels
from neurocactus.dynamics import Impulse, InputSignal, NetworkParams, Sinusoid, simulate

compiled = _kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def _system(rng, n, k):
    M = np.ascontiguousarray(rng.normal(size=(n, n)) - 3 * np.eye(n))
    const = rng.normal(size=n)
    cols = np.ascontiguousarray(rng.normal(size=(n, k)))
    kind = rng.integers(0, 4, size=k).astype(np.int32)
    par = np.zeros((k, 4))
    par[:, 0] = rng.uniform(-3, 3, k)
    par[:, 1] = rng.uniform(0.005, 2, k)
    par[:, 2] = rng.uniform(0, 6, k)
    return M, const, cols, kind, par


@needs_compiled
@given(st.integers(1, 16), st.integers(1, 4), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_rk4_backends_agree(n, k, seed):
    rng = np.random.default_rng(seed)
    M, const, cols, kind, par = _system(rng, n, k)
    x0 = rng.normal(size=n)
    a = np.empty((21, n))
    b = np.empty((21, n))
    _pykernels.rk4_slot(M, const, cols, kind, par, x0, 0.4, 0.01, 20, a)
    compiled.rk4_slot(M, const, cols, kind, par, x0, 0.4, 0.01, 20, b)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)


@needs_compiled
@pytest.mark.parametrize("code", [0, 1, 2])
@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_hebbian_backends_agree(code, seed):
    rng = np.random.default_rng(seed)
    n = 8
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    if not pairs:
        pairs = [(0, 1)]
    ei = np.array([p[0] for p in pairs], dtype=np.intp)
    ej = np.array([p[1] for p in pairs], dtype=np.intp)
    sign = rng.choice(np.array([-1, 1], dtype=np.int8), len(pairs))
    A = np.zeros((n, n))
    for (i, j), s in zip(pairs, sign):
        A[i, j] = A[j, i] = rng.uniform(0.05, 1) * s
    x = rng.normal(size=n) * 2
    a, b = A.copy(), A.copy()
    args = (0.9, 0.8, 0.05, 1.0, -1.0, -0.05, code)
    _pykernels.hebbian_step(a, ei, ej, sign, x, *args)
    compiled.hebbian_step(b, ei, ej, sign, x, *args)
    assert np.allclose(a, b, rtol=0, atol=1e-15)
    assert np.array_equal(a, a.T)


@needs_compiled
def test_full_run_backends_agree(g14, monkeypatch):
    u = InputSignal((Impulse(2.0), Sinusoid(3.0, 2.0)))
    fast = simulate(g14, NetworkParams(), u, np.ones(14), 4.0)
    monkeypatch.setattr(_kernels, "rk4_slot", _pykernels.rk4_slot)
    monkeypatch.setattr(_kernels, "hebbian_step", _pykernels.hebbian_step)
    slow = simulate(g14, NetworkParams(), u, np.ones(14), 4.0)
    assert np.allclose(fast.x, slow.x, rtol=0, atol=1e-12)
    assert np.allclose(fast.weights, slow.weights, rtol=0, atol=1e-12)


def test_pure_flag_selects_fallback():
    env = dict(os.environ, NEUROCACTUS_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import neurocactus; print(neurocactus.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"


def test_impulse_hold_window():
    kind = np.array([_pykernels.IMPULSE], dtype=np.int32)
    par = np.array([[2.0, 0.01, 0.0, 0.0]])
    assert _pykernels.channel_values(kind, par, 0.0)[0] == 2.0
    assert _pykernels.channel_values(kind, par, 0.005)[0] == 2.0
    assert _pykernels.channel_values(kind, par, 0.01)[0] == 0.0
