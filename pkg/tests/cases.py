"""Random admissible network instances shared by the property suites."""

import numpy as np

from neurocactus.dynamics import Constant, Impulse, InputSignal, NetworkParams, Sinusoid
from neurocactus.graph import WeightBounds, generate_generalized, max_out_degree


def admissible_case(seed, n_range=(4, 20)):
    """Graph, parameters satisfying the decay condition, bounded inputs, and its rng."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(1, min(n, 4) + 1))
    roots = sorted(rng.choice(np.arange(1, n + 1), size=k, replace=False).tolist())
    bounds = WeightBounds(-float(rng.uniform(0.3, 1.0)), -0.05, 0.05, float(rng.uniform(0.3, 1.0)))
    g, _ = generate_generalized(n, roots, seed, bounds, extra_edges=int(rng.integers(0, 3)))
    c_n = max_out_degree(g) * bounds.max_magnitude + float(rng.uniform(0.05, 1.0))
    p = NetworkParams(
        c_n=c_n,
        c_a_plus=float(rng.uniform(0.5, 0.99)),
        c_a_minus=float(rng.uniform(0.5, 0.99)),
        bounds=bounds,
    )
    chans = []
    for _ in roots:
        pick = rng.integers(3)
        amp = float(rng.uniform(0.1, 3.0))
        if pick == 0:
            chans.append(Constant(amp * rng.choice([-1, 1])))
        elif pick == 1:
            chans.append(Sinusoid(amp, float(rng.uniform(0.5, 5.0)), float(rng.uniform(0, 6.3))))
        else:
            chans.append(Impulse(amp, 0.2))
    return g, p, InputSignal(tuple(chans)), rng
