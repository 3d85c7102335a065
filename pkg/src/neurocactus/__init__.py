"""Neuromimetic network simulation on signed sym-cactus graphs.

Submodules: :mod:`graph` (topologies and certificates), :mod:`dynamics`
(hybrid ODE / Hebbian simulation), :mod:`control` (rank tests, stability,
LQR), :mod:`scenario` (declarative experiments) and :mod:`cli`.
"""

from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
