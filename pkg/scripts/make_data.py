"""Regenerate the graph, decomposition and scenario files under src/neurocactus/data.

The 14-node network is a generated stand-in: seed 0 of the generalized
sym-cactus generator with control nodes 1 and 9, two cross-cactus edges and
out-degree capped at 4.  It is not the original published instance, whose
edge list is not recoverable.
"""

from __future__ import annotations

import math
from pathlib import Path

from neurocactus.graph import (
    CactusDecomposition,
    GeneralizedDecomposition,
    build_graph,
    component_from_list,
    dumps_canonical,
    generate_generalized,
    max_out_degree,
    save_decomposition,
    save_graph,
    validate_generalized,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "neurocactus" / "data"
STANDIN_SEED = 0

PARAMS = {"c_n": 4.1, "c_a_plus": 0.9, "c_a_minus": 0.9, "tau": 0.2, "dt": 0.01, "phi": "tanh"}


def example5(with_extra: bool):
    edges = [(1, 2, "plus", 2.0), (3, 4, "plus", 1.0), (3, 5, "plus", 2.0), (4, 5, "plus", 1.0)]
    if with_extra:
        edges.append((2, 4, "minus", -0.5))
    g = build_graph(5, edges, [1, 3])
    gd = GeneralizedDecomposition(
        cacti=(
            CactusDecomposition(1, (component_from_list([1]), component_from_list([2])), ((2, 1),)),
            CactusDecomposition(3, (component_from_list([3, 4, 5]),), ()),
        ),
        extra_edges=((2, 4),) if with_extra else (),
    )
    assert validate_generalized(g, gd)
    return g, gd


def scenario(name, description, inputs, expectations, **extra):
    doc = {
        "schema": 1,
        "name": name,
        "description": description,
        "graph": "../net14_standin.json",
        "params": PARAMS,
        "inputs": inputs,
        "x0": 1.0,
        "t_end": 40.0,
        "expectations": expectations,
    }
    doc.update(extra)
    (DATA / "scenarios" / f"{name}.json").write_text(dumps_canonical(doc))


def main():
    (DATA / "scenarios").mkdir(parents=True, exist_ok=True)
    g, gd = generate_generalized(14, [1, 9], STANDIN_SEED, extra_edges=2, max_degree=4)
    assert max_out_degree(g) == 4 and validate_generalized(g, gd)
    save_graph(g, DATA / "net14_standin.json")
    save_decomposition(gd, DATA / "net14_standin.decomposition.json")

    for suffix, extra in (("", False), ("_edge24", True)):
        g5, gd5 = example5(extra)
        save_graph(g5, DATA / f"example5{suffix}.json")
        save_decomposition(gd5, DATA / f"example5{suffix}.decomposition.json")

    target = {"2": 2.0, "8": -2.0, "10": -0.5, "13": 1.5, "11": -1.0}
    (DATA / "lqr14_target.json").write_text(dumps_canonical({"target": target}))

    scenario(
        "impulse14",
        "Impulse of amplitude 2 on nodes 1 and 9, all states start at 1.",
        [{"node": 1, "type": "impulse", "amplitude": 2.0},
         {"node": 9, "type": "impulse", "amplitude": 2.0}],
        [{"check": "boundedness_condition"},
         {"check": "bound"},
         {"check": "convergence", "state_tol": 1e-3, "weight_tol": 1e-2},
         {"check": "rank"}],
    )
    scenario(
        "sinusoid14",
        "Inputs 3 sin(2t) on node 1 and 3 cos(2t) on node 9.",
        [{"node": 1, "type": "sinusoid", "amplitude": 3.0, "angular_frequency": 2.0, "phase": 0.0},
         {"node": 9, "type": "sinusoid", "amplitude": 3.0, "angular_frequency": 2.0,
          "phase": math.pi / 2}],
        [{"check": "boundedness_condition"},
         {"check": "bound", "stated_x_max": 10.0},
         {"check": "rank"}],
    )
    scenario(
        "lqr14",
        "LQR regulation from the all-ones state to a sparse target, Q = I, R = I.",
        [],
        [{"check": "rank"}, {"check": "target"}],
        lqr={"target": target, "q": 1.0, "r": 1.0, "recompute_each_slot": True},
    )


if __name__ == "__main__":
    main()
