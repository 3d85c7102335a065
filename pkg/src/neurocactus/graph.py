"""Signed symmetric digraphs and (generalized) sym-cactus certificates.

Node ids are 1-based everywhere in the public API; dense matrices are
0-based.  Each undirected edge record stands for the symmetric pair
``(i, j)`` / ``(j, i)`` and is stored once with ``i < j``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    BadControlNode,
    DuplicateEdge,
    GraphError,
    InfeasibleSize,
    SelfLoop,
    WeightOutOfBounds,
)

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class WeightBounds:
    """Closed weight intervals for inhibitory and excitatory edges."""

    a_minus_lo: float = -1.0
    a_minus_hi: float = -0.05
    a_plus_lo: float = 0.05
    a_plus_hi: float = 1.0

    def __post_init__(self):
        if not (self.a_minus_lo < self.a_minus_hi < 0 < self.a_plus_lo < self.a_plus_hi):
            raise GraphError(
                "weight bounds must satisfy a_minus_lo < a_minus_hi < 0 < a_plus_lo < a_plus_hi, "
                f"got {self}"
            )

    def interval(self, sign: str) -> tuple[float, float]:
        if sign == PLUS:
            return self.a_plus_lo, self.a_plus_hi
        return self.a_minus_lo, self.a_minus_hi

    @property
    def max_magnitude(self) -> float:
        return max(self.a_plus_hi, abs(self.a_minus_lo))

    def to_dict(self) -> dict:
        return {
            "a_minus_lo": self.a_minus_lo,
            "a_minus_hi": self.a_minus_hi,
            "a_plus_lo": self.a_plus_lo,
            "a_plus_hi": self.a_plus_hi,
        }


class Edge(NamedTuple):
    i: int
    j: int
    sign: str
    w0: float


@dataclass(frozen=True)
class SignedGraph:
    n: int
    edges: tuple[Edge, ...]
    control_nodes: tuple[int, ...]
    gains: tuple[float, ...]
    _index: Mapping[tuple[int, int], int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {(e.i, e.j): k for k, e in enumerate(self.edges)}
        )

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._index

    def edge(self, i: int, j: int) -> Edge:
        return self.edges[self._index[(min(i, j), max(i, j))]]

    def pairs(self) -> list[tuple[int, int]]:
        return [(e.i, e.j) for e in self.edges]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for e in self.edges:
            deg[e.i - 1] += 1
            deg[e.j - 1] += 1
        return deg

    def neighbors(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for e in self.edges:
            adj[e.i].add(e.j)
            adj[e.j].add(e.i)
        return adj

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """0-based endpoint arrays and +1/-1 sign codes, in canonical order."""
        ei = np.array([e.i - 1 for e in self.edges], dtype=np.intp)
        ej = np.array([e.j - 1 for e in self.edges], dtype=np.intp)
        sg = np.array([1 if e.sign == PLUS else -1 for e in self.edges], dtype=np.int8)
        return ei, ej, sg

    def weight_matrix(self, weights: Sequence[float] | None = None) -> np.ndarray:
        """Dense symmetric weight matrix; uses ``w0`` unless per-edge weights are given."""
        A = np.zeros((self.n, self.n))
        w = [e.w0 for e in self.edges] if weights is None else weights
        for e, val in zip(self.edges, w):
            A[e.i - 1, e.j - 1] = val
            A[e.j - 1, e.i - 1] = val
        return A

    def sign_matrix(self) -> np.ndarray:
        S = np.zeros((self.n, self.n), dtype=np.int8)
        for e in self.edges:
            s = 1 if e.sign == PLUS else -1
            S[e.i - 1, e.j - 1] = S[e.j - 1, e.i - 1] = s
        return S

    def input_matrix(self) -> np.ndarray:
        """N x K matrix with column k equal to ``gain_k * e_{node_k}``."""
        B = np.zeros((self.n, len(self.control_nodes)))
        for k, (node, gain) in enumerate(zip(self.control_nodes, self.gains)):
            B[node - 1, k] = gain
        return B

    def with_weights(self, weights: Sequence[float]) -> "SignedGraph":
        edges = tuple(e._replace(w0=float(w)) for e, w in zip(self.edges, weights))
        return SignedGraph(self.n, edges, self.control_nodes, self.gains)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [
                {"i": e.i, "j": e.j, "sign": e.sign, "w0": e.w0} for e in self.edges
            ],
            "control": [
                {"node": k, "gain": b} for k, b in zip(self.control_nodes, self.gains)
            ],
        }


def build_graph(
    n: int,
    edge_list: Iterable,
    control,
    bounds: WeightBounds | None = None,
) -> SignedGraph:
    """Validate raw edge and control records and return a :class:`SignedGraph`.

    ``edge_list`` items are ``(i, j, sign, w0)`` tuples or mappings with
    those keys.  ``control`` is a list of node ids (gain 1), ``(node, gain)``
    pairs, or mappings ``{"node", "gain"}``.  When ``bounds`` is given every
    initial weight must lie in its sign's closed interval.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    records: dict[tuple[int, int], Edge] = {}
    for raw in edge_list:
        if isinstance(raw, Mapping):
            i, j, sign, w0 = raw["i"], raw["j"], raw["sign"], raw["w0"]
        else:
            i, j, sign, w0 = raw
        i, j, w0 = int(i), int(j), float(w0)
        if i == j:
            raise SelfLoop(f"self-loop record ({i}, {j}, {sign}, {w0})")
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"edge ({i}, {j}) references a node outside 1..{n}")
        if sign in ("+", 1):
            sign = PLUS
        elif sign in ("-", -1):
            sign = MINUS
        if sign not in (PLUS, MINUS):
            raise GraphError(f"edge ({i}, {j}) has unknown sign {sign!r}")
        key = (min(i, j), max(i, j))
        if key in records:
            raise DuplicateEdge(f"duplicate record for pair {key}")
        if bounds is not None:
            lo, hi = bounds.interval(sign)
            if not lo <= w0 <= hi:
                raise WeightOutOfBounds(
                    f"edge {key} sign {sign} weight {w0} outside [{lo}, {hi}]"
                )
        elif (sign == PLUS) != (w0 > 0):
            raise WeightOutOfBounds(f"edge {key} weight {w0} contradicts sign {sign}")
        records[key] = Edge(key[0], key[1], sign, w0)

    nodes, gains = [], []
    for raw in control:
        if isinstance(raw, Mapping):
            node, gain = raw["node"], raw.get("gain", 1.0)
        elif isinstance(raw, (tuple, list)):
            node, gain = raw
        else:
            node, gain = raw, 1.0
        node, gain = int(node), float(gain)
        if not 1 <= node <= n:
            raise BadControlNode(f"control node {node} outside 1..{n}")
        if node in nodes:
            raise BadControlNode(f"control node {node} listed twice")
        if gain == 0.0:
            raise BadControlNode(f"control node {node} has zero gain")
        nodes.append(node)
        gains.append(gain)
    if not nodes:
        raise BadControlNode("at least one control node is required")

    edges = tuple(records[k] for k in sorted(records))
    return SignedGraph(n, edges, tuple(nodes), tuple(gains))


def graph_from_dict(data: Mapping, bounds: WeightBounds | None = None) -> SignedGraph:
    return build_graph(data["n"], data["edges"], data["control"], bounds)


def max_out_degree(g: SignedGraph) -> int:
    if not g.edges:
        return 0
    return int(g.degrees().max())


def relabel(g: SignedGraph, perm: Sequence[int]) -> SignedGraph:
    """Return ``g`` with node ``v`` renamed ``perm[v - 1]`` (a permutation of 1..n)."""
    if sorted(perm) != list(range(1, g.n + 1)):
        raise GraphError("perm must be a permutation of 1..n")
    edges = [(perm[e.i - 1], perm[e.j - 1], e.sign, e.w0) for e in g.edges]
    control = [(perm[k - 1], b) for k, b in zip(g.control_nodes, g.gains)]
    return build_graph(g.n, edges, control)


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class Singleton:
    node: int

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.node,)


@dataclass(frozen=True)
class SymCycle:
    """Nodes in cycle order; consecutive pairs and the wraparound are edges."""

    order: tuple[int, ...]

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.order

    def cycle_pairs(self) -> list[tuple[int, int]]:
        k = len(self.order)
        return [(self.order[t], self.order[(t + 1) % k]) for t in range(k)]


def component_from_list(nodes: Sequence[int]):
    nodes = tuple(int(v) for v in nodes)
    if len(nodes) == 1:
        return Singleton(nodes[0])
    return SymCycle(nodes)


@dataclass(frozen=True)
class CactusDecomposition:
    root: int
    components: tuple
    attachments: tuple[tuple[int, int], ...] = ()

    def nodes(self) -> set[int]:
        return {v for c in self.components for v in c.nodes}

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "components": [list(c.nodes) for c in self.components],
            "attachments": [list(p) for p in self.attachments],
        }


@dataclass(frozen=True)
class GeneralizedDecomposition:
    cacti: tuple[CactusDecomposition, ...]
    extra_edges: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "cacti": [c.to_dict() for c in self.cacti],
            "extra_edges": [list(p) for p in self.extra_edges],
        }


def cactus_from_dict(data: Mapping) -> CactusDecomposition:
    return CactusDecomposition(
        root=int(data["root"]),
        components=tuple(component_from_list(c) for c in data["components"]),
        attachments=tuple((int(a), int(b)) for a, b in data.get("attachments", [])),
    )


def decomposition_from_dict(data: Mapping) -> GeneralizedDecomposition:
    return GeneralizedDecomposition(
        cacti=tuple(cactus_from_dict(c) for c in data["cacti"]),
        extra_edges=tuple((int(a), int(b)) for a, b in data.get("extra_edges", [])),
    )


class Rejection(str, enum.Enum):
    BAD_COMPONENT = "BadComponent"
    UNKNOWN_NODE = "UnknownNode"
    DISJOINTNESS_VIOLATED = "DisjointnessViolated"
    ROOT_NOT_IN_FIRST = "RootNotInFirst"
    CYCLE_EDGE_MISSING = "CycleEdgeMissing"
    ATTACHMENT_EDGE_MISSING = "AttachmentEdgeMissing"
    MISSING_ATTACHMENT = "MissingAttachment"
    MULTIPLE_ATTACHMENTS = "MultipleAttachments"
    STRAY_ATTACHMENT = "StrayAttachment"
    NOT_SPANNING = "NotSpanning"
    DUPLICATE_ROOT = "DuplicateRoot"
    ROOT_NOT_CONTROL = "RootNotControl"
    EXTRA_EDGE_MISSING = "ExtraEdgeMissing"
    EXTRA_EDGE_INVALID = "ExtraEdgeInvalid"
    UNACCOUNTED_EDGE = "UnaccountedEdge"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Rejection | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "reason": None if self.reason is None else self.reason.value,
            "detail": self.detail,
        }


ACCEPT = Verdict(True)


def _reject(reason: Rejection, detail: str) -> Verdict:
    return Verdict(False, reason, detail)


def _cactus_edges(d: CactusDecomposition) -> set[tuple[int, int]]:
    used = set()
    for comp in d.components:
        if isinstance(comp, SymCycle):
            used.update((min(a, b), max(a, b)) for a, b in comp.cycle_pairs())
    used.update((min(a, b), max(a, b)) for a, b in d.attachments)
    return used


def validate_sym_cactus(g: SignedGraph, d: CactusDecomposition) -> Verdict:
    """Check a sym-cactus certificate against ``g``; the first failed clause is reported."""
    if not d.components:
        return _reject(Rejection.BAD_COMPONENT, "decomposition has no components")
    owner: dict[int, int] = {}
    for idx, comp in enumerate(d.components):
        nodes = comp.nodes
        if isinstance(comp, SymCycle) and (len(nodes) < 3 or len(set(nodes)) != len(nodes)):
            return _reject(
                Rejection.BAD_COMPONENT,
                f"component {idx + 1} {list(nodes)} is not a simple cycle of length >= 3",
            )
        for v in nodes:
            if not 1 <= v <= g.n:
                return _reject(Rejection.UNKNOWN_NODE, f"node {v} is not in the graph")
            if v in owner:
                return _reject(
                    Rejection.DISJOINTNESS_VIOLATED,
                    f"node {v} appears in components {owner[v] + 1} and {idx + 1}",
                )
            owner[v] = idx
    if owner.get(d.root) != 0:
        return _reject(Rejection.ROOT_NOT_IN_FIRST, f"root {d.root} is not in component 1")

    for idx, comp in enumerate(d.components):
        if isinstance(comp, SymCycle):
            for a, b in comp.cycle_pairs():
                if not g.has_edge(a, b):
                    return _reject(
                        Rejection.CYCLE_EDGE_MISSING,
                        f"cycle edge {a}-{b} of component {idx + 1} is not in the graph",
                    )

    per_component: dict[int, list[tuple[int, int]]] = {}
    for a, b in d.attachments:
        if a not in owner or b not in owner or owner[a] == owner[b]:
            return _reject(
                Rejection.STRAY_ATTACHMENT,
                f"attachment {a}-{b} does not join two components of this cactus",
            )
        if not g.has_edge(a, b):
            return _reject(
                Rejection.ATTACHMENT_EDGE_MISSING, f"attachment edge {a}-{b} is not in the graph"
            )
        later = max(owner[a], owner[b])
        per_component.setdefault(later, []).append((a, b))
    for idx in range(1, len(d.components)):
        found = per_component.get(idx, [])
        if not found:
            return _reject(
                Rejection.MISSING_ATTACHMENT,
                f"component {idx + 1} has no edge pair to components 1..{idx}",
            )
        if len(found) > 1:
            return _reject(
                Rejection.MULTIPLE_ATTACHMENTS,
                f"component {idx + 1} has {len(found)} attachment pairs {found}",
            )
    return ACCEPT


def validate_generalized(g: SignedGraph, gd: GeneralizedDecomposition) -> Verdict:
    """Check that the cacti partition all nodes and every other edge is declared extra."""
    owner: dict[int, int] = {}
    roots: set[int] = set()
    for k, cactus in enumerate(gd.cacti):
        verdict = validate_sym_cactus(g, cactus)
        if not verdict:
            return Verdict(False, verdict.reason, f"cactus {k + 1} (root {cactus.root}): {verdict.detail}")
        if cactus.root in roots:
            return _reject(Rejection.DUPLICATE_ROOT, f"root {cactus.root} roots two cacti")
        roots.add(cactus.root)
        if cactus.root not in g.control_nodes:
            return _reject(Rejection.ROOT_NOT_CONTROL, f"root {cactus.root} is not a control node")
        for v in cactus.nodes():
            if v in owner:
                return _reject(
                    Rejection.DISJOINTNESS_VIOLATED,
                    f"node {v} is in cacti {owner[v] + 1} and {k + 1}",
                )
            owner[v] = k
    missing = sorted(set(range(1, g.n + 1)) - set(owner))
    if missing:
        return _reject(Rejection.NOT_SPANNING, f"nodes {missing} are not covered by any cactus")

    accounted: set[tuple[int, int]] = set()
    for cactus in gd.cacti:
        accounted |= _cactus_edges(cactus)
    for a, b in gd.extra_edges:
        if not g.has_edge(a, b):
            return _reject(Rejection.EXTRA_EDGE_MISSING, f"extra edge {a}-{b} is not in the graph")
        if owner[a] == owner[b]:
            return _reject(
                Rejection.EXTRA_EDGE_INVALID,
                f"extra edge {a}-{b} lies inside cactus {owner[a] + 1}",
            )
        accounted.add((min(a, b), max(a, b)))
    for pair in g.pairs():
        if pair not in accounted:
            return _reject(
                Rejection.UNACCOUNTED_EDGE,
                f"graph edge {pair[0]}-{pair[1]} is neither a cactus edge nor a listed extra edge",
            )
    return ACCEPT


def dilation_free(g: SignedGraph) -> bool:
    """True when every node can be matched to a distinct neighbour or input column.

    The pattern ``[A | B]`` with zero diagonal then has full generic term
    rank.  A failure means some node set S (no inputs) has fewer than |S|
    neighbours, which pins a zero eigenvector orthogonal to every input
    column whatever the weights are.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    rows, cols = [], []
    for e in g.edges:
        rows += [e.i - 1, e.j - 1]
        cols += [e.j - 1, e.i - 1]
    for k, node in enumerate(g.control_nodes):
        rows.append(node - 1)
        cols.append(g.n + k)
    pattern = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n + len(g.control_nodes))
    )
    match = maximum_bipartite_matching(pattern, perm_type="column")
    return bool(np.all(match >= 0))


# ---------------------------------------------------------------------------
# generation


def generate_generalized(
    n: int,
    roots: Sequence[int],
    rng_seed: int,
    bounds: WeightBounds | None = None,
    sign_ratio: float = 0.8,
    *,
    cycle_prob: float = 0.5,
    max_cycle: int = 5,
    extra_edges: int = 0,
    max_degree: int | None = None,
    require_dilation_free: bool = True,
    max_attempts: int = 500,
) -> tuple[SignedGraph, GeneralizedDecomposition]:
    """Random generalized sym-cactus rooted at ``roots``; deterministic per seed.

    Every non-root node is assigned to a random cactus.  A cactus is a
    chain of components (sym-cycles of length 3..``max_cycle`` or
    singletons), each attached by one edge pair to a node of the component
    added just before it.  Chaining rather than attaching to arbitrary
    earlier nodes keeps pendant singletons from sharing a neighbour, which
    would make the pair uncontrollable under a uniform decay rate.

    ``extra_edges`` cross-cactus edges are then added where the degree cap
    allows.  Control gains are 1.

    Some sym-cacti (a 4-cycle carrying a pendant node, two pendants on one
    node) contain dilations and are uncontrollable for every weight choice
    because the decay term is the same at every node.  Draws are repeated
    from the same stream until :func:`dilation_free` holds, unless
    ``require_dilation_free`` is off.
    """
    bounds = bounds or WeightBounds()
    roots = [int(r) for r in roots]
    if not roots or n < len(roots):
        raise InfeasibleSize(f"cannot root {len(roots)} cacti in {n} nodes")
    if len(set(roots)) != len(roots) or not all(1 <= r <= n for r in roots):
        raise BadControlNode(f"roots {roots} must be distinct ids in 1..{n}")
    if not 0.0 <= sign_ratio <= 1.0:
        raise GraphError("sign_ratio must lie in [0, 1]")
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_attempts):
        records, cacti, extras = _draw_generalized(
            rng, n, roots, bounds, sign_ratio, cycle_prob, max_cycle, extra_edges, max_degree
        )
        g = build_graph(n, records, roots, bounds)
        if not require_dilation_free or dilation_free(g):
            return g, GeneralizedDecomposition(tuple(cacti), tuple(extras))
    raise InfeasibleSize(f"no dilation-free draw in {max_attempts} attempts (n={n}, roots={roots})")


def _draw_generalized(rng, n, roots, bounds, sign_ratio, cycle_prob, max_cycle, extra_edges, max_degree):
    others = [v for v in range(1, n + 1) if v not in roots]
    rng.shuffle(others)
    members: list[list[int]] = [[r] for r in roots]
    for v in others:
        members[int(rng.integers(len(roots)))].append(v)

    degree = {v: 0 for v in range(1, n + 1)}
    pairs: list[tuple[int, int]] = []
    cacti = []
    for nodes in members:
        comps = []
        attach = []
        pos = 0
        while pos < len(nodes):
            left = len(nodes) - pos
            if left >= 3 and rng.random() < cycle_prob:
                size = int(rng.integers(3, min(max_cycle, left) + 1))
                comp = SymCycle(tuple(nodes[pos : pos + size]))
                for a, b in comp.cycle_pairs():
                    pairs.append((a, b))
                    degree[a] += 1
                    degree[b] += 1
            else:
                size = 1
                comp = Singleton(nodes[pos])
            if comps:
                prev = comps[-1].nodes
                d1 = int(rng.choice(comp.nodes))
                d2 = int(rng.choice(prev))
                attach.append((d1, d2))
                pairs.append((d1, d2))
                degree[d1] += 1
                degree[d2] += 1
            comps.append(comp)
            pos += size
        cacti.append(CactusDecomposition(nodes[0], tuple(comps), tuple(attach)))

    owner = {v: k for k, nodes in enumerate(members) for v in nodes}
    cap = max_degree if max_degree is not None else n
    existing = {(min(a, b), max(a, b)) for a, b in pairs}
    candidates = [
        (a, b)
        for a, b in combinations(range(1, n + 1), 2)
        if owner[a] != owner[b] and (a, b) not in existing
    ]
    rng.shuffle(candidates)
    extras = []
    for a, b in candidates:
        if len(extras) >= extra_edges:
            break
        if degree[a] < cap and degree[b] < cap:
            extras.append((int(a), int(b)))
            degree[a] += 1
            degree[b] += 1
    pairs.extend(extras)

    records = []
    for a, b in pairs:
        sign = PLUS if rng.random() < sign_ratio else MINUS
        lo, hi = bounds.interval(sign)
        records.append((a, b, sign, float(rng.uniform(lo, hi))))
    return records, cacti, extras


# ---------------------------------------------------------------------------
# exhaustive search (small graphs only)


def _chordless_cycles(adj: dict[int, set[int]], allowed: set[int]) -> list[tuple[int, ...]]:
    """All chordless cycles (length >= 3) inside ``allowed``, each listed once."""
    found = []
    for start in sorted(allowed):
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            if len(path) >= 3 and start in adj[v]:
                # closing is forced: extending further would turn v-start into a chord
                if path[1] < path[-1]:
                    found.append(tuple(path))
                continue
            for w in adj[v]:
                if w not in allowed or w <= start or w in path:
                    continue
                if any(u in adj[w] for u in path[1:-1]):
                    continue
                stack.append((w, path + [w]))
    return found


def find_decomposition(
    g: SignedGraph, roots: Sequence[int] | None = None, max_nodes: int = 12
) -> GeneralizedDecomposition | None:
    """Exhaustive backtracking for a generalized sym-cactus certificate.

    Returns ``None`` when no decomposition rooted at ``roots`` (default: all
    control nodes) exists.  Exponential; refuses graphs above ``max_nodes``.
    """
    if g.n > max_nodes:
        raise InfeasibleSize(f"search is limited to {max_nodes} nodes, graph has {g.n}")
    roots = list(g.control_nodes if roots is None else roots)
    adj = g.neighbors()
    all_nodes = set(range(1, g.n + 1))
    comps = [(v,) for v in sorted(all_nodes)] + _chordless_cycles(adj, all_nodes)
    K = len(roots)
    others = [set(roots) - {r} for r in roots]
    failed: set = set()

    def attach_point(comp, covered):
        links = [(a, b) for a in comp for b in adj[a] if b in covered]
        return links[0] if len(links) == 1 else None

    def search(state, plan):
        taken = set().union(*state)
        if len(taken) == g.n:
            return plan
        if state in failed:
            return None
        for k in range(K):
            for comp in comps:
                if taken.intersection(comp) or others[k].intersection(comp):
                    continue
                if not state[k]:
                    if roots[k] not in comp:
                        continue
                    link = None
                else:
                    link = attach_point(comp, state[k])
                    if link is None:
                        continue
                nxt = state[:k] + (state[k] | frozenset(comp),) + state[k + 1 :]
                out = search(nxt, plan + [(k, comp, link)])
                if out is not None:
                    return out
            if not state[k]:
                # every cactus must be started before the others can grow past it
                break
        failed.add(state)
        return None

    plan = search(tuple(frozenset() for _ in range(K)), [])
    if plan is None:
        return None
    comps_of = [[] for _ in range(K)]
    attach_of = [[] for _ in range(K)]
    owner = {}
    for k, comp, link in plan:
        comps_of[k].append(component_from_list(comp))
        if link is not None:
            attach_of[k].append(link)
        for v in comp:
            owner[v] = k
    cacti = tuple(
        CactusDecomposition(roots[k], tuple(comps_of[k]), tuple(attach_of[k])) for k in range(K)
    )
    extras = tuple(p for p in g.pairs() if owner[p[0]] != owner[p[1]])
    gd = GeneralizedDecomposition(cacti, extras)
    return gd if validate_generalized(g, gd) else None


# ---------------------------------------------------------------------------
# JSON files


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_graph(path, bounds: WeightBounds | None = None) -> SignedGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh), bounds)


def save_graph(g: SignedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(g.to_dict()))


def load_decomposition(path) -> GeneralizedDecomposition:
    with open(path) as fh:
        return decomposition_from_dict(json.load(fh))


def save_decomposition(gd: GeneralizedDecomposition, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(gd.to_dict()))
