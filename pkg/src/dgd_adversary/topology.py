"""Communication graphs and doubly stochastic mixing matrices.

Agents are indexed from 1 in every public surface (edge lists, configs,
CSV headers). Internally arrays are 0-based.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

MAX_GRAPH_ATTEMPTS = 1000
STOCHASTIC_TOL = 1e-12


class TopologyError(ValueError):
    """Raised for invalid graphs or graph-generation failures."""


@dataclass(frozen=True)
class Graph:
    """Undirected, connected graph on agents ``1..n``.

    Edges are stored once as sorted pairs ``(i, j)`` with ``i < j``.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    kind: str = "general"

    def __post_init__(self):
        if self.n < 1:
            raise TopologyError(f"agent count must be positive, got {self.n}")
        if self.kind not in ("complete", "general"):
            raise TopologyError(f"unknown graph kind {self.kind!r}")
        normalized = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise TopologyError(f"self-loop on agent {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise TopologyError(f"edge {(i, j)} outside agents 1..{self.n}")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if not is_connected(self.n, self.edges):
            raise TopologyError("graph is not connected")

    def neighbors(self, i: int) -> list[int]:
        """Sorted neighbor list of agent ``i`` (1-based)."""
        out = [b if a == i else a for a, b in self.edges if i in (a, b)]
        return sorted(out)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            adj[i - 1, j - 1] = adj[j - 1, i - 1] = True
        return adj

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def is_connected(n: int, edges) -> bool:
    """Breadth-first reachability from agent 1."""
    adj: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == n


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise TopologyError(f"complete graph needs n >= 2, got {n}")
    edges = frozenset(combinations(range(1, n + 1), 2))
    return Graph(n=n, edges=edges, kind="complete")


def random_connected_graph(n: int, edge_prob: float, seed: int,
                           max_attempts: int = MAX_GRAPH_ATTEMPTS) -> Graph:
    """Sample G(n, edge_prob) graphs until one is connected.

    Each candidate pair is kept independently with probability
    ``edge_prob``. The generator is seeded once, so the whole rejection
    sequence (and therefore the returned graph) is a function of
    ``(n, edge_prob, seed)``.

    Raises:
        TopologyError: if ``n < 2``, ``edge_prob`` is outside (0, 1], or no
            connected sample appears within ``max_attempts`` draws.
    """
    if n < 2:
        raise TopologyError(f"random graph needs n >= 2, got {n}")
    if not 0.0 < edge_prob <= 1.0:
        raise TopologyError(f"edge_prob must lie in (0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(1, n + 1), 2))
    for _ in range(max_attempts):
        keep = rng.random(len(pairs)) < edge_prob
        edges = [pr for pr, k in zip(pairs, keep) if k]
        if is_connected(n, edges):
            return Graph(n=n, edges=frozenset(edges), kind="general")
    raise TopologyError(
        f"no connected graph found for n={n}, edge_prob={edge_prob}, "
        f"seed={seed} after {max_attempts} attempts"
    )


def explicit_graph(n: int, edges) -> Graph:
    """Graph from a 1-based edge list; tagged complete if every pair is present."""
    g = Graph(n=n, edges=frozenset(tuple(e) for e in edges), kind="general")
    if n >= 2 and len(g.edges) == n * (n - 1) // 2:
        return Graph(n=n, edges=g.edges, kind="complete")
    return g


@dataclass(frozen=True)
class WeightMatrix:
    n: int
    entries: np.ndarray

    def __post_init__(self):
        w = np.array(self.entries, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "entries", w)
        if w.shape != (self.n, self.n):
            raise TopologyError(f"weight matrix shape {w.shape} != ({self.n}, {self.n})")

    def check(self, graph: Graph | None = None, tol: float = STOCHASTIC_TOL) -> list[str]:
        """Return the list of violated invariants (empty when valid)."""
        w = self.entries
        problems = []
        if np.any(w < 0):
            problems.append("negative entry")
        if not np.allclose(w, w.T, rtol=0.0, atol=tol):
            problems.append("not symmetric")
        if np.max(np.abs(w.sum(axis=1) - 1.0)) > tol:
            problems.append("row sums differ from 1")
        if np.max(np.abs(w.sum(axis=0) - 1.0)) > tol:
            problems.append("column sums differ from 1")
        if graph is not None:
            allowed = graph.adjacency() | np.eye(self.n, dtype=bool)
            if np.any((w > 0) & ~allowed):
                problems.append("weight on a non-edge")
        return problems


def metropolis_weights(g: Graph) -> WeightMatrix:
    """Metropolis-Hastings weights: ``1 / (1 + max(d_i, d_j))`` on edges.

    The diagonal absorbs the remaining mass so each row sums to one.
    """
    deg = g.degrees()
    w = np.zeros((g.n, g.n))
    for i, j in g.edges:
        v = 1.0 / (1.0 + max(deg[i - 1], deg[j - 1]))
        w[i - 1, j - 1] = w[j - 1, i - 1] = v
    # diagonal computed from the off-diagonal row sum, summed in a fixed order
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return WeightMatrix(n=g.n, entries=w)


def second_eigenvalue_magnitude(w: WeightMatrix) -> float:
    """Largest eigenvalue magnitude of W restricted to the mean-zero subspace."""
    if w.n == 1:
        return 0.0
    sym = 0.5 * (w.entries + w.entries.T)
    proj = sym - np.full_like(sym, 1.0 / w.n)
    return float(np.max(np.abs(np.linalg.eigvalsh(proj))))


def graph_from_config(block: dict, seed_offset: int = 0) -> Graph:
    """Build a graph from its config block.

    Accepted shapes::

        {"kind": "complete", "n": N}
        {"kind": "random", "n": N, "edge_prob": p, "seed": s}
        {"kind": "explicit", "n": N, "edges": [[i, j], ...]}

    ``seed_offset`` is added to the random-graph seed (replication index).
    """
    kind = block.get("kind")
    if kind == "complete":
        _expect_keys(block, {"kind", "n"})
        return complete_graph(int(block["n"]))
    if kind == "random":
        _expect_keys(block, {"kind", "n", "edge_prob", "seed"}, optional={"seed"})
        return random_connected_graph(int(block["n"]), float(block["edge_prob"]),
                                      int(block.get("seed", 0)) + seed_offset)
    if kind == "explicit":
        _expect_keys(block, {"kind", "n", "edges"})
        return explicit_graph(int(block["n"]), [tuple(e) for e in block["edges"]])
    raise TopologyError(f"unknown graph kind {kind!r}")


def _expect_keys(block: dict, allowed: set, optional: set = frozenset()):
    unknown = set(block) - allowed
    if unknown:
        raise TopologyError(f"unknown graph keys: {sorted(unknown)}")
    missing = allowed - set(optional) - set(block)
    if missing:
        raise TopologyError(f"missing graph keys: {sorted(missing)}")
