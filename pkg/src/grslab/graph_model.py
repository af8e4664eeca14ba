"""Bipartite row/column graph of a shortened sparsely-mixed GRS code and the
merge/prune reduction that predicts the dimension of its square."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

RED, BLUE, BLACK = "red", "blue", "black"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class MixedGrsGraph:
    """V-vertices are rows of T, U-vertices its columns; an edge joins row v
    and column u when T[v, u] != 0."""

    n_rows: int
    n_cols: int
    adjacency: tuple[frozenset[int], ...]
    shortened: frozenset[int]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def color(self, v: int) -> str:
        if v in self.shortened:
            return RED
        return BLUE if self.degree(v) == 1 else BLACK

    @property
    def degree2_rows(self) -> frozenset[int]:
        return frozenset(v for v in range(self.n_rows) if self.degree(v) == 2)

    def edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v in range(self.n_rows) for u in sorted(self.adjacency[v])]


@dataclass(frozen=True)
class ReducedGraphSummary:
    merged: tuple[frozenset[int], ...]  # surviving merged U-nodes, as column sets
    remaining_degree2: frozenset[int]
    vanished_degree1: frozenset[int]
    n_shortened: int
    vanished_columns: frozenset[int] = frozenset()
    log: tuple[str, ...] = field(default=(), compare=False)

    def merged_degrees(self) -> list[int]:
        return [len(x) for x in self.merged]


def build_graph(T, I: Iterable[int] = ()) -> MixedGrsGraph:
    T = np.asarray(T)
    if T.ndim != 2:
        raise GraphError("T must be a matrix")
    adj = []
    for v, row in enumerate(T):
        cols = frozenset(int(u) for u in np.flatnonzero(row))
        if not 1 <= len(cols) <= 2:
            raise GraphError(f"row {v} has weight {len(cols)}, expected 1 or 2")
        adj.append(cols)
    I = frozenset(int(i) for i in I)
    if any(not 0 <= i < T.shape[0] for i in I):
        raise GraphError("shortened position out of range")
    return MixedGrsGraph(T.shape[0], T.shape[1], tuple(adj), I)


def reduce_graph(G: MixedGrsGraph) -> ReducedGraphSummary:
    """Merge the column pairs of shortened weight-2 rows, then repeatedly prune
    columns hit by a shortened weight-1 row. Vertices are visited in
    ascending index order."""
    log: list[str] = []
    # U-node representative -> member columns
    members: dict[int, set[int]] = {u: {u} for u in range(G.n_cols)}
    rep = list(range(G.n_cols))

    def find(u: int) -> int:
        while rep[u] != u:
            rep[u] = rep[rep[u]]
            u = rep[u]
        return u

    alive_v = set(range(G.n_rows))
    for v in sorted(G.shortened):
        if G.degree(v) != 2:
            continue
        a, b = (find(u) for u in sorted(G.adjacency[v]))
        alive_v.discard(v)
        if a != b:
            lo, hi = min(a, b), max(a, b)
            rep[hi] = lo
            members[lo] |= members.pop(hi)
        log.append(f"merge row {v}: columns {sorted(members[min(a, b)])}")

    # current adjacency on representatives
    adj = {v: {find(u) for u in G.adjacency[v]} for v in alive_v}
    alive_u = set(members)
    vanished1: set[int] = set()
    vanished_cols: set[int] = set()
    orig_deg1 = {v for v in range(G.n_rows) if G.degree(v) == 1}

    def remove_row(v: int):
        alive_v.discard(v)
        adj.pop(v, None)
        if v in orig_deg1:
            vanished1.add(v)

    changed = True
    while changed:
        changed = False
        for v in sorted(alive_v):
            if v not in G.shortened or len(adj[v]) != 1:
                continue
            (u,) = adj[v]
            remove_row(v)
            partners = sorted(w for w in alive_v if w not in G.shortened and adj[w] == {u})
            if partners:
                remove_row(partners[0])
            for w in list(alive_v):
                adj[w].discard(u)
            alive_u.discard(u)
            vanished_cols |= members[u]
            log.append(f"prune row {v}: column node {u}" + (f", row {partners[0]}" if partners else ""))
            changed = True
            break

    merged = tuple(
        frozenset(members[u]) for u in sorted(alive_u) if len(members[u]) > 1
    )
    J2p = frozenset(v for v in alive_v if v not in G.shortened and len(adj[v]) == 2)
    return ReducedGraphSummary(merged, J2p, frozenset(vanished1), len(G.shortened),
                              frozenset(vanished_cols), tuple(log))


def predicted_square_dim(summary: ReducedGraphSummary, n: int, k: int, *, count: str = "columns") -> int:
    """3(n-k) - 1 - 2|I1| + |J2'| - |I| - sum(d(x) - 1) over merged nodes.

    Each pruned column is an evaluation point where every polynomial of the
    shortened code vanishes, which costs 2 in the square. With
    ``count="rows"`` the cost is charged per vanished degree-1 row (|I1|),
    which agrees with ``count="columns"`` unless a merged node is pruned: then
    all d of its columns vanish while only one degree-1 row disappears.
    """
    if count == "rows":
        vanished = len(summary.vanished_degree1)
    elif count == "columns":
        vanished = len(summary.vanished_columns)
    else:
        raise ValueError(f"unknown count rule {count!r}")
    return (
        3 * (n - k) - 1
        - 2 * vanished
        + len(summary.remaining_degree2)
        - summary.n_shortened
        - sum(d - 1 for d in summary.merged_degrees())
    )


def predicted_puncture_delta(summary: ReducedGraphSummary, i: int) -> int:
    return int(i in summary.remaining_degree2)


@dataclass(frozen=True)
class GraphSample:
    a: int
    predicted: int
    measured: int

    @property
    def match(self) -> bool:
        return self.predicted == self.measured


def sample_prediction(params, rng, sizes=None, pool: str = "all", count: str = "columns") -> GraphSample:
    """Fresh keypair and random shortening set I; compare the graph prediction
    with the measured dim Sh_I(C_pub^perp)^2. ``pool`` is "all" or "J1"."""
    from .bbcrs import keygen
    from .codes import code_dual
    from .distinguisher import feasibility, sq_dim_shortened

    rng = np.random.default_rng(rng)
    n, k = params.n, params.k
    if sizes is None:
        sizes = feasibility(n, k, params.m).feasible_a_range
    if not sizes:
        raise GraphError("no shortening size available")
    sk, pk = keygen(params, rng)
    a = int(rng.choice(list(sizes)))
    positions = sorted(sk.J1) if pool == "J1" else list(range(n))
    I = rng.choice(positions, size=a, replace=False).tolist()
    summary = reduce_graph(build_graph(sk.T, I))
    pred = predicted_square_dim(summary, n, k, count=count)
    meas = sq_dim_shortened(code_dual(pk.code()), I)
    return GraphSample(a, pred, meas)
