"""Routed trees: rootward flows, basis-threshold costs, rent/buy splits."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InvalidTreeError
from .graph import Edge, Instance, UnionFind


def basis_threshold(index: int, eps: float) -> float:
    """Threshold of the index-th basis function, (1 + eps) ** index."""
    return (1.0 + eps) ** index


@dataclass(frozen=True)
class RoutedTree:
    """A tree over the instance plus the demand flow each edge carries rootward.

    Edges with zero flow are legal (they cost nothing under every threshold)
    and are kept in the structure.
    """

    instance: Instance
    edge_ids: tuple[int, ...]
    flows: tuple[int, ...]

    @cached_property
    def flow_map(self) -> dict[int, int]:
        return dict(zip(self.edge_ids, self.flows))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        by_id = self.instance.edge_by_id
        return tuple(by_id[eid] for eid in self.edge_ids)

    @cached_property
    def vertices(self) -> frozenset[int]:
        touched = {self.instance.root}
        for e in self.edges:
            touched.add(e.u)
            touched.add(e.v)
        return frozenset(touched)

    @property
    def total_length(self) -> float:
        return sum(e.length for e in self.edges)


def compute_flows(
    root: int, demands: Mapping[int, int], edges: Sequence[Edge]
) -> dict[int, int]:
    """Rootward flow per edge of a tree: the demand hanging below it.

    Assumes ``edges`` form a tree whose root component covers all demand
    vertices; use :func:`route` when that needs checking.
    """
    adj: dict[int, list[Edge]] = {root: []}
    for e in edges:
        adj.setdefault(e.u, []).append(e)
        adj.setdefault(e.v, []).append(e)
    order: list[tuple[int, Edge | None]] = [(root, None)]
    seen = {root}
    for v, _ in order:
        for e in adj[v]:
            w = e.other(v)
            if w not in seen:
                seen.add(w)
                order.append((w, e))
    subtree = {v: demands.get(v, 0) for v in seen}
    flows: dict[int, int] = {}
    for v, via in reversed(order):
        if via is None:
            continue
        flows[via.eid] = subtree[v]
        subtree[via.other(v)] += subtree[v]
    return flows


def route(g: Instance, edge_ids: Iterable[int]) -> RoutedTree:
    """Validate an edge set as a routing tree and compute its flows.

    The edges must be acyclic, hang together with the root, and span every
    demand vertex.
    """
    ids = tuple(sorted(set(edge_ids)))
    by_id = g.edge_by_id
    edges = []
    for eid in ids:
        if eid not in by_id:
            raise InvalidTreeError(f"unknown edge id {eid}")
        edges.append(by_id[eid])

    touched = {g.root}
    for e in edges:
        touched.add(e.u)
        touched.add(e.v)
    uf = UnionFind(touched)
    for e in edges:
        if not uf.union(e.u, e.v):
            raise InvalidTreeError("cyclic edge set")

    adj: dict[int, list[Edge]] = {v: [] for v in touched}
    for e in edges:
        adj[e.u].append(e)
        adj[e.v].append(e)
    seen = {g.root}
    queue = deque([g.root])
    while queue:
        v = queue.popleft()
        for e in adj[v]:
            w = e.other(v)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    for v, _amount in g.demand_items:
        if v not in seen:
            raise InvalidTreeError(f"demand vertex not spanned: {v}")
    if len(seen) != len(touched):
        raise InvalidTreeError("edge set is not connected to the root")

    flows = compute_flows(g.root, g.demands, edges)
    return RoutedTree(instance=g, edge_ids=ids, flows=tuple(flows[eid] for eid in ids))


def basis_cost(tree: RoutedTree, threshold: float) -> float:
    """Cost of the tree when each edge pays length * min(flow, threshold)."""
    total = 0.0
    for e, flow in zip(tree.edges, tree.flows):
        total += e.length * (flow if flow < threshold else threshold)
    return total


@dataclass(frozen=True)
class RentBuyDecomposition:
    """Split of a routed tree at one basis threshold.

    Edges at or above the threshold are bought (their plain lengths sum to
    ``buy_cost``); the rest are rented at flow-weighted cost ``rent_cost``.
    The core is the root plus every endpoint of a bought edge.
    """

    index: int
    threshold: float
    bought: frozenset[int]
    rent_cost: float
    buy_cost: float
    core: frozenset[int]

    @property
    def total_cost(self) -> float:
        return self.rent_cost + self.threshold * self.buy_cost


def decompose(tree: RoutedTree, index: int, eps: float) -> RentBuyDecomposition:
    """Classify each edge as bought (flow >= threshold) or rented.

    Flows are exact integers, so the boundary test is exact whenever the
    threshold is an integer; otherwise a 1e-12 relative band below the
    threshold still counts as bought, guarding float error in (1+eps)**i.
    """
    threshold = basis_threshold(index, eps)
    cutoff = threshold if threshold == math.floor(threshold) else threshold * (1.0 - 1e-12)
    bought: list[int] = []
    rent_cost = 0.0
    buy_cost = 0.0
    core = {tree.instance.root}
    for e, flow in zip(tree.edges, tree.flows):
        if flow >= cutoff:
            bought.append(e.eid)
            buy_cost += e.length
            core.add(e.u)
            core.add(e.v)
        else:
            rent_cost += e.length * flow
    return RentBuyDecomposition(
        index=index,
        threshold=threshold,
        bought=frozenset(bought),
        rent_cost=rent_cost,
        buy_cost=buy_cost,
        core=frozenset(core),
    )
