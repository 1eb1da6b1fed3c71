"""Hypergraphs, join trees, ext-S-connex trees and free-paths."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .query import CQ, QueryError

VarSet = frozenset


@dataclass
class Hypergraph:
    """Hyperedges are sets; atoms with the same variable set share an edge.

    ``sources[i]`` lists the atom indexes that produced edge ``i``.
    """

    vertices: frozenset
    edges: list
    sources: list

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[str]]) -> "Hypergraph":
        edges, sources, where = [], [], {}
        for i, s in enumerate(sets):
            s = frozenset(s)
            if not s:
                raise ValueError("hyperedges must be nonempty")
            if s in where:
                sources[where[s]].append(i)
            else:
                where[s] = len(edges)
                edges.append(s)
                sources.append([i])
        vertices = frozenset().union(*edges) if edges else frozenset()
        return cls(vertices, edges, sources)

    def neighbors(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            for v in e:
                adj[v] |= e
        for v in adj:
            adj[v].discard(v)
        return adj

    def edge_of_atom(self, atom_index: int) -> int:
        for i, src in enumerate(self.sources):
            if atom_index in src:
                return i
        raise IndexError(atom_index)


def hypergraph_of(q: CQ, extra: Iterable[Iterable[str]] = ()) -> Hypergraph:
    """H(Q), optionally with additional edges appended after the atoms."""
    return Hypergraph.from_sets([a.args for a in q.body] + [tuple(e) for e in extra])


@dataclass
class JoinTree:
    """A tree over variable sets.

    ``origin[i]`` is the index of the hyperedge node ``i`` stands for, and
    ``projection[i]`` marks nodes that are strict subsets of that edge
    (the inclusive-extension nodes).
    """

    nodes: list
    tree_edges: list
    origin: list = field(default_factory=list)
    projection: list = field(default_factory=list)

    def __post_init__(self):
        if not self.origin:
            self.origin = list(range(len(self.nodes)))
        if not self.projection:
            self.projection = [False] * len(self.nodes)

    def adjacency(self) -> list:
        adj = [[] for _ in self.nodes]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def path(self, src: int, dst: int) -> list:
        """Node indexes on the unique tree path from src to dst."""
        adj = self.adjacency()
        parent = {src: None}
        stack = [src]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in parent:
                    parent[w] = u
                    stack.append(w)
        if dst not in parent:
            raise ValueError(f"nodes {src} and {dst} are not connected")
        out = [dst]
        while out[-1] != src:
            out.append(parent[out[-1]])
        return out[::-1]

    def rooted(self, root: int, allowed=None) -> tuple[list, list]:
        """BFS order and parent array from ``root``, optionally confined to
        the node set ``allowed``."""
        adj = self.adjacency()
        parent = [None] * len(self.nodes)
        order, seen = [root], {root}
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for w in adj[u]:
                if w not in seen and (allowed is None or w in allowed):
                    seen.add(w)
                    parent[w] = u
                    order.append(w)
        return order, parent

    def is_tree(self) -> bool:
        n = len(self.nodes)
        if n == 0:
            return not self.tree_edges
        if len(self.tree_edges) != n - 1:
            return False
        order, _ = self.rooted(0)
        return len(order) == n

    def running_intersection(self) -> bool:
        adj = self.adjacency()
        allvars = set().union(*self.nodes) if self.nodes else set()
        for v in allvars:
            holders = [i for i, s in enumerate(self.nodes) if v in s]
            seen, stack = {holders[0]}, [holders[0]]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen and v in self.nodes[w]:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != len(holders):
                return False
        return True

    def is_valid(self) -> bool:
        return self.is_tree() and self.running_intersection()

    def to_json(self) -> dict:
        return {
            "nodes": [sorted(s) for s in self.nodes],
            "edges": [list(e) for e in self.tree_edges],
            "origin": list(self.origin),
            "projection": list(self.projection),
        }


@dataclass
class ExtConnexTree:
    tree: JoinTree
    connex: list
    S: frozenset

    @property
    def nodes(self):
        return self.tree.nodes

    def check(self, hyper: Hypergraph) -> bool:
        return check_ext_connex(self, hyper)

    def to_json(self) -> dict:
        d = self.tree.to_json()
        d["connex"] = sorted(self.connex)
        d["S"] = sorted(self.S)
        return d


# -- acyclicity ---------------------------------------------------------------


def gyo_join_tree(edges: Sequence[Iterable[str]] | Hypergraph) -> JoinTree | None:
    """Join tree by ear removal, or None if the hypergraph is cyclic.

    Duplicate sets are allowed and become separate nodes.  Ties go to the
    lowest-index ear and then the lowest-index witness.
    """
    if isinstance(edges, Hypergraph):
        edges = edges.edges
    sets = [frozenset(e) for e in edges]
    n = len(sets)
    if n == 0:
        return JoinTree([], [])
    alive = list(range(n))
    count: dict = {}
    for s in sets:
        for v in s:
            count[v] = count.get(v, 0) + 1
    tree_edges = []
    while len(alive) > 1:
        for e in alive:
            shared = frozenset(v for v in sets[e] if count[v] > 1)
            witness = next(
                (f for f in alive if f != e and shared <= sets[f]), None
            )
            if witness is not None:
                break
        else:
            return None
        tree_edges.append((witness, e))
        alive.remove(e)
        for v in sets[e]:
            count[v] -= 1
    return JoinTree(sets, tree_edges)


@lru_cache(maxsize=1 << 16)
def _acyclic(sets: tuple) -> bool:
    return gyo_join_tree(list(sets)) is not None


def is_acyclic(edges: Iterable[Iterable[str]]) -> bool:
    return _acyclic(_canon(edges))


def _canon(edges) -> tuple:
    return tuple(sorted({frozenset(e) for e in edges}, key=sorted))


def is_s_connex(edges: Iterable[Iterable[str]], S: Iterable[str]) -> bool:
    """Both H and H plus the edge S are acyclic (and S covers only vertices
    of H)."""
    edges = _canon(edges)
    S = frozenset(S)
    verts = frozenset().union(*edges) if edges else frozenset()
    if not S <= verts:
        return False
    if not _acyclic(edges):
        return False
    return not S or _acyclic(_canon(list(edges) + [S]))


# -- ext-S-connex trees -------------------------------------------------------


def ext_connex_tree(h: Hypergraph, S: Iterable[str]) -> ExtConnexTree | None:
    """An ext-S-connex tree for ``h`` or None when h is not S-connex.

    Nodes that are copies of hyperedges carry ``origin`` = edge index and
    ``projection`` False; the subset nodes of the connex part carry the
    index of the edge they were cut from.
    """
    S = frozenset(S)
    if not S <= h.vertices:
        raise QueryError(f"S contains variables outside the hypergraph: {sorted(S - h.vertices)}")
    base = gyo_join_tree(h.edges)
    if base is None:
        return None
    if not S:
        return ExtConnexTree(base, [], S)
    withS = gyo_join_tree(list(h.edges) + [S])
    if withS is None:
        return None
    result = _build_connex(h, S, base, withS)
    if not check_ext_connex(result, h):
        raise AssertionError("ext-connex construction produced an invalid tree")
    return result


def _build_connex(h, S, base: JoinTree, withS: JoinTree) -> ExtConnexTree:
    m = len(h.edges)
    # connex part: base tree restricted to S, empty nodes spliced out
    nodes = [e & S for e in h.edges]
    adj = {i: set() for i in range(m)}
    for a, b in base.tree_edges:
        adj[a].add(b)
        adj[b].add(a)
    for i in range(m):
        if nodes[i]:
            continue
        nbrs = sorted(adj.pop(i))
        for w in nbrs:
            adj[w].discard(i)
        for w in nbrs[1:]:
            adj[nbrs[0]].add(w)
            adj[w].add(nbrs[0])
    keep = sorted(adj)
    connex_edges = {(min(a, b), max(a, b)) for a in adj for b in adj[a]}

    # hang the components of withS minus its S-node off the connex part
    s_node = m
    order, parent = withS.rooted(s_node)
    all_nodes = [nodes[i] for i in keep]
    all_origin = [i for i in keep]
    all_proj = [nodes[i] != h.edges[i] for i in keep]
    pos = {i: k for k, i in enumerate(keep)}
    edges = [(pos[a], pos[b]) for a, b in sorted(connex_edges)]
    copy = {}
    for u in order[1:]:
        copy[u] = len(all_nodes)
        all_nodes.append(h.edges[u])
        all_origin.append(u)
        all_proj.append(False)
        p = parent[u]
        if p == s_node:
            anchor = pos.get(u)
            if anchor is None:
                # e ∩ S empty: any connex node works
                anchor = 0
            edges.append((anchor, copy[u]))
        else:
            edges.append((copy[p], copy[u]))
    connex = set(range(len(keep)))
    return _merge_duplicates(
        ExtConnexTree(JoinTree(all_nodes, edges, all_origin, all_proj), sorted(connex), S)
    )


def _merge_duplicates(t: ExtConnexTree) -> ExtConnexTree:
    """Contract tree edges whose endpoints hold the same set."""
    tree = t.tree
    n = len(tree.nodes)
    rep = list(range(n))

    def find(i):
        while rep[i] != i:
            rep[i] = rep[rep[i]]
            i = rep[i]
        return i

    for a, b in tree.tree_edges:
        if tree.nodes[a] == tree.nodes[b]:
            ra, rb = find(a), find(b)
            # keep the copy of an original edge when there is one
            if tree.projection[ra] and not tree.projection[rb]:
                ra, rb = rb, ra
            elif tree.projection[ra] == tree.projection[rb] and rb < ra:
                ra, rb = rb, ra
            rep[rb] = ra
    roots = sorted({find(i) for i in range(n)})
    newpos = {r: k for k, r in enumerate(roots)}
    connex = sorted({newpos[find(i)] for i in t.connex})
    edges = []
    for a, b in tree.tree_edges:
        ra, rb = newpos[find(a)], newpos[find(b)]
        if ra != rb:
            edges.append((ra, rb))
    jt = JoinTree(
        [tree.nodes[r] for r in roots],
        edges,
        [tree.origin[r] for r in roots],
        [tree.projection[r] for r in roots],
    )
    return ExtConnexTree(jt, connex, t.S)


def check_ext_connex(t: ExtConnexTree, h: Hypergraph) -> bool:
    tree = t.tree
    if not tree.is_valid():
        return False
    nodeset = set(tree.nodes)
    if any(e not in nodeset for e in h.edges):
        return False
    if any(not any(n <= e for e in h.edges) for n in tree.nodes):
        return False
    if not t.connex:
        return not t.S
    cset = set(t.connex)
    order, _ = tree.rooted(t.connex[0], allowed=cset)
    if len(order) != len(cset):
        return False
    return frozenset().union(*(tree.nodes[i] for i in t.connex)) == t.S


def is_free_connex(q: CQ, extra: Iterable[Iterable[str]] = ()) -> tuple[bool, ExtConnexTree | None]:
    t = ext_connex_tree(hypergraph_of(q, extra), q.free)
    return t is not None, t


# -- free-paths ---------------------------------------------------------------


@dataclass(frozen=True)
class FreePath:
    vars: tuple
    owner: int = 0

    @property
    def ends(self) -> tuple:
        return self.vars[0], self.vars[-1]

    @property
    def interior(self) -> tuple:
        return self.vars[1:-1]

    def __len__(self):
        return len(self.vars)

    def __str__(self) -> str:
        return "(" + ",".join(self.vars) + ")"


def free_paths_of(edges, free, order: Sequence[str], owner: int = 0) -> list:
    """All free-paths of the hypergraph ``edges`` with free variables
    ``free``.  ``order`` ranks variables; each path is reported once, starting
    at its lower-ranked endpoint."""
    h = edges if isinstance(edges, Hypergraph) else Hypergraph.from_sets(edges)
    adj = h.neighbors()
    free = frozenset(free)
    rank = {v: i for i, v in enumerate(order)}
    for v in sorted(h.vertices):
        rank.setdefault(v, len(rank))
    out = []

    def extend(path, onpath):
        last = path[-1]
        for w in sorted(adj[last], key=rank.__getitem__):
            if w in onpath:
                continue
            # chordless: w may touch only the last vertex of the path
            if any(w in adj[p] for p in path[:-1]):
                continue
            if w in free:
                if len(path) >= 2 and rank[path[0]] < rank[w]:
                    out.append(FreePath(tuple(path) + (w,), owner))
            else:
                path.append(w)
                onpath.add(w)
                extend(path, onpath)
                path.pop()
                onpath.discard(w)

    for x in sorted(free & h.vertices, key=rank.__getitem__):
        extend([x], {x})
    return out


def free_paths(q: CQ, extra: Iterable[Iterable[str]] = ()) -> list:
    return free_paths_of(
        hypergraph_of(q, extra), q.free, tuple(q.head) + q.var_order, q.id
    )


# -- path contraction ---------------------------------------------------------


def contract_path(t: JoinTree, src: int, dst: int) -> tuple[JoinTree, list]:
    """Apply contraction steps to the tree path src..dst until none applies.

    A step picks a subpath A_a..A_b (b-a >= 2) and a tree edge (A_j, A_j+1)
    on it with A_j ∩ A_j+1 ⊆ A_a ∩ A_b, removes that edge and links A_a to
    A_b directly.
    """
    n = len(t.nodes)
    if not (0 <= src < n and 0 <= dst < n):
        raise ValueError("contract_path: endpoint not in tree")
    tree = JoinTree(list(t.nodes), list(t.tree_edges), list(t.origin), list(t.projection))
    while True:
        path = tree.path(src, dst)
        step = _find_contraction(tree.nodes, path)
        if step is None:
            return tree, path
        (ja, jb), (a, b) = step
        tree.tree_edges = [
            e for e in tree.tree_edges if set(e) != {ja, jb}
        ] + [(a, b)]


def _find_contraction(nodes, path):
    s = len(path)
    for a in range(s):
        for b in range(s - 1, a + 1, -1):
            common = nodes[path[a]] & nodes[path[b]]
            for j in range(a, b):
                if nodes[path[j]] & nodes[path[j + 1]] <= common:
                    return (path[j], path[j + 1]), (path[a], path[b])
    return None


def is_fully_contracted(t: JoinTree, path: list) -> bool:
    return _find_contraction(t.nodes, path) is None


# -- serialization ------------------------------------------------------------


def tree_to_json(t: JoinTree | ExtConnexTree) -> str:
    return json.dumps(t.to_json(), sort_keys=True)


def tree_to_dot(t: JoinTree | ExtConnexTree, name: str = "T") -> str:
    connex = set(t.connex) if isinstance(t, ExtConnexTree) else set()
    tree = t.tree if isinstance(t, ExtConnexTree) else t
    lines = [f"graph {name} {{"]
    for i, s in enumerate(tree.nodes):
        style = ', style="dashed"' if i in connex else ""
        lines.append(f'  n{i} [label="{", ".join(sorted(s))}"{style}];')
    for a, b in tree.tree_edges:
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines)
