"""Tractability classification of UCQs for constant-delay enumeration.

``classify`` walks a fixed ladder of theorems, first match wins:

1. every disjunct has a free-connex union extension (Tractable);
2. an intractable disjunct receives no body-homomorphism from the others;
3. a cyclic disjunct receives body-homomorphisms only from body-isomorphic ones;
4. a union of intractable CQs without two body-isomorphic acyclic ones;
5. two body-isomorphic CQs: free-path and bypass guards;
6. several body-isomorphic acyclic CQs: union guards and isolation;
7. anything else is Unknown.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .extension import UnionExtension, VirtualAtom, bare
from .morphism import (
    ProvidesWitness,
    body_homs,
    has_body_hom,
    is_body_isomorphic,
    maximal_connex_subsets,
)
from .query import CQ, UCQ, QueryError, SharedBody, fresh_names, normalize_body_isomorphic, remove_redundant
from .structure import (
    FreePath,
    Hypergraph,
    JoinTree,
    contract_path,
    ext_connex_tree,
    free_paths,
    gyo_join_tree,
    is_acyclic,
    is_s_connex,
)

TRACTABLE, INTRACTABLE, UNKNOWN = "Tractable", "Intractable", "Unknown"

RUNGS = {
    1: "free-connex-union",
    2: "no-incoming-body-homomorphism",
    3: "decision-reduction",
    4: "union-of-intractable",
    5: "two-body-isomorphic",
    6: "missing-union-guard",
    7: "guarded-isolated",
}


@dataclass
class Verdict:
    kind: str
    theorem: str | None = None
    hypothesis: str | None = None
    certificate: object = None
    notes: list = field(default_factory=list)
    query: UCQ | None = None
    rung: int | None = None

    @property
    def tractable(self) -> bool:
        return self.kind == TRACTABLE

    def to_json(self) -> dict:
        cert = self.certificate
        if self.kind == TRACTABLE:
            cert = {"extensions": [e.to_json() for e in cert]}
        return {
            "kind": self.kind,
            "theorem": self.theorem,
            "rung": self.rung,
            "hypothesis": self.hypothesis,
            "certificate": cert,
            "notes": list(self.notes),
        }


# -- union extension search --------------------------------------------------


@dataclass
class SearchResult:
    extensions: dict  # CQ id -> UnionExtension or None
    providers: list
    notes: list
    exhausted: bool = False

    @property
    def ok(self) -> bool:
        return all(e is not None for e in self.extensions.values())

    def certificate(self, q: UCQ) -> list:
        return [self.extensions[c.id] for c in q]


def _var_key(c: CQ):
    rank = {v: i for i, v in enumerate(c.var_order)}
    return lambda v: rank[v]


class _Search:
    def __init__(self, q: UCQ, seeds: dict, budget: int):
        self.q = q
        self.seeds = seeds
        self.budget = budget
        self.names = fresh_names(set(q.arities), "V")
        self.homs = {}
        self.maximal = {}
        self.notes = []
        self.exhausted = False

    def homs_between(self, p: CQ, c: CQ):
        key = (p.id, c.id)
        if key not in self.homs:
            self.homs[key] = body_homs(p, c)
        return self.homs[key]

    def maximal_of(self, ext: UnionExtension):
        if id(ext) not in self.maximal:
            self.maximal[id(ext)] = maximal_connex_subsets(ext.edges(), ext.free)
        return self.maximal[id(ext)]

    def pool(self, c: CQ, providers: list) -> list:
        """Candidate virtual atom sets for ``c`` with one witness each,
        larger sets first."""
        base_edges = [frozenset(a.args) for a in c.body]
        found: dict = {}
        images = []
        for p in providers:
            for h in self.homs_between(p.base, c):
                for S in self.maximal_of(p):
                    W = h.image(S)
                    images.append((W, p, h, S))
                    if W not in found:
                        found[W] = ProvidesWitness(p, c.id, h, S, S, W)
        for W in self.seeds.get(c.id, ()):
            if W in found:
                continue
            for img, p, h, S in images:
                if W <= img:
                    V2 = frozenset(v for v in S if h(v) in W)
                    found[W] = ProvidesWitness(p, c.id, h, V2, S, W)
                    break
        out = [
            (W, w) for W, w in found.items()
            if len(W) > 1 and not any(W <= e for e in base_edges)
        ]
        out.sort(key=lambda t: (-len(t[0]), sorted(t[0])))
        return out

    def extension(self, c: CQ, chosen: list) -> UnionExtension:
        key = _var_key(c)
        atoms = []
        depth = 0
        for W, w in chosen:
            atoms.append(VirtualAtom(next(self.names), tuple(sorted(W, key=key)), w))
            depth = max(depth, w.provider.depth + 1)
        return UnionExtension(c, tuple(atoms), depth)

    def subsets(self, pool):
        tried = 0
        for k in range(1, len(pool) + 1):
            for combo in itertools.combinations(pool, k):
                tried += 1
                if tried > self.budget:
                    self.exhausted = True
                    return
                yield list(combo)


def union_extension_search(q: UCQ, seeds: dict | None = None, budget: int = 1 << 12,
                           max_rounds: int = 16) -> SearchResult:
    """Fixpoint search for a free-connex union extension of every disjunct.

    Round 0 uses the bare CQs as providers; each round adds the extensions
    found so far (free-connex ones and acyclic partial ones that make new
    variable sets connex).  Candidate atoms are the maximal provided sets
    plus the ``seeds`` (per CQ id) that are provided.
    """
    if seeds is None:
        seeds = constructive_seeds(q)
    s = _Search(q, seeds, budget)
    providers = [bare(c) for c in q]
    solved = {c.id: (bare(c) if bare(c).is_free_connex() else None) for c in q}
    connex_seen = {c.id: set(s.maximal_of(bare(c))) for c in q}
    for _ in range(max_rounds):
        changed = False
        fresh = []
        for c in q:
            if solved[c.id] is not None:
                continue
            pool = s.pool(c, providers)
            base = [a.args for a in c.body]
            partial = 0
            for chosen in s.subsets(pool):
                edges = base + [tuple(W) for W, _ in chosen]
                if not is_acyclic(edges):
                    continue
                if is_s_connex(edges, c.free):
                    solved[c.id] = s.extension(c, chosen)
                    fresh.append(solved[c.id])
                    changed = True
                    break
                if partial < 16:
                    new = [S for S in maximal_connex_subsets(edges, c.free)
                           if not any(S <= T for T in connex_seen[c.id])]
                    if new:
                        connex_seen[c.id].update(new)
                        fresh.append(s.extension(c, chosen))
                        partial += 1
                        changed = True
        providers.extend(fresh)
        if not changed:
            break
    notes = []
    if s.exhausted:
        notes.append(f"extension search hit its budget of {budget} candidate sets per CQ and round")
    for c in q:
        if solved[c.id] is None:
            notes.append(f"{c.name}: no free-connex union extension found")
    return SearchResult(solved, providers, notes, s.exhausted)


def constructive_seeds(q: UCQ) -> dict:
    """Candidate virtual-atom variable sets for body-isomorphic
    acyclic unions: the V_P sets of fully contracted tree paths and the
    nodes of union-guard trees, mapped into each disjunct's variables."""
    if len(q) < 2 or any(not c.self_join_free for c in q):
        return {}
    sb = normalize_body_isomorphic(q)
    if sb is None or not is_acyclic([a.args for a in sb.body]):
        return {}
    shared = sb.as_ucq()
    sets = []
    for c in shared:
        for P in free_paths(c):
            vp = contracted_path_vars(shared, P)
            if vp is not None:
                sets.append(vp)
            guard = union_guard_search(shared, P)
            if guard is not None:
                sets.extend(frozenset(t) for t in guard.triples)
    out = {}
    for ren, c in zip(sb.renamings, q):
        back = {v: k for k, v in ren.items()}
        seen = []
        for W in sets:
            mapped = frozenset(back[v] for v in W)
            if mapped not in seen:
                seen.append(mapped)
        out[c.id] = seen
    return out


def contracted_path_vars(shared: UCQ, P: FreePath) -> frozenset | None:
    """V_P: var(P) plus every variable occurring in two atoms of the fully
    contracted tree path between the first and the last edge of P."""
    body = shared[0].body
    t = gyo_join_tree([a.args for a in body])
    if t is None:
        return None
    z = P.vars
    first = [i for i, n in enumerate(t.nodes) if {z[0], z[1]} <= n]
    last = [i for i, n in enumerate(t.nodes) if {z[-2], z[-1]} <= n]
    if not first or not last:
        return None
    best = min(((a, b) for a in first for b in last), key=lambda ab: len(t.path(*ab)))
    path = t.path(*best)
    # keep one atom holding {z0,z1} and one holding {zk,zk+1}
    lo = max(i for i, n in enumerate(path) if {z[0], z[1]} <= t.nodes[n])
    hi = min(i for i, n in enumerate(path) if i >= lo and {z[-2], z[-1]} <= t.nodes[n])
    tree, tp = contract_path(t, path[lo], path[hi])
    counts = {}
    for n in tp:
        for v in tree.nodes[n]:
            counts[v] = counts.get(v, 0) + 1
    return frozenset(z) | frozenset(v for v, k in counts.items() if k > 1)


# -- structural predicates -----------------------------------------------------


def select_pivot(q: UCQ) -> CQ:
    """A disjunct that receives body-homomorphisms only from disjuncts it
    maps back into: the lowest-index member of the first source component
    of the body-homomorphism digraph."""
    n = len(q)
    has = [[i == j or has_body_hom(q[i], q[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        comp = {j for j in range(n) if has[i][j] and has[j][i]}
        if all(not has[k][j] for j in comp for k in range(n) if k not in comp):
            return q[min(comp)]
    return q[0]  # unreachable: a finite digraph has a source component


def _other_free_in_owner(owner: CQ, other: CQ) -> frozenset:
    if set(owner.body) == set(other.body):
        return other.free
    iso = is_body_isomorphic(other, owner)
    if iso is None:
        raise QueryError(f"{owner.name} and {other.name} are not body-isomorphic")
    return iso.image(other.free)


def free_path_guarded(owner: CQ, other: CQ):
    """(True, None) or (False, offending free-path)."""
    free = _other_free_in_owner(owner, other)
    for P in free_paths(owner):
        if not set(P.vars) <= free:
            return False, P
    return True, None


def subsequent_atom_pairs(q: CQ, P: FreePath):
    z = P.vars
    for i in range(1, len(z) - 1):
        left = [a for a in q.body if {z[i - 1], z[i]} <= a.vars]
        right = [a for a in q.body if {z[i], z[i + 1]} <= a.vars]
        for a in left:
            for b in right:
                yield a, b


def bypass_guarded(owner: CQ, other: CQ):
    """(True, None) or (False, (free-path, variable))."""
    free = _other_free_in_owner(owner, other)
    for P in free_paths(owner):
        for a, b in subsequent_atom_pairs(owner, P):
            for u in sorted(a.vars & b.vars, key=_var_key(owner)):
                if u not in free:
                    return False, (P, u)
    return True, None


@dataclass
class UnionGuard:
    path: FreePath
    sets: list
    triples: list
    tree_edges: list

    def to_json(self) -> dict:
        return {
            "path": list(self.path.vars),
            "sets": [sorted(s) for s in self.sets],
            "triples": [list(t) for t in self.triples],
            "tree_edges": [list(e) for e in self.tree_edges],
        }


def _frees(q) -> list:
    if isinstance(q, SharedBody):
        return q.frees()
    return [c.free for c in q]


def union_guard_search(q, P: FreePath) -> UnionGuard | None:
    """Interval DP: the pair (z_a, z_c) is guardable when c = a+1 or some
    head-covered triple (z_a, z_b, z_c) splits it into guardable pairs."""
    frees = _frees(q)
    z = P.vars
    last = len(z) - 1

    def covered(*idx):
        s = frozenset(z[i] for i in idx)
        return any(s <= f for f in frees)

    @lru_cache(maxsize=None)
    def split(a, c):
        if c == a + 1:
            return a  # sentinel: adjacent
        for b in range(a + 1, c):
            if covered(a, b, c) and split(a, b) is not None and split(b, c) is not None:
                return b
        return None

    if not covered(0, last) or split(0, last) is None:
        return None
    triples, tree_edges = [], []

    def build(a, c, parent):
        if c == a + 1:
            return
        b = split(a, c)
        me = len(triples)
        triples.append((z[a], z[b], z[c]))
        if parent is not None:
            tree_edges.append((parent, me))
        build(a, b, me)
        build(b, c, me)

    build(0, last, None)
    sets = [frozenset((z[0], z[last]))] + [frozenset(t) for t in triples]
    return UnionGuard(P, sets, triples, tree_edges)


def is_isolated(q, P: FreePath) -> bool:
    shared = q.as_ucq() if isinstance(q, SharedBody) else q
    owner = shared.by_id(P.owner)
    h = Hypergraph.from_sets([a.args for a in owner.body])
    if ext_connex_tree(h, frozenset(P.vars)) is None:
        return False
    mine = set(P.vars)
    return all(not (mine & set(R.vars)) for R in free_paths(owner) if R != P)


# -- the ladder ------------------------------------------------------------------


def _hyp(acyclic: bool) -> str:
    return "mat-mul" if acyclic else "hyperclique"


def classify(q: UCQ, budget: int = 1 << 12) -> Verdict:
    notes = []
    original = q
    q = remove_redundant(q)
    dropped = [c.name for c in original if c not in set(q)]
    if dropped:
        notes.append("redundant disjuncts removed: " + ", ".join(dropped))

    def verdict(kind, rung, hypothesis=None, certificate=None, extra=()):
        return Verdict(kind, RUNGS.get(rung) if kind != UNKNOWN else None, hypothesis, certificate, notes + list(extra), q, rung)

    search = union_extension_search(q, budget=budget)
    if search.ok:
        return verdict(TRACTABLE, 1, certificate=search.certificate(q))

    if any(not c.self_join_free for c in q):
        return Verdict(UNKNOWN, None, None, None,
                       notes + search.notes + ["self-joins present: lower-bound rungs skipped"], q, 7)

    n = len(q)
    hyper = [[a.args for a in c.body] for c in q]
    acyc = [is_acyclic(e) for e in hyper]
    fc = [is_s_connex(e, c.free) for e, c in zip(hyper, q)]
    has = [[i != j and has_body_hom(q[i], q[j]) for j in range(n)] for i in range(n)]
    iso = [[has[i][j] and has[j][i] for j in range(n)] for i in range(n)]

    for i, c in enumerate(q):
        if not fc[i] and not any(has[j][i] for j in range(n)):
            return verdict(INTRACTABLE, 2, _hyp(acyc[i]), {"cq": c.name})

    for i, c in enumerate(q):
        if not acyc[i] and all(not has[j][i] or iso[i][j] for j in range(n) if j != i):
            return verdict(INTRACTABLE, 3, "hyperclique", {"cq": c.name})

    if not any(fc) and not any(
        iso[i][j] and acyc[i] and acyc[j] for i in range(n) for j in range(i + 1, n)
    ):
        p = select_pivot(q)
        k = list(q).index(p)
        return verdict(INTRACTABLE, 4, _hyp(acyc[k]), {"cq": p.name})

    if n == 2 and iso[0][1]:
        if not acyc[0]:
            return verdict(INTRACTABLE, 5, "hyperclique", {"cq": q[0].name})
        shared = normalize_body_isomorphic(q).as_ucq()
        for a, b in ((0, 1), (1, 0)):
            ok, P = free_path_guarded(shared[a], shared[b])
            if not ok:
                return verdict(INTRACTABLE, 5, "mat-mul",
                               {"cq": q[a].name, "condition": "free-path guarded", "path": list(P.vars)})
        for a, b in ((0, 1), (1, 0)):
            ok, bad = bypass_guarded(shared[a], shared[b])
            if not ok:
                P, u = bad
                return verdict(INTRACTABLE, 5, "4-clique",
                               {"cq": q[a].name, "condition": "bypass guarded",
                                "path": list(P.vars), "variable": u})
        return verdict(UNKNOWN, 7, extra=search.notes + [
            "both disjuncts are free-path and bypass guarded, so a free-connex "
            "extension exists, but the search did not find it"])

    if n >= 2 and all(acyc) and all(iso[i][j] for i in range(n) for j in range(n) if i != j):
        sb = normalize_body_isomorphic(q)
        shared = sb.as_ucq()
        unisolated = []
        for c in shared:
            for P in free_paths(c):
                if union_guard_search(sb, P) is None:
                    return verdict(INTRACTABLE, 6, "mat-mul",
                                   {"cq": c.name, "path": list(P.vars)})
                if not is_isolated(sb, P):
                    unisolated.append(f"{c.name}{P}")
        if not unisolated:
            return verdict(UNKNOWN, 7, extra=search.notes + [
                "every free-path is union guarded and isolated, so a free-connex "
                "extension exists, but the search did not find it"])
        return verdict(UNKNOWN, 7, extra=search.notes + [
            "union guarded but not isolated: " + ", ".join(unisolated)])

    return verdict(UNKNOWN, 7, extra=search.notes + _nearest_miss(q, search))


def _nearest_miss(q: UCQ, search: SearchResult) -> list:
    out = []
    for c in q:
        if search.extensions.get(c.id) is not None:
            continue
        edges = [a.args for a in c.body]
        if not is_acyclic(edges):
            out.append(f"{c.name} is cyclic and no provided atoms make it free-connex")
            continue
        paths = ", ".join(str(P) for P in free_paths(c))
        out.append(f"{c.name} keeps unresolved free-paths: {paths}")
    return out


__all__ = [
    "Verdict", "SearchResult", "UnionGuard", "classify", "union_extension_search",
    "select_pivot", "free_path_guarded", "bypass_guarded", "union_guard_search",
    "is_isolated", "constructive_seeds", "contracted_path_vars", "subsequent_atom_pairs",
    "JoinTree", "TRACTABLE", "INTRACTABLE", "UNKNOWN",
]
