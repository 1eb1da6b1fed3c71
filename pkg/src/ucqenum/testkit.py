"""Brute-force oracle, executable reduction gadgets and random generators."""
from __future__ import annotations

import itertools
import random

from .engine.database import Database
from .query import CQ, UCQ, Atom, QueryError, make_ucq
from .structure import FreePath, is_acyclic

BOTTOM = "⊥"


# -- oracle ------------------------------------------------------------------------


def _relations(db) -> dict:
    if isinstance(db, Database):
        return db.relations
    return {k: list(v) for k, v in db.items()}


def cq_homomorphisms(q: CQ, rels: dict):
    """All assignments var(q) -> values satisfying every atom (naive
    backtracking, atoms ordered by relation size)."""
    atoms = sorted(q.body, key=lambda a: len(rels.get(a.relation, ())))
    mu = {}

    def go(i):
        if i == len(atoms):
            yield dict(mu)
            return
        a = atoms[i]
        for t in rels.get(a.relation, ()):
            if len(t) != len(a.args):
                continue
            added = []
            ok = True
            for v, c in zip(a.args, t):
                have = mu.get(v, mu)
                if have is mu:
                    mu[v] = c
                    added.append(v)
                elif have != c:
                    ok = False
                    break
            if ok:
                yield from go(i + 1)
            for v in added:
                del mu[v]

    yield from go(0)


def brute_force_cq(q: CQ, db) -> set:
    rels = _relations(db)
    return {tuple(m[v] for v in q.head) for m in cq_homomorphisms(q, rels)}


def brute_force_eval(q, db) -> set:
    """Answer set of a CQ or UCQ.  Over a Database the values are interned
    ids; over a plain dict they are whatever the dict holds."""
    if isinstance(q, CQ):
        return brute_force_cq(q, db)
    out = set()
    for c in q:
        out |= brute_force_cq(c, db)
    return out


# -- variable tagging ----------------------------------------------------------------


def tag(value, var) -> str:
    return f"{value}#{var}"


def untag(value) -> str:
    return str(value).rpartition("#")[0]


def gen_var_tagged(q: UCQ, pivot, db) -> tuple:
    """Tag every value with the pivot variable at its position and leave the
    relations outside the pivot empty.  Returns (rows, tau) where ``tau``
    strips the tags from an answer tuple."""
    p = pivot if isinstance(pivot, CQ) else q.by_id(pivot)
    src = db.decoded() if isinstance(db, Database) else db
    rows = {name: [] for name in q.arities}
    for a in p.body:
        for t in src.get(a.relation, ()):
            rows[a.relation].append(tuple(tag(c, v) for c, v in zip(t, a.args)))
    return rows, lambda ans: tuple(untag(v) for v in ans)


# -- mat-mul ----------------------------------------------------------------------


def _owner(q: UCQ, P: FreePath) -> CQ:
    return q.by_id(P.owner)


def default_split(q: UCQ, P: FreePath):
    """Index of the first path variable not free in the partner disjunct,
    or None for the plain endpoint/interior layout."""
    others = [c for c in q if c.id != P.owner]
    if len(others) != 1:
        return None
    free = others[0].free
    for i, z in enumerate(P.vars):
        if z not in free:
            return i if 0 < i < len(P.vars) - 1 else None
    return None


def matmul_layout(P: FreePath, split=None) -> tuple:
    """(V_x, V_z, V_y) for a split index or the plain layout."""
    z = P.vars
    last = len(z) - 1
    if split is None:
        return {z[0]}, set(z[1:last]), {z[last]}
    if not 0 < split < last:
        raise QueryError(f"split {split} is not an interior position of {P}")
    return set(z[:split]), {z[split]}, set(z[split + 1:])


def gen_matmul(A, B, q: UCQ, P: FreePath, split="auto") -> dict:
    """Encode Boolean matrices A, B (sets of 1-entries (row, col)) into the
    relations of P's disjunct.  Atoms without a V_y variable carry A, the
    others carry B; positions off the path hold ⊥."""
    if split == "auto":
        split = default_split(q, P)
    Vx, Vz, Vy = matmul_layout(P, split)
    target = _owner(q, P)

    def tau(a, b, c, v):
        if v in Vx:
            return a
        if v in Vz:
            return b
        if v in Vy:
            return c
        return BOTTOM

    rows = {name: [] for name in q.arities}
    for atom in target.body:
        if any(v in Vy for v in atom.args):
            rows[atom.relation] = [tuple(tau(BOTTOM, str(b), str(c), v) for v in atom.args) for b, c in sorted(B)]
        else:
            rows[atom.relation] = [tuple(tau(str(a), str(b), BOTTOM, v) for v in atom.args) for a, b in sorted(A)]
    return rows


def bool_product(A, B, n) -> set:
    """Direct triple loop."""
    out = set()
    for a in range(1, n + 1):
        for c in range(1, n + 1):
            for b in range(1, n + 1):
                if (a, b) in A and (b, c) in B:
                    out.add((a, c))
                    break
    return out


def endpoint_pairs(q: UCQ, P: FreePath, rows) -> set:
    target = _owner(q, P)
    i, j = target.head.index(P.vars[0]), target.head.index(P.vars[-1])
    return {(a[i], a[j]) for a in brute_force_cq(target, rows)}


def all_matrices(n):
    cells = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1)]
    for mask in range(1 << len(cells)):
        yield frozenset(c for k, c in enumerate(cells) if mask >> k & 1)


def matmul_exhaustive(q: UCQ, P: FreePath, n=3, split="auto") -> list:
    """Check the encoding against ``bool_product`` for every pair of n×n
    matrices.  The query is evaluated in two halves: the A-carrying atoms
    are joined once per A and the B-carrying atoms once per B (both by the
    naive oracle), and each pair is finished with a hash join on the
    shared variables.  Returns the mismatching (A, B) pairs."""
    if split == "auto":
        split = default_split(q, P)
    _, _, Vy = matmul_layout(P, split)
    target = _owner(q, P)
    left_atoms = [a for a in target.body if not any(v in Vy for v in a.args)]
    right_atoms = [a for a in target.body if any(v in Vy for v in a.args)]
    lvars = sorted({v for a in left_atoms for v in a.args})
    rvars = sorted({v for a in right_atoms for v in a.args})
    shared = [v for v in lvars if v in set(rvars)]
    z0, zl = P.vars[0], P.vars[-1]
    left_cq = CQ(tuple(lvars), tuple(left_atoms), 0, "L")
    right_cq = CQ(tuple(rvars), tuple(right_atoms), 0, "R")

    def side(cq, M, is_left):
        rows = gen_matmul(M if is_left else set(), set() if is_left else M, q, P, split)
        keyed = {}
        end = z0 if is_left else zl
        for m in cq_homomorphisms(cq, rows):
            keyed.setdefault(tuple(m[v] for v in shared), set()).add(m[end])
        return keyed

    mats = list(all_matrices(n))
    lefts = [side(left_cq, A, True) for A in mats]
    rights = [side(right_cq, B, False) for B in mats]
    # bitmask product: row a of A against column c of B
    def rowmask(A, a):
        return sum(1 << b for b in range(1, n + 1) if (a, b) in A)

    def colmask(B, c):
        return sum(1 << b for b in range(1, n + 1) if (b, c) in B)

    rm = [[rowmask(A, a) for a in range(1, n + 1)] for A in mats]
    cm = [[colmask(B, c) for c in range(1, n + 1)] for B in mats]
    bad = []
    for ia, L in enumerate(lefts):
        for ib, R in enumerate(rights):
            got = set()
            for k, xs in L.items():
                ys = R.get(k)
                if ys:
                    got.update((x, y) for x in xs for y in ys)
            want = {(str(a + 1), str(c + 1)) for a in range(n) for c in range(n) if rm[ia][a] & cm[ib][c]}
            if got != want:
                bad.append((mats[ia], mats[ib]))
    return bad


# -- triangles and 4-cliques ---------------------------------------------------------


def triangles(G) -> list:
    """Ordered triangles (every permutation) of an undirected edge list."""
    adj = {}
    for u, v in G:
        if u != v:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
    out = set()
    for u in adj:
        for v in adj[u]:
            for w in adj[u] & adj[v]:
                out.add((u, v, w))
    return sorted(out)


def triangle_target(q: UCQ) -> tuple:
    """(shared-body UCQ, owner CQ, P, u) for the first bypass violation of
    a two-disjunct body-isomorphic union."""
    from .classifier import bypass_guarded
    from .query import normalize_body_isomorphic

    sb = normalize_body_isomorphic(q)
    if sb is None or len(q) != 2:
        raise QueryError("triangle gadget needs two body-isomorphic disjuncts")
    shared = sb.as_ucq()
    for a, b in ((0, 1), (1, 0)):
        ok, bad = bypass_guarded(shared[a], shared[b])
        if not ok:
            P, u = bad
            return shared, shared[a], P, u
    raise QueryError("no bypass-unguarded free-path to encode")


def gen_triangle_list(G, q: UCQ, P: FreePath | None = None, u=None) -> dict:
    """Every atom of the target gets the triangles of G, with z0 and z2
    carrying the first vertex, z1 the second, u the third, others ⊥."""
    if P is None or u is None:
        q, target, P, u = triangle_target(q)
    else:
        target = _owner(q, P)
    z0, z1, z2 = P.vars

    def tau(t, v):
        a, b, c = t
        if v in (z0, z2):
            return a
        if v == z1:
            return b
        if v == u:
            return c
        return BOTTOM

    tri = triangles(G)
    rows = {name: [] for name in q.arities}
    for atom in target.body:
        rows[atom.relation] = sorted({tuple(str(tau(t, v)) for v in atom.args) for t in tri})
    return rows


def clique_witnesses(G, q: UCQ) -> list:
    """Owner answers whose path endpoints are distinct and adjacent in G;
    nonempty iff G has a 4-clique."""
    shared, owner, P, u = triangle_target(q)
    rows = gen_triangle_list(G, q)
    i, j = owner.head.index(P.vars[0]), owner.head.index(P.vars[-1])
    E = {frozenset((str(a), str(b))) for a, b in G}
    return sorted(a for a in brute_force_cq(owner, rows) if a[i] != a[j] and frozenset((a[i], a[j])) in E)


def has_four_clique(G) -> bool:
    adj = {}
    for u, v in G:
        if u != v:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
    for quad in itertools.combinations(sorted(adj), 4):
        if all(b in adj[a] for a, b in itertools.combinations(quad, 2)):
            return True
    return False


def random_graph(seed, n, p=0.5) -> list:
    rng = random.Random(seed)
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < p]


# -- structure oracles ---------------------------------------------------------------


def _prufer_trees(k):
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(k) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(k) if degree[i] == 1]
        edges.append((u, v))
        yield edges


def running_intersection(nodes, edges) -> bool:
    adj = {i: set() for i in range(len(nodes))}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    for v in set().union(*nodes) if nodes else ():
        holders = {i for i, n in enumerate(nodes) if v in n}
        start = next(iter(holders))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in holders and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != holders:
            return False
    return True


def exhaustive_join_tree(edges):
    """A join tree over the distinct edges found by trying every labelled
    tree, or None."""
    nodes = []
    for e in edges:
        e = frozenset(e)
        if e not in nodes:
            nodes.append(e)
    for tree in _prufer_trees(len(nodes)):
        if running_intersection(nodes, tree):
            return nodes, tree
    return None


def brute_union_guard(frees, P: FreePath) -> bool:
    """Existence of a union guard by trying every family of head-covered
    subsets of var(P)."""
    z = P.vars
    idx = {v: i for i, v in enumerate(z)}
    covered = [frozenset(s) for k in range(1, len(z) + 1) for s in itertools.combinations(z, k)
               if any(set(s) <= f for f in frees)]
    target = frozenset((z[0], z[-1]))
    if target not in covered:
        return False
    others = [s for s in covered if s != target]
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            U = set(extra) | {target}
            if all(
                any(frozenset((x, z[b], y)) in U for b in range(idx[x] + 1, idx[y]))
                for u in U for x in u for y in u if idx[x] + 1 < idx[y]
            ):
                return True
    return False


# -- random generators ----------------------------------------------------------------


def gen_random(seed, schema: dict, n: int, domain: int) -> Database:
    """``n`` random tuples per relation (before deduplication) over the
    values 0..domain-1."""
    rng = random.Random(seed)
    rows = {}
    for name in sorted(schema):
        k = schema[name]
        rows[name] = [tuple(str(rng.randrange(domain)) for _ in range(k)) for _ in range(n)]
    return Database.from_rows(rows, schema)


def random_rows(seed, schema: dict, n: int, domain: int) -> dict:
    rng = random.Random(seed)
    return {
        name: {tuple(str(rng.randrange(domain)) for _ in range(schema[name])) for _ in range(n)}
        for name in sorted(schema)
    }


def gen_random_cq(rng, atoms=3, variables=4, max_arity=3, head=None, prefix="R", id=0) -> CQ:
    names = [f"v{i}" for i in range(variables)]
    body = []
    for j in range(atoms):
        k = rng.randint(1, max_arity)
        body.append(Atom(f"{prefix}{j}", tuple(rng.choice(names) for _ in range(k))))
    used = sorted({v for a in body for v in a.args}, key=names.index)
    size = rng.randint(0, len(used)) if head is None else min(head, len(used))
    hd = tuple(rng.sample(used, size))
    return CQ(hd, tuple(body), id, f"Q{id + 1}")


def gen_random_query(seed, disjuncts=1, atoms=3, variables=4, max_arity=3, acyclic=False) -> UCQ:
    """Small random UCQ; all disjuncts share one schema and head arity."""
    rng = random.Random(seed)
    for _ in range(1000):
        first = gen_random_cq(rng, atoms, variables, max_arity)
        if acyclic and not is_acyclic([a.args for a in first.body]):
            continue
        schema = {a.relation: len(a.args) for a in first.body}
        cqs = [first]
        while len(cqs) < disjuncts:
            c = _random_over(rng, schema, len(first.head), variables, len(cqs))
            if c is not None and (not acyclic or is_acyclic([a.args for a in c.body])):
                cqs.append(c)
        return make_ucq(cqs)
    raise RuntimeError("could not generate an acyclic query")


def _random_over(rng, schema, arity, variables, id):
    names = [f"v{i}" for i in range(variables)]
    rels = rng.sample(sorted(schema), rng.randint(1, len(schema)))
    body = tuple(Atom(r, tuple(rng.choice(names) for _ in range(schema[r]))) for r in rels)
    used = sorted({v for a in body for v in a.args}, key=names.index)
    if len(used) < arity and arity:
        return None
    return CQ(tuple(rng.sample(used, arity)), body, id, f"Q{id + 1}")


def gen_planted(seed, q: UCQ, n: int, domain: int | None = None) -> Database:
    """Random instance with answers guaranteed: about n/2 random
    assignments per disjunct are written into its atoms, and every relation
    gets up to n/2 uniformly random noise tuples."""
    rng = random.Random(seed)
    domain = domain or max(2, n)
    rows = {name: [] for name in sorted(q.arities)}
    for c in q:
        for _ in range(max(1, n // (2 * len(q)))):
            mu = {v: str(rng.randrange(domain)) for v in c.var_order}
            for a in c.body:
                rows[a.relation].append(tuple(mu[v] for v in a.args))
    for name in sorted(q.arities):
        k = q.arities[name]
        rows[name] += [tuple(str(rng.randrange(domain)) for _ in range(k)) for _ in range(n // 2)]
    return Database.from_rows(rows, q.arities)
