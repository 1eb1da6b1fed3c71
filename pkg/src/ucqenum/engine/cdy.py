"""Constant-delay Yannakakis: node binding, full reduction, enumeration over
the connex subtree, and the constant-time membership test."""
from __future__ import annotations

from ..query import Atom
from ..structure import ExtConnexTree, Hypergraph, ext_connex_tree
from . import kernels
from .steps import StepCounter


class EngineError(RuntimeError):
    pass


class CDYPlan:
    """Preprocessed state for one acyclic query body over a fixed tree.

    ``atoms`` are Atom objects (virtual ones included); ``rel_of(i)`` returns
    the row list bound to atom ``i``.  ``S`` is the set the connex subtree
    covers.
    """

    def __init__(self, atoms, S, rel_of, steps: StepCounter | None = None,
                 tree: ExtConnexTree | None = None):
        self.atoms = list(atoms)
        self.steps = steps or StepCounter()
        self.hyper = Hypergraph.from_sets([a.args for a in self.atoms])
        self.S = frozenset(S)
        if tree is None:
            tree = ext_connex_tree(self.hyper, self.S)
            if tree is None:
                raise EngineError(f"body is not {sorted(self.S)}-connex")
        self.ctree = tree
        t = tree.tree
        rank = {}
        for a in self.atoms:
            for v in a.args:
                rank.setdefault(v, len(rank))
        self.vars = [tuple(sorted(s, key=rank.__getitem__)) for s in t.nodes]
        self.pos = [{v: i for i, v in enumerate(vs)} for vs in self.vars]
        self.root = tree.connex[0] if tree.connex else 0
        self.order, self.parent = t.rooted(self.root)
        self.rel = self._bind(rel_of)
        self._reduce()
        self._index()

    # -- preprocessing ------------------------------------------------------

    def _bind(self, rel_of):
        t = self.ctree.tree
        edge_rel = {}

        def bind_edge(e):
            if e in edge_rel:
                return edge_rel[e]
            target = tuple(sorted(self.hyper.edges[e], key=lambda v: self._first(v)))
            out = None
            for ai in self.hyper.sources[e]:
                a = self.atoms[ai]
                rows = rel_of(ai)
                if rows is None:
                    raise EngineError(f"atom {a} is not bound to a relation")
                first = {}
                eqs = []
                for i, v in enumerate(a.args):
                    if v in first:
                        eqs.append((first[v], i))
                    else:
                        first[v] = i
                self.steps.add(len(rows) + 1)
                proj = kernels.project(rows, [first[v] for v in target], eqs)
                if out is None:
                    out = proj
                else:
                    self.steps.add(len(out) + 1)
                    out = kernels.intersect(out, set(proj))
            edge_rel[e] = (target, out)
            return edge_rel[e]

        rels = []
        for i, nodevars in enumerate(self.vars):
            target, rows = bind_edge(t.origin[i])
            if target != nodevars:
                p = {v: k for k, v in enumerate(target)}
                self.steps.add(len(rows) + 1)
                rows = kernels.project(rows, [p[v] for v in nodevars])
            rels.append(rows)
        return rels

    def _first(self, v):
        for i, a in enumerate(self.atoms):
            if v in a.args:
                return (i, a.args.index(v))
        return (len(self.atoms), 0)

    def _shared(self, u, p):
        shared = [v for v in self.vars[u] if v in self.pos[p]]
        return [self.pos[u][v] for v in shared], [self.pos[p][v] for v in shared]

    def _reduce(self):
        rel, parent = self.rel, self.parent
        for u in reversed(self.order[1:]):
            p = parent[u]
            pu, pp = self._shared(u, p)
            self.steps.add(len(rel[u]) + len(rel[p]) + 1)
            rel[p] = kernels.semijoin(rel[p], pp, kernels.key_set(rel[u], pu))
        for u in self.order[1:]:
            p = parent[u]
            pu, pp = self._shared(u, p)
            self.steps.add(len(rel[u]) + len(rel[p]) + 1)
            rel[u] = kernels.semijoin(rel[u], pu, kernels.key_set(rel[p], pp))

    def _index(self):
        t = self.ctree.tree
        connex = set(self.ctree.connex)
        self.corder, cparent = t.rooted(self.root, allowed=connex) if connex else ([], [])
        level = {u: j for j, u in enumerate(self.corder)}
        self.levels = []
        for j, u in enumerate(self.corder):
            if j == 0:
                self.levels.append((None, None, None))
                continue
            p = cparent[u]
            pu, pp = self._shared(u, p)
            self.steps.add(len(self.rel[u]) + 1)
            self.levels.append((level[p], tuple(pp), kernels.build_index(self.rel[u], pu)))
        # non-connex nodes, for extending an S-assignment to a full one
        self.rest = []
        for u in self.order[1:]:
            if u in connex:
                continue
            p = self.parent[u]
            pu, pp = self._shared(u, p)
            self.steps.add(len(self.rel[u]) + 1)
            self.rest.append((u, p, tuple(pp), kernels.build_index(self.rel[u], pu)))
        self.connex_sets = {}
        for u in self.corder:
            self.steps.add(len(self.rel[u]) + 1)
            self.connex_sets[u] = set(self.rel[u])
        self.where = {}
        for u in self.corder:
            for v in self.vars[u]:
                self.where.setdefault(v, (level[u], self.pos[u][v]))
        self.empty = any(not r for r in self.rel)

    # -- enumeration --------------------------------------------------------

    def rows(self, steps: StepCounter | None = None):
        """Yield the current per-level rows of the connex subtree, one list
        per distinct S-assignment.  The list is reused between yields."""
        steps = steps or self.steps
        if self.empty:
            return
        k = len(self.corder)
        if k == 0:
            steps.add(1)
            yield []
            return
        root_rows = self.rel[self.corder[0]]
        buckets = [None] * k
        cur = [0] * k
        rows = [None] * k
        buckets[0] = root_rows
        rows[0] = root_rows[0]

        def reset(j):
            pl, pp, index = self.levels[j]
            prow = rows[pl]
            steps.add(1)
            b = index[tuple([prow[i] for i in pp])]
            buckets[j] = b
            cur[j] = 0
            rows[j] = b[0]

        for j in range(1, k):
            reset(j)
        while True:
            steps.add(1)
            yield rows
            j = k - 1
            while j >= 0:
                steps.add(1)
                cur[j] += 1
                if cur[j] < len(buckets[j]):
                    rows[j] = buckets[j][cur[j]]
                    break
                j -= 1
            if j < 0:
                return
            for jj in range(j + 1, k):
                reset(jj)

    def project(self, rows, head):
        where = self.where
        return tuple([rows[where[v][0]][where[v][1]] for v in head])

    def extend(self, rows, steps: StepCounter | None = None) -> dict:
        """Extend the current S-assignment once to every variable by taking
        the first matching tuple in each non-connex node."""
        steps = steps or self.steps
        node_row = {u: rows[j] for j, u in enumerate(self.corder)}
        for u, p, pp, index in self.rest:
            prow = node_row[p]
            steps.add(1)
            node_row[u] = index[tuple([prow[i] for i in pp])][0]
        mu = {}
        for u, row in node_row.items():
            for v, val in zip(self.vars[u], row):
                mu[v] = val
        return mu

    def member(self, assignment: dict) -> bool:
        """Constant-time test: every connex node holds the induced tuple."""
        if self.empty:
            return False
        for u in self.corder:
            self.steps.add(1)
            if tuple([assignment[v] for v in self.vars[u]]) not in self.connex_sets[u]:
                return False
        return True


def reduced_relation(plan: CDYPlan, atom_index: int) -> set:
    """Rows of an atom's node after full reduction, in atom variable order
    (used to compare virtual relations against projections)."""
    e = plan.hyper.edge_of_atom(atom_index)
    t = plan.ctree.tree
    a = plan.atoms[atom_index]
    for i, o in enumerate(t.origin):
        if o == e and not t.projection[i]:
            p = plan.pos[i]
            return {tuple(row[p[v]] for v in a.args) for row in plan.rel[i]}
    raise EngineError(f"atom {a} has no node in the tree")


class CDYEnumerator:
    """Answers of a free-connex body projected to ``head``."""

    def __init__(self, atoms, head, rel_of, steps: StepCounter | None = None,
                 tree: ExtConnexTree | None = None):
        self.head = tuple(head)
        self.steps = steps or StepCounter()
        self.plan = CDYPlan(atoms, frozenset(self.head), rel_of, self.steps, tree)
        self.steps.begin_enumeration()

    def __iter__(self):
        plan, head, steps = self.plan, self.head, self.steps
        for rows in plan.rows(steps):
            out = plan.project(rows, head)
            steps.answer()
            yield out

    def contains(self, answer) -> bool:
        if len(answer) != len(self.head):
            return False
        assignment = {}
        for v, val in zip(self.head, answer):
            if assignment.setdefault(v, val) != val:
                return False
        return self.plan.member(assignment)


def cq_atoms(q) -> list:
    return list(q.body)


def cdy_enumerate(q, db, steps: StepCounter | None = None) -> CDYEnumerator:
    """CDY over a free-connex CQ and a Database."""
    atoms = cq_atoms(q)
    return CDYEnumerator(atoms, q.head, lambda i: db.get(atoms[i].relation), steps)


def membership_test(enum: CDYEnumerator, answer) -> bool:
    return enum.contains(answer)


def yannakakis_reduce(q, db, S=None) -> dict:
    """Fully reduced relation for each atom of an S-connex CQ (S defaults to
    the free variables), keyed by atom index."""
    atoms = cq_atoms(q)
    plan = CDYPlan(atoms, q.free if S is None else S, lambda i: db.get(atoms[i].relation))
    return {i: reduced_relation(plan, i) for i in range(len(atoms))}


def virtual_atom(name, args) -> Atom:
    return Atom(name, tuple(args))
