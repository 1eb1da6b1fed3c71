"""Instantiating virtual relations from a provider's answers.

The provider is evaluated with the provided set S treated as free; each
S-answer is extended once to a full assignment, emitted as a provider
answer, and translated through the body-homomorphism into a tuple of the
consumer's virtual relation.
"""
from __future__ import annotations

from .cdy import CDYPlan, EngineError
from .steps import StepCounter


def extension_atoms(x) -> list:
    return x.atoms() if hasattr(x, "atoms") else list(x.body)


def extension_rel_of(x, db, virtual: dict):
    """Row lookup for the atoms of a CQ or union extension: base atoms read
    the database, virtual atoms read already instantiated relations."""
    atoms = extension_atoms(x)
    nbase = len(x.base.body) if hasattr(x, "base") else len(atoms)

    def rel_of(i):
        a = atoms[i]
        if i < nbase:
            return db.get(a.relation)
        inst = virtual.get(a.relation)
        if inst is None:
            raise EngineError(f"virtual relation {a.relation} used before it was instantiated")
        return inst.rows

    return rel_of


class VirtualInstance:
    """One virtual relation under construction.  Iterating runs the
    provider and yields its answers (the set M); ``rows`` fills up as a
    side effect and is complete once iteration ends."""

    def __init__(self, witness, args, db, virtual: dict, steps: StepCounter | None = None,
                 tree=None):
        self.witness = witness
        self.args = tuple(args)
        self.steps = steps or StepCounter()
        p = witness.provider
        self.head = p.head
        atoms = extension_atoms(p)
        self.plan = CDYPlan(atoms, witness.S, extension_rel_of(p, db, virtual), self.steps, tree)
        self.steps.begin_enumeration()
        pre = {}
        for v in witness.V2:
            pre.setdefault(witness.hom(v), []).append(v)
        missing = [v for v in self.args if v not in pre]
        if missing:
            raise EngineError(f"witness does not cover virtual variables {missing}")
        self.groups = [tuple(sorted(pre[v])) for v in self.args]
        self.rows = []
        self.seen = set()
        self.skipped = 0
        self.done = False

    def __iter__(self):
        plan, steps, head = self.plan, self.steps, self.head
        for rows in plan.rows(steps):
            mu = plan.extend(rows, steps)
            steps.add(1)
            t = []
            for g in self.groups:
                val = mu[g[0]]
                for v in g[1:]:
                    if mu[v] != val:
                        val = None
                        break
                if val is None:
                    break
                t.append(val)
            if len(t) == len(self.groups):
                t = tuple(t)
                if t not in self.seen:
                    self.seen.add(t)
                    self.rows.append(t)
            else:
                self.skipped += 1
            steps.answer()
            yield tuple([mu[v] for v in head])
        self.done = True

    def run(self) -> list:
        """Drain the provider stream and return M."""
        return list(self)


def instantiate_virtual(witness, args, db, virtual: dict | None = None,
                        steps: StepCounter | None = None) -> tuple:
    """(virtual relation rows, provider answers M)."""
    inst = VirtualInstance(witness, args, db, {} if virtual is None else virtual, steps)
    m = inst.run()
    return inst.rows, m


def virtual_order(extensions) -> list:
    """Virtual atoms of ``extensions`` and of everything they depend on, in
    an order where every provider's own virtual atoms come first."""
    seen, exts = set(), []
    for e in extensions:
        for x in e.closure():
            if id(x) not in seen:
                seen.add(id(x))
                exts.append(x)
    exts.sort(key=lambda e: e.depth)
    out, names = [], set()
    for e in exts:
        for va in e.virtual:
            if va.relation not in names:
                names.add(va.relation)
                out.append(va)
    return out


def materialize(extensions, db) -> dict:
    """Instantiate every virtual relation needed by ``extensions``;
    returns relation name -> finished VirtualInstance."""
    virtual = {}
    for va in virtual_order(extensions):
        inst = VirtualInstance(va.witness, va.args, db, virtual)
        inst.run()
        virtual[va.relation] = inst
    return virtual
