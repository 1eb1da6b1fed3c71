"""Enumerating a tractable UCQ from its union-extension certificate.

``general`` mode instantiates every virtual relation in dependency order,
emitting the provider answers as they are produced, then runs CDY on each
certificate extension.  The concatenated raw stream repeats an answer at
most once per phase and has one preprocessing spike per phase, so the
cheater wrapper turns it into a duplicate-free stream with constant delay.

``interleave`` mode needs every disjunct to be free-connex on its own; it
walks the first disjunct and replaces each answer that a later disjunct
also produces by the next answer of the remaining union.
"""
from __future__ import annotations

from ..extension import UnionExtension, bare
from ..structure import ext_connex_tree
from .cdy import CDYEnumerator, EngineError
from .cheater import CheaterWrapper
from .steps import StepCounter
from .virtual import VirtualInstance, extension_atoms, extension_rel_of, virtual_order

MODES = ("general", "interleave")


def _tree(x, S):
    t = ext_connex_tree(x.hypergraph(), S)
    if t is None:
        raise EngineError(f"{x} is not {sorted(S)}-connex")
    return t


def budget(cert, db, order=None) -> dict:
    """Declared wrapper bounds for a certificate over ``db``.

    n = m = number of phases (virtual relations plus certificate
    extensions).  p bounds one phase's preprocessing over base relations;
    work on virtual relations is charged to the provider answers that
    created their tuples, which is what the n-dependent part of d pays for.
    """
    order = virtual_order(cert) if order is None else order
    plans = [(va.witness.provider, va.witness.S) for va in order]
    plans += [(e, e.free) for e in cert]
    trees = [_tree(x, S) for x, S in plans]
    k = max(len(t.tree.nodes) for t in trees)
    base_in = max(sum(len(db.get(a.relation)) for a in x.base.body) for x, _ in plans)
    n = len(plans)
    return {
        "n": n,
        "m": n,
        "p": 10 * k * (base_in + 1),
        "d": 3 * k + 4 + n * 10 * k,
        "k": k,
        "trees": trees,
    }


class UCQEnumerator:
    """Iterable over interned answer tuples with step statistics."""

    def __init__(self, q, cert, db, mode="general", strict=True, fault=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.q = q
        self.db = db
        self.mode = mode
        self.cert = [c if isinstance(c, UnionExtension) else bare(c) for c in cert]
        self.fault = fault
        self.phases = []
        self.virtual = {}
        if mode == "interleave":
            if any(e.virtual for e in self.cert):
                raise EngineError("interleave mode needs every disjunct free-connex without virtual atoms")
            self.steps = StepCounter()
            self._build_interleave()
        else:
            self.order = virtual_order(self.cert)
            b = budget(self.cert, db, self.order)
            self.trees = b.pop("trees")
            self.bounds = b
            self.clock = StepCounter()
            self.wrapper = CheaterWrapper(self._raw(), self.clock, b["n"], b["m"], b["p"], b["d"], strict)

    # -- general -------------------------------------------------------------

    def _raw(self):
        trees = iter(self.trees)
        for va in self.order:
            steps = StepCounter(self.clock)
            inst = VirtualInstance(va.witness, va.args, self.db, self.virtual, steps, next(trees))
            self.phases.append((f"virtual {va.relation}", steps))
            yield from inst
            self.virtual[va.relation] = inst
        for j, e in enumerate(self.cert):
            steps = StepCounter(self.clock)
            en = CDYEnumerator(extension_atoms(e), e.head, extension_rel_of(e, self.db, self.virtual),
                               steps, next(trees))
            if j == 0 and self.fault:
                _corrupt(en.plan)
            self.phases.append((f"extension {e.base.name}", steps))
            yield from en

    # -- interleave ------------------------------------------------------------

    def _build_interleave(self):
        self.enums = []
        for j, e in enumerate(self.cert):
            child = StepCounter(self.steps)
            en = CDYEnumerator(extension_atoms(e), e.head, extension_rel_of(e, self.db, {}), child)
            if j == 0 and self.fault:
                _corrupt(en.plan)
            self.phases.append((f"extension {e.base.name}", child))
            self.enums.append(en)
        self.steps.begin_enumeration()

    def _interleave(self, enums):
        if len(enums) == 1:
            yield from enums[0]
            return
        first, rest = enums[0], enums[1:]
        tail = self._interleave(rest)
        for a in first:
            if any(e.contains(a) for e in rest):
                b = next(tail, None)
                if b is not None:
                    yield b
            else:
                yield a
        yield from tail

    def __iter__(self):
        if self.mode == "interleave":
            for a in self._interleave(self.enums):
                self.steps.answer()
                yield a
        else:
            yield from self.wrapper

    def decoded(self):
        for a in self:
            yield self.db.decode(a)

    def summary(self) -> dict:
        if self.mode == "interleave":
            out = self.steps.summary()
        else:
            out = self.wrapper.summary()
        out["mode"] = self.mode
        out["phases"] = [
            {"phase": name, "preprocessing_steps": s.preprocessing, "max_delay_steps": s.max_delay,
             "answers": len(s.samples)}
            for name, s in self.phases
        ]
        return out


def _corrupt(plan):
    """Negative-control hook: drop one tuple from the root of the connex
    subtree so that some answers go missing."""
    if plan.corder and plan.rel[plan.corder[0]]:
        root = plan.corder[0]
        plan.rel[root] = plan.rel[root][1:]
        plan.connex_sets[root] = set(plan.rel[root])
        plan.empty = any(not r for r in plan.rel)


def enumerate_ucq(q, cert, db, mode="general", strict=True, fault=None) -> UCQEnumerator:
    return UCQEnumerator(q, cert, db, mode, strict, fault)
