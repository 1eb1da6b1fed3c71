"""Body-homomorphisms, containment and the provides relation."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .query import CQ, QueryError
from .structure import ExtConnexTree, ext_connex_tree, is_s_connex


@dataclass(frozen=True)
class BodyHom:
    src: int
    dst: int
    map: dict

    def __call__(self, v):
        return self.map[v]

    def image(self, vs) -> frozenset:
        return frozenset(self.map[v] for v in vs)

    def preimage(self, vs) -> frozenset:
        vs = set(vs)
        return frozenset(k for k, v in self.map.items() if v in vs)

    def __hash__(self):
        return hash((self.src, self.dst, tuple(sorted(self.map.items()))))


def _base(x) -> CQ:
    return x.base if hasattr(x, "base") else x


def _edges(x) -> list:
    """Hyperedges of a CQ or of a union extension (virtual atoms included)."""
    if hasattr(x, "edges"):
        return x.edges()
    return [a.args for a in x.body]


def _search(src_atoms, dst_atoms, start: dict, first_only: bool):
    by_rel: dict = {}
    for a in dst_atoms:
        by_rel.setdefault((a.relation, len(a.args)), []).append(a)
    atoms = sorted(
        src_atoms, key=lambda a: len(by_rel.get((a.relation, len(a.args)), ()))
    )
    out, seen = [], set()

    def go(i, mapping):
        if i == len(atoms):
            key = tuple(sorted(mapping.items()))
            if key not in seen:
                seen.add(key)
                out.append(dict(mapping))
            return first_only
        a = atoms[i]
        for b in by_rel.get((a.relation, len(a.args)), ()):
            added = []
            ok = True
            for u, w in zip(a.args, b.args):
                have = mapping.get(u)
                if have is None:
                    mapping[u] = w
                    added.append(u)
                elif have != w:
                    ok = False
                    break
            if ok and go(i + 1, mapping):
                return True
            for u in added:
                del mapping[u]
        return False

    go(0, dict(start))
    return out


def body_homs(src, dst) -> list:
    """Every body-homomorphism from ``src`` to ``dst``.  Union extensions
    are compared through their base atoms."""
    s, d = _base(src), _base(dst)
    return [BodyHom(s.id, d.id, m) for m in _search(s.body, d.body, {}, False)]


def has_body_hom(src, dst) -> bool:
    s, d = _base(src), _base(dst)
    return bool(_search(s.body, d.body, {}, True))


def is_body_isomorphic(q1: CQ, q2: CQ) -> BodyHom | None:
    """A body-isomorphism from q1 to q2, or None.  Both CQs must be
    self-join free."""
    for q in (q1, q2):
        if not q.self_join_free:
            raise QueryError(f"{q.name} has self-joins; body-isomorphism is undefined")
    if q1.relations != q2.relations or len(q1.vars) != len(q2.vars):
        return None
    fwd = _search(q1.body, q2.body, {}, True)
    if not fwd or not _search(q2.body, q1.body, {}, True):
        return None
    return BodyHom(q1.id, q2.id, fwd[0])


def cq_contains(q1: CQ, q2: CQ) -> bool:
    """True iff q1 ⊆ q2: a homomorphism from q2 to q1 maps head position i
    of q2 to head position i of q1."""
    if len(q1.head) != len(q2.head):
        return False
    start = {}
    for u, w in zip(q2.head, q1.head):
        if start.setdefault(u, w) != w:
            return False
    return bool(_search(q2.body, q1.body, start, True))


@dataclass(frozen=True)
class ProvidesWitness:
    provider: object  # CQ or union extension
    consumer: int
    hom: BodyHom
    V2: frozenset
    S: frozenset
    V1: frozenset

    @property
    def provider_id(self) -> int:
        return _base(self.provider).id

    def tree(self) -> ExtConnexTree:
        from .structure import Hypergraph

        return ext_connex_tree(Hypergraph.from_sets(_edges(self.provider)), self.S)

    def check(self, consumer: CQ) -> bool:
        p = _base(self.provider)
        if not all(a.rename(self.hom.map) in set(consumer.body) for a in p.body):
            return False
        return (
            self.V2 <= self.S <= p.free
            and self.hom.image(self.V2) == self.V1
            and self.V1 <= consumer.vars
            and is_s_connex(_edges(self.provider), self.S)
        )


def _subsets(items, lo=0):
    items = sorted(items)
    for k in range(lo, len(items) + 1):
        yield from (frozenset(c) for c in combinations(items, k))


def provides(provider, consumer: CQ, V1, homs=None) -> ProvidesWitness | None:
    """First witness that ``provider`` provides V1 to ``consumer``, ordered
    by hom index, then V2 and S by (size, sorted names)."""
    V1 = frozenset(V1)
    if not V1 <= consumer.vars:
        raise QueryError("V1 must be a subset of the consumer's variables")
    p = _base(provider)
    edges = _edges(provider)
    free = p.free
    for h in homs if homs is not None else body_homs(provider, consumer):
        pre = frozenset(v for v in h.preimage(V1) if v in free)
        if h.image(pre) != V1:
            continue
        for V2 in _subsets(pre):
            if h.image(V2) != V1:
                continue
            for extra in _subsets(free - V2):
                S = V2 | extra
                if is_s_connex(edges, S):
                    return ProvidesWitness(provider, consumer.id, h, V2, S, V1)
            break  # a larger V2 only shrinks the S choices
    return None


def provided_sets(provider, consumer: CQ) -> list:
    """Maximal sets provided by ``provider`` to ``consumer`` with their
    witnesses: for every hom and every inclusion-maximal S-connex
    S ⊆ free(provider), the image h(S)."""
    p = _base(provider)
    edges = _edges(provider)
    maximal = maximal_connex_subsets(edges, p.free)
    out, seen = [], set()
    for h in body_homs(provider, consumer):
        for S in maximal:
            V1 = h.image(S)
            if V1 in seen:
                continue
            seen.add(V1)
            out.append(ProvidesWitness(provider, consumer.id, h, S, S, V1))
    return out


def maximal_connex_subsets(edges, free) -> list:
    free = sorted(free)
    good = [S for S in _subsets(free, 1) if is_s_connex(edges, S)]
    return [S for S in good if not any(S < T for T in good)]
