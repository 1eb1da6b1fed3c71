"""Union extensions: a CQ plus virtual atoms over provided variable sets."""
from __future__ import annotations

from dataclasses import dataclass, field

from .query import CQ, Atom
from .structure import ExtConnexTree, Hypergraph, ext_connex_tree, is_s_connex


@dataclass(frozen=True, eq=False)
class VirtualAtom:
    relation: str
    args: tuple
    witness: object  # ProvidesWitness

    def atom(self) -> Atom:
        return Atom(self.relation, self.args)

    def __str__(self):
        return f"{self.relation}({','.join(self.args)})"


@dataclass(frozen=True, eq=False)
class UnionExtension:
    """``base`` with extra atoms.  ``depth`` is 0 for a bare CQ and otherwise
    one more than the deepest provider used, which fixes the order in which
    virtual relations are instantiated."""

    base: CQ
    virtual: tuple = ()
    depth: int = 0
    label: str = field(default="", compare=False)

    @property
    def id(self) -> int:
        return self.base.id

    @property
    def head(self) -> tuple:
        return self.base.head

    @property
    def free(self) -> frozenset:
        return self.base.free

    def atoms(self) -> list:
        return list(self.base.body) + [v.atom() for v in self.virtual]

    def edges(self) -> list:
        return [a.args for a in self.base.body] + [v.args for v in self.virtual]

    def hypergraph(self) -> Hypergraph:
        return Hypergraph.from_sets(self.edges())

    def is_free_connex(self) -> bool:
        return is_s_connex(self.edges(), self.free)

    def tree(self) -> ExtConnexTree | None:
        return ext_connex_tree(self.hypergraph(), self.free)

    def providers(self) -> list:
        """Extensions whose answers feed this one's virtual relations."""
        return [v.witness.provider for v in self.virtual]

    def closure(self) -> list:
        """This extension and every provider it depends on, shallowest first."""
        seen, out, stack = set(), [], [self]
        while stack:
            e = stack.pop()
            if id(e) in seen:
                continue
            seen.add(id(e))
            out.append(e)
            stack.extend(e.providers())
        out.sort(key=lambda e: e.depth)
        return out

    def __str__(self):
        parts = list(map(str, self.base.body)) + list(map(str, self.virtual))
        return f"{self.base.name}+({','.join(self.head)}) <- {', '.join(parts)}."

    def to_json(self) -> dict:
        return {
            "cq": self.base.name,
            "id": self.base.id,
            "depth": self.depth,
            "virtual_atoms": [
                {
                    "relation": v.relation,
                    "vars": list(v.args),
                    "provider": v.witness.provider.base.name,
                    "provider_depth": v.witness.provider.depth,
                    "hom": {k: v.witness.hom.map[k] for k in sorted(v.witness.hom.map)},
                    "V2": sorted(v.witness.V2),
                    "S": sorted(v.witness.S),
                }
                for v in self.virtual
            ],
        }


def bare(q: CQ) -> UnionExtension:
    return UnionExtension(q, (), 0)
