"""Finite posets given by an explicit order relation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping


@dataclass(frozen=True)
class Poset:
    """Finite poset. ``leq`` contains every pair (a, b) with a <= b."""

    elements: tuple
    leq: frozenset = field(repr=False)

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable],
                      le: Callable[[Hashable, Hashable], bool]) -> "Poset":
        elements = tuple(elements)
        return cls(elements, frozenset((a, b) for a in elements for b in elements if le(a, b)))

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq

    def is_partial_order(self) -> bool:
        els = self.elements
        if any((a, a) not in self.leq for a in els):
            return False
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                return False
        for a, b in self.leq:
            for c in els:
                if (b, c) in self.leq and (a, c) not in self.leq:
                    return False
        return True

    def hasse(self) -> list[tuple]:
        """Covering relations a < b with nothing strictly between."""
        out = []
        for a, b in self.leq:
            if a == b:
                continue
            if not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                out.append((a, b))
        return sorted(out, key=repr)

    def up_set(self, a) -> list:
        return [b for b in self.elements if (a, b) in self.leq]

    def down_set(self, a) -> list:
        return [b for b in self.elements if (b, a) in self.leq]

    def maximal(self) -> list:
        return [a for a in self.elements if not any(self.lt(a, b) for b in self.elements)]

    def opposite(self) -> "Poset":
        return Poset(self.elements, frozenset((b, a) for a, b in self.leq))

    def is_order_isomorphism(self, other: "Poset", phi: Mapping) -> bool:
        """phi bijective onto other.elements, and a <= b iff phi(a) <= phi(b)."""
        if set(phi) != set(self.elements):
            return False
        image = [phi[a] for a in self.elements]
        if len(set(image)) != len(image) or set(image) != set(other.elements):
            return False
        return all(((a, b) in self.leq) == ((phi[a], phi[b]) in other.leq)
                   for a in self.elements for b in self.elements)

    def __len__(self):
        return len(self.elements)
