"""Solution types and the Pareto-dominance relation.

Objectives are always minimized. ``f1`` is the neural subset cost and ``f2``
the number of selected features; ``f2`` is stored as a float so both
objectives travel through one ranking code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ContractViolation

__all__ = [
    "ObjectiveVector",
    "BitChromosome",
    "Individual",
    "dominates",
    "repair",
]


class ObjectiveVector(NamedTuple):
    f1: float  # neural cost (validation MSE)
    f2: float  # selected-feature count

    def check(self) -> "ObjectiveVector":
        if not (math.isfinite(self.f1) and math.isfinite(self.f2)):
            raise ContractViolation(f"non-finite objective vector {tuple(self)}")
        return self


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Return True iff ``a`` Pareto-dominates ``b`` (minimization)."""
    strictly_better = False
    for x, y in zip(a, b):
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ContractViolation(f"non-finite objective in {tuple(a)} vs {tuple(b)}")
        if x > y:
            return False
        if x < y:
            strictly_better = True
    return strictly_better


@dataclass(frozen=True, eq=False)
class BitChromosome:
    """Feature-subset mask of length ``d``; bit ``i`` selects feature ``i``.

    The underlying array is made read-only so chromosomes can be shared
    between individuals and cache entries without defensive copies.
    """

    bits: np.ndarray
    _key: bytes = field(init=False, repr=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool).ravel()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "_key", np.packbits(bits).tobytes() + len(bits).to_bytes(4, "big"))

    @property
    def d(self) -> int:
        return int(self.bits.size)

    @property
    def k(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def key(self) -> bytes:
        """Exact byte encoding of the bit pattern, usable as a cache key."""
        return self._key

    def selected(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def to_hex(self) -> str:
        """Lowercase hex with feature 0 as the most significant bit."""
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        width = max(1, (self.d + 3) // 4)
        return format(value, f"0{width}x")

    @classmethod
    def from_hex(cls, text: str, d: int) -> "BitChromosome":
        text = text.strip().lower()
        if text.startswith("0x"):
            text = text[2:]
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise ContractViolation(f"not a hex bit pattern: {text!r}") from exc
        if value >> d:
            raise ContractViolation(f"bit pattern {text!r} has bits beyond d={d}")
        bits = [(value >> (d - 1 - i)) & 1 for i in range(d)]
        return cls(np.array(bits, dtype=bool))

    @classmethod
    def from_indices(cls, indices, d: int) -> "BitChromosome":
        bits = np.zeros(d, dtype=bool)
        bits[list(indices)] = True
        return cls(bits)

    def __eq__(self, other):
        if not isinstance(other, BitChromosome):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return self.d


def repair(c: BitChromosome, rng: np.random.Generator) -> BitChromosome:
    """Guarantee at least one selected feature.

    An empty mask gets exactly one uniformly chosen bit; anything else is
    returned unchanged.
    """
    if c.k > 0:
        return c
    bits = np.zeros(c.d, dtype=bool)
    bits[rng.integers(c.d)] = True
    return BitChromosome(bits)


@dataclass
class Individual:
    chrom: BitChromosome
    obj: ObjectiveVector | None = None
    rank: int | None = None
    crowd: float | None = None

    @property
    def k(self) -> int:
        return self.chrom.k
