"""Bitmask helpers and the :class:`Verdict` returned by every checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


def canonical_key(mask: int) -> tuple[int, int]:
    """Sort key for subset families: by size, then numerically."""
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check. ``ok is None`` means the check did not apply."""

    ok: bool | None
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok is True

    @property
    def skipped(self) -> bool:
        return self.ok is None


PASS = Verdict(True)
