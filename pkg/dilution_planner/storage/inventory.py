# dilution_planner/storage/inventory.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..conc import ConcFactor
from ..errors import CapacityError
from ..models import Droplet


@dataclass(frozen=True)
class InventoryEntry:
    seq: int
    droplet: Droplet


class Inventory:
    """
    On-chip storage of intermediate droplets.

    Entries keep insertion order; every take removes the oldest entry that
    matches. With a capacity, storing into a full inventory evicts the
    oldest entry and hands it back to the caller as waste.
    """

    def __init__(self, capacity: Optional[int] = None):
        if capacity is not None and capacity < 1:
            raise CapacityError(f"storage capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._entries: list[InventoryEntry] = []
        self._seq = 0
        self.peak = 0
        self.stores = 0
        self.takes = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return (e.droplet for e in self._entries)

    @property
    def occupancy(self) -> int:
        return len(self._entries)

    def snapshot(self) -> list[str]:
        return [str(e.droplet.cf) for e in self._entries]

    def cfs(self) -> list[ConcFactor]:
        return [e.droplet.cf for e in self._entries]

    def store(self, droplet: Droplet) -> Optional[Droplet]:
        """Append a droplet; returns the evicted droplet when full."""
        evicted: Optional[Droplet] = None
        if self.capacity is not None and len(self._entries) >= self.capacity:
            evicted = self._entries.pop(0).droplet

        self._seq += 1
        self._entries.append(InventoryEntry(seq=self._seq, droplet=droplet))
        self.stores += 1
        self.peak = max(self.peak, len(self._entries))
        return evicted

    def _remove_at(self, i: int) -> Droplet:
        self.takes += 1
        return self._entries.pop(i).droplet

    def contains(self, cf: ConcFactor) -> bool:
        return any(e.droplet.cf == cf for e in self._entries)

    def take_exact(self, cf: ConcFactor) -> Optional[Droplet]:
        for i, e in enumerate(self._entries):
            if e.droplet.cf == cf:
                return self._remove_at(i)
        return None

    def peek_immediate_higher(self, t: ConcFactor) -> Optional[ConcFactor]:
        above = [e.droplet.cf for e in self._entries if e.droplet.cf > t]
        return min(above) if above else None

    def take_immediate_higher(self, t: ConcFactor) -> Optional[Droplet]:
        """Smallest stored CF strictly above t (oldest among equals)."""
        cf = self.peek_immediate_higher(t)
        if cf is None:
            return None
        return self.take_exact(cf)

    def candidates_between(self, low: ConcFactor, high: ConcFactor) -> list[ConcFactor]:
        """Distinct stored CFs c with low < c <= high, ascending."""
        return sorted({e.droplet.cf for e in self._entries if low < e.droplet.cf <= high})
