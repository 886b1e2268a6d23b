"""Working set of directed spanning paths for the rotation search."""

from __future__ import annotations


class PathFrontier:
    """Directed spanning paths sharing a fixed start vertex, deduplicated
    by endpoint (first-found representative wins) and capped at
    ``max_paths`` (later arrivals are dropped, earliest survive).

    Storage is a parent pointer plus one rotation record per derived path;
    ``materialize`` replays the ancestry from the seed sequence, so adding
    a path is O(1) and reconstruction is O(depth * length).
    """

    def __init__(self, start: int, max_paths: int):
        self.start = start
        self.max_paths = max_paths
        # entry: (parent_index | None, payload); payload is the full vertex
        # tuple for seeds, else the (k0, l0) rotation applied to the parent.
        self._entries: list[tuple[int | None, tuple]] = []
        self._endpoints: list[int] = []
        self._seen: set[int] = set()

    def __len__(self) -> int:
        return len(self._entries)

    def endpoint(self, idx: int) -> int:
        return self._endpoints[idx]

    def has_endpoint(self, vertex: int) -> bool:
        return vertex in self._seen

    def add_seed(self, seq) -> bool:
        seq = tuple(seq)
        return self._add(None, seq, seq[-1])

    def add_rotation(self, parent: int, k0: int, l0: int, endpoint: int) -> bool:
        return self._add(parent, (k0, l0), endpoint)

    def _add(self, parent, payload, endpoint) -> bool:
        if endpoint in self._seen or len(self._entries) >= self.max_paths:
            return False
        self._entries.append((parent, payload))
        self._endpoints.append(endpoint)
        self._seen.add(endpoint)
        return True

    def materialize(self, idx: int) -> list[int]:
        rotations = []
        parent, payload = self._entries[idx]
        while parent is not None:
            rotations.append(payload)
            parent, payload = self._entries[parent]
        seq = list(payload)
        for k0, l0 in reversed(rotations):
            seq = seq[:k0] + seq[l0:] + seq[k0:l0]
        return seq
