"""Finite universes of call sequences with the indistinguishability
relations realised by view equality.

A :class:`Universe` holds every call sequence of length at most ``max_len``.
Relations are exact restrictions of the real ones to the universe, but
anything quantifying over "all sequences" only sees the universe, so
universal statements may hold here and fail in the unbounded model.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import Call, GossipError, Situation, all_calls, apply_call, root

__all__ = ["Universe", "universe"]


class Universe:
    def __init__(self, num_agents: int, max_len: int):
        if max_len < 0:
            raise GossipError("max_len must be non-negative")
        self.n = num_agents
        self.max_len = max_len
        calls = all_calls(num_agents)
        self.sequences: list[tuple[Call, ...]] = [()]
        self.situations: list[Situation] = [root(num_agents)]
        # view_ids[a][i]: interned id of agent a's view of sequence i
        self.view_ids: list[list[int]] = [[0] for _ in range(num_agents)]
        interned: list[dict] = [{} for _ in range(num_agents)]
        frontier = [0]
        for _ in range(max_len):
            nxt = []
            for i in frontier:
                seq, s = self.sequences[i], self.situations[i]
                for c in calls:
                    t = apply_call(s, c)
                    self.sequences.append(seq + (c,))
                    self.situations.append(t)
                    for a in range(num_agents):
                        parent = self.view_ids[a][i]
                        if a in c:
                            table = interned[a]
                            key = (parent, c, t[c.lo])
                            vid = table.get(key)
                            if vid is None:
                                vid = table[key] = len(table) + 1
                            self.view_ids[a].append(vid)
                        else:
                            self.view_ids[a].append(parent)
                    nxt.append(len(self.sequences) - 1)
            frontier = nxt
        self.index = {seq: i for i, seq in enumerate(self.sequences)}
        self._components: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def situation_array(self) -> np.ndarray:
        """``(len(self), n)`` array of secret masks."""
        arr = getattr(self, "_sit_arr", None)
        if arr is None:
            arr = self._sit_arr = np.asarray(self.situations, dtype=np.int64)
        return arr

    def __len__(self) -> int:
        return len(self.sequences)

    def lookup(self, C: Sequence[Call]) -> int:
        try:
            return self.index[tuple(C)]
        except KeyError:
            raise GossipError(f"sequence of length {len(C)} is outside the universe "
                              f"(max_len={self.max_len})") from None

    def labels(self, group: Iterable[int]) -> np.ndarray:
        """Component label of every sequence under the closure of the union
        of the relations of ``group``."""
        key = tuple(sorted(set(group)))
        if key in self._components:
            return self._components[key]
        m = len(self.sequences)
        rows, cols = [], []
        offset = m
        for a in key:
            ids = np.asarray(self.view_ids[a])
            rows.append(np.arange(m))
            cols.append(offset + ids)
            offset += int(ids.max()) + 1
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(offset, offset))
        _, lab = connected_components(graph, directed=False)
        lab = lab[:m]
        self._components[key] = lab
        return lab

    def component(self, C: Sequence[Call], group: Iterable[int]) -> list[int]:
        lab = self.labels(group)
        return np.flatnonzero(lab == lab[self.lookup(C)]).tolist()

    def situations_of(self, C: Sequence[Call], group: Iterable[int]) -> frozenset[Situation]:
        return frozenset(self.situations[i] for i in self.component(C, group))


@lru_cache(maxsize=16)
def universe(num_agents: int, max_len: int) -> Universe:
    """Cached constructor; universes are immutable once built."""
    return Universe(num_agents, max_len)
