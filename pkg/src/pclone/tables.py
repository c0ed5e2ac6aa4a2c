"""Vectorised kernels over stacks of function tables.

A stack is a ``(N, k**n)`` uint8 array of cell codes (0 undefined,
``v + 1`` for value ``v``), the same encoding as :class:`PartialFn.codes`.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .core import PartialFn

INT_KEY_LIMIT = 2**63 - 1


def stack(fns: Iterable[PartialFn], cells: int | None = None) -> np.ndarray:
    fns = list(fns)
    if not fns:
        return np.zeros((0, cells or 0), dtype=np.uint8)
    return np.frombuffer(b"".join(f.codes for f in fns), dtype=np.uint8).reshape(len(fns), -1).copy()


def unstack(arr: np.ndarray, k: int, n: int) -> list[PartialFn]:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    return [PartialFn._trusted(k, n, row.tobytes()) for row in arr]


def outer_table(f: PartialFn) -> np.ndarray:
    """Lookup table of ``f`` indexed by base-(k+1) code tuples.

    Any tuple containing an undefined code (0) maps to 0, which makes
    composition a single gather.
    """
    k, r = f.k, f.n
    base = k + 1
    idx = np.arange(base**r)
    digits = np.stack([(idx // base ** (r - 1 - j)) % base for j in range(r)])
    defined = (digits > 0).all(axis=0)
    inner = np.zeros(base**r, dtype=np.int64)
    for j in range(r):
        inner = inner * k + np.where(defined, digits[j] - 1, 0)
    table = np.where(defined, f.array()[inner], 0)
    return table.astype(np.uint8)


def compose_stack(table: np.ndarray, k: int, inners: Sequence[np.ndarray]) -> np.ndarray:
    """Row-wise ``f[g1, ..., gr]`` for aligned stacks ``inners[j]`` of shape (B, c)."""
    base = k + 1
    idx = np.zeros(inners[0].shape, dtype=np.int64)
    for g in inners:
        idx *= base
        idx += g
    return table[idx]


class KeySet:
    """Set of code rows. Uses int64 keys when (k+1)**cells fits, bytes otherwise."""

    def __init__(self, k: int, cells: int):
        self.cells = cells
        self.int_mode = (k + 1) ** cells <= INT_KEY_LIMIT
        if self.int_mode:
            self.weights = np.array([(k + 1) ** (cells - 1 - i) for i in range(cells)], dtype=np.int64)
            self._known = np.zeros(0, dtype=np.int64)
        else:
            self._known_set: set[bytes] = set()

    def __len__(self):
        return len(self._known) if self.int_mode else len(self._known_set)

    def keys(self, rows: np.ndarray):
        if self.int_mode:
            return rows.astype(np.int64) @ self.weights
        rows = np.ascontiguousarray(rows)
        return [r.tobytes() for r in rows]

    def add_new(self, rows: np.ndarray) -> np.ndarray:
        """Insert rows; return those not seen before (deduplicated, sorted by key)."""
        if len(rows) == 0:
            return rows
        if self.int_mode:
            keys = self.keys(rows)
            uniq, first = np.unique(keys, return_index=True)
            fresh = ~np.isin(uniq, self._known, assume_unique=True)
            if not fresh.any():
                return rows[:0]
            self._known = np.union1d(self._known, uniq[fresh])
            return rows[first[fresh]]
        picked = {}
        for key, row in zip(self.keys(rows), rows):
            if key not in self._known_set and key not in picked:
                picked[key] = row
        self._known_set.update(picked)
        if not picked:
            return rows[:0]
        return np.stack([picked[key] for key in sorted(picked)])

    def contains(self, rows: np.ndarray) -> np.ndarray:
        if self.int_mode:
            return np.isin(self.keys(rows), self._known)
        return np.array([key in self._known_set for key in self.keys(rows)], dtype=bool)


def sort_rows(rows: np.ndarray, k: int) -> np.ndarray:
    """Rows in canonical-key (lexicographic) order, duplicates removed."""
    if len(rows) == 0:
        return rows
    ks = KeySet(k, rows.shape[1])
    return ks.add_new(rows)


def value_masks(rows: np.ndarray, k: int) -> np.ndarray:
    """Bit-packed cell sets per value: shape (N, k, W) of uint64, W = ceil(cells / 64)."""
    n_rows, cells = rows.shape
    words = max(1, -(-cells // 64))
    pad = words * 64 - cells
    weights = np.left_shift(np.uint64(1), np.arange(64, dtype=np.uint64))
    out = np.empty((n_rows, k, words), dtype=np.uint64)
    for v in range(k):
        bits = rows == v + 1
        if pad:
            bits = np.pad(bits, ((0, 0), (0, pad)))
        bits = bits.reshape(n_rows, words, 64)
        out[:, v, :] = (bits * weights).sum(axis=2, dtype=np.uint64)
    return out


def dominated_by(h_masks: np.ndarray, a_masks: np.ndarray, budget: int = 1 << 24) -> np.ndarray:
    """For each row h, is there a row a with h a subfunction of a?"""
    out = np.zeros(len(h_masks), dtype=bool)
    if len(a_masks) == 0 or len(h_masks) == 0:
        return out
    not_a = ~a_masks
    per = max(1, budget // max(1, a_masks[0].size * len(a_masks)))
    for s in range(0, len(h_masks), per):
        h = h_masks[s : s + per, None]
        ok = ((h & not_a[None]) == 0).all(axis=(2, 3))
        out[s : s + per] = ok.any(axis=1)
    return out


def strictly_dominated_within(masks: np.ndarray, budget: int = 1 << 24) -> np.ndarray:
    """Rows that are proper subfunctions of another row (rows assumed distinct)."""
    n_rows = len(masks)
    out = np.zeros(n_rows, dtype=bool)
    if n_rows < 2:
        return out
    not_m = ~masks
    per = max(1, budget // max(1, masks[0].size * n_rows))
    for s in range(0, n_rows, per):
        h = masks[s : s + per, None]
        ok = ((h & not_m[None]) == 0).all(axis=(2, 3))
        idx = np.arange(s, min(s + per, n_rows))
        ok[np.arange(len(idx)), idx] = False
        out[s : s + per] = ok.any(axis=1)
    return out


def downset(rows: np.ndarray, k: int, limit: int) -> np.ndarray:
    """Every restriction of every row, deduplicated and sorted."""
    counts = (rows > 0).sum(axis=1)
    bound = int(sum(2 ** int(d) for d in counts))
    if bound > limit:
        raise OverflowError(bound)
    ks = KeySet(k, rows.shape[1])
    parts = []
    for row, d in zip(rows, counts):
        cells = np.flatnonzero(row)
        sel = (np.arange(2**int(d))[:, None] >> np.arange(int(d))) & 1
        sub = np.zeros((len(sel), rows.shape[1]), dtype=np.uint8)
        sub[:, cells] = sel.astype(np.uint8) * row[cells]
        parts.append(ks.add_new(sub))
    if not parts:
        return rows[:0]
    return sort_rows(np.concatenate(parts), k)
