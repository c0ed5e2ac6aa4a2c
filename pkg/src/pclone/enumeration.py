"""Backtracking enumeration of partial or total functions under preservation constraints.

Cells are assigned in ascending index order. Each cell first tries
"undefined" (when partial functions are allowed) and then the values
0..k-1, so the stream comes out sorted by canonical key. Binary relations
are enforced incrementally with forward checking; unary relations become
per-cell value masks; relations of arity >= 3 are checked on completion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .core import InvalidInputError, PartialFn, ResourceLimitError, _check_kn
from .relations import Relation, preserves

__all__ = ["FnFilter", "enumerate_fns", "count_fns", "MAX_PARTIAL_CELLS", "MAX_TOTAL_CELLS"]

MAX_PARTIAL_CELLS = 27
MAX_TOTAL_CELLS = 64


@dataclass(frozen=True)
class FnFilter:
    """Conjunction of ``preserves(rho)`` constraints, optionally total-only.

    An empty ``relations`` tuple means "all functions".
    """

    relations: tuple[Relation, ...] = ()
    total_only: bool = False

    def __init__(self, relations: Sequence[Relation] = (), total_only: bool = False):
        object.__setattr__(self, "relations", tuple(relations))
        object.__setattr__(self, "total_only", bool(total_only))

    @classmethod
    def all(cls, total_only: bool = False) -> "FnFilter":
        return cls((), total_only)

    def accepts(self, f: PartialFn) -> bool:
        if self.total_only and 0 in f.codes:
            return False
        return all(preserves(f, rho) for rho in self.relations)


def _as_filter(flt, total_only):
    if flt is None:
        flt = FnFilter()
    elif not isinstance(flt, FnFilter):
        flt = FnFilter(flt)
    if total_only is not None:
        flt = FnFilter(flt.relations, total_only)
    return flt


class _Plan:
    def __init__(self, k, n, flt: FnFilter, allow_large: bool):
        _check_kn(k, n)
        size = k**n
        limit = MAX_TOTAL_CELLS if flt.total_only else MAX_PARTIAL_CELLS
        if size > limit and not allow_large:
            raise ResourceLimitError(
                f"k^n = {size} exceeds the enumeration bound {limit}; pass allow_large to override"
            )
        for rho in flt.relations:
            if rho.k != k:
                raise InvalidInputError(f"relation on k={rho.k} used for k={k}")
        self.k, self.n, self.size = k, n, size
        self.partial = not flt.total_only
        full = (1 << k) - 1
        allowed = [full] * size
        fwd: list[dict[int, list[int]]] = [dict() for _ in range(size)]
        self.deferred = []
        weights = [k ** (n - 1 - j) for j in range(n)]

        def cells_of(cols, i):
            return sum(w * col[i] for w, col in zip(weights, cols))

        for rho in flt.relations:
            if rho.h == 1:
                vmask = sum(1 << t[0] for t in rho.tuples)
                for cols in itertools.product(rho.tuples, repeat=n):
                    allowed[cells_of(cols, 0)] &= vmask
            elif rho.h == 2:
                succ = [sum(1 << b for a, b in rho.tuples if a == v) for v in range(k)]
                pred = [sum(1 << a for a, b in rho.tuples if b == v) for v in range(k)]
                diag = sum(1 << v for v in range(k) if (v, v) in rho)
                for cols in itertools.product(rho.tuples, repeat=n):
                    a, b = cells_of(cols, 0), cells_of(cols, 1)
                    if a == b:
                        allowed[a] &= diag
                    elif a < b:
                        _merge(fwd[a], b, succ)
                    else:
                        _merge(fwd[b], a, pred)
            else:
                self.deferred.append(rho)
        self.allowed = allowed
        self.fwd = [sorted(d.items()) for d in fwd]
        last = max((c for c in range(size) if self.fwd[c]), default=-1)
        self.free_from = last + 1


def _merge(table_by_cell, d, masks):
    cur = table_by_cell.get(d)
    table_by_cell[d] = list(masks) if cur is None else [x & y for x, y in zip(cur, masks)]


def _bits(mask):
    v = 0
    while mask:
        if mask & 1:
            yield v
        mask >>= 1
        v += 1


def _search(plan: _Plan, prefix: Sequence[int], counting: bool, stats: dict | None = None):
    """Shared DFS. Yields code strings, or (when counting) integer subtotals."""
    k, size, partial = plan.k, plan.size, plan.partial
    allowed = list(plan.allowed)
    fwd = plan.fwd
    codes = bytearray(size)
    deferred = plan.deferred
    free_from = plan.free_from if not deferred else size + 1
    prefix = list(prefix)
    if len(prefix) > size:
        raise InvalidInputError("prefix longer than the cell grid")

    def options(i):
        if i < len(prefix):
            c = prefix[i]
            if c == 0:
                return [0] if partial else []
            return [c] if allowed[i] >> (c - 1) & 1 else []
        opts = [0] if partial else []
        opts.extend(v + 1 for v in _bits(allowed[i]))
        return opts

    nodes = [0]

    def rec(i):
        nodes[0] += 1
        if stats is not None:
            stats["nodes"] = nodes[0]
        if counting and i >= free_from and i >= len(prefix):
            total = 1
            for d in range(i, size):
                total *= bin(allowed[d]).count("1") + partial
            yield total
            return
        if i == size:
            if deferred:
                f = PartialFn._trusted(k, plan.n, bytes(codes))
                if not all(preserves(f, rho) for rho in deferred):
                    return
            yield 1 if counting else bytes(codes)
            return
        for c in options(i):
            codes[i] = c
            if c == 0 or not fwd[i]:
                yield from rec(i + 1)
                continue
            v = c - 1
            saved = []
            dead = False
            for d, table in fwd[i]:
                old = allowed[d]
                new = old & table[v]
                if new != old:
                    saved.append((d, old))
                    allowed[d] = new
                    if not new and not partial:
                        dead = True
                        break
            if not dead:
                yield from rec(i + 1)
            for d, old in saved:
                allowed[d] = old
        codes[i] = 0

    return rec(0)


def enumerate_fns(
    k: int,
    n: int,
    filter: FnFilter | Sequence[Relation] | None = None,
    total_only: bool | None = None,
    *,
    prefix: Sequence[int] = (),
    allow_large: bool = False,
    stats: dict | None = None,
) -> Iterator[PartialFn]:
    """Every n-ary function on {0..k-1} passing ``filter``, in canonical-key order.

    ``prefix`` pins the codes of the first cells (0 = undefined, v+1 = value),
    which splits the stream into independent parts. When ``stats`` is a
    dict, the number of search nodes visited is kept under ``"nodes"``.
    """
    flt = _as_filter(filter, total_only)
    plan = _Plan(k, n, flt, allow_large)
    return (PartialFn._trusted(k, n, codes) for codes in _search(plan, prefix, False, stats))


def count_fns(
    k: int,
    n: int,
    filter: FnFilter | Sequence[Relation] | None = None,
    total_only: bool | None = None,
    *,
    prefix: Sequence[int] = (),
    allow_large: bool = False,
) -> int:
    """Number of functions :func:`enumerate_fns` would yield.

    Once every remaining cell is free of pairwise constraints the subtree
    is counted as a product of per-cell option counts instead of walked.
    """
    flt = _as_filter(filter, total_only)
    plan = _Plan(k, n, flt, allow_large)
    return sum(_search(plan, prefix, counting=True))
