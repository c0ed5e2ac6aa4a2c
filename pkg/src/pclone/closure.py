"""Bounded-arity closure of generator sets under partial composition.

The m-ary part of a generated partial clone only ever needs m-ary inner
functions: composition is associative, so any composite outer function
can be unfolded into a term whose nodes are generators or projections.
The engine therefore closes each arity m <= target separately, starting
from the m-ary projections and applying, semi-naively, every generator
and the projection ``e^2_1`` (which turns ``(g, h)`` into ``g`` restricted
to ``dom g & dom h``).

For strong closures only the subfunction-maximal members are carried
along. Composition is monotone under restriction in every argument, so
the composites of maximal members dominate everything else, and the
strong clone is the downset of the resulting antichain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import tables
from .core import (
    InvalidInputError,
    PartialFn,
    ResourceLimitError,
    projection,
    projections,
)
from .enumeration import FnFilter, enumerate_fns

log = logging.getLogger(__name__)

__all__ = [
    "ClosureConfig",
    "ClosureResult",
    "FragmentComparison",
    "generate",
    "member",
    "total_part",
    "str_j",
    "fragment_equal",
    "maximal_elements",
]


@dataclass(frozen=True)
class ClosureConfig:
    target_arity: int = 3
    intermediate_arity: int | None = None
    strong: bool = False
    max_size: int = 5_000_000
    max_rounds: int = 64
    max_compositions: int = 200_000_000

    def __post_init__(self):
        if self.intermediate_arity is None:
            object.__setattr__(self, "intermediate_arity", self.target_arity)
        if self.target_arity < 1 or self.intermediate_arity < self.target_arity:
            raise InvalidInputError("need 1 <= target_arity <= intermediate_arity")
        if min(self.max_size, self.max_rounds, self.max_compositions) < 1:
            raise InvalidInputError("resource caps must be positive")

    def as_dict(self) -> dict:
        return {
            "target_arity": self.target_arity,
            "intermediate_arity": self.intermediate_arity,
            "strong": self.strong,
            "max_size": self.max_size,
            "max_rounds": self.max_rounds,
            "max_compositions": self.max_compositions,
        }


@dataclass
class ClosureResult:
    k: int
    config: ClosureConfig
    functions: dict[bytes, PartialFn]
    saturated: bool = True
    stats: dict = field(default_factory=dict)
    # subfunction-maximal members per arity (strong closures only)
    maximal: dict[int, list[PartialFn]] = field(default_factory=dict)

    def __len__(self):
        return len(self.functions)

    def __iter__(self) -> Iterator[PartialFn]:
        return iter(self.members())

    def __contains__(self, f: PartialFn) -> bool:
        return f.key in self.functions

    def members(self, n: int | None = None) -> list[PartialFn]:
        """Members in canonical-key order, optionally only those of arity ``n``."""
        return [
            f for key, f in sorted(self.functions.items()) if n is None or f.n == n
        ]

    def arities(self) -> list[int]:
        return sorted({f.n for f in self.functions.values()})


def maximal_elements(fns: Iterable[PartialFn]) -> list[PartialFn]:
    """The members not strictly below another member of the same arity."""
    by_shape: dict[tuple[int, int], list[PartialFn]] = {}
    for f in set(fns):
        by_shape.setdefault((f.k, f.n), []).append(f)
    out = []
    for (k, n), group in sorted(by_shape.items()):
        rows = tables.sort_rows(tables.stack(group), k)
        masks = tables.value_masks(rows, k)
        keep = ~tables.strictly_dominated_within(masks)
        out.extend(tables.unstack(rows[keep], k, n))
    return out


class _Budget:
    def __init__(self, config: ClosureConfig, stats: dict):
        self.config = config
        self.stats = stats

    def spend(self, count: int):
        used = self.stats["compositions"] + count
        if used > self.config.max_compositions:
            raise _CapHit(f"composition budget {self.config.max_compositions} exhausted")
        self.stats["compositions"] = used


class _CapHit(Exception):
    pass


def _tuple_batches(n_old: int, n_delta: int, r: int, chunk: int):
    """Index tuples over old+delta (delta indices offset by n_old) with at
    least one delta component; the first delta component sits at position j."""
    n_all = n_old + n_delta
    for j in range(r):
        dims = [n_old] * j + [n_delta] + [n_all] * (r - 1 - j)
        total = int(np.prod(dims, dtype=object))
        if total == 0:
            continue
        for start in range(0, total, chunk):
            flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
            idx = list(np.unravel_index(flat, dims))
            idx[j] = idx[j] + n_old
            yield idx


def _tuple_count(n_old, n_delta, r):
    n_all = n_old + n_delta
    return sum(n_old**j * n_delta * n_all ** (r - 1 - j) for j in range(r))


def _close_arity(k, m, ops, strong, config, stats, chunk=1 << 18):
    """Fixpoint at arity m as sorted code rows (the antichain of maximal
    members when ``strong``). Raises _CapHit(message, rows...) on a cap."""
    cells = k**m
    budget = _Budget(config, stats)
    seen = tables.KeySet(k, cells)
    start = tables.stack(projections(k, m))
    start = seen.add_new(start)
    old = start[:0]
    delta = start
    rounds = 0
    while len(delta):
        rounds += 1
        if rounds > config.max_rounds:
            stats["rounds"] += rounds - 1
            raise _CapHit(f"max_rounds={config.max_rounds} reached at arity {m}", old, delta)
        pool = np.concatenate([old, delta])
        fresh = []
        n_fresh = 0
        try:
            for r, table in ops:
                budget.spend(_tuple_count(len(old), len(delta), r))
                for idx in _tuple_batches(len(old), len(delta), r, max(1, chunk // cells)):
                    out = tables.compose_stack(table, k, [pool[i] for i in idx])
                    new = seen.add_new(out)
                    if len(new):
                        fresh.append(new)
                        n_fresh += len(new)
                        if len(pool) + n_fresh > config.max_size:
                            raise _CapHit(f"max_size={config.max_size} exceeded at arity {m}")
        except _CapHit as hit:
            stats["rounds"] += rounds
            raise _CapHit(hit.args[0], pool, np.concatenate(fresh) if fresh else pool[:0]) from None
        new = tables.sort_rows(np.concatenate(fresh), k) if fresh else pool[:0]
        if strong and len(new):
            pool_masks = tables.value_masks(pool, k)
            new = new[~tables.dominated_by(tables.value_masks(new, k), pool_masks)]
            if len(new):
                new_masks = tables.value_masks(new, k)
                new = new[~tables.strictly_dominated_within(new_masks)]
                new_masks = tables.value_masks(new, k)
                pool = pool[~tables.dominated_by(pool_masks, new_masks)]
        stats["inserts"] += len(new)
        old, delta = pool, new
    stats["rounds"] += rounds
    return tables.sort_rows(old, k)


def _ops(k, generators, config):
    ops = []
    for g in generators:
        ops.append((g.n, tables.outer_table(g)))
    if not config.strong and config.intermediate_arity >= 2:
        ops.append((2, tables.outer_table(projection(k, 2, 1))))
    return ops


def generate(k: int, generators: Iterable[PartialFn], config: ClosureConfig | None = None) -> ClosureResult:
    """Members of arity <= ``config.target_arity`` of the (strong) partial clone
    generated by ``generators``, with compositions capped at ``intermediate_arity``.

    Raises :class:`ResourceLimitError` with the unsaturated result attached
    when a cap fires.
    """
    config = config or ClosureConfig()
    gens = sorted(set(generators))
    for g in gens:
        if g.k != k:
            raise InvalidInputError(f"generator on k={g.k}, expected k={k}")
        if g.n > config.intermediate_arity:
            raise InvalidInputError(
                f"generator arity {g.n} exceeds intermediate arity {config.intermediate_arity}"
            )
    if config.strong:
        gens = maximal_elements(gens)
    ops = _ops(k, gens, config)
    stats = {"rounds": 0, "compositions": 0, "inserts": 0, "per_arity": {}}
    functions: dict[bytes, PartialFn] = {}
    maximal: dict[int, list[PartialFn]] = {}

    def materialize(m, rows):
        if config.strong:
            maximal[m] = tables.unstack(rows, k, m)
            remaining = config.max_size - len(functions)
            try:
                rows = tables.downset(rows, k, limit=4 * config.max_size)
            except OverflowError:
                raise _CapHit(f"downset at arity {m} exceeds max_size={config.max_size}") from None
            if len(rows) > remaining:
                raise _CapHit(f"max_size={config.max_size} exceeded at arity {m}")
        for f in tables.unstack(rows, k, m):
            functions[f.key] = f
        stats["per_arity"][m] = len(rows)

    for m in range(1, config.target_arity + 1):
        try:
            rows = _close_arity(k, m, ops, config.strong, config, stats)
            materialize(m, rows)
        except _CapHit as hit:
            if len(hit.args) > 1:
                found = np.concatenate(hit.args[1:])
                found = tables.sort_rows(found, k)
                if config.strong:
                    maximal[m] = tables.unstack(found, k, m)
                else:
                    for f in tables.unstack(found, k, m):
                        functions[f.key] = f
            partial = ClosureResult(k, config, functions, False, stats, maximal)
            log.info("closure stopped: %s", hit.args[0])
            raise ResourceLimitError(hit.args[0], partial) from None
        log.debug("arity %d closed: %d members", m, stats["per_arity"][m])
    return ClosureResult(k, config, functions, True, stats, maximal)


def member(f: PartialFn, result: ClosureResult) -> bool:
    if f.n > result.config.target_arity:
        raise InvalidInputError(
            f"arity {f.n} above the closure's target arity {result.config.target_arity}"
        )
    if f.k != result.k:
        raise InvalidInputError(f"function on k={f.k}, closure on k={result.k}")
    return f.key in result.functions


def total_part(fns) -> list[PartialFn]:
    """Members with full domain, in canonical order."""
    if isinstance(fns, ClosureResult):
        fns = fns.functions.values()
    return sorted(f for f in set(fns) if 0 not in f.codes)


def str_j(k: int, target_arity: int, max_size: int = 5_000_000) -> ClosureResult:
    """All subfunctions of projections of arity <= ``target_arity``."""
    config = ClosureConfig(target_arity, target_arity, strong=True, max_size=max_size)
    functions: dict[bytes, PartialFn] = {}
    stats = {"rounds": 0, "compositions": 0, "inserts": 0, "per_arity": {}}
    maximal = {}
    for m in range(1, target_arity + 1):
        rows = tables.stack(projections(k, m))
        maximal[m] = tables.unstack(rows, k, m)
        try:
            sub = tables.downset(rows, k, limit=4 * max_size)
        except OverflowError:
            sub = None
        if sub is None or len(functions) + len(sub) > max_size:
            partial = ClosureResult(k, config, functions, False, stats, maximal)
            raise ResourceLimitError(f"Str(J) at arity {m} exceeds max_size={max_size}", partial)
        for f in tables.unstack(sub, k, m):
            functions[f.key] = f
        stats["per_arity"][m] = len(sub)
    return ClosureResult(k, config, functions, True, stats, maximal)


@dataclass(frozen=True)
class FragmentComparison:
    outcome: str  # "equal" | "missing-witness" | "extra-witness"
    witness: PartialFn | None = None
    closure_count: int = 0
    fragment_count: int = 0

    @property
    def equal(self) -> bool:
        return self.outcome == "equal"


def fragment_equal(
    result: ClosureResult,
    filter: FnFilter | Sequence,
    n: int,
    total_only: bool | None = None,
    allow_large: bool = False,
) -> FragmentComparison:
    """Compare the n-ary members of ``result`` with the enumerated filter fragment.

    Walks both sides in canonical order and reports the first discrepancy:
    a fragment function the closure lacks (missing) or a closure member
    outside the fragment (extra).
    """
    if n > result.config.target_arity:
        raise InvalidInputError(f"arity {n} above target arity {result.config.target_arity}")
    ours = result.members(n)
    theirs = enumerate_fns(result.k, n, filter, total_only, allow_large=allow_large)
    i = 0
    count = 0
    for f in theirs:
        count += 1
        if i < len(ours) and ours[i].key < f.key:
            return FragmentComparison("extra-witness", ours[i], len(ours), count)
        if i < len(ours) and ours[i].key == f.key:
            i += 1
            continue
        return FragmentComparison("missing-witness", f, len(ours), count)
    if i < len(ours):
        return FragmentComparison("extra-witness", ours[i], len(ours), count)
    return FragmentComparison("equal", None, len(ours), count)


def is_restriction_closed(result: ClosureResult) -> bool:
    """Every single-cell deletion of every member is a member."""
    for f in result.functions.values():
        codes = bytearray(f.codes)
        for i, c in enumerate(f.codes):
            if c:
                codes[i] = 0
                if bytes((f.k, f.n)) + bytes(codes) not in result.functions:
                    return False
                codes[i] = c
    return True

