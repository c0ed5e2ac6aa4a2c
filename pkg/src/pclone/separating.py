"""Separating families of total functions.

A family f_1..f_m of total n-ary functions separates a point b when no
other point a has the same image tuple (f_1(a), ..., f_m(a)). A clone is
separating when, for some m and every n > m, each point of A^n is
separated by m of its n-ary members; the searches below decide the
per-point question for one (n, m, b) and a finite candidate pool.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import InvalidInputError, PartialFn, decode, encode
from .tables import stack

__all__ = [
    "SeparationInstance",
    "SeparationReport",
    "separates_point",
    "exists_separating_family",
    "unit_vector",
    "MODES",
]

MODES = ("all-points", "unit-vectors-only")


def unit_vector(k: int, n: int, i: int) -> tuple[int, ...]:
    """The point with 1 in coordinate i (1-based) and 0 elsewhere."""
    if not 1 <= i <= n:
        raise InvalidInputError(f"unit vector index {i} outside 1..{n}")
    return tuple(1 if j == i - 1 else 0 for j in range(n))


def _check_family(fns: Sequence[PartialFn]):
    if not fns:
        raise InvalidInputError("need at least one function")
    k, n = fns[0].k, fns[0].n
    for f in fns:
        if f.k != k or f.n != n:
            raise InvalidInputError("functions must share k and arity")
        if 0 in f.codes:
            raise InvalidInputError("separation is defined for total functions only")
    return k, n


def separates_point(fns: Sequence[PartialFn], b: Sequence[int]) -> tuple[int, ...] | None:
    """None when ``fns`` separate ``b`` from every other point; otherwise the
    first point (in cell order) that collides with ``b``."""
    k, n = _check_family(fns)
    if len(b) != n:
        raise InvalidInputError(f"point {tuple(b)} does not have {n} coordinates")
    bi = encode(b, k)
    target = [f.codes[bi] for f in fns]
    for ai in range(k**n):
        if ai != bi and all(f.codes[ai] == t for f, t in zip(fns, target)):
            return decode(ai, k, n)
    return None


@dataclass(frozen=True)
class SeparationInstance:
    k: int
    n: int
    pool: tuple[PartialFn, ...]
    m: int
    b: tuple[int, ...] | None = None

    def __init__(self, k, n, pool, m, b=None):
        pool = tuple(sorted(set(pool)))
        for f in pool:
            if f.k != k or f.n != n or 0 in f.codes:
                raise InvalidInputError("pool members must be total, of arity n on k")
        if m < 1:
            raise InvalidInputError("m must be >= 1")
        b = tuple(b) if b is not None else (0,) * n
        if len(b) != n or any(not 0 <= x < k for x in b):
            raise InvalidInputError(f"bad point {b}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "pool", pool)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "b", b)


@dataclass
class SeparationReport:
    outcome: str  # "separated-by" | "no-family" | "resource-limit"
    family: tuple[PartialFn, ...] | None = None
    collisions: list[tuple[tuple[PartialFn, ...], tuple[int, ...]]] = field(default_factory=list)
    examined: int = 0
    mode: str = "all-points"

    @property
    def separated(self) -> bool:
        return self.outcome == "separated-by"

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "family": [f.codes.hex() for f in self.family] if self.family else None,
            "collisions": [
                {"family": [f.codes.hex() for f in fam], "point": list(a)} for fam, a in self.collisions
            ],
            "examined": self.examined,
            "mode": self.mode,
        }


def exists_separating_family(
    instance: SeparationInstance,
    mode: str = "all-points",
    max_tuples: int = 10_000_000,
) -> SeparationReport:
    """Search m-subsets of the pool for one that separates ``instance.b``.

    In ``unit-vectors-only`` mode collisions are first sought among the
    unit vectors and the zero vector; a family with no such collision is
    then checked against the full grid, so the verdict never depends on
    the mode, only the witnesses do.
    """
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}; use one of {MODES}")
    k, n, m, b = instance.k, instance.n, instance.m, instance.b
    pool = instance.pool
    size = min(m, len(pool))
    total = math.comb(len(pool), size)
    if total > max_tuples:
        return SeparationReport("resource-limit", mode=mode)
    if size == 0:
        return SeparationReport("no-family", mode=mode)
    values = stack(pool)  # (N, k^n)
    bi = encode(b, k)
    others = np.array([i for i in range(k**n) if i != bi], dtype=np.intp)
    if mode == "unit-vectors-only":
        special = [encode(unit_vector(k, n, i), k) for i in range(1, n + 1)] + [0]
        first = np.array([i for i in dict.fromkeys(special) if i != bi], dtype=np.intp)
    else:
        first = others
    report = SeparationReport("no-family", mode=mode)
    for combo in itertools.combinations(range(len(pool)), size):
        report.examined += 1
        rows = values[list(combo)]
        target = rows[:, bi : bi + 1]
        hit = None
        for cand in (first, others) if mode == "unit-vectors-only" else (others,):
            same = (rows[:, cand] == target).all(axis=0)
            if same.any():
                hit = int(cand[np.argmax(same)])
                break
        fam = tuple(pool[i] for i in combo)
        if hit is None:
            return SeparationReport("separated-by", fam, report.collisions, report.examined, mode)
        report.collisions.append((fam, decode(hit, k, n)))
    return report
