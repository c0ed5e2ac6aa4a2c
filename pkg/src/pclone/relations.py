"""Relations on {0..k-1}, permutations, and the preservation predicate."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import InvalidInputError, PartialFn

__all__ = [
    "Relation",
    "Permutation",
    "preserves",
    "preserves_batch",
    "make_pi",
    "rho_from_pi",
    "graph_of",
    "builtin",
    "BUILTIN_NAMES",
    "TARDOS_COVERS",
    "is_order",
    "is_bounded_order",
    "format_relation",
    "parse_relation",
]


@dataclass(frozen=True)
class Relation:
    """An h-ary relation on {0..k-1}, stored as a sorted tuple of tuples."""

    k: int
    h: int
    tuples: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __init__(self, k: int, h: int, tuples: Iterable[Sequence[int]], name: str = ""):
        if int(k) != k or k < 2:
            raise InvalidInputError(f"domain size must be >= 2, got {k!r}")
        if int(h) != h or h < 1:
            raise InvalidInputError(f"relation arity must be >= 1, got {h!r}")
        seen = set()
        for t in tuples:
            t = tuple(int(x) for x in t)
            if len(t) != h:
                raise InvalidInputError(f"tuple {t} does not have length {h}")
            if any(not 0 <= x < k for x in t):
                raise InvalidInputError(f"tuple {t} has an entry outside 0..{k - 1}")
            if t in seen:
                raise InvalidInputError(f"duplicate tuple {t}")
            seen.add(t)
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "h", int(h))
        object.__setattr__(self, "tuples", tuple(sorted(seen)))
        object.__setattr__(self, "name", name)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._set

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.tuples)

    @cached_property
    def lookup(self) -> np.ndarray:
        """Boolean membership table indexed by the base-k code of a tuple."""
        table = np.zeros(self.k**self.h, dtype=bool)
        for t in self.tuples:
            idx = 0
            for x in t:
                idx = idx * self.k + x
            table[idx] = True
        return table

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Relation{label} k={self.k} h={self.h} |rho|={len(self.tuples)}>"


@dataclass(frozen=True)
class Permutation:
    k: int
    mapping: tuple[int, ...]

    def __init__(self, mapping: Sequence[int]):
        mapping = tuple(int(x) for x in mapping)
        k = len(mapping)
        if k < 2 or sorted(mapping) != list(range(k)):
            raise InvalidInputError(f"{mapping} is not a bijection on 0..{k - 1}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def from_cycles(cls, k: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        mapping = list(range(k))
        seen = set()
        for cyc in cycles:
            for i, x in enumerate(cyc):
                if x in seen or not 0 <= x < k:
                    raise InvalidInputError(f"bad cycle element {x}")
                seen.add(x)
                mapping[x] = cyc[(i + 1) % len(cyc)]
        return cls(mapping)

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def power(self, e: int) -> "Permutation":
        out = list(range(self.k))
        for _ in range(e % self.order):
            out = [self.mapping[x] for x in out]
        return Permutation(out)

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        seen = set()
        out = []
        for start in range(self.k):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self.mapping[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self.mapping[x]
            out.append(tuple(cyc))
        return tuple(out)

    @property
    def order(self) -> int:
        lcm = 1
        for c in self.cycles:
            lcm = lcm * len(c) // _gcd(lcm, len(c))
        return lcm

    @property
    def fixed_point_free(self) -> bool:
        return all(self.mapping[x] != x for x in range(self.k))

    @property
    def p(self) -> int | None:
        """Common cycle length, or None when cycles differ in length."""
        lengths = {len(c) for c in self.cycles}
        return lengths.pop() if len(lengths) == 1 else None

    def __str__(self):
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def make_pi(k: int, p: int) -> Permutation:
    """The permutation (0 1 .. p-1)(p .. 2p-1)...((k-p) .. (k-1))."""
    if not _is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    if k < 2 or k % p:
        raise InvalidInputError(f"{p} does not divide {k}")
    return Permutation.from_cycles(k, [range(s, s + p) for s in range(0, k, p)])


def rho_from_pi(pi: Permutation) -> Relation:
    """The orbit relation {(x, pi(x), ..., pi^(p-1)(x))}."""
    p = pi.p
    if p is None or not pi.fixed_point_free:
        raise InvalidInputError(f"{pi} is not fixed-point-free with uniform cycle length")
    rows = []
    for x in range(pi.k):
        t = [x]
        for _ in range(p - 1):
            t.append(pi(t[-1]))
        rows.append(t)
    return Relation(pi.k, p, rows, name=f"rho_pi{pi}")


def graph_of(pi: Permutation) -> Relation:
    return Relation(pi.k, 2, [(x, pi(x)) for x in range(pi.k)], name=f"graph{pi}")


def _chain(k):
    return Relation(k, 2, [(x, y) for x in range(k) for y in range(x, k)], name=f"chain({k})")


# covering pairs a < b of the eight-element bounded order (0 bottom, 1 top)
TARDOS_COVERS = (
    (0, 4), (0, 7), (4, 3), (3, 2), (2, 1), (7, 6),
    (6, 5), (5, 1), (4, 6), (3, 5), (7, 3), (6, 2),
)


def _reflexive_transitive_closure(k, pairs):
    reach = np.eye(k, dtype=bool)
    for a, b in pairs:
        reach[a, b] = True
    for m in range(k):
        reach |= reach[:, m : m + 1] & reach[m : m + 1, :]
    return [(a, b) for a in range(k) for b in range(k) if reach[a, b]]


BUILTIN_NAMES = ("leq2", "neq2", "chain(k)", "singleton(k,a)", "tardos8", "pi(k,p)", "rho_pi(k,p)")

_CALL = re.compile(r"^(\w+)\((\d+(?:\s*,\s*\d+)*)\)$")


def builtin(name: str) -> Relation:
    """Named relations: leq2, neq2, chain(k), singleton(k,a), tardos8,
    plus pi(k,p) (graph of the standard permutation) and rho_pi(k,p)."""
    name = name.strip()
    if name == "leq2":
        return Relation(2, 2, [(0, 0), (0, 1), (1, 1)], name="leq2")
    if name == "neq2":
        return Relation(2, 2, [(0, 1), (1, 0)], name="neq2")
    if name == "tardos8":
        return Relation(8, 2, _reflexive_transitive_closure(8, TARDOS_COVERS), name="tardos8")
    m = _CALL.match(name.replace(" ", ""))
    if m:
        head = m.group(1)
        args = [int(a) for a in m.group(2).split(",")]
        if head == "chain" and len(args) == 1:
            return _chain(args[0])
        if head == "singleton" and len(args) == 2:
            k, a = args
            return Relation(k, 1, [(a,)], name=f"singleton({k},{a})")
        if head == "pi" and len(args) == 2:
            return graph_of(make_pi(*args))
        if head == "rho_pi" and len(args) == 2:
            return rho_from_pi(make_pi(*args))
    raise InvalidInputError(f"unknown relation {name!r}; known: {', '.join(BUILTIN_NAMES)}")


def _require_binary(rho):
    if rho.h != 2:
        raise InvalidInputError("order properties need a binary relation")


def is_order(rho: Relation) -> bool:
    _require_binary(rho)
    k = rho.k
    if any((x, x) not in rho for x in range(k)):
        return False
    if any(a != b and (b, a) in rho for a, b in rho.tuples):
        return False
    return all(
        (a, d) in rho for a, b in rho.tuples for c, d in rho.tuples if b == c
    )


def is_bounded_order(rho: Relation) -> bool:
    if not is_order(rho):
        return False
    k = rho.k
    has_bottom = any(all((b, x) in rho for x in range(k)) for b in range(k))
    has_top = any(all((x, t) in rho for x in range(k)) for t in range(k))
    return has_bottom and has_top


def _row_cells(rho: Relation, n: int) -> list[tuple[int, ...]]:
    """Cell indices of the h rows, for each choice of n columns from rho."""
    k = rho.k
    out = []
    for cols in itertools.product(rho.tuples, repeat=n):
        rows = []
        for i in range(rho.h):
            idx = 0
            for col in cols:
                idx = idx * k + col[i]
            rows.append(idx)
        out.append(tuple(rows))
    return out


def preserves(f: PartialFn, rho: Relation) -> bool:
    """True iff every h x n matrix with columns in rho and all rows in dom(f)
    is mapped row-wise into rho."""
    if f.k != rho.k:
        raise InvalidInputError(f"function on k={f.k} vs relation on k={rho.k}")
    codes = f.codes
    k, n, h = f.k, f.n, rho.h
    members = rho._set
    weights = [k ** (n - 1 - j) for j in range(n)]
    for cols in itertools.product(rho.tuples, repeat=n):
        image = []
        for i in range(h):
            idx = 0
            for w, col in zip(weights, cols):
                idx += w * col[i]
            c = codes[idx]
            if not c:
                break
            image.append(c - 1)
        else:
            if tuple(image) not in members:
                return False
    return True


def preserves_batch(codes: np.ndarray, n: int, rho: Relation, chunk: int = 1 << 22) -> np.ndarray:
    """Vectorised preservation test over a stack of code rows (N, k**n)."""
    codes = np.asarray(codes, dtype=np.uint8)
    k = rho.k
    if codes.ndim != 2 or codes.shape[1] != k**n:
        raise InvalidInputError(f"expected an (N, {k**n}) code array")
    rows = np.array(_row_cells(rho, n), dtype=np.intp)  # (C, h)
    lookup = rho.lookup
    weights = k ** np.arange(rho.h - 1, -1, -1, dtype=np.int64)
    out = np.ones(len(codes), dtype=bool)
    per = max(1, chunk // max(1, rows.size))
    for start in range(0, len(codes), per):
        block = codes[start : start + per]
        vals = block[:, rows]  # (B, C, h)
        defined = (vals > 0).all(axis=2)
        enc = ((vals.astype(np.int64) - 1).clip(min=0) * weights).sum(axis=2)
        bad = defined & ~lookup[enc]
        out[start : start + per] = ~bad.any(axis=1)
    return out


def format_relation(rho: Relation) -> str:
    lines = [f"rel k={rho.k} h={rho.h}"]
    lines += [" ".join(map(str, t)) for t in rho.tuples]
    return "\n".join(lines) + "\n"


def parse_relation(text: str) -> Relation:
    from .core import _parse_header

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidInputError("empty relation text")
    k, h = _parse_header(lines[0], "rel", ("k", "h"))
    try:
        tuples = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError:
        raise InvalidInputError("non-integer relation entry") from None
    return Relation(k, h, tuples)
