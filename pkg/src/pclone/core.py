"""Partial functions on a finite domain {0, ..., k-1}.

A partial function of arity n is stored as one code byte per cell of the
k**n grid: 0 marks an undefined cell, ``v + 1`` marks the value ``v``.
Cells are indexed big-endian (first coordinate most significant), so the
code string read lexicographically is also the canonical ordering used
everywhere else in the package.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "InvalidInputError",
    "ResourceLimitError",
    "Domain",
    "PartialFn",
    "encode",
    "decode",
    "points",
    "projection",
    "projections",
    "empty_function",
    "constant",
    "majority",
    "builtin_function",
    "compose",
    "restrict",
    "is_subfunction",
    "is_total",
    "total_points",
    "format_pfn",
    "parse_pfn",
    "parse_pfns",
    "iter_format",
]


class InvalidInputError(ValueError):
    """Raised on malformed arguments: arity or domain mismatches, bad codes."""


class ResourceLimitError(RuntimeError):
    """A configured cap fired. ``partial`` carries whatever was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class Domain:
    """The set {0, ..., k-1}."""

    __slots__ = ("k",)

    def __init__(self, k: int):
        if int(k) != k or k < 2:
            raise InvalidInputError(f"domain size must be an integer >= 2, got {k!r}")
        self.k = int(k)

    def __iter__(self):
        return iter(range(self.k))

    def __len__(self):
        return self.k

    def __contains__(self, x):
        return isinstance(x, (int, np.integer)) and 0 <= x < self.k

    def __eq__(self, other):
        return isinstance(other, Domain) and other.k == self.k

    def __hash__(self):
        return hash(("Domain", self.k))

    def __repr__(self):
        return f"Domain({self.k})"


def _check_kn(k, n):
    if int(k) != k or k < 2:
        raise InvalidInputError(f"domain size must be >= 2, got {k!r}")
    if int(n) != n or n < 1:
        raise InvalidInputError(f"arity must be >= 1, got {n!r}")


def encode(coords: Sequence[int], k: int) -> int:
    """Cell index of a point, first coordinate most significant."""
    if len(coords) == 0:
        raise InvalidInputError("points have at least one coordinate")
    idx = 0
    for c in coords:
        if not 0 <= c < k:
            raise InvalidInputError(f"coordinate {c} out of range for k={k}")
        idx = idx * k + int(c)
    return idx


def decode(index: int, k: int, n: int) -> tuple[int, ...]:
    _check_kn(k, n)
    if not 0 <= index < k**n:
        raise InvalidInputError(f"index {index} out of range for k={k}, n={n}")
    out = [0] * n
    for i in range(n - 1, -1, -1):
        index, out[i] = divmod(index, k)
    return tuple(out)


def points(k: int, n: int) -> Iterator[tuple[int, ...]]:
    """All points of {0..k-1}^n in cell-index order."""
    return itertools.product(range(k), repeat=n)


class PartialFn:
    """An n-ary partial function on {0, ..., k-1}.

    Instances are immutable and hashable; equality is cellwise on
    (k, n, domain, values).
    """

    __slots__ = ("k", "n", "codes", "_hash")

    def __init__(self, k: int, n: int, codes: bytes):
        _check_kn(k, n)
        codes = bytes(codes)
        if len(codes) != k**n:
            raise InvalidInputError(f"expected {k**n} cells, got {len(codes)}")
        if codes and max(codes) > k:
            raise InvalidInputError(f"value out of range for k={k}")
        self.k = int(k)
        self.n = int(n)
        self.codes = codes
        self._hash = hash((self.k, self.n, codes))

    # -- construction -------------------------------------------------
    @classmethod
    def _trusted(cls, k: int, n: int, codes: bytes) -> "PartialFn":
        # hot-path constructor for codes produced inside the package
        self = object.__new__(cls)
        self.k, self.n, self.codes = k, n, codes
        self._hash = hash((k, n, codes))
        return self

    @classmethod
    def from_table(cls, k: int, n: int, table: Sequence[int | None]) -> "PartialFn":
        """Build from per-cell values, ``None`` meaning undefined."""
        try:
            codes = bytes(0 if v is None else _checked_value(v, k) + 1 for v in table)
        except TypeError as exc:
            raise InvalidInputError(str(exc)) from None
        return cls(k, n, codes)

    @classmethod
    def from_mapping(cls, k: int, n: int, mapping: Mapping[Sequence[int], int]) -> "PartialFn":
        _check_kn(k, n)
        codes = bytearray(k**n)
        for pt, v in mapping.items():
            if len(pt) != n:
                raise InvalidInputError(f"point {pt} does not have {n} coordinates")
            codes[encode(pt, k)] = _checked_value(v, k) + 1
        return cls(k, n, bytes(codes))

    @classmethod
    def from_callable(cls, k: int, n: int, fn, dom=None) -> "PartialFn":
        """Tabulate ``fn(*point)`` on ``dom`` (default: every point)."""
        _check_kn(k, n)
        if dom is None:
            return cls.from_table(k, n, [fn(*pt) for pt in points(k, n)])
        mapping = {tuple(pt): fn(*pt) for pt in dom}
        return cls.from_mapping(k, n, mapping)

    @classmethod
    def from_mask(cls, k: int, n: int, dom: int, vals: Sequence[int]) -> "PartialFn":
        """Build from a domain bit mask (bit i = cell i) and values in cell order."""
        _check_kn(k, n)
        size = k**n
        if dom < 0 or dom >> size:
            raise InvalidInputError("domain mask has bits beyond the cell grid")
        codes = bytearray(size)
        it = iter(vals)
        for i in range(size):
            if dom >> i & 1:
                try:
                    codes[i] = _checked_value(next(it), k) + 1
                except StopIteration:
                    raise InvalidInputError("fewer values than defined cells") from None
        if next(it, None) is not None:
            raise InvalidInputError("more values than defined cells")
        return cls(k, n, bytes(codes))

    # -- views ---------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.codes)

    @property
    def key(self) -> bytes:
        """Canonical key: equal keys iff equal functions; sorts like enumeration order."""
        return bytes((self.k, self.n)) + self.codes

    @property
    def dom(self) -> int:
        mask = 0
        for i, c in enumerate(self.codes):
            if c:
                mask |= 1 << i
        return mask

    @property
    def vals(self) -> tuple[int, ...]:
        return tuple(c - 1 for c in self.codes if c)

    @property
    def table(self) -> tuple[int | None, ...]:
        return tuple(c - 1 if c else None for c in self.codes)

    def array(self) -> np.ndarray:
        """Code array (0 undefined, v+1 defined), read-only view."""
        return np.frombuffer(self.codes, dtype=np.uint8)

    def domain_points(self) -> list[tuple[int, ...]]:
        return [decode(i, self.k, self.n) for i, c in enumerate(self.codes) if c]

    def at(self, index: int) -> int | None:
        c = self.codes[index]
        return c - 1 if c else None

    def __call__(self, *coords: int) -> int | None:
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) != self.n:
            raise InvalidInputError(f"expected {self.n} arguments, got {len(coords)}")
        return self.at(encode(coords, self.k))

    def defined(self, *coords: int) -> bool:
        return self(*coords) is not None

    # -- protocol --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PartialFn):
            return NotImplemented
        return self.k == other.k and self.n == other.n and self.codes == other.codes

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        cells = total_points(self)
        return f"<PartialFn k={self.k} n={self.n} defined={cells}/{self.size}>"

    def __str__(self):
        return format_pfn(self)


def _checked_value(v, k):
    if isinstance(v, bool) or int(v) != v or not 0 <= v < k:
        raise InvalidInputError(f"value {v!r} out of range for k={k}")
    return int(v)


def projection(k: int, n: int, i: int) -> PartialFn:
    """The total n-ary projection onto coordinate i (1-based)."""
    _check_kn(k, n)
    if not 1 <= i <= n:
        raise InvalidInputError(f"projection index {i} outside 1..{n}")
    stride = k ** (n - i)
    return PartialFn(k, n, bytes((idx // stride) % k + 1 for idx in range(k**n)))


def projections(k: int, n: int) -> list[PartialFn]:
    return [projection(k, n, i) for i in range(1, n + 1)]


def empty_function(k: int, n: int) -> PartialFn:
    _check_kn(k, n)
    return PartialFn(k, n, bytes(k**n))


def constant(k: int, n: int, value: int, dom=None) -> PartialFn:
    return PartialFn.from_callable(k, n, lambda *_: value, dom)


def majority() -> PartialFn:
    """The ternary majority function on {0, 1}."""
    return PartialFn.from_callable(2, 3, lambda x, y, z: (x & y) | (x & z) | (y & z))


BUILTIN_FUNCTIONS = {
    "maj": majority,
    "neg": lambda: PartialFn.from_callable(2, 1, lambda x: 1 - x),
    "and": lambda: PartialFn.from_callable(2, 2, lambda x, y: x & y),
    "or": lambda: PartialFn.from_callable(2, 2, lambda x, y: x | y),
}


def builtin_function(name: str) -> PartialFn:
    """A named function on {0, 1}: maj, neg, and, or."""
    try:
        return BUILTIN_FUNCTIONS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown function {name!r}; known: {', '.join(BUILTIN_FUNCTIONS)}") from None


def compose(f: PartialFn, gs: Sequence[PartialFn]) -> PartialFn:
    """``f[g1, ..., gn]``.

    Defined at ``a`` iff every ``gi`` is defined at ``a`` and the tuple of
    their values lies in the domain of ``f``.
    """
    gs = list(gs)
    if not gs:
        raise InvalidInputError("composition needs at least one inner function")
    if len(gs) != f.n:
        raise InvalidInputError(f"outer arity {f.n} but {len(gs)} inner functions")
    k, m = gs[0].k, gs[0].n
    for g in gs:
        if g.k != f.k or g.k != k:
            raise InvalidInputError("domain sizes differ")
        if g.n != m:
            raise InvalidInputError("inner functions must share one arity")
    fc = f.codes
    inner = [g.codes for g in gs]
    out = bytearray(k**m)
    for cell in range(k**m):
        idx = 0
        for gc in inner:
            c = gc[cell]
            if not c:
                break
            idx = idx * k + c - 1
        else:
            out[cell] = fc[idx]
    return PartialFn(k, m, bytes(out))


def _mask_bytes(mask, size):
    if isinstance(mask, int):
        if mask < 0 or mask >> size:
            raise InvalidInputError("mask has bits beyond the cell grid")
        return [(mask >> i) & 1 for i in range(size)]
    bits = [1 if b else 0 for b in mask]
    if len(bits) != size:
        raise InvalidInputError(f"mask length {len(bits)} != {size}")
    return bits


def restrict(f: PartialFn, mask) -> PartialFn:
    """Restriction of ``f`` to the cells in ``mask`` (int bit mask or bool sequence)."""
    bits = _mask_bytes(mask, f.size)
    codes = f.codes
    for i, b in enumerate(bits):
        if b and not codes[i]:
            raise InvalidInputError(f"mask cell {i} is outside dom(f)")
    return PartialFn(f.k, f.n, bytes(c if b else 0 for c, b in zip(codes, bits)))


def is_subfunction(g: PartialFn, f: PartialFn) -> bool:
    """True iff dom(g) is inside dom(f) and f agrees with g there."""
    if g.k != f.k or g.n != f.n:
        raise InvalidInputError("subfunction test needs equal k and arity")
    return all(not a or a == b for a, b in zip(g.codes, f.codes))


def is_total(f: PartialFn) -> bool:
    return 0 not in f.codes


def total_points(f: PartialFn) -> int:
    return len(f.codes) - f.codes.count(0)


# -- text format -------------------------------------------------------------

def format_pfn(f: PartialFn) -> str:
    lines = [f"pfn k={f.k} n={f.n}"]
    for i, c in enumerate(f.codes):
        if c:
            lines.append(" ".join(map(str, decode(i, f.k, f.n))) + f" -> {c - 1}")
    return "\n".join(lines) + "\n"


def _parse_header(line, tag, fields):
    parts = line.split()
    if not parts or parts[0] != tag:
        raise InvalidInputError(f"expected a '{tag}' header, got {line!r}")
    got = {}
    for part in parts[1:]:
        name, sep, val = part.partition("=")
        if not sep or name not in fields or name in got:
            raise InvalidInputError(f"bad header field {part!r}")
        try:
            got[name] = int(val)
        except ValueError:
            raise InvalidInputError(f"bad header value {part!r}") from None
    if set(got) != set(fields):
        raise InvalidInputError(f"header must give {', '.join(fields)}")
    return [got[f] for f in fields]


def _parse_block(lines: list[str]) -> PartialFn:
    k, n = _parse_header(lines[0], "pfn", ("k", "n"))
    _check_kn(k, n)
    codes = bytearray(k**n)
    for line in lines[1:]:
        lhs, sep, rhs = line.partition("->")
        if not sep:
            raise InvalidInputError(f"missing '->' in {line!r}")
        try:
            coords = [int(t) for t in lhs.split()]
            v = int(rhs.strip())
        except ValueError:
            raise InvalidInputError(f"non-integer entry in {line!r}") from None
        if len(coords) != n:
            raise InvalidInputError(f"expected {n} coordinates in {line!r}")
        idx = encode(coords, k)
        if codes[idx]:
            raise InvalidInputError(f"duplicate cell {tuple(coords)}")
        codes[idx] = _checked_value(v, k) + 1
    return PartialFn(k, n, bytes(codes))


def parse_pfns(text: str) -> list[PartialFn]:
    """Parse any number of ``pfn`` blocks. Blank lines and ``#`` comments are ignored."""
    blocks: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("pfn"):
            blocks.append([line])
        elif not blocks:
            raise InvalidInputError(f"data before any 'pfn' header: {line!r}")
        else:
            blocks[-1].append(line)
    return [_parse_block(b) for b in blocks]


def parse_pfn(text: str) -> PartialFn:
    fns = parse_pfns(text)
    if len(fns) != 1:
        raise InvalidInputError(f"expected exactly one function, found {len(fns)}")
    return fns[0]


def iter_format(fns: Iterable[PartialFn]) -> Iterator[str]:
    for f in fns:
        yield format_pfn(f)
