"""On-disk closure dumps: a JSON header line followed by pfn blocks.

The header records k, the closure config, the saturation flag, the stats
and a SHA-256 digest of everything after the header line, so truncated
or edited files are rejected on load.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .closure import ClosureConfig, ClosureResult, maximal_elements
from .core import InvalidInputError, format_pfn, parse_pfns

MAGIC = "#pclone-cache "


class CorruptCacheError(InvalidInputError):
    pass


def dumps(result: ClosureResult) -> str:
    body = "".join(format_pfn(f) + "\n" for f in result.members())
    header = {
        "k": result.k,
        "config": result.config.as_dict(),
        "saturated": result.saturated,
        "count": len(result),
        "stats": {k: v for k, v in result.stats.items() if k != "per_arity"},
        "sha256": hashlib.sha256(body.encode()).hexdigest(),
    }
    return MAGIC + json.dumps(header, sort_keys=True) + "\n" + body


def loads(text: str) -> ClosureResult:
    first, sep, body = text.partition("\n")
    if not first.startswith(MAGIC):
        raise CorruptCacheError("missing cache header")
    try:
        header = json.loads(first[len(MAGIC):])
        digest = header["sha256"]
        k = int(header["k"])
        config = ClosureConfig(**header["config"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptCacheError(f"unreadable cache header: {exc}") from None
    if hashlib.sha256(body.encode()).hexdigest() != digest:
        raise CorruptCacheError("cache digest mismatch")
    fns = parse_pfns(body)
    if len(fns) != header.get("count", len(fns)):
        raise CorruptCacheError("cache member count mismatch")
    if any(f.k != k for f in fns):
        raise CorruptCacheError("cache member on the wrong domain")
    functions = {f.key: f for f in fns}
    maximal = {}
    if config.strong:
        for f in maximal_elements(fns):
            maximal.setdefault(f.n, []).append(f)
    return ClosureResult(k, config, functions, bool(header["saturated"]), dict(header["stats"]), maximal)


def save(result: ClosureResult, path) -> Path:
    path = Path(path)
    path.write_text(dumps(result))
    return path


def load(path) -> ClosureResult:
    return loads(Path(path).read_text())
