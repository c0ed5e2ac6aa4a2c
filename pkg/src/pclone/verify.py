"""Named, bounded-parameter checks with machine-readable reports.

Each check is exhaustive over the finite instance it names. A verdict of
``resource-limit`` means a cap fired before the instance was decided; it
is never reported as a failure or as a pass.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .closure import ClosureConfig, fragment_equal, generate, str_j, total_part
from .core import (
    InvalidInputError,
    PartialFn,
    ResourceLimitError,
    constant,
    is_subfunction,
    is_total,
    majority,
    projection,
    projections,
    total_points,
)
from .enumeration import FnFilter, count_fns, enumerate_fns
from .relations import (
    Relation,
    builtin,
    graph_of,
    make_pi,
    preserves,
    preserves_batch,
    rho_from_pi,
)
from .separating import SeparationInstance, exists_separating_family, unit_vector
from .tables import stack

__all__ = ["Report", "CHECKS", "DEFAULTS", "run_check", "run_all", "fn_json", "worker_count"]

PASS, FAIL, LIMIT = "pass", "fail", "resource-limit"


@dataclass
class Report:
    check: str
    params: dict
    verdict: str
    witnesses: dict = field(default_factory=dict)
    examined: int = 0
    millis: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def as_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        return f"{self.check:<20} {self.verdict:<15} examined={self.examined}"


def fn_json(f: PartialFn) -> dict:
    return {"k": f.k, "n": f.n, "table": list(f.table)}


def _smallest_prime_divisor(k):
    return next(p for p in range(2, k + 1) if k % p == 0)


def _tuple(v):
    return tuple(v) if isinstance(v, (tuple, list)) else (v,)


class _Verdict:
    """Accumulates a verdict; the first failure keeps its counterexample."""

    def __init__(self):
        self.verdict = PASS
        self.witnesses: dict[str, Any] = {}
        self.examined = 0

    def fail(self, **witness):
        if self.verdict != FAIL:
            self.witnesses["counterexample"] = witness
        self.verdict = FAIL

    def limit(self, **info):
        if self.verdict == PASS:
            self.verdict = LIMIT
        self.witnesses.setdefault("resource_limit", []).append(info)


# -- checks ------------------------------------------------------------------

def _lemma_trivial(p, v):
    leq, neq = builtin("leq2"), builtin("neq2")
    for n in _tuple(p["n"]):
        fns = list(enumerate_fns(2, n, [leq, neq], total_only=True))
        expected = count_fns(2, n, [leq, neq], total_only=True)
        if expected != len(fns):
            v.fail(reason="enumeration/count mismatch", n=n, enumerated=len(fns), counted=expected)
        first = projection(2, n, 1)
        for f in fns:
            v.examined += 1
            if f((0,) * n) != 0:
                v.fail(reason="f(0,...,0) != 0", function=fn_json(f))
            if f((1,) + (0,) * (n - 1)) == 1 and f != first:
                v.fail(reason="f(1,0,...,0) = 1 but f is not the first projection", function=fn_json(f))
        v.witnesses[f"n={n}"] = {"functions": len(fns)}


def _refutation(k, n, m, pool, mode, v, label, unit_only):
    inst = SeparationInstance(k, n, pool, m, (0,) * n)
    rep = exists_separating_family(inst, mode)
    v.examined += rep.examined
    if rep.outcome == LIMIT:
        v.limit(case=label)
        return rep
    if rep.outcome != "no-family":
        v.fail(reason="separating family found", case=label, family=[fn_json(f) for f in rep.family])
        return rep
    units = {unit_vector(k, n, i) for i in range(1, n + 1)}
    for fam, a in rep.collisions:
        zero = (0,) * n
        if a == zero or any(f(a) != f(zero) for f in fam):
            v.fail(reason="invalid collision witness", case=label, point=list(a))
        if unit_only and a not in units:
            v.fail(reason="collision outside the unit vectors", case=label, point=list(a))
    v.witnesses[label] = {
        "pool": len(inst.pool),
        "tuples_refuted": rep.examined,
        "collision_points": sorted({tuple(a) for _, a in rep.collisions}),
    }
    return rep


def _not_separating_2(p, v):
    leq, neq = builtin("leq2"), builtin("neq2")
    for m in _tuple(p["m"]):
        n = m + 1
        pool = list(enumerate_fns(2, n, [leq, neq], total_only=True))
        if len(pool) != count_fns(2, n, [leq, neq], total_only=True):
            v.fail(reason="pool enumeration/count mismatch", m=m)
        _refutation(2, n, m, pool, p["mode"], v, f"m={m}", p["mode"] == "unit-vectors-only")


def _maj_generates(p, v):
    leq, neq = builtin("leq2"), builtin("neq2")
    target = max(_tuple(p["n"]))
    res = generate(2, [majority()], ClosureConfig(target, target, max_size=p["max_size"]))
    v.witnesses["closure_size"] = len(res)
    for n in _tuple(p["n"]):
        cmp = fragment_equal(res, FnFilter([leq, neq], total_only=True), n)
        v.examined += cmp.fragment_count
        v.witnesses[f"n={n}"] = {"closure": cmp.closure_count, "fragment": cmp.fragment_count}
        if not cmp.equal:
            v.fail(reason=cmp.outcome, n=n, function=fn_json(cmp.witness))


def _palfy(p, v):
    for k in _tuple(p["k"]):
        q = _smallest_prime_divisor(k)
        pi = make_pi(k, q)
        rels = [builtin(f"chain({k})"), graph_of(pi)]
        sizes = {}
        for n in _tuple(p["n"]):
            fns = list(enumerate_fns(k, n, rels, total_only=True))
            v.examined += len(fns)
            if len(fns) != count_fns(k, n, rels, total_only=True):
                v.fail(reason="enumeration/count mismatch", k=k, n=n)
            extra = [f for f in fns if f not in projections(k, n)]
            missing = [e for e in projections(k, n) if e not in fns]
            if extra or missing:
                bad = (extra or missing)[0]
                v.fail(reason="extra" if extra else "missing", k=k, n=n, function=fn_json(bad))
            sizes[n] = len(fns)
        v.witnesses[f"k={k}"] = {"pi": str(pi), "fragment_sizes": sizes, "total": sum(sizes.values())}


def all_partial_stack(k: int, n: int) -> np.ndarray:
    """Every n-ary partial function on k as a code stack, in canonical order."""
    cells = k**n
    count = (k + 1) ** cells
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, cells), dtype=np.uint8)
    for c in range(cells - 1, -1, -1):
        idx, out[:, c] = np.divmod(idx, k + 1)
    return out


def _ludiet_inclusion(p, v):
    k, q = p["k"], p["p"]
    pi = make_pi(k, q)
    graph, rho = graph_of(pi), rho_from_pi(pi)
    for n in _tuple(p["n"]):
        allf = all_partial_stack(k, n)
        keeps_pi = preserves_batch(allf, n, graph)
        keeps_rho = preserves_batch(allf, n, rho)
        v.examined += len(allf)
        counted = count_fns(k, n, [graph])
        if counted != int(keeps_pi.sum()):
            v.fail(reason="batch/pruned count mismatch", n=n, batch=int(keeps_pi.sum()), pruned=counted)
        bad = np.flatnonzero(keeps_pi & ~keeps_rho)
        if len(bad):
            f = PartialFn(k, n, allf[bad[0]].tobytes())
            v.fail(reason="preserves pi but not rho_pi", n=n, function=fn_json(f))
        # strongness spot check over every restriction of a spread of members
        picks = np.flatnonzero(keeps_pi)
        sample = picks[np.linspace(0, len(picks) - 1, min(p["sample"], len(picks))).astype(int)]
        restrictions = 0
        for row in allf[sample]:
            defined = np.flatnonzero(row)
            for bits in range(2 ** len(defined)):
                sub = row.copy()
                sub[defined[[(bits >> j) & 1 == 0 for j in range(len(defined))]]] = 0
                restrictions += 1
                if not preserves(PartialFn(k, n, sub.tobytes()), rho):
                    v.fail(reason="restriction leaves pPol(rho_pi)", n=n)
                    break
        v.witnesses[f"n={n}"] = {
            "functions": len(allf),
            "preserve_pi": int(keeps_pi.sum()),
            "preserve_rho_pi": int(keeps_rho.sum()),
            "restrictions_checked": restrictions,
        }


def _ludiet_strictness(p, v):
    k, q = p["k"], p["p"]
    pi = make_pi(k, q)
    graph, rho = graph_of(pi), rho_from_pi(pi)
    for n in _tuple(p["n"]):
        for f in enumerate_fns(k, n, [rho]):
            v.examined += 1
            if not preserves(f, graph):
                v.witnesses["witness"] = fn_json(f)
                v.witnesses["witness_arity"] = n
                return
    v.fail(reason="no function preserves rho_pi but not pi")


def _generation_experiment(k, rho: Relation, gen_arity, n, p, v, label):
    gens = list(enumerate_fns(k, gen_arity, [rho]))
    info = {"generators": len(gens), "generator_arity": gen_arity, "n": n}
    v.witnesses[label] = info
    for bound in range(max(n, gen_arity), p["max_bound"] + 1):
        config = ClosureConfig(
            n, bound, strong=True, max_size=p["max_size"], max_compositions=p["max_compositions"]
        )
        try:
            res = generate(k, gens, config)
        except ResourceLimitError as exc:
            partial = exc.partial
            _check_inclusion(partial, rho, v, label, bound)
            info.update(verdict="resource-limit", bound=bound, reason=str(exc))
            v.limit(case=label, bound=bound, reason=str(exc))
            return
        _check_inclusion(res, rho, v, label, bound)
        cmp = fragment_equal(res, [rho], n)
        v.examined += cmp.fragment_count
        info.setdefault("tried", []).append({"bound": bound, "outcome": cmp.outcome})
        if cmp.equal:
            info.update(verdict="equal", bound=bound, members=cmp.closure_count)
            return
        last = cmp
    info.update(verdict="not-equal")
    v.fail(case=label, reason=last.outcome, function=fn_json(last.witness))


def _check_inclusion(res, rho, v, label, bound):
    """Generated members (or their maximal elements) must preserve rho."""
    groups: dict[int, list[PartialFn]] = {}
    for f in res.functions.values():
        groups.setdefault(f.n, []).append(f)
    for m, fs in res.maximal.items():
        groups.setdefault(m, []).extend(fs)
    for n, fs in sorted(groups.items()):
        ok = preserves_batch(stack(fs), n, rho)
        if not ok.all():
            bad = fs[int(np.argmin(ok))]
            v.fail(reason="closure member outside pPol", case=label, bound=bound, function=fn_json(bad))


def _lau_generation(p, v):
    _generation_experiment(2, builtin("leq2"), 2, p["n"], p, v, "leq2/binary")
    _generation_experiment(2, builtin("neq2"), 3, p["n"], p, v, "neq2/ternary")


NOZAKI_DEFAULT_ARITY = {2: 3, 3: 2}


def _nozaki_generation(p, v):
    for k in _tuple(p["k"]):
        n = p["n"] if p["n"] is not None else NOZAKI_DEFAULT_ARITY.get(k, 2)
        _generation_experiment(k, builtin(f"chain({k})"), 2, n, p, v, f"chain({k})/binary")


def final_example_function(k: int = 3, n: int = 3) -> PartialFn:
    dom = [(0,) + rest for rest in np.ndindex(*(k,) * (n - 1))]
    return constant(k, n, 1, dom=dom)


def _final_example(p, v):
    k, q, n = p["k"], p["p"], p["n"]
    f = final_example_function(k, n)
    rho = rho_from_pi(make_pi(k, q))
    chain = builtin(f"chain({k})")
    v.examined = 1
    checks = {
        "defined_cells": total_points(f),
        "total": is_total(f),
        "preserves_chain": preserves(f, chain),
        "preserves_rho_pi": preserves(f, rho),
        "below_a_projection": any(is_subfunction(f, e) for e in projections(k, n)),
    }
    v.witnesses.update(checks, function=fn_json(f))
    if checks["defined_cells"] != k ** (n - 1) or checks["total"]:
        v.fail(reason="wrong domain")
    if not checks["preserves_chain"] or not checks["preserves_rho_pi"]:
        v.fail(reason="does not preserve both relations")
    if checks["below_a_projection"]:
        v.fail(reason="is a partial projection")


def _strj_total_part(p, v):
    n = p["n"]
    for k in _tuple(p["k"]):
        res = str_j(k, n, max_size=p["max_size"])
        tp = total_part(res)
        want = sorted(e for m in range(1, n + 1) for e in projections(k, m))
        v.examined += len(res)
        v.witnesses[f"k={k}"] = {"str_j_size": len(res), "total_part": len(tp)}
        if tp != want:
            bad = next(iter(set(tp) ^ set(want)))
            v.fail(reason="total part differs from the projections", k=k, function=fn_json(bad))


def _j_not_separating(p, v):
    for k in _tuple(p["k"]):
        for m in _tuple(p["m"]):
            n = m + 1
            _refutation(k, n, m, projections(k, n), "unit-vectors-only", v, f"k={k},m={m}", True)


def _oa_separating(p, v):
    k, m = p["k"], p["m"]
    for n in _tuple(p["n"]):
        pool = list(enumerate_fns(k, n, total_only=True))
        per_b = {}
        for b in np.ndindex(*(k,) * n):
            rep = exists_separating_family(SeparationInstance(k, n, pool, m, b))
            v.examined += rep.examined
            if rep.outcome == LIMIT:
                v.limit(n=n, b=list(b))
            elif not rep.separated:
                v.fail(reason="no separating family", n=n, b=list(b))
            else:
                fam = rep.family
                # independent re-check of the separating property
                if any(all(f(a) == f(b) for f in fam) for a in np.ndindex(*(k,) * n) if a != b):
                    v.fail(reason="reported family does not separate", n=n, b=list(b))
                per_b[",".join(map(str, b))] = [f.table for f in fam]
        v.witnesses[f"n={n}"] = per_b


_CAPS = {"max_size": 5_000_000, "max_compositions": 200_000_000}

CHECKS: dict[str, tuple[Callable, dict, str]] = {
    "lemma-trivial": (_lemma_trivial, {"n": (3, 4)},
                      "monotone self-dual totals on {0,1} fix 0 and are e1 when f(1,0..0)=1"),
    "not-separating-2": (_not_separating_2, {"m": (1, 2, 3), "mode": "unit-vectors-only"},
                         "Pol(<=) & Pol(!=) on {0,1} has no separating m-family at n=m+1, b=0"),
    "maj-generates": (_maj_generates, {"n": (1, 2, 3), "max_size": _CAPS["max_size"]},
                      "<maj> equals the monotone self-dual totals up to arity 3"),
    "palfy": (_palfy, {"k": (3, 4), "n": (1, 2, 3)},
              "monotone totals commuting with pi are projections"),
    "ludiet-inclusion": (_ludiet_inclusion, {"k": 3, "p": 3, "n": (1, 2), "sample": 32},
                         "pPol(pi) is inside pPol(rho_pi), exhaustively"),
    "ludiet-strictness": (_ludiet_strictness, {"k": 3, "p": 3, "n": (1, 2)},
                          "some function preserves rho_pi but not pi"),
    "lau-generation": (_lau_generation, {"n": 3, "max_bound": 4, **_CAPS},
                       "binary pPol(<=) and ternary pPol(!=) strongly generate the arity-n fragment"),
    "nozaki-generation": (_nozaki_generation, {"k": (2, 3), "n": None, "max_bound": 4, **_CAPS},
                          "binary pPol(chain(k)) strongly generates the arity-n fragment"),
    "final-example": (_final_example, {"k": 3, "p": 3, "n": 3},
                      "constant 1 on {0} x k^(n-1) is a non-projection in pPol(<=) & pPol(rho_pi)"),
    "strj-total-part": (_strj_total_part, {"k": (2, 3), "n": 2, "max_size": _CAPS["max_size"]},
                        "the total part of Str(J) is J"),
    "j-not-separating": (_j_not_separating, {"k": (2, 3), "m": (1, 2, 3)},
                         "J(A) is not separating (exercised for k=2 as well as k>=3)"),
    "oA-separating": (_oa_separating, {"k": 2, "m": 1, "n": (2, 3)},
                      "O(A) separates every point with a single function"),
}

DEFAULTS = {cid: dict(defaults) for cid, (_, defaults, _) in CHECKS.items()}


def _merge_params(check_id, params):
    if check_id not in CHECKS:
        raise InvalidInputError(f"unknown check {check_id!r}; known: {', '.join(CHECKS)}")
    merged = dict(DEFAULTS[check_id])
    for key, val in (params or {}).items():
        if key not in merged:
            raise InvalidInputError(f"check {check_id} has no parameter {key!r}")
        merged[key] = val
    return merged


def run_check(check_id: str, params: dict | None = None) -> Report:
    merged = _merge_params(check_id, params)
    fn = CHECKS[check_id][0]
    v = _Verdict()
    t0 = time.perf_counter()
    try:
        fn(merged, v)
    except ResourceLimitError as exc:
        v.limit(reason=str(exc))
    millis = int((time.perf_counter() - t0) * 1000)
    shown = {k: list(val) if isinstance(val, tuple) else val for k, val in merged.items()}
    return Report(check_id, shown, v.verdict, v.witnesses, v.examined, millis)


def _run_one(args):
    return run_check(*args)


def worker_count(default: int = 1) -> int:
    raw = os.environ.get("PCLONE_WORKERS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInputError(f"PCLONE_WORKERS must be an integer, got {raw!r}") from None


def run_all(params: dict | None = None, checks=None, workers: int | None = None) -> list[Report]:
    """Run every check (or ``checks``) at default parameters.

    Keys of ``params`` are applied to each check that has them, so caps
    such as ``max_size`` can be tightened globally.
    """
    ids = list(checks or CHECKS)
    for cid in ids:
        if cid not in CHECKS:
            raise InvalidInputError(f"unknown check {cid!r}")
    jobs = [
        (cid, {k: val for k, val in (params or {}).items() if k in DEFAULTS[cid]}) for cid in ids
    ]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [run_check(cid, p) for cid, p in jobs]


def aggregate_passed(reports) -> bool:
    return all(r.passed for r in reports)
