"""Generating a clone from majority, and a strong partial clone from a partial map."""
from pclone import ClosureConfig, FnFilter, PartialFn, builtin, fragment_equal, generate, total_part
from pclone.core import majority

res = generate(2, [majority()], ClosureConfig(target_arity=3))
print("closure of maj up to arity 3:", len(res), "functions")
for n in res.arities():
    print(f"  arity {n}: {len(res.members(n))}")

flt = FnFilter([builtin("leq2"), builtin("neq2")], total_only=True)
for n in (1, 2, 3):
    print(f"  equals the monotone self-dual totals at n={n}:", fragment_equal(res, flt, n).equal)

# strong closure: also close under taking subfunctions
half = PartialFn.from_table(2, 1, [None, 0])
strong = generate(2, [half], ClosureConfig(2, strong=True))
print("strong closure of a half-defined map:", len(strong), "members,",
      len(total_part(strong)), "total")
print("stats:", {k: v for k, v in strong.stats.items() if k != "per_arity"})
