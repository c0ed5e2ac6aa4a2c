"""Separating points with small families of functions."""
from pclone import SeparationInstance, builtin, enumerate_fns, exists_separating_family, projections

leq, neq = builtin("leq2"), builtin("neq2")

# monotone self-dual ternary functions cannot separate 000 with two of them
pool = list(enumerate_fns(2, 3, [leq, neq], total_only=True))
rep = exists_separating_family(SeparationInstance(2, 3, pool, m=2), mode="unit-vectors-only")
print("pool size", len(pool), "->", rep.outcome, "after", rep.examined, "pairs")
for fam, a in rep.collisions:
    print("  pair", [f.table for f in fam], "collides at", a)

# projections alone never separate
rep = exists_separating_family(SeparationInstance(3, 3, projections(3, 3), m=2))
print("projections on {0,1,2}, m=2:", rep.outcome)

# all total binary functions: one function suffices for every point
allf = list(enumerate_fns(2, 2, total_only=True))
for b in [(0, 0), (0, 1), (1, 0), (1, 1)]:
    rep = exists_separating_family(SeparationInstance(2, 2, allf, m=1, b=b))
    print(b, "separated by", rep.family[0].table)
