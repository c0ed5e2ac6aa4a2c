"""Which functions preserve a relation, counted by pruned search."""
import time

from pclone import builtin, count_fns, enumerate_fns, preserves
from pclone.core import majority
from pclone.relations import graph_of, make_pi

leq, neq = builtin("leq2"), builtin("neq2")
print("maj preserves <=:", preserves(majority(), leq), " !=:", preserves(majority(), neq))

# monotone self-dual total functions, arity 1..4
for n in range(1, 5):
    print(f"n={n}: {count_fns(2, n, [leq, neq], total_only=True)} monotone self-dual totals")

for f in enumerate_fns(2, 3, [leq, neq], total_only=True):
    print("  ", f.table)

# partial preservers are far more numerous
print("partial preservers of <= at n=3:", count_fns(2, 3, [leq]))

# monotone functions on a 4-chain commuting with (0 1)(2 3): only projections
pi = make_pi(4, 2)
stats = {}
t0 = time.perf_counter()
found = list(enumerate_fns(4, 3, [builtin("chain(4)"), graph_of(pi)], total_only=True, stats=stats))
print(f"k=4 n=3: {len(found)} functions, {stats['nodes']} search nodes, "
      f"{time.perf_counter() - t0:.2f}s (4^64 candidates)")
