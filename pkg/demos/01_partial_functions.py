"""Partial functions on a finite set: tables, composition, restriction."""
from pclone import PartialFn, compose, projection, restrict, is_subfunction, format_pfn
from pclone.core import majority

# a partial unary function on {0,1}: defined at 0 only
f = PartialFn.from_mapping(2, 1, {(0,): 1})
neg = PartialFn.from_callable(2, 1, lambda x: 1 - x)
print(format_pfn(f))

# composition is defined exactly where every inner function is defined
# and the outer function is defined at the inner values
h = compose(f, [neg])
print("f(neg(x)) is defined at", h.domain_points())

# majority with a repeated argument collapses to a projection
e1, e2 = projection(2, 2, 1), projection(2, 2, 2)
print("maj(x, x, y) == x:", compose(majority(), [e1, e1, e2]) == e1)

# restricting to a subset of the domain gives a subfunction
m = majority()
low = restrict(m, m.dom & 0b00001111)
print("restriction keeps", len(low.domain_points()), "cells")
print("subfunction of maj:", is_subfunction(low, m))
print("subfunction of e1 (ternary):", is_subfunction(low, projection(2, 3, 1)))
