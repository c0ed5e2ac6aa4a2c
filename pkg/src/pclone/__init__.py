"""Exact computation with partial functions and partial clones on small finite domains."""

from .closure import (
    ClosureConfig,
    ClosureResult,
    fragment_equal,
    generate,
    member,
    str_j,
    total_part,
)
from .core import (
    Domain,
    InvalidInputError,
    PartialFn,
    ResourceLimitError,
    builtin_function,
    compose,
    constant,
    decode,
    empty_function,
    encode,
    is_subfunction,
    is_total,
    majority,
    parse_pfn,
    parse_pfns,
    format_pfn,
    projection,
    projections,
    restrict,
    total_points,
)
from .enumeration import FnFilter, count_fns, enumerate_fns
from .relations import (
    Permutation,
    Relation,
    builtin,
    graph_of,
    is_bounded_order,
    is_order,
    make_pi,
    preserves,
    rho_from_pi,
)
from .separating import SeparationInstance, SeparationReport, exists_separating_family, separates_point
from .verify import Report, run_all, run_check

__version__ = "0.1.0"
