import itertools

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from pclone.core import (
    InvalidInputError,
    PartialFn,
    ResourceLimitError,
    is_subfunction,
    majority,
    projection,
    projections,
)
from pclone.closure import (
    ClosureConfig,
    fragment_equal,
    generate,
    is_restriction_closed,
    maximal_elements,
    member,
    str_j,
    total_part,
)
from pclone.enumeration import FnFilter, enumerate_fns
from pclone.relations import builtin, preserves

from oracles import naive_closure

NEG = PartialFn.from_table(2, 1, [1, 0])
HALF = PartialFn.from_table(2, 1, [None, 0])
PAND = PartialFn.from_mapping(2, 2, {(0, 0): 0, (1, 1): 1, (0, 1): 0})
C3 = PartialFn.from_table(3, 1, [1, 2, None])

# sizes frozen from naive_closure (literal fixpoint over all arities <= intermediate)
NAIVE_CASES = [
    ("neg+half", 2, [NEG, HALF], 1, 1, False, 7),
    ("neg+half", 2, [NEG, HALF], 1, 2, False, 7),
    ("neg+half", 2, [NEG, HALF], 2, 2, False, 36),
    ("neg+half", 2, [NEG, HALF], 2, 2, True, 56),
    ("pand", 2, [PAND], 1, 2, False, 1),
    ("pand", 2, [PAND], 2, 2, False, 8),
    ("pand", 2, [PAND], 1, 2, True, 4),
    ("pand", 2, [PAND], 2, 2, True, 32),
    ("c3", 3, [C3], 1, 1, False, 4),
    ("c3", 3, [C3], 1, 2, False, 7),
    ("c3", 3, [C3], 2, 2, False, 41),
    ("c3", 3, [C3], 1, 1, True, 12),
    ("half", 2, [HALF], 1, 1, False, 3),
    ("half", 2, [HALF], 2, 2, False, 15),
    ("half", 2, [HALF], 2, 2, True, 36),
    ("maj", 2, [majority()], 3, 3, False, 7),
]


@pytest.mark.parametrize(
    "name, k, gens, target, inter, strong, size", NAIVE_CASES, ids=[
        f"{c[0]}-{c[3]}/{c[4]}{'-strong' if c[5] else ''}" for c in NAIVE_CASES]
)
def test_engine_matches_frozen_naive_sizes(name, k, gens, target, inter, strong, size):
    res = generate(k, gens, ClosureConfig(target, inter, strong=strong))
    assert res.saturated and len(res) == size


@pytest.mark.parametrize("case", [c for c in NAIVE_CASES if c[4] <= 2 and c[0] != "maj"][:10])
def test_engine_matches_naive_closure(case):
    _, k, gens, target, inter, strong, _ = case
    res = generate(k, gens, ClosureConfig(target, inter, strong=strong))
    assert set(res) == naive_closure(k, gens, target, inter, strong)


def test_intermediate_above_target():
    # the naive fixpoint runs through ternary functions; the engine need not
    got = generate(2, [HALF], ClosureConfig(2, 3))
    assert set(got) == naive_closure(2, [HALF], 2, 3)
    assert len(got) == 15


def test_maj_closure_members():
    res = generate(2, [majority()], ClosureConfig(3, 3))
    assert len(res.members(1)) == 1 and len(res.members(2)) == 2
    ternary = sorted(f.table for f in res.members(3))
    assert ternary == sorted([
        (0, 0, 0, 0, 1, 1, 1, 1),
        (0, 0, 1, 1, 0, 0, 1, 1),
        (0, 1, 0, 1, 0, 1, 0, 1),
        (0, 0, 0, 1, 0, 1, 1, 1),
    ])


def test_projections_always_present():
    res = generate(3, [], ClosureConfig(2))
    assert set(res) == set(projections(3, 1)) | set(projections(3, 2))
    strong = generate(2, [], ClosureConfig(1, strong=True))
    assert len(strong) == 4  # the identity and its three subfunctions


def test_member_and_total_part():
    res = generate(2, [NEG, HALF], ClosureConfig(2))
    assert member(NEG, res) and member(projection(2, 2, 2), res)
    assert not member(PartialFn.from_table(2, 2, [0, 0, 0, 1]), res)
    with pytest.raises(InvalidInputError):
        member(majority(), res)
    tp = total_part(res)
    assert all(0 not in f.codes for f in tp)
    assert total_part(list(res)) == tp


def test_closure_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        generate(2, [C3], ClosureConfig(1))
    with pytest.raises(InvalidInputError):
        generate(2, [PAND], ClosureConfig(2, 1))
    with pytest.raises(InvalidInputError):
        ClosureConfig(0)


def test_resource_limit_keeps_partial_result():
    with pytest.raises(ResourceLimitError) as info:
        generate(3, [C3], ClosureConfig(2, strong=True, max_size=100))
    partial = info.value.partial
    assert partial is not None and not partial.saturated
    full = generate(3, [C3], ClosureConfig(2, strong=True))
    assert set(partial) <= set(full)


def test_strong_closure_is_restriction_closed():
    for gens in ([NEG, HALF], [PAND], [majority()]):
        res = generate(2, gens, ClosureConfig(3 if gens[0].n == 3 else 2, strong=True))
        assert is_restriction_closed(res)
    assert not is_restriction_closed(generate(2, [majority()], ClosureConfig(3)))


def test_maximal_elements():
    fns = [projection(2, 1, 1), HALF, PartialFn.from_table(2, 1, [0, None])]
    assert maximal_elements(fns) == [HALF, projection(2, 1, 1)] or set(maximal_elements(fns)) == {
        HALF, projection(2, 1, 1)}
    res = generate(2, [HALF], ClosureConfig(2, strong=True))
    for f in res:
        assert any(is_subfunction(f, g) for g in res.maximal[f.n])


def test_str_j_sizes_and_total_part():
    for k, size in ((2, 32), (3, 1024)):
        res = str_j(k, 2)
        assert len(res) == size
        assert total_part(res) == sorted(projections(k, 1) + projections(k, 2))
        assert is_restriction_closed(res)
    assert set(str_j(2, 2)) == set(generate(2, [], ClosureConfig(2, strong=True)))


def test_fragment_equal_outcomes():
    leq, neq = builtin("leq2"), builtin("neq2")
    res = generate(2, [majority()], ClosureConfig(3))
    assert fragment_equal(res, FnFilter([leq, neq], total_only=True), 3).equal
    cmp = fragment_equal(res, FnFilter([leq], total_only=True), 3)
    assert cmp.outcome == "missing-witness" and cmp.witness not in res
    cmp = fragment_equal(res, FnFilter([leq, neq, builtin("singleton(2,1)")], total_only=True), 2)
    # projections preserve the singleton too, so nothing is missing or extra here
    assert cmp.equal
    small = generate(2, [NEG], ClosureConfig(1))
    cmp = fragment_equal(small, FnFilter([leq, neq], total_only=True), 1)
    assert cmp.outcome == "extra-witness" and cmp.witness == NEG
    with pytest.raises(InvalidInputError):
        fragment_equal(small, [leq], 2)


# -- properties --------------------------------------------------------------

K2_RELATIONS = ["leq2", "neq2", "singleton(2,0)", "singleton(2,1)"]


def _preservers(rho, n):
    return list(enumerate_fns(2, n, [rho]))


@pytest.mark.parametrize("name", K2_RELATIONS)
@given(data=st.data(), strong=st.booleans())
@settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_closure_soundness(name, data, strong):
    rho = builtin(name)
    pool = _preservers(rho, 1) + _preservers(rho, 2)
    gens = data.draw(st.lists(st.sampled_from(pool), max_size=3, unique=True))
    res = generate(2, gens, ClosureConfig(3, strong=strong))
    assert all(preserves(f, rho) for f in res)


@given(st.lists(st.sampled_from(list(enumerate_fns(2, 1)) + list(enumerate_fns(2, 2, total_only=True))),
                max_size=3, unique=True))
@settings(max_examples=25, deadline=None)
def test_idempotent_and_monotone(gens):
    cfg = ClosureConfig(2)
    res = generate(2, gens, cfg)
    again = generate(2, list(res), cfg)
    assert set(again) == set(res)
    if gens:
        assert set(generate(2, gens[:-1], cfg)) <= set(res)
    assert set(gens) <= set(res)


@given(st.lists(st.sampled_from(list(enumerate_fns(2, 1))), min_size=1, max_size=3, unique=True))
@settings(max_examples=20, deadline=None)
def test_intermediate_bound_insensitive_above_two(gens):
    a = generate(2, gens, ClosureConfig(1, 2))
    b = generate(2, gens, ClosureConfig(1, 4))
    assert set(a) == set(b)


@given(st.lists(st.sampled_from(list(enumerate_fns(2, 1))), max_size=2, unique=True))
@settings(max_examples=20, deadline=None)
def test_strong_is_downset_of_plain(gens):
    plain = generate(2, gens, ClosureConfig(2))
    strong = generate(2, gens, ClosureConfig(2, strong=True))
    assert set(plain) <= set(strong)
    assert all(any(is_subfunction(f, g) for g in strong.maximal[f.n]) for f in strong)
