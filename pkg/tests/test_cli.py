import io
import json

import pytest

from pclone import cache
from pclone.cli import main
from pclone.closure import ClosureConfig, generate
from pclone.core import format_pfn, majority, parse_pfns


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_enumerate_count_and_list():
    assert run("enumerate", "--k", "2", "--n", "2", "--count") == (0, "81\n")
    code, text = run("enumerate", "--k", "2", "--n", "1", "--rel", "neq2", "--total")
    assert code == 0 and [f.table for f in parse_pfns(text)] == [(0, 1), (1, 0)]


def test_enumerate_guard():
    code, _ = run("enumerate", "--k", "3", "--n", "4")
    assert code == 3


def test_closure_cache_round_trip(tmp_path):
    dump = tmp_path / "maj.cache"
    stats = tmp_path / "stats.json"
    code, text = run("closure", "--gen", "maj", "--target-arity", "3", "--out", str(dump),
                     "--stats-json", str(stats))
    assert code == 0 and "members=7" in text
    assert json.loads(stats.read_text())["members"] == 7
    loaded = cache.load(dump)
    assert set(loaded) == set(generate(2, [majority()], ClosureConfig(3)))
    assert run("member", "--fn", "maj", "--closure", str(dump), "--assert") == (0, "true\n")


def test_member_assert_fails(tmp_path):
    dump = tmp_path / "j.cache"
    assert run("closure", "--k", "2", "--target-arity", "3", "--out", str(dump))[0] == 0
    code, text = run("member", "--fn", "maj", "--closure", str(dump), "--assert")
    assert (code, text) == (1, "false\n")


def test_strong_cache_keeps_maximal(tmp_path):
    res = generate(2, [majority()], ClosureConfig(3, strong=True))
    back = cache.loads(cache.dumps(res))
    assert set(back) == set(res) and back.saturated
    assert set(back.maximal[3]) == set(res.maximal[3])


@pytest.mark.parametrize("damage", ["truncate", "edit", "header"])
def test_corrupt_cache_rejected(tmp_path, damage):
    dump = tmp_path / "c.cache"
    cache.save(generate(2, [majority()], ClosureConfig(3)), dump)
    text = dump.read_text()
    if damage == "truncate":
        text = text[: len(text) // 2]
    elif damage == "edit":
        text = text.replace("-> 1", "-> 0", 1)
    else:
        text = "garbage\n" + text
    dump.write_text(text)
    with pytest.raises(cache.CorruptCacheError):
        cache.load(dump)
    code, _ = run("member", "--fn", "maj", "--closure", str(dump))
    assert code == 2


def test_closure_resource_limit(tmp_path):
    code, text = run("closure", "--gen", "maj", "--target-arity", "3", "--strong", "--max-size", "5")
    assert code == 3 and "saturated=false" in text


def test_preserves(tmp_path):
    assert run("preserves", "--fn", "maj", "--rel", "leq2") == (0, "true\n")
    code, text = run("preserves", "--fn", "neg", "--rel", "leq2", "--rel", "neq2", "--assert")
    assert code == 1 and text == "leq2: false\nneq2: true\n"
    f = tmp_path / "f.pfn"
    f.write_text("pfn k=3 n=1\n0 -> 1\n")
    assert run("preserves", "--fn", str(f), "--rel", "chain(3)") == (0, "true\n")


def test_separate_json():
    code, text = run("separate", "--k", "2", "--n", "3", "--rel", "leq2", "--rel", "neq2", "--m", "2",
                     "--mode", "unit-vectors-only", "--json")
    payload = json.loads(text)
    assert code == 0 and payload["outcome"] == "no-family" and payload["examined"] == 6


def test_separate_pool_file(tmp_path):
    pool = tmp_path / "pool.pfn"
    pool.write_text(format_pfn(majority()))
    code, text = run("separate", "--pool", str(pool), "--m", "1", "--b", "0,0,0")
    assert code == 0 and "no-family" in text


def test_verify_single_check(tmp_path):
    report = tmp_path / "r.json"
    code, text = run("verify", "--check", "palfy", "--params", "k=3", "--params", "n=1,2",
                     "--json", str(report))
    assert code == 0 and text.startswith("palfy")
    data = json.loads(report.read_text())
    assert data[0]["verdict"] == "pass" and data[0]["params"]["n"] == [1, 2]


def test_verify_limit_exit_code():
    code, _ = run("verify", "--check", "lau-generation", "--params", "max_compositions=10")
    assert code == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--k", "2"],
        ["bogus"],
        ["verify", "--check", "palfy", "--params", "zzz=1"],
        ["preserves", "--fn", "nope", "--rel", "leq2"],
        ["preserves", "--fn", "maj", "--rel", "nope"],
        ["closure", "--gen", "maj", "--k", "3"],
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_relations_listing():
    code, text = run("relations")
    assert code == 0 and "tardos8" in text
    code, text = run("relations", "tardos8")
    assert code == 0 and "order: true  bounded: true" in text
