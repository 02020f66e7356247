import math

import numpy as np
import pytest

from gmic.charmat import MineParams
from gmic.grid import InvalidInputError, Sample
from gmic.inference import (NullTable, StatisticSpec, TableMismatchError, critical_value,
                            evaluate, null_distribution, null_tables, p_value, test_independence)

MIC = StatisticSpec.parse("mic")


def _table(draws, spec=MIC, n=20):
    return NullTable(spec, n, np.asarray(draws, dtype=float), seed=0)


@pytest.mark.parametrize("text, label", [("mic", "mic"), ("gmic:-1", "gmic(-1)"),
                                         ("gmic(-inf)", "gmic(-inf)"), ("GMIC:0.1", "gmic(0.1)"),
                                         ("mcn", "mcn(0.05)"), ("mcn:0.2", "mcn(0.2)"),
                                         ("dcor", "dcor"), ("gmic:inf", "gmic(inf)")])
def test_spec_parse_and_label(text, label):
    spec = StatisticSpec.parse(text)
    assert spec.label == label
    assert StatisticSpec.parse(spec.label) == spec


@pytest.mark.parametrize("text", ["gmic", "mic:2", "foo", "mcn:0", "gmic:nan", "pearson_r2:1"])
def test_spec_parse_errors(text):
    with pytest.raises((InvalidInputError, ValueError)):
        StatisticSpec.parse(text)


def test_evaluate_shares_matrix():
    x = np.linspace(0, 1, 40)
    vals = evaluate([StatisticSpec.parse(s) for s in ("mic", "minic", "gmic:-1", "dcor")], x, x)
    assert vals == pytest.approx([1.0, 1.0, 1.0, 1.0], abs=1e-12)


def test_critical_value_examples():
    t = _table(np.arange(1, 1001) / 1000)
    assert critical_value(t, 0.05) == 0.95
    t = _table(np.arange(1, 101) / 100)
    assert critical_value(t, 0.05) == 0.95
    sym = _table(np.concatenate([-np.arange(1, 51), [0.0], np.arange(1, 51)]))
    assert critical_value(sym, 0.5) == 0.0
    with pytest.raises(InvalidInputError):
        critical_value(t, 1.0)


def test_p_value_add_one():
    t = _table(np.arange(1, 101) / 100)
    assert p_value(t, -1.0) == 1.0
    assert p_value(t, 2.0) == 1 / 101
    assert p_value(t, 0.5) == (1 + 51) / 101


def test_table_minimum_reps():
    with pytest.raises(InvalidInputError):
        _table(np.arange(50.0))
    with pytest.raises(InvalidInputError):
        null_distribution(MIC, 20, 99, 0)


def test_null_distribution_deterministic_and_sorted():
    a = null_distribution(MIC, 30, 100, seed=5)
    b = null_distribution(MIC, 30, 100, seed=5, threads=3)
    c = null_distribution(MIC, 30, 100, seed=6)
    assert a == b
    assert a != c
    assert np.all(np.diff(a.draws) >= 0)
    assert np.all((a.draws >= 0) & (a.draws <= 1))


def test_shared_draws_respect_ordering():
    g, m = null_tables([StatisticSpec.parse("gmic:-1"), MIC], 320, 100, seed=1)
    assert 0.0 < critical_value(g, 0.05) < critical_value(m, 0.05)
    assert np.all(g.draws <= m.draws)


def test_table_round_trip(tmp_path):
    spec = StatisticSpec.parse("gmic:-1", MineParams(alpha=0.55, clump_factor=10))
    t = null_distribution(spec, 25, 100, seed=3)
    path = tmp_path / "t.tsv"
    t.save(path)
    assert NullTable.load(path) == t
    text = path.read_text()
    with pytest.raises(InvalidInputError, match="version"):
        NullTable.from_text(text.replace("format_version = 1", "format_version = 2"))
    with pytest.raises(InvalidInputError):
        NullTable.from_text("hello\n")


def test_independence_linear_rejects():
    x = np.linspace(0, 1, 30)
    table = null_distribution(MIC, 30, 100, seed=0)
    res = test_independence(Sample(x, x), MIC, table)
    assert res.reject and res.observed == 1.0 and res.p_value == 1 / 101


def test_independence_mismatch():
    table = null_distribution(MIC, 30, 100, seed=0)
    x = np.linspace(0, 1, 31)
    with pytest.raises(TableMismatchError):
        test_independence(Sample(x, x), MIC, table)
    with pytest.raises(TableMismatchError):
        test_independence(Sample(x[:30], x[:30]), StatisticSpec.parse("minic"), table)


def test_rejection_rate_near_level():
    table = null_distribution(MIC, 40, 400, seed=10)
    rng = np.random.default_rng(99)
    rejects = [test_independence(Sample(rng.random(40), rng.random(40)), MIC, table).reject
               for _ in range(500)]
    assert abs(np.mean(rejects) - 0.05) <= 0.02 + 1e-12
