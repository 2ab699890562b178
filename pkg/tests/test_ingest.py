from __future__ import annotations

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptakit.errors import DisconnectedGraphError, ParseError
from ptakit.hodge import hodge_decompose
from ptakit.ingest import (
    OutcomeLog,
    OutcomeRecord,
    clamp_probs,
    estimate_probs,
    fit_strengths,
    inverse_logit,
    load_attributes,
    load_outcomes,
    logit,
    logit_link,
    write_outcomes,
    write_probs_csv,
    write_strengths_csv,
)
from ptakit.matrix import frobenius_norm

CYCLE = [("a", "b", 9, 1), ("b", "c", 9, 1), ("c", "a", 9, 1)]


def planted_log(strengths, games=20_000):
    labels = [f"s{i}" for i in range(len(strengths))]
    rows = []
    for i in range(len(strengths)):
        for j in range(i + 1, len(strengths)):
            p = 1 / (1 + np.exp(strengths[j] - strengths[i]))
            w = int(round(p * games))
            rows.append((labels[i], labels[j], w, games - w))
    return OutcomeLog.from_records(rows)


def test_records_fold_and_merge():
    log_ = OutcomeLog.from_records([("a", "b", 2, 1), ("b", "a", 4, 0), ("a", "b", 1, 1)])
    assert log_.records == (OutcomeRecord("a", "b", 3, 6),)
    W = log_.win_counts()
    np.testing.assert_array_equal(W, [[0, 3], [6, 0]])
    with pytest.raises(ValueError):
        OutcomeLog.from_records([("a", "a", 1, 0)])
    with pytest.raises(ValueError):
        OutcomeLog.from_records([("a", "b", 0, 0)])


def test_load_and_write_round_trip(tmp_path):
    path = tmp_path / "o.csv"
    write_outcomes(OutcomeLog.from_records(CYCLE), path)
    back = load_outcomes(path)
    assert back.records == OutcomeLog.from_records(CYCLE).records
    assert back.labels == ("a", "b", "c")


@pytest.mark.parametrize("body,line", [
    ("agent_a,agent_b,wins\n", 1),
    ("agent_a,agent_b,wins_a,wins_b\na,b,1\n", 2),
    ("agent_a,agent_b,wins_a,wins_b\na,b,1,1\na,c,x,1\n", 3),
    ("agent_a,agent_b,wins_a,wins_b\na,b,-1,1\n", 2),
    ("agent_a,agent_b,wins_a,wins_b\na,a,1,1\n", 2),
])
def test_parse_errors_carry_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ParseError) as info:
        load_outcomes(path)
    assert info.value.line == line


def test_header_only_log_is_empty(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("agent_a,agent_b,wins_a,wins_b\n")
    log_ = load_outcomes(path)
    assert len(log_) == 0
    with pytest.raises(ValueError):
        estimate_probs(log_)


def test_disconnected_graph_lists_components():
    log_ = OutcomeLog.from_records([("a", "b", 1, 2), ("c", "d", 3, 1)])
    with pytest.raises(DisconnectedGraphError) as info:
        estimate_probs(log_)
    assert info.value.components == [["a", "b"], ["c", "d"]]
    assert "{a, b}" in str(info.value)


def test_fit_recovers_planted_strengths():
    s = np.array([-1.0, 0.0, 0.5, 1.5])
    P = estimate_probs(planted_log(s), regularization=1e-6)
    np.testing.assert_allclose(P.strengths, s - s.mean(), atol=0.02)


def test_regularization_shrinks_strengths():
    log_ = planted_log(np.array([0.0, 2.0]), games=10)
    weak = estimate_probs(log_, regularization=0.01).strengths
    strong = estimate_probs(log_, regularization=10.0).strengths
    assert abs(strong[0]) < abs(weak[0])


def test_fit_handles_undefeated_agent():
    W = np.array([[0, 5, 5], [0, 0, 3], [0, 2, 0]], dtype=float)
    s, iters = fit_strengths(W, 0.05)
    assert np.all(np.isfinite(s)) and s[0] == s.max()
    assert iters < 50


def test_complement_and_diagonal():
    P = estimate_probs(OutcomeLog.from_records(CYCLE), observed="empirical")
    assert P.complement_residual() <= 1e-12
    np.testing.assert_array_equal(np.diag(P.probs), 0.5)
    assert P.probs[0, 1] == pytest.approx(10 / 12)


def test_model_route_loses_the_cycle_empirical_keeps_it():
    log_ = OutcomeLog.from_records(CYCLE)
    model = logit_link(estimate_probs(log_))
    emp = logit_link(estimate_probs(log_, observed="empirical"))
    assert frobenius_norm(hodge_decompose(model).cyclic) <= 1e-9
    assert frobenius_norm(hodge_decompose(emp).cyclic) > 1.0


def test_unobserved_pairs_filled_from_model():
    log_ = OutcomeLog.from_records([("a", "b", 30, 10), ("b", "c", 30, 10)])
    P = estimate_probs(log_, observed="empirical")
    assert not P.observed[0, 2]
    s = P.strengths
    assert P.probs[0, 2] == pytest.approx(1 / (1 + np.exp(s[2] - s[0])))


def test_balanced_log_gives_zero_matrix():
    log_ = OutcomeLog.from_records([("a", "b", 5, 5), ("b", "c", 7, 7), ("a", "c", 2, 2)])
    F = logit_link(estimate_probs(log_, observed="empirical"))
    np.testing.assert_allclose(F.entries, 0.0, atol=1e-12)


def test_logit_round_trip():
    p = np.linspace(0.001, 0.999, 101)
    np.testing.assert_allclose(inverse_logit(logit(p)), p, atol=1e-12)


def test_clamp_warns(caplog):
    probs = np.array([[0.5, 1.0], [0.0, 0.5]])
    clipped, n = clamp_probs(probs, 1e-6)
    assert n == 2 and clipped[0, 1] == 1 - 1e-6
    with caplog.at_level(logging.WARNING):
        F = logit_link(probs)
    assert "clamped 2" in caplog.text
    assert F.entries[0, 1] == pytest.approx(np.log((1 - 1e-6) / 1e-6))


def test_csv_writers(tmp_path):
    P = estimate_probs(OutcomeLog.from_records(CYCLE))
    write_probs_csv(P, tmp_path / "p.csv")
    write_strengths_csv(P, tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "label,strength"
    assert len((tmp_path / "p.csv").read_text().splitlines()) == 4


def test_attribute_table(tmp_path):
    path = tmp_path / "attr.csv"
    path.write_text("label,type,speed,note\na,fire,3,x\nb,water,,y\nc,fire,1.5,\n")
    t = load_attributes(path)
    assert t.is_numeric("speed") and not t.is_numeric("type")
    assert t.column("type", ["c", "a"]) == ["fire", "fire"]
    assert t.column("speed", ["b"]) == [None]
    with pytest.raises(ValueError):
        t.numeric_column("speed", ["a", "b"])
    with pytest.raises(KeyError, match="colour"):
        t.column("colour", ["a"])
    with pytest.raises(KeyError):
        t.column("type", ["zz"])
    path.write_text("label,x\na,1\na,2\n")
    with pytest.raises(ParseError):
        load_attributes(path)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 20), st.integers(1, 20)),
                min_size=6, max_size=25))
def test_probabilities_are_complementary(rows):
    recs = [(f"x{a}", f"x{b}", wa, wb) for a, b, wa, wb in rows if a != b]
    recs += [(f"x{i}", f"x{i + 1}", 1, 1) for i in range(4)]
    P = estimate_probs(OutcomeLog.from_records(recs), observed="empirical")
    assert P.complement_residual() <= 1e-12
    assert np.all((P.probs > 0) & (P.probs < 1))
    F = logit_link(P)
    np.testing.assert_array_equal(F.entries, -F.entries.T)


def test_folding_example():
    log_ = OutcomeLog.from_records([("A", "B", 3, 1), ("B", "A", 2, 0)])
    assert log_.records == (OutcomeRecord("A", "B", 3, 3),)


def test_chain_ordering():
    P = estimate_probs(OutcomeLog.from_records([("A", "B", 1, 0), ("B", "C", 1, 0)]), regularization=0.1)
    s = dict(zip(P.labels, P.strengths))
    assert s["A"] > s["B"] > s["C"]
    assert P.probs[0, 2] > P.probs[0, 1]


def test_symmetric_log_gives_even_odds():
    P = estimate_probs(OutcomeLog.from_records([("a", "b", 3, 3), ("b", "c", 1, 1), ("a", "c", 2, 2)]))
    np.testing.assert_allclose(P.strengths, 0.0, atol=1e-12)
    np.testing.assert_allclose(P.probs, 0.5, atol=1e-12)


def test_single_shutout_stays_finite():
    P = estimate_probs(OutcomeLog.from_records([("A", "B", 10, 0)]), regularization=1.0)
    assert np.all(np.isfinite(P.strengths)) and P.strengths[0] > 0


def test_logit_values():
    assert logit(0.5) == 0.0
    assert logit(0.75) == pytest.approx(np.log(3))


def test_model_matrix_is_purely_transitive():
    rows = [("a", "b", 7, 3), ("b", "c", 2, 5), ("c", "a", 6, 1), ("a", "d", 4, 4)]
    F = logit_link(estimate_probs(OutcomeLog.from_records(rows)))
    assert frobenius_norm(hodge_decompose(F).cyclic) <= 1e-6 * frobenius_norm(F)
