from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptakit.games import BlottoSpec, RPS_ROW, blotto_enumerate, blotto_matrix, circulant_game, step_game_matrix
from ptakit.matrix import EvaluationMatrix, reorder
from ptakit.pta import DiscEmbedding, EmbeddingSet, SchurForm, embed, mode_matrix, rotate_mode, rotation, schur_skew
from ptakit.tradeoffs import (
    LinearFit,
    RankDeficientError,
    attribute_order_profile,
    coarse_grain,
    fit_linear_map,
    format_report,
    report,
    sparsest_rotation,
    toeplitz_deviation,
    trade_off_directions,
    write_cluster_csv,
    write_fit_csv,
    write_profile_csv,
)

from conftest import random_skew


def embedding_of(*coords):
    n = len(coords[0])
    modes = tuple(DiscEmbedding(k, 1.0, np.asarray(c, dtype=float)) for k, c in enumerate(coords))
    return EmbeddingSet(modes, tuple(f"a{i}" for i in range(n)), 1.0)


def single_fit(weights):
    w = np.asarray(weights, dtype=float)
    return LinearFit((0,), w[None], np.zeros((1, 2)), np.zeros(1), tuple(f"p{j}" for j in range(w.shape[1])))


@pytest.fixture
def linear_case():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 4))
    A = rng.normal(size=(2, 4))
    b = np.array([0.3, -1.0])
    return X, A, b, embedding_of(X @ A.T + b)


def test_exact_linear_embedding_is_recovered(linear_case):
    X, A, b, emb = linear_case
    fit = fit_linear_map(X, emb)
    assert fit.residuals[0] <= 1e-8
    np.testing.assert_allclose(fit.weights[0], A, atol=1e-10)
    np.testing.assert_allclose(fit.intercepts[0], b, atol=1e-10)
    np.testing.assert_allclose(fit.predict(X, 0), emb[0].coords, atol=1e-10)


def test_rotated_target_rotates_weights_not_error(linear_case):
    X, A, b, emb = linear_case
    noisy = embedding_of(emb[0].coords + np.random.default_rng(1).normal(scale=0.3, size=(40, 2)))
    base = fit_linear_map(X, noisy)
    turned = fit_linear_map(X, rotate_mode(noisy, 0, 1.1))
    assert turned.residuals[0] == pytest.approx(base.residuals[0], abs=1e-9)
    np.testing.assert_allclose(turned.weights[0], rotation(1.1) @ base.weights[0], atol=1e-10)


def test_params_equal_to_coords_give_identity():
    y = np.random.default_rng(2).normal(size=(15, 2))
    fit = fit_linear_map(y, embedding_of(y))
    np.testing.assert_allclose(fit.weights[0], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(fit.intercepts[0], 0.0, atol=1e-12)


def test_noise_params_leave_residual_near_one():
    F = random_skew(3, 200)
    emb = embed(schur_skew(F), 1)
    X = np.random.default_rng(4).normal(size=(200, 3))
    assert fit_linear_map(X, emb).residuals[0] > 0.9


def test_constant_columns_are_rank_deficient():
    rng = np.random.default_rng(5)
    X = np.column_stack([rng.normal(size=20), np.ones(20), rng.normal(size=20)])
    emb = embedding_of(rng.normal(size=(20, 2)))
    with pytest.raises(RankDeficientError, match="p1"):
        fit_linear_map(X, emb)
    fit = fit_linear_map(X, emb, drop_constant=True)
    assert fit.dropped == (1,)
    np.testing.assert_array_equal(fit.weights[0][:, 1], 0.0)


def test_fit_preconditions():
    emb = embedding_of(np.zeros((3, 2)))
    with pytest.raises(RankDeficientError):
        fit_linear_map(np.eye(3), emb)
    with pytest.raises(ValueError):
        fit_linear_map(np.zeros((4, 1)), emb)
    with pytest.raises(IndexError):
        fit_linear_map(np.arange(3.0)[:, None], emb, modes=[2])


def test_sparsest_rotation_of_diagonal_pair():
    fit = single_fit([[1.0, 1.0], [1.0, -1.0]])
    rotated, theta = sparsest_rotation(fit, 0)
    assert math.degrees(theta) == pytest.approx(45.0)
    np.testing.assert_allclose(np.abs(rotated.weights[0]), [[0, math.sqrt(2)], [math.sqrt(2), 0]], atol=1e-12)
    assert np.abs(rotated.weights[0]).sum() < np.abs(fit.weights[0]).sum()


def test_sparse_weights_stay_put():
    fit = single_fit([[2.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    rotated, theta = sparsest_rotation(fit, 0)
    assert theta == 0.0
    np.testing.assert_array_equal(rotated.weights, fit.weights)


def test_unknown_mode():
    with pytest.raises(KeyError):
        sparsest_rotation(single_fit(np.eye(2)), 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_rotation_lowers_l1_and_keeps_disc(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(12, 5))
    emb = embedding_of(X @ rng.normal(size=(5, 2)))
    fit = fit_linear_map(X, emb)
    rotated, theta = sparsest_rotation(fit, 0)
    assert np.abs(rotated.weights[0]).sum() <= np.abs(fit.weights[0]).sum() + 1e-12
    before = mode_matrix(fit.predict(X, 0))
    after = mode_matrix(rotated.predict(X, 0))
    np.testing.assert_allclose(after, before, atol=1e-10)
    np.testing.assert_allclose(rotated.predict(X, 0), rotate_mode(emb, 0, theta)[0].coords, atol=1e-9)


def test_trade_off_directions_sign_convention(tmp_path):
    fit = single_fit([[-3.0, 4.0, 0.0], [0.0, -2.0, 0.0]])
    d = trade_off_directions(fit, 0)
    np.testing.assert_allclose(d, [[-0.6, 0.8, 0.0], [0.0, 1.0, 0.0]])
    write_fit_csv(fit, tmp_path / "w.csv", normalized=True)
    lines = (tmp_path / "w.csv").read_text().splitlines()
    assert lines[0] == "mode,axis,p0,p1,p2,intercept,residual"
    assert len(lines) == 3


# --- coarse graining ---------------------------------------------------------

def test_singleton_groups_reproduce_entries():
    F = EvaluationMatrix(np.array([[0, 0.7], [-0.7, 0]]), ("x", "y"))
    cs = coarse_grain(F, {"x": "g1", "y": "g2"})
    np.testing.assert_array_equal(cs.matrix, F.entries)
    assert cs.groups == ("g1", "g2") and cs.sizes == (1, 1)


def test_identical_agents_collapse_exactly():
    U = circulant_game(RPS_ROW)
    idx = [0, 0, 1, 1, 1, 2]
    F = EvaluationMatrix(U[np.ix_(idx, idx)])
    cs = coarse_grain(F, dict(zip(F.labels, "rrpppS")))
    # r, p, S : sorted labels are S, p, r
    assert cs.groups == ("S", "p", "r")
    assert cs.matrix[2, 1] == U[0, 1] and cs.matrix[1, 0] == U[1, 2]
    np.testing.assert_array_equal(np.diag(cs.matrix), 0.0)


def planted_cycle(seed=0, per=6, noise=0.2):
    rng = np.random.default_rng(seed)
    kind = np.repeat([0, 1, 2], per)
    base = circulant_game(RPS_ROW)[np.ix_(kind, kind)]
    a = rng.normal(scale=noise, size=base.shape)
    F = EvaluationMatrix(base + a - a.T - np.diag(np.diag(a - a.T)))
    groups = {lab: "RPS"[k] for lab, k in zip(F.labels, kind)}
    return F, groups


def test_noisy_cycle_keeps_rps_signs():
    F, groups = planted_cycle()
    cs = coarse_grain(F, groups)
    order = [cs.groups.index(g) for g in "RPS"]
    m = cs.matrix[np.ix_(order, order)]
    np.testing.assert_allclose(np.diag(m), 0.0, atol=1e-12)
    off = ~np.eye(3, dtype=bool)
    np.testing.assert_array_equal(np.sign(m)[off], circulant_game(RPS_ROW)[off])


def test_coarse_grain_is_skew_and_permutation_equivariant():
    F, groups = planted_cycle(seed=1)
    cs = coarse_grain(F, groups)
    np.testing.assert_allclose(cs.matrix, -cs.matrix.T, atol=1e-9)
    perm = np.random.default_rng(7).permutation(F.n)
    cs2 = coarse_grain(reorder(F, perm), groups)
    assert cs2.groups == cs.groups
    np.testing.assert_allclose(cs2.matrix, cs.matrix, atol=1e-12)


def test_groups_ordered_clockwise_by_embedding():
    F, groups = planted_cycle(seed=2, noise=0.05)
    emb = embed(schur_skew(F), 1)
    cs = coarse_grain(F, groups, emb[0])
    member = np.array([groups[lab] for lab in F.labels])
    angles = [math.atan2(*emb[0].coords[member == g].mean(axis=0)[::-1]) for g in cs.groups]
    assert angles == sorted(angles, reverse=True)


def test_unmapped_agent(tmp_path):
    F, groups = planted_cycle()
    groups.pop(F.labels[0])
    with pytest.raises(KeyError):
        coarse_grain(F, groups)
    F, groups = planted_cycle()
    write_cluster_csv(coarse_grain(F, groups), tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "group,P,R,S"


# --- attribute profiles ------------------------------------------------------

def test_step_game_is_exactly_toeplitz():
    F = step_game_matrix(10)
    prof = attribute_order_profile(F, np.arange(10.0)[::-1], "speed")
    assert prof.toeplitz_deviation == 0.0
    gaps = [g for g, _ in prof.samples]
    assert gaps == sorted(gaps)


def test_permuted_step_game_is_restored():
    F = step_game_matrix(12)
    perm = np.random.default_rng(3).permutation(12)
    G = reorder(F, perm)
    assert toeplitz_deviation(G.entries) > 0.1
    prof = attribute_order_profile(G, perm.astype(float))
    assert prof.toeplitz_deviation == 0.0
    assert prof.matrix.labels == F.labels


def test_random_matrix_is_far_from_toeplitz():
    F = random_skew(8, 60)
    prof = attribute_order_profile(F, np.random.default_rng(9).normal(size=60))
    assert 0.9 < prof.toeplitz_deviation <= 1.0


def test_ties_are_broken_by_label_and_reported(tmp_path):
    F = EvaluationMatrix(step_game_matrix(4).entries, ("d", "b", "c", "a"))
    prof = attribute_order_profile(F, [1.0, 0.0, 1.0, 0.0])
    assert prof.matrix.labels == ("a", "b", "c", "d")
    assert prof.ties == (("a", "b"), ("c", "d"))
    write_profile_csv(prof, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "gap,advantage"
    with pytest.raises(ValueError):
        attribute_order_profile(F, [1.0, 2.0])


# --- report ------------------------------------------------------------------

def test_report_closed_form():
    rep = report(SchurForm.from_omegas([3.0, 1.0]), [0.05, 0.5])
    rows = rep["modes"]
    assert [r["recovery"] for r in rows] == pytest.approx([0.9486832980505138, 1.0])
    assert [r["importance"] for r in rows] == pytest.approx([0.9, 0.1])
    assert rep["complexity"] == {"0.05": 2, "0.5": 1}
    json.dumps(rep)
    assert "complexity" in format_report(rep)


def test_blotto_triples_share_group():
    spec = BlottoSpec(10, 3)
    F = EvaluationMatrix(blotto_matrix(blotto_enumerate(spec), spec.payouts))
    rows = report(schur_skew(F))["modes"]
    assert rows[0]["group"] == rows[1]["group"] == rows[2]["group"]
    assert rows[3]["group"] != rows[0]["group"]


def test_report_on_zero_matrix():
    rep = report(schur_skew(EvaluationMatrix(np.zeros((3, 3)))), [0.1])
    assert rep["modes"] == [] and rep["complexity"] == {"0.1": 0}
