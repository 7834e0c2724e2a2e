"""Smoke tests for the tpmtl python module."""

import math

import numpy as np
import pytest

import tpmtl


def test_allen_relations():
    a = tpmtl.Action(1, 0, 4)
    b = tpmtl.Action(2, 2, 6)
    assert tpmtl.allen_relation(a, b) == tpmtl.AllenRelation.overlaps
    assert tpmtl.allen_relation(b, a) == tpmtl.AllenRelation.overlapped_by
    assert (
        tpmtl.allen_inverse(tpmtl.AllenRelation.meets)
        == tpmtl.AllenRelation.met_by
    )


def test_normalize_and_support():
    act = tpmtl.normalize_activity(
        [tpmtl.Action(1, 0, 4), tpmtl.Action(2, 2, 6)]
    )
    assert act.span == 6
    single = tpmtl.TemporalPattern([1])
    assert tpmtl.pattern_support(single, act, 2) == pytest.approx(0.75)
    pair = tpmtl.TemporalPattern([1, 2], [tpmtl.AllenRelation.overlaps])
    assert tpmtl.pattern_support(pair, act, 2) == pytest.approx(0.5)
    assert len(tpmtl.find_instances(pair, act)) == 1
    assert tpmtl.is_subpattern(single, pair)


def test_mine_and_featurize():
    act = tpmtl.normalize_activity(
        [tpmtl.Action(1, 0, 4), tpmtl.Action(2, 2, 6)]
    )
    cfg = tpmtl.MiningConfig()
    cfg.minsup = 0.4
    cfg.window = 2
    cfg.max_dim = 2
    fs = tpmtl.mine([act], cfg)
    assert len(fs) == 3
    x = tpmtl.featurize(act, fs, 2)
    assert x == pytest.approx([0.75, 0.75, 0.5])


def test_prox_against_numpy():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(6, 3))
    tau = 0.4
    got = np.asarray(tpmtl.prox_l21(v, tau))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    scale = np.maximum(0.0, 1.0 - tau / norms)
    assert np.allclose(got, v * scale)

    got_l1 = np.asarray(tpmtl.prox_l1(v, tau))
    assert np.allclose(got_l1, np.sign(v) * np.maximum(np.abs(v) - tau, 0.0))


def test_solve_omega_diag():
    w = np.zeros((3, 2))
    w[0, 0] = 2.0
    w[1, 1] = 1.0
    cov = tpmtl.solve_omega(w)
    omega = np.asarray(cov.omega)
    assert omega[0, 0] == pytest.approx(2.0 / 3.0)
    assert omega[1, 1] == pytest.approx(1.0 / 3.0)
    assert not cov.degenerate
    assert tpmtl.solve_omega(np.zeros((3, 2))).degenerate


def test_fit_alternating_monotone():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 6))
    y = np.zeros((20, 3))
    y[np.arange(20), rng.integers(0, 3, size=20)] = 1.0
    fit = tpmtl.fit_alternating(x, y, tpmtl.Hyperparams(0.05, 0.01, 0.02))
    trace = fit.objective_trace
    assert all(b <= a + 1e-8 for a, b in zip(trace, trace[1:]))
    assert fit.outer_iterations <= 50


def test_paired_t_test_matches_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    a = [0.9, 0.8, 0.85, 0.95, 0.7, 0.75]
    b = [0.88, 0.82, 0.8, 0.9, 0.72, 0.7]
    expected = scipy_stats.ttest_rel(a, b).pvalue
    assert tpmtl.paired_t_test(a, b) == pytest.approx(expected, abs=1e-10)
    assert tpmtl.paired_t_test(a, a) == 1.0


def test_end_to_end_train_predict_save_load(tmp_path):
    templates = tpmtl.benchmark_templates(3, 0.2)
    corpus = tpmtl.generate(templates, 12, 7)
    assert len(corpus.activities) == 36

    options = tpmtl.TrainOptions()
    options.mode = tpmtl.ModelMode.amtl
    options.mining.minsup = 0.05
    options.mining.max_dim = 2
    model, summary = tpmtl.train(corpus, options)
    assert summary.training_accuracy >= 0.9
    assert np.asarray(model.W).shape[0] == len(model.feature_space)

    pred = tpmtl.predict(model, corpus.activities[0])
    assert pred.class_index == corpus.activities[0].label

    path = str(tmp_path / "model.txt")
    tpmtl.save_model(model, path)
    loaded = tpmtl.load_model(path)
    for act in corpus.activities[:5]:
        assert (
            tpmtl.predict(loaded, act).scores
            == tpmtl.predict(model, act).scores
        )

    report = tpmtl.relatedness_report(model)
    off = np.asarray(report.off_diagonal)
    assert off.shape == (3, 3)
    assert np.allclose(np.diag(off), 0.0)

    res = tpmtl.kfold_cv(corpus, 4, options, seed=3)
    assert res.mean_accuracy >= 0.8
    assert math.isclose(
        res.mean_accuracy, sum(res.fold_accuracies) / len(res.fold_accuracies)
    )


def test_activity_file_roundtrip(tmp_path):
    corpus = tpmtl.generate(tpmtl.benchmark_templates(2, 0.1), 4, 3)
    path = str(tmp_path / "corpus.tsv")
    tpmtl.write_activity_file(corpus, path)
    back = tpmtl.read_activity_file(path)
    assert back.label_names == corpus.label_names
    assert len(back.activities) == len(corpus.activities)


def test_validation_errors_map_to_python():
    with pytest.raises(ValueError):
        tpmtl.normalize_activity([tpmtl.Action(1, 5, 5)])
    with pytest.raises(ValueError):
        tpmtl.mine([], tpmtl.MiningConfig())
