"""
Testy protokołów oceny: podziały first_d / random_split, run_protocol, sweep.
"""

import numpy as np
import pytest

from collectors.orl_collector import LabeledDataset
from collectors.pgm_reader import GrayImage
from collectors.synthetic import synth_dataset
from descriptors.feature_cache import read_feature_csv
from services import evaluation
from services.evaluation import (
    EvalReport,
    Protocol,
    ProtocolKind,
    classify_split,
    extract_dataset_features,
    protocol_splits,
    run_protocol,
    run_sweep,
    split_first_d,
    split_key,
    split_random,
)
from utils.config import PipelineConfig

CHI2 = PipelineConfig(classifier='chi2_nn')


@pytest.fixture(scope='module')
def orl_shaped():
    """40 klas x 10 obrazów 1x1 - wystarcza do testów samych podziałów."""
    images = tuple(GrayImage.from_array(np.array([[i % 256]])) for i in range(400))
    labels = tuple(i // 10 for i in range(400))
    return LabeledDataset(images=images, labels=labels, class_count=40)


# ============================================
# SPLITS
# ============================================

def test_first_d_sizes_on_orl_shape(orl_shaped):
    train, test = split_first_d(orl_shaped, 5)
    assert (train.size, test.size) == (200, 200)
    train, test = split_first_d(orl_shaped, 1)
    assert (train.size, test.size) == (40, 360)


def test_first_d_takes_leading_images(synthetic):
    train, test = split_first_d(synthetic, 3)
    expected = [label * 10 + i for label in range(4) for i in range(3)]
    assert train.tolist() == expected
    assert set(test.tolist()) == set(range(40)) - set(expected)


def test_random_split_is_deterministic(orl_shaped):
    first = split_random(orl_shaped, 5, run_index=2, seed=42)
    second = split_random(orl_shaped, 5, run_index=2, seed=42)
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], second[1])


def test_random_split_runs_differ(orl_shaped):
    run0 = split_random(orl_shaped, 5, run_index=0, seed=42)[0]
    run1 = split_random(orl_shaped, 5, run_index=1, seed=42)[0]
    other_seed = split_random(orl_shaped, 5, run_index=0, seed=43)[0]
    assert not np.array_equal(run0, run1)
    assert not np.array_equal(run0, other_seed)


@pytest.mark.parametrize('d', [1, 5, 9])
def test_random_split_is_sound(orl_shaped, d):
    train, test = split_random(orl_shaped, d, run_index=0, seed=7)
    labels = orl_shaped.label_array
    assert np.all(np.bincount(labels[train], minlength=40) == d)
    assert np.intersect1d(train, test).size == 0
    assert np.array_equal(np.union1d(train, test), np.arange(400))
    assert np.all(np.diff(train) > 0)


def test_split_key_is_128_bit_and_distinct():
    keys = {split_key(42, run, label) for run in range(3) for label in range(40)}
    assert len(keys) == 120
    assert all(0 <= key < 2 ** 128 for key in keys)
    assert split_key(42, 0, 0) == split_key(42, 0, 0)


@pytest.mark.parametrize('d', [0, 10, 11])
def test_infeasible_d_raises(orl_shaped, d):
    with pytest.raises(ValueError):
        split_first_d(orl_shaped, d)
    with pytest.raises(ValueError):
        split_random(orl_shaped, d, 0, 0)


def test_protocol_splits_counts(orl_shaped):
    assert len(protocol_splits(orl_shaped, Protocol('first_d', d=5, runs=10))) == 1
    assert len(protocol_splits(orl_shaped, Protocol('random_split', d=5, runs=4, seed=1))) == 4


def test_protocol_validation():
    assert Protocol('random', d=2).kind is ProtocolKind.RANDOM_SPLIT
    assert Protocol('first_d', d=2, runs=10).runs == 1
    with pytest.raises(ValueError):
        Protocol('first_d', d=0)
    with pytest.raises(ValueError):
        Protocol('random_split', d=2, runs=0)
    with pytest.raises(ValueError):
        Protocol('leave_one_out', d=2)


# ============================================
# PROTOCOL RUNS
# ============================================

def test_first_d_src_on_synthetic(synthetic):
    report = run_protocol(synthetic, Protocol('first_d', d=5), PipelineConfig())
    assert report.per_run_accuracy == (report.mean,)
    assert report.mean >= 0.95
    assert report.std == 0.0
    assert report.protocol == {'kind': 'first_d', 'd': 5, 'runs': 1, 'seed': 0}
    assert set(report.timing) == {'features', 'splits', 'classification'}


def test_chi2_nn_memorizes_gallery(synthetic):
    table = extract_dataset_features(synthetic, CHI2)
    everything = np.arange(len(synthetic))
    predicted = classify_split(table.features, table.labels, (everything, everything), CHI2)
    assert np.array_equal(predicted, table.labels)


def test_random_split_reports_sample_std(synthetic):
    report = run_protocol(synthetic, Protocol('random_split', d=4, runs=3, seed=5), CHI2)
    accuracies = np.array(report.per_run_accuracy)
    assert len(accuracies) == 3
    assert report.mean == pytest.approx(accuracies.mean())
    assert report.std == pytest.approx(np.std(accuracies, ddof=1))
    assert np.all((accuracies >= 0) & (accuracies <= 1))


def test_single_random_run_has_zero_std(synthetic):
    report = run_protocol(synthetic, Protocol('random_split', d=4, runs=1, seed=5), CHI2)
    assert report.std == 0.0


def test_run_protocol_infeasible_d(synthetic):
    with pytest.raises(ValueError, match='niewykonalne'):
        run_protocol(synthetic, Protocol('first_d', d=10), CHI2)


def test_cached_features_give_identical_report(tmp_path, synthetic, monkeypatch):
    cache = tmp_path / 'features.csv'
    protocol = Protocol('random_split', d=5, runs=2, seed=3)
    fresh = run_protocol(synthetic, protocol, CHI2, cache_path=cache)
    assert cache.exists()

    def fail(*args, **kwargs):
        raise AssertionError("cache powinien wystarczyć")

    monkeypatch.setattr(evaluation, 'extract_feature', fail)
    cached = run_protocol(synthetic, protocol, CHI2, cache_path=cache)
    assert cached.per_run_accuracy == fresh.per_run_accuracy
    assert (cached.mean, cached.std) == (fresh.mean, fresh.std)


def test_cache_with_other_descriptor_is_rebuilt(tmp_path, synthetic):
    cache = tmp_path / 'features.csv'
    extract_dataset_features(synthetic, CHI2, cache)
    lbp = PipelineConfig(descriptor='lbp', mapping='u2', classifier='chi2_nn')
    table = extract_dataset_features(synthetic, lbp, cache)
    assert table.config == lbp
    assert table.features.shape == (40, 21 * 59)


def test_cache_from_other_dataset_of_same_shape_is_rebuilt(tmp_path):
    cache = tmp_path / 'features.csv'
    first = synth_dataset(4, 6, 32, seed=1)
    second = synth_dataset(4, 6, 32, seed=2)
    assert np.array_equal(first.label_array, second.label_array)

    extract_dataset_features(first, CHI2, cache)
    reused = extract_dataset_features(second, CHI2, cache)
    fresh = extract_dataset_features(second, CHI2)
    assert np.array_equal(reused.features, fresh.features)
    assert reused.dataset_hash == second.fingerprint()
    assert read_feature_csv(cache).dataset_hash == second.fingerprint()


def test_run_sweep(synthetic):
    reports = run_sweep(synthetic, [1, 3, 5], CHI2)
    assert [r.protocol['d'] for r in reports] == [1, 3, 5]
    assert all(r.protocol['kind'] == 'first_d' for r in reports)
    with pytest.raises(ValueError):
        run_sweep(synthetic, [], CHI2)
    with pytest.raises(ValueError):
        run_sweep(synthetic, [2, 10], CHI2)


# ============================================
# REPORT INVARIANTS
# ============================================

def test_eval_report_validation():
    protocol = Protocol('first_d', d=1)
    with pytest.raises(ValueError):
        EvalReport.from_accuracies([], protocol, CHI2)
    with pytest.raises(ValueError):
        EvalReport.from_accuracies([1.2], protocol, CHI2)
    with pytest.raises(ValueError):
        EvalReport(per_run_accuracy=(0.5,), mean=0.5, std=-1.0, protocol={}, config_echo={})
    with pytest.raises(ValueError, match='mean'):
        EvalReport(per_run_accuracy=(0.5, 1.0), mean=0.9, std=0.1, protocol={}, config_echo={})
    # średnia liczona tak samo jak w from_accuracies przechodzi
    EvalReport(per_run_accuracy=(0.1, 0.2, 0.3), mean=float(np.mean([0.1, 0.2, 0.3])), std=0.1,
               protocol={}, config_echo={})


def test_eval_report_from_accuracies():
    report = EvalReport.from_accuracies([0.9, 1.0], Protocol('random_split', d=2, runs=2), CHI2)
    assert report.mean == pytest.approx(0.95)
    assert report.std == pytest.approx(np.std([0.9, 1.0], ddof=1))
    assert report.config_echo['classifier'] == 'chi2_nn'
