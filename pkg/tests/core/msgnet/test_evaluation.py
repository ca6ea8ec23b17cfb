import numpy as np
import pytest

from terranalog.config import ModelConfig, TrainConfig
from terranalog.core.msgnet import kfold_evaluate
from terranalog.exception import DatasetError
from tests.fixture.graph_factory import separable_benchmark


@pytest.fixture
def benchmark():
    return separable_benchmark(pair_count=40)


@pytest.fixture
def always_match(mocker):
    scorer = mocker.Mock()
    scorer.score_pairs.side_effect = lambda resolved: np.ones(len(resolved))
    return mocker.Mock(return_value=scorer)


def test_folds_with_constant_scorer(benchmark, always_match):
    pairs, graphs = benchmark
    report = kfold_evaluate(pairs, graphs, folds=5, train_fn=always_match)

    assert always_match.call_count == 5
    for call in always_match.call_args_list:
        train_pairs, held_out = call.args
        assert (len(train_pairs), len(held_out)) == (32, 8)
    assert [(f.fold, f.size, f.positives) for f in report.folds] == [
        (k, 8, 4) for k in range(1, 6)
    ]
    assert report.mean.accuracy == pytest.approx(0.5)
    assert report.mean.f1 == pytest.approx(2 / 3)
    assert report.std.f1 == pytest.approx(0.0)


def test_report_to_dict(benchmark, always_match):
    pairs, graphs = benchmark
    report = kfold_evaluate(pairs, graphs, folds=2, train_fn=always_match)
    data = report.to_dict()

    assert len(data["folds"]) == 2
    assert set(data["folds"][0]) == {
        "fold",
        "size",
        "positives",
        "accuracy",
        "precision",
        "recall",
        "f1",
    }
    assert data["formatted"]["f1"] == "66.67 ± 0.00"


def test_held_out_folds_cover_dataset(benchmark, always_match):
    pairs, graphs = benchmark
    kfold_evaluate(pairs, graphs, folds=4, train_fn=always_match)

    held = [p for call in always_match.call_args_list for p in call.args[1]]
    assert sorted(held, key=pairs.index) == pairs


def test_folds_default_to_config(benchmark, always_match):
    pairs, graphs = benchmark
    kfold_evaluate(pairs, graphs, TrainConfig(folds=4), train_fn=always_match)
    assert always_match.call_count == 4


def test_trains_real_models(benchmark):
    pairs, graphs = benchmark
    config = TrainConfig(learning_rate=0.01, batch_size=16, max_epochs=2)
    model_config = ModelConfig(hidden=8, layers=2, pool_ratio=0.5, mlp_hidden=(4,))
    report = kfold_evaluate(pairs, graphs, config, model_config, folds=2)

    assert len(report.folds) == 2
    assert 0.0 <= report.mean.f1 <= 1.0


@pytest.mark.parametrize(
    "count, folds, message",
    [
        (40, 1, "cross-validation needs at least 2 folds, got 1"),
        (3, 5, "3 pairs cannot fill 5 folds"),
    ],
)
def test_reject_bad_fold_count(benchmark, count, folds, message):
    pairs, graphs = benchmark
    with pytest.raises(DatasetError) as e:
        kfold_evaluate(pairs[:count], graphs, folds=folds)
    assert message == str(e.value)
