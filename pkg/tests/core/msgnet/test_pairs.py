import numpy as np
import pytest

from terranalog.core.msgnet import LabeledPair, resolve_pairs, stratified_folds
from terranalog.exception import DatasetError
from tests.fixture.graph_factory import random_graph


def test_reject_bad_label():
    with pytest.raises(DatasetError) as e:
        LabeledPair("a", "b", 2)
    assert "label must be 0 or 1, got 2" == str(e.value)


def test_resolve_pairs(rng):
    graphs = {"a": random_graph(rng), "b": random_graph(rng)}
    resolved, labels = resolve_pairs(
        [LabeledPair("a", "b", 1), LabeledPair("b", "b", 0)], graphs
    )

    assert resolved[0] == (graphs["a"], graphs["b"])
    assert resolved[1][0] is graphs["b"]
    np.testing.assert_array_equal(labels, [1, 0])


def test_resolve_unknown_graph(rng):
    graphs = {"a": random_graph(rng)}
    with pytest.raises(DatasetError) as e:
        resolve_pairs([LabeledPair("a", "a", 1), LabeledPair("a", "zz", 0)], graphs)
    assert "Row 2: unknown graph id 'zz'" == str(e.value)
    assert e.value.row == 2


class TestStratifiedFolds:
    labels = np.array([0] * 10 + [1] * 5)

    def test_folds_partition_indices(self, rng):
        folds = stratified_folds(self.labels, 5, rng)
        merged = np.sort(np.concatenate(folds))
        np.testing.assert_array_equal(merged, np.arange(15))

    def test_folds_are_balanced(self, rng):
        for fold in stratified_folds(self.labels, 5, rng):
            assert len(fold) == 3
            assert self.labels[fold].sum() == 1

    def test_sizes_differ_by_at_most_one(self, rng):
        sizes = [len(f) for f in stratified_folds(np.arange(17) % 2, 5, rng)]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == 17

    def test_seeded_split_repeats(self):
        first = stratified_folds(self.labels, 3, np.random.default_rng(9))
        second = stratified_folds(self.labels, 3, np.random.default_rng(9))
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)
