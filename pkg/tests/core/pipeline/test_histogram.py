import csv
import json

import numpy as np
import pytest

from terranalog.core.pipeline import similarity_histogram, write_histogram
from terranalog.core.pipeline.histogram import HISTOGRAM_COLUMNS
from terranalog.exception import StageInputError


def test_counts_and_summary():
    histogram = similarity_histogram([0.05, 0.05, 0.95], 0.1)

    assert histogram.counts.tolist() == [2, 0, 0, 0, 0, 0, 0, 0, 0, 1]
    assert histogram.mean == pytest.approx(0.35)
    assert histogram.median == 0.05
    assert histogram.total == 3
    assert histogram.fraction_below(0.2) == pytest.approx(2 / 3)


@pytest.mark.parametrize(
    "score, expected_bin",
    [(0.0, 0), (0.2, 2), (0.3, 3), (0.999, 9), (1.0, 9)],
)
def test_bins_are_left_closed(score, expected_bin):
    counts = similarity_histogram([score], 0.1).counts
    assert counts[expected_bin] == 1


def test_uneven_width_covers_one():
    histogram = similarity_histogram([1.0], 0.3)

    assert histogram.counts.tolist() == [0, 0, 0, 1]
    assert histogram.edges[-1] == pytest.approx(1.2)


def test_empty_scores():
    histogram = similarity_histogram([], 0.05)

    assert not histogram.defined
    assert histogram.counts.tolist() == [0] * 20
    assert histogram.mean is None and histogram.median is None
    assert histogram.fraction_below(0.2) is None
    summary = histogram.to_dict(threshold=0.2)
    assert summary["fraction_below"] is None
    json.dumps(summary)


def test_to_dict():
    summary = similarity_histogram([0.1, 0.5], 0.5).to_dict()
    assert summary == {
        "bin_width": 0.5,
        "count": 2,
        "defined": True,
        "mean": 0.3,
        "median": 0.3,
        "counts": [1, 1],
    }


@pytest.mark.parametrize(
    "scores, width, message",
    [
        ([0.5], 0.0, "Bin width must be positive, got 0.0."),
        ([0.5, 1.5], 0.1, "Score 1.5 is outside [0, 1]."),
        ([-0.25], 0.1, "Score -0.25 is outside [0, 1]."),
        ([np.nan], 0.1, "Score nan is outside [0, 1]."),
    ],
)
def test_reject_bad_input(scores, width, message):
    with pytest.raises(StageInputError) as e:
        similarity_histogram(scores, width)
    assert message == str(e.value)


def test_write_histogram(tmp_path):
    path = tmp_path / "hist.csv"
    write_histogram(similarity_histogram([0.05, 0.05, 0.95], 0.1), path)

    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == HISTOGRAM_COLUMNS
    assert rows[1] == ["0.0", "0.1", "2"]
    assert rows[-1][1:] == ["1.0", "1"]
    assert len(rows) == 11
