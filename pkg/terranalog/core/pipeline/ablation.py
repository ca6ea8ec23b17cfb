from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from terranalog.config import ModelConfig, TrainConfig
from terranalog.core.enum import GeomorphFeature
from terranalog.core.graph.terrain_graph import TerrainGraph
from terranalog.core.msgnet.evaluation import (
    CrossValidationReport,
    TrainFn,
    kfold_evaluate,
)
from terranalog.core.msgnet.pairs import LabeledPair
from terranalog.exception import ModelError

_logger = logging.getLogger(__name__)

ABLATION_COLUMNS = ("variant", "accuracy", "precision", "recall", "f1")

FeatureName = Union[str, GeomorphFeature]
Variant = Union[FeatureName, Iterable[FeatureName]]


@dataclass(frozen=True)
class AblationRow:
    variant: str
    dropped: Tuple[GeomorphFeature, ...]
    report: CrossValidationReport

    def to_row(self) -> Dict[str, str]:
        return {"variant": self.variant, **self.report.formatted()}


def _parse(name: FeatureName) -> GeomorphFeature:
    try:
        return GeomorphFeature.parse(name)
    except ValueError as e:
        raise ModelError(str(e)) from None


def parse_variant(variant: Variant) -> Tuple[GeomorphFeature, ...]:
    """
    One feature name, or a group of names dropped together.

    Examples
    --------
    >>> parse_variant("cd")
    (<GeomorphFeature.CD: 'CD'>,)
    >>> [f.value for f in parse_variant("VRM+Slope")]
    ['VRM', 'Slope']
    """
    if isinstance(variant, (str, GeomorphFeature)):
        names = str(getattr(variant, "value", variant)).split("+")
    else:
        names = list(variant)
    features = []
    for name in names:
        feature = _parse(name)
        if feature not in features:
            features.append(feature)
    if not features:
        raise ModelError("An ablation variant must drop at least one feature.")
    return tuple(sorted(features, key=lambda f: f.channel))


def variant_name(dropped: Sequence[GeomorphFeature]) -> str:
    if not dropped:
        return "full"
    return "w/o " + "+".join(feature.value for feature in dropped)


def ablation_run(
    pairs: Sequence[LabeledPair],
    graphs: Mapping[str, TerrainGraph],
    features_to_drop: Iterable[Variant] = (),
    config: Optional[TrainConfig] = None,
    model_config: Optional[ModelConfig] = None,
    folds: Optional[int] = None,
    train_fn_factory=None,
) -> List[AblationRow]:
    """
    Cross-validate the full model and one variant per entry of ``features_to_drop``.

    A variant zeroes the named channels of every graph and retrains from
    scratch; the input width stays at five channels. All variants share the
    same seed, so they see the same folds.

    Parameters
    ----------
    pairs : sequence of LabeledPair
        The labelled dataset.
    graphs : mapping of str to TerrainGraph
        Graphs the pairs refer to.
    features_to_drop : iterable
        Feature names (``"CD"``), ``"+"``-joined groups (``"VRM+ACR"``) or
        sequences of names.
    config, model_config : optional
        Training recipe and model shape.
    folds : int, optional
        Overrides ``config.folds``.
    train_fn_factory : callable, optional
        Called with the variant's graphs, returns the ``train_fn`` given to
        :func:`kfold_evaluate`.

    Returns
    -------
    list of AblationRow
        The full-feature row first, then the variants in the given order.

    Raises
    ------
    ModelError
        For an unknown feature name; raised before any training.
    """
    variants: List[Tuple[GeomorphFeature, ...]] = [()]
    variants.extend(parse_variant(v) for v in features_to_drop)
    rows = []
    for dropped in variants:
        name = variant_name(dropped)
        view = (
            {key: graph.with_features_zeroed(dropped) for key, graph in graphs.items()}
            if dropped
            else dict(graphs)
        )
        train_fn: Optional[TrainFn] = (
            train_fn_factory(view) if train_fn_factory is not None else None
        )
        report = kfold_evaluate(
            pairs, view, config, model_config, folds=folds, train_fn=train_fn
        )
        _logger.info("Ablation %s: F1 %s", name, report.formatted()["f1"])
        rows.append(AblationRow(variant=name, dropped=dropped, report=report))
    return rows
