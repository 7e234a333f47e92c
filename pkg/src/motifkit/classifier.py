"""Multiclass linear max-margin classifier over the four usage categories.

One-vs-rest hinge loss minimized by deterministic Pegasos-style
stochastic subgradient descent (step 1/(lambda*t)); all shuffling is
driven by the config seed, so retraining with identical inputs is
reproducible bit for bit.  Dependency-free on purpose: the feature
space is small enough that a hand-rolled linear model is adequate and
keeps training deterministic.
"""

from __future__ import annotations

import json
import random
from array import array
from dataclasses import dataclass
from enum import Enum
from . import _kernels
from .corpus import USAGE_ORDER, UsageLabel
from .errors import ModelFormatError, SchemaMismatchError, TrainingError
from .features import Dataset, FeatureVector

MODEL_FORMAT_VERSION = 1


class ClassWeighting(Enum):
    NONE = "none"
    INVERSE_FREQUENCY = "inverse_frequency"


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    epochs: int = 50
    l2_lambda: float = 0.01
    class_weighting: ClassWeighting = ClassWeighting.INVERSE_FREQUENCY
    loss: str = "hinge"

    def __post_init__(self):
        if self.epochs < 1:
            raise TrainingError("epochs must be >= 1")
        if not self.l2_lambda > 0:
            raise TrainingError("l2_lambda must be > 0")
        if self.loss != "hinge":
            raise TrainingError(f"unsupported loss {self.loss!r}")


@dataclass(frozen=True)
class Model:
    """Per-class weight vectors and biases, in canonical label order."""

    schema_id: str
    schema: tuple[str, ...]
    classes: tuple[UsageLabel, ...]
    weights: tuple[tuple[float, ...], ...]
    bias: tuple[float, ...]
    config: TrainConfig

    def __post_init__(self):
        if self.classes != USAGE_ORDER:
            raise ModelFormatError("model classes must be the canonical label order")
        if len(self.weights) != 4 or len(self.bias) != 4:
            raise ModelFormatError("model must carry exactly 4 classes")
        for row in self.weights:
            if len(row) != len(self.schema):
                raise ModelFormatError("weight row length does not match schema")
            for value in row:
                if value != value or value in (float("inf"), float("-inf")):
                    raise ModelFormatError("non-finite weight")


def train(dataset: Dataset, config: TrainConfig) -> Model:
    """Fit the one-vs-rest hinge model on a fully labeled dataset.

    InverseFrequency weighting scales each example's loss by
    n / (4 * count(its class)), countering label imbalance.
    """
    if not dataset.rows:
        raise TrainingError("cannot train on an empty dataset")
    n = len(dataset.rows)
    dim = len(dataset.schema)
    if dim == 0:
        raise TrainingError("dataset has no features")

    y = array("i", [0]) * n
    x = array("d", [0.0]) * (n * dim)
    counts = [0, 0, 0, 0]
    for r, (fv, label) in enumerate(dataset.rows):
        if label is None:
            raise TrainingError(f"row {fv.candidate_id} is unlabeled")
        cls = USAGE_ORDER.index(label)
        y[r] = cls
        counts[cls] += 1
        base = r * dim
        for j, name in enumerate(dataset.schema):
            x[base + j] = fv.values[name]

    sample_weight = array("d", [1.0]) * n
    if config.class_weighting is ClassWeighting.INVERSE_FREQUENCY:
        for r in range(n):
            sample_weight[r] = n / (4.0 * counts[y[r]])

    rng = random.Random(config.seed)
    orders = array("i", [0]) * (config.epochs * n)
    indices = list(range(n))
    for e in range(config.epochs):
        rng.shuffle(indices)
        orders[e * n : (e + 1) * n] = array("i", indices)

    w, b = _kernels.svm_train(
        x, y, sample_weight, n, dim, 4, orders, config.epochs, config.l2_lambda
    )
    weights = tuple(tuple(w[c * dim : (c + 1) * dim]) for c in range(4))
    return Model(
        schema_id=dataset.schema_id,
        schema=dataset.schema,
        classes=USAGE_ORDER,
        weights=weights,
        bias=tuple(b),
        config=config,
    )


def predict(model: Model, fv: FeatureVector) -> tuple[UsageLabel, dict[UsageLabel, float]]:
    """Score one vector; argmax label with canonical-order tie-breaking."""
    if fv.schema_id != model.schema_id:
        raise SchemaMismatchError(
            f"vector schema {fv.schema_id} != model schema {model.schema_id}"
        )
    scores: dict[UsageLabel, float] = {}
    for c, label in enumerate(model.classes):
        total = model.bias[c]
        row = model.weights[c]
        for j, name in enumerate(model.schema):
            total += row[j] * fv.values[name]
        scores[label] = total
    best = model.classes[0]
    for label in model.classes[1:]:
        if scores[label] > scores[best]:
            best = label
    return best, scores


def serialize_model(model: Model) -> str:
    return json.dumps(
        {
            "format_version": MODEL_FORMAT_VERSION,
            "schema_id": model.schema_id,
            "schema": list(model.schema),
            "classes": [c.value for c in model.classes],
            "weights": [list(row) for row in model.weights],
            "bias": list(model.bias),
            "config": {
                "seed": model.config.seed,
                "epochs": model.config.epochs,
                "l2_lambda": model.config.l2_lambda,
                "class_weighting": model.config.class_weighting.value,
                "loss": model.config.loss,
            },
        },
        indent=2,
    )


def deserialize_model(content: str) -> Model:
    try:
        data = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file does not parse: {exc}") from None
    if not isinstance(data, dict):
        raise ModelFormatError("model file is not an object")
    if data.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {data.get('format_version')!r}"
        )
    try:
        config = TrainConfig(
            seed=data["config"]["seed"],
            epochs=data["config"]["epochs"],
            l2_lambda=data["config"]["l2_lambda"],
            class_weighting=ClassWeighting(data["config"]["class_weighting"]),
            loss=data["config"]["loss"],
        )
        classes = tuple(UsageLabel(c) for c in data["classes"])
        model = Model(
            schema_id=data["schema_id"],
            schema=tuple(data["schema"]),
            classes=classes,
            weights=tuple(tuple(float(v) for v in row) for row in data["weights"]),
            bias=tuple(float(v) for v in data["bias"]),
            config=config,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelFormatError(f"model file is missing or corrupt: {exc}") from None
    return model
