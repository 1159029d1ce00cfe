"""Supervised predictive classification under partition exchangeability.

Each class and feature gets its own fitted component: the token frequencies
observed in that (class, feature) training slice together with the slice's
maximum-likelihood dispersal estimate.  The predictive probability that the
class generates a test token is

    count / (m + psi)   if the token was seen ``count`` times in the slice,
    psi / (m + psi)     if it was never seen,

with m the slice size.  Features combine by summing log predictive
probabilities (conditional independence given the class), and the class
prior is uniform, so maximum a posteriori labeling reduces to maximum
predictive likelihood.

Two labelers are provided.  :func:`label_marginal` treats test rows as
i.i.d. and labels each independently.  :func:`label_simultaneous` starts
from the marginal labels and sweeps the test set, letting the rows
currently assigned to a class augment that class's frequencies (training
psi estimates stay fixed), until no label changes or a sweep cap is hit.
Both are deterministic; ties always resolve to the earliest class in
sorted order.

:class:`PoissonDirichletClassifier` wraps the same machinery in a
scikit-learn compatible estimator.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .estimate import MleBoundaryError, mle_psi
from .partitions import Abundance

__all__ = [
    "FeatureClassModel",
    "ClassifierModel",
    "SimultaneousLabeling",
    "ModelFormatError",
    "fit_classifier",
    "label_marginal",
    "label_simultaneous",
    "save_model",
    "load_model",
    "PoissonDirichletClassifier",
]

MODEL_FORMAT = "pd-classifier"
MODEL_SCHEMA_VERSION = 1
DEFAULT_MAX_SWEEPS = 100


class ModelFormatError(ValueError):
    """A serialized model is not in the expected format or version."""


@dataclass(frozen=True)
class FeatureClassModel:
    """Training state of one class for one feature: token frequencies, the
    slice size m, and the slice's psi estimate."""

    frequencies: Mapping
    m: int
    psi: float

    def __post_init__(self) -> None:
        freqs = dict(self.frequencies)
        if self.m != sum(freqs.values()) or self.m < 1:
            raise ValueError("m must equal the total frequency count and be >= 1")
        if not (math.isfinite(self.psi) and self.psi > 0):
            raise ValueError(f"psi must be positive and finite, got {self.psi}")
        object.__setattr__(self, "frequencies", MappingProxyType(freqs))

    def log_predictive(self, token) -> float:
        """Log predictive probability of one token under this component."""
        count = self.frequencies.get(token, 0)
        if count > 0:
            return math.log(count / (self.m + self.psi))
        return math.log(self.psi / (self.m + self.psi))


@dataclass(frozen=True)
class ClassifierModel:
    """Fitted classifier: per class (in sorted label order), one
    :class:`FeatureClassModel` per feature."""

    classes: tuple
    features: Mapping
    n_features: int

    def __post_init__(self) -> None:
        if len(self.classes) < 2:
            raise ValueError("need at least two classes")
        if self.n_features < 1:
            raise ValueError("need at least one feature")
        feats = dict(self.features)
        for c in self.classes:
            if c not in feats or len(feats[c]) != self.n_features:
                raise ValueError(f"class {c!r} lacks a model for every feature")
        object.__setattr__(self, "features", MappingProxyType(feats))

    def to_json_dict(self) -> dict:
        """Versioned JSON-ready representation.  Tokens and class labels
        must be JSON-representable (strings, ints, floats, bools)."""
        return {
            "format": MODEL_FORMAT,
            "schema_version": MODEL_SCHEMA_VERSION,
            "classes": list(self.classes),
            "n_features": self.n_features,
            "models": [
                [
                    {
                        "m": fcm.m,
                        "psi": fcm.psi,
                        "frequencies": sorted(
                            ([tok, cnt] for tok, cnt in fcm.frequencies.items()),
                            key=lambda pair: str(pair[0]),
                        ),
                    }
                    for fcm in self.features[c]
                ]
                for c in self.classes
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "ClassifierModel":
        if not isinstance(doc, Mapping) or doc.get("format") != MODEL_FORMAT:
            raise ModelFormatError(f"not a {MODEL_FORMAT} document")
        if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise ModelFormatError(
                f"unsupported schema version {doc.get('schema_version')!r}; "
                f"this release reads version {MODEL_SCHEMA_VERSION}"
            )
        try:
            classes = tuple(doc["classes"])
            n_features = doc["n_features"]
            features = {
                c: tuple(
                    FeatureClassModel(
                        frequencies={tok: cnt for tok, cnt in entry["frequencies"]},
                        m=entry["m"],
                        psi=entry["psi"],
                    )
                    for entry in per_class
                )
                for c, per_class in zip(classes, doc["models"], strict=True)
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"malformed model document: {exc}") from exc
        return cls(classes=classes, features=features, n_features=n_features)


@dataclass(frozen=True)
class SimultaneousLabeling:
    """Labels from the simultaneous sweep plus its convergence diagnostics."""

    labels: tuple
    sweeps: int
    converged: bool


def _is_token(value) -> bool:
    return isinstance(value, (str, bytes)) or not isinstance(
        value, (Sequence, np.ndarray)
    )


def _token_matrix(X, n_features: int | None = None) -> list[tuple]:
    """Normalize X to a list of equal-length token tuples.  A flat sequence
    of tokens is treated as a single-feature column."""
    if isinstance(X, np.ndarray):
        if X.ndim == 1:
            rows = [(v,) for v in X.tolist()]
        elif X.ndim == 2:
            rows = [tuple(r) for r in X.tolist()]
        else:
            raise ValueError(f"X must be 1- or 2-dimensional, got ndim={X.ndim}")
    else:
        items = list(X)
        if all(_is_token(r) for r in items):
            rows = [(v,) for v in items]
        elif any(_is_token(r) for r in items):
            raise ValueError("X mixes scalar rows with sequence rows")
        else:
            rows = [tuple(r) for r in items]
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise ValueError(f"rows have unequal feature counts: {sorted(widths)}")
    if n_features is not None and rows and len(rows[0]) != n_features:
        raise ValueError(
            f"X has {len(rows[0])} features but the model expects {n_features}"
        )
    return rows


def fit_classifier(X, y) -> ClassifierModel:
    """Learn per-class per-feature frequencies and psi estimates.

    X is a matrix of tokens (rows are data points) or a flat sequence for
    one feature; y is one class label per row.  Every (class, feature)
    slice must have at least two observations and an interior species count
    (2 <= K <= n - 1), otherwise fitting fails naming the offending slice.
    """
    rows = _token_matrix(X)
    labels = list(y)
    if len(labels) != len(rows):
        raise ValueError(
            f"X has {len(rows)} rows but y has {len(labels)} labels"
        )
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError(f"need at least two distinct classes, got {len(classes)}")
    n_features = len(rows[0])
    features: dict = {}
    for c in classes:
        class_rows = [row for row, lab in zip(rows, labels) if lab == c]
        per_feature = []
        for f in range(n_features):
            freqs = Counter(row[f] for row in class_rows)
            try:
                est = mle_psi(Abundance(Counter(freqs.values())))
            except (MleBoundaryError, ValueError) as exc:
                raise type(exc)(f"class {c!r}, feature {f}: {exc}") from exc
            per_feature.append(
                FeatureClassModel(frequencies=freqs, m=len(class_rows), psi=est.psi_hat)
            )
        features[c] = tuple(per_feature)
    return ClassifierModel(classes=classes, features=features, n_features=n_features)


def _best_class(classes, scores) -> object:
    best, best_score = None, -math.inf
    for c, s in zip(classes, scores):
        if s > best_score:
            best, best_score = c, s
    return best


def label_marginal(model: ClassifierModel, X) -> list:
    """Label each test row independently by maximum predictive probability;
    ties go to the earliest class in the model's sorted order."""
    rows = _token_matrix(X, model.n_features)
    out = []
    for row in rows:
        scores = [
            sum(fcm.log_predictive(tok) for fcm, tok in zip(model.features[c], row))
            for c in model.classes
        ]
        out.append(_best_class(model.classes, scores))
    return out


def label_simultaneous(
    model: ClassifierModel,
    X,
    init_labels=None,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SimultaneousLabeling:
    """Label the whole test set jointly.

    Starting from the marginal labels (or ``init_labels`` when given), rows
    are revisited in index order; each is reassigned to the class maximizing
    the predictive probability with that class's frequencies augmented by
    the other test rows currently assigned to it.  Sweeps repeat until a
    full sweep changes nothing or ``max_sweeps`` is reached; the returned
    ``converged`` flag records which.
    """
    if max_sweeps < 1:
        raise ValueError(f"max_sweeps must be >= 1, got {max_sweeps}")
    rows = _token_matrix(X, model.n_features)
    if init_labels is None:
        labels = label_marginal(model, rows)
    else:
        labels = list(init_labels)
        if len(labels) != len(rows):
            raise ValueError(
                f"init_labels has {len(labels)} entries for {len(rows)} rows"
            )
        unknown = set(labels) - set(model.classes)
        if unknown:
            raise ValueError(f"init_labels contains unknown classes: {sorted(map(str, unknown))}")
    if not rows:
        return SimultaneousLabeling(labels=(), sweeps=0, converged=True)

    aug_m = {c: 0 for c in model.classes}
    aug: dict = {c: [Counter() for _ in range(model.n_features)] for c in model.classes}
    for row, lab in zip(rows, labels):
        aug_m[lab] += 1
        for f, tok in enumerate(row):
            aug[lab][f][tok] += 1

    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        changed = False
        for i, row in enumerate(rows):
            cur = labels[i]
            scores = []
            for c in model.classes:
                own = c == cur
                extra_m = aug_m[c] - (1 if own else 0)
                score = 0.0
                for f, fcm in enumerate(model.features[c]):
                    tok = row[f]
                    count = fcm.frequencies.get(tok, 0) + aug[c][f][tok]
                    if own:
                        count -= 1
                    denom = fcm.m + extra_m + fcm.psi
                    score += math.log((count if count > 0 else fcm.psi) / denom)
                scores.append(score)
            best = _best_class(model.classes, scores)
            if best != cur:
                changed = True
                labels[i] = best
                aug_m[cur] -= 1
                aug_m[best] += 1
                for f, tok in enumerate(row):
                    aug[cur][f][tok] -= 1
                    aug[best][f][tok] += 1
        if not changed:
            converged = True
            break
    return SimultaneousLabeling(labels=tuple(labels), sweeps=sweeps, converged=converged)


def save_model(model: ClassifierModel, path) -> None:
    """Write a fitted model to ``path`` as versioned JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ClassifierModel:
    """Read a model written by :func:`save_model`."""
    with open(path, encoding="utf-8") as fh:
        return ClassifierModel.from_json_dict(json.load(fh))


class PoissonDirichletClassifier(BaseEstimator, ClassifierMixin):
    """Scikit-learn interface to the partition-exchangeability classifier.

    Parameters
    ----------
    method : {"marginal", "simultaneous"}, default="marginal"
        Labeling rule used by :meth:`predict`: independent per-row labeling,
        or the joint sweep that lets the test set augment class frequencies.
    max_sweeps : int, default=100
        Sweep cap for the simultaneous method.

    Attributes
    ----------
    classes_ : ndarray of the sorted class labels.
    model_ : the fitted :class:`ClassifierModel`.
    n_features_in_ : number of features seen during fit.
    sweeps_, converged_ : diagnostics of the last simultaneous prediction.

    Examples
    --------
    >>> clf = PoissonDirichletClassifier()
    >>> clf.fit([["a"], ["a"], ["b"], ["x"], ["y"], ["x"]], [0, 0, 0, 1, 1, 1])
    PoissonDirichletClassifier()
    >>> list(clf.predict([["a"], ["y"]]))
    [0, 1]
    """

    def __init__(self, method: str = "marginal", max_sweeps: int = DEFAULT_MAX_SWEEPS):
        self.method = method
        self.max_sweeps = max_sweeps

    def fit(self, X, y):
        if self.method not in ("marginal", "simultaneous"):
            raise ValueError(
                f'method must be "marginal" or "simultaneous", got {self.method!r}'
            )
        self.model_ = fit_classifier(X, y)
        self.classes_ = np.asarray(self.model_.classes)
        self.n_features_in_ = self.model_.n_features
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        if self.method == "simultaneous":
            result = label_simultaneous(self.model_, X, max_sweeps=self.max_sweeps)
            self.sweeps_ = result.sweeps
            self.converged_ = result.converged
            labels = list(result.labels)
        else:
            labels = label_marginal(self.model_, X)
        return np.asarray(labels, dtype=self.classes_.dtype)
