"""Feature ranking with eight base methods and an ensemble recommender."""

import json as _json

from . import _featrec
from ._featrec import (
    ConfigError,
    ContractError,
    DivergenceError,
    FeatrecError,
    InputError,
    entropy,
    make_planted_dataset,
    mutual_information,
    normalized_mutual_information,
    stratified_folds,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DivergenceError",
    "FeatrecError",
    "InputError",
    "entropy",
    "ensemble_rank",
    "evaluate",
    "make_planted_dataset",
    "mutual_information",
    "normalized_mutual_information",
    "table2_fixture",
    "rank",
    "stratified_folds",
]


def _config(config):
    return "" if config is None else _json.dumps(config)


def ensemble_rank(rankings, mi_order):
    """Combine ranking columns (one list per method) using the MI order for ties."""
    return _json.loads(_featrec.ensemble_rank([list(map(int, r)) for r in rankings], list(map(int, mi_order))))


def table2_fixture(data_dir=""):
    """The bundled positional table and MI ordering as a rankings document."""
    return _json.loads(_featrec.table2_fixture(str(data_dir)))


def rank(X, y, config=None):
    """Eight rankings plus the MI ordering for a feature matrix and integer labels."""
    return _json.loads(_featrec.rank(_rows(X), [int(v) for v in y], _config(config)))


def evaluate(X, y, rankings, order, config=None):
    """Cross-validated report and curve CSV text along an ensemble order."""
    report, curve = _featrec.evaluate(_rows(X), [int(v) for v in y], _json.dumps(rankings),
                                      [int(v) for v in order], _config(config))
    return _json.loads(report), curve


def _rows(X):
    return [[float(v) for v in row] for row in X]
