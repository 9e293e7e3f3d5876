import pytest

import featrec

ENSEMBLE_ORDER = [7, 9, 22, 0, 27, 1, 17, 14, 25, 8, 5, 15, 18, 19, 21, 13, 24, 12, 3, 23, 10, 20, 16, 11, 4, 28, 6, 2, 26]


def test_fixture_ensemble_order():
    doc = featrec.table2_fixture()
    result = featrec.ensemble_rank([r["order"] for r in doc["rankings"]], doc["mi_order"]["order"])
    assert result["order"] == ENSEMBLE_ORDER


def test_information_measures():
    x = [0, 0, 1, 1]
    assert featrec.entropy(x) == pytest.approx(1.0)
    assert featrec.mutual_information(x, x) == pytest.approx(1.0)
    assert featrec.mutual_information(x, [0, 1, 0, 1]) == pytest.approx(0.0)
    assert featrec.normalized_mutual_information(x, x) == pytest.approx(1.0)


def test_stratified_folds_partition():
    labels = [i % 3 for i in range(30)]
    folds = featrec.stratified_folds(labels, 5, seed=1)
    assert len(folds) == 5
    assert sorted(i for f in folds for i in f) == list(range(30))
    for f in folds:
        assert sorted(labels[i] for i in f) == [0, 0, 1, 1, 2, 2]


def test_rank_and_evaluate_planted():
    X, y = featrec.make_planted_dataset(200, 8, 3, 0.0, 0.05)
    cfg = {"forest": {"trees": 20}, "folds": 4, "top_k": 4, "classifier": "svm"}
    doc = featrec.rank(X, y, cfg)
    assert len(doc["rankings"]) == 8
    assert sorted(doc["mi_order"]["order"]) == list(range(8))
    ens = featrec.ensemble_rank([r["order"] for r in doc["rankings"]], doc["mi_order"]["order"])
    assert set(ens["order"][:4]) == {0, 1, 2, 3}
    report, curve = featrec.evaluate(X, y, doc, ens["order"], cfg)
    assert report["top_k"]["cv"]["mean_accuracy"] > 0.85
    assert curve.splitlines()[0].startswith("k,")


def test_bad_classifier_is_config_error():
    X, y = featrec.make_planted_dataset(40, 4, 0, 0.0, 0.05)
    doc = featrec.rank(X, y, {"forest": {"trees": 5}})
    with pytest.raises(featrec.ConfigError):
        featrec.evaluate(X, y, doc, doc["mi_order"]["order"], {"classifier": "tree"})
