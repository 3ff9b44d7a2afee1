import json
import math

import pytest

import rnntc


def test_clean_text_normalizes_and_drops_stop_words():
    tokens = rnntc.clean_text("The pilot's ENGINES failed!")
    assert "the" not in tokens
    assert all(t == t.lower() for t in tokens)
    assert rnntc.clean_text(" ".join(tokens)) == tokens


def test_synthetic_corpus_is_balanced_and_deterministic():
    corpus = rnntc.synthetic_corpus(1, 10)
    assert len(corpus) == 40
    labels = [label for _, label in corpus]
    for name in rnntc.default_class_names():
        assert labels.count(name) == 10
    assert corpus == rnntc.synthetic_corpus(1, 10)


def test_softmax_contract():
    p = rnntc.softmax([1.0, 2.0, 3.0, 4.0])
    assert abs(sum(p) - 1.0) <= 1e-12
    shifted = rnntc.softmax([101.0, 102.0, 103.0, 104.0])
    assert all(abs(a - b) <= 1e-12 for a, b in zip(p, shifted))
    assert rnntc.softmax([5.0] * 4) == [0.25] * 4


def test_report_and_rounding():
    report, text = rnntc.evaluate([0, 1, 2, 3, 0], [0, 1, 2, 3, 1])
    assert report["accuracy"] == pytest.approx(0.8)
    assert "accuracy" in text
    assert rnntc.format_2dp(0.695) == "0.70"


def test_prepare_train_predict_round_trip(tmp_path):
    bundle = tmp_path / "bundle"
    summary = rnntc.prepare_synthetic(bundle, seed=1, per_class=50)
    assert "retained=200" in summary

    model = rnntc.train(bundle, "gru", tmp_path / "gru.json", epochs=30)
    assert model.cell_kind == "GRU"
    assert model.class_names == rnntc.default_class_names()
    assert model.head_input_dim == 32
    assert (tmp_path / "gru.history.csv").exists()

    narratives = [text for text, _ in rnntc.synthetic_corpus(1, 50)]
    probs = model.predict_proba(narratives[:5] + [""])
    assert all(abs(sum(p) - 1.0) <= 1e-12 for p in probs)
    assert all(len(p) == 4 for p in probs)

    labels = [label for _, label in rnntc.synthetic_corpus(1, 50)]
    predicted = model.predict(narratives)
    agreement = sum(p == t for p, t in zip(predicted, labels)) / len(labels)
    assert agreement >= 0.9

    model.save(tmp_path / "copy.json")
    assert (tmp_path / "copy.json").read_text() == (tmp_path / "gru.json").read_text()

    code, out, _ = rnntc.run_cli(["evaluate", "--model", str(tmp_path / "gru.json"), "--bundle", str(bundle),
                                  "--out-dir", str(tmp_path / "rep")])
    assert code == 0
    report = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert math.isclose(sum(c["support"] for c in report["classes"]), report["total_support"])


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(rnntc.InputError):
        rnntc.TrainedModel.load(str(tmp_path / "missing.json"))
    with pytest.raises(rnntc.InputError):
        rnntc.train(tmp_path / "no-bundle", "gru", tmp_path / "m.json")
    rnntc.prepare_synthetic(tmp_path / "b", per_class=5)
    with pytest.raises(rnntc.NumericError):
        rnntc.train(tmp_path / "b", "srnn", tmp_path / "m.json", epochs=2, learning_rate=1e308)
    code, _, err = rnntc.run_cli(["bogus"])
    assert code == 2 and err
