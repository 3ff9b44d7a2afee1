"""Recurrent text classifiers (sRNN, GRU, LSTM, BLSTM) for damage-level prediction."""

import json
import os

from ._core import (
    InputError,
    NumericError,
    TrainedModel,
    classification_report,
    clean_text,
    default_class_names,
    format_2dp,
    run_cli,
    softmax,
    synthetic_corpus,
)

__all__ = [
    "InputError",
    "NumericError",
    "TrainedModel",
    "classification_report",
    "clean_text",
    "default_class_names",
    "evaluate",
    "format_2dp",
    "prepare_synthetic",
    "run_cli",
    "softmax",
    "synthetic_corpus",
    "train",
]


def _check(args):
    code, out, err = run_cli([str(a) for a in args])
    if code == 2:
        raise InputError(err.strip())
    if code == 3:
        raise NumericError(err.strip())
    if code != 0:
        raise RuntimeError(err.strip())
    return out


def prepare_synthetic(out_dir, seed=1, per_class=50):
    """Writes a synthetic dataset bundle to out_dir and returns the command's summary."""
    return _check(["prepare", "--synthetic", "--seed", seed, "--per-class", per_class, "--out", out_dir])


def train(bundle_dir, cell, out_path, epochs=20, seed=1, **options):
    """Trains on a bundle and returns the saved TrainedModel.

    Extra keyword options map to command-line flags, e.g. learning_rate=0.01.
    """
    args = ["train", "--bundle", bundle_dir, "--cell", cell, "--out", out_path,
            "--epochs", epochs, "--seed", seed, "--quiet"]
    for key, value in options.items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            args.append(flag)
        elif value is not False and value is not None:
            args += [flag, value]
    _check(args)
    return TrainedModel.load(os.fspath(out_path))


def evaluate(truths, preds, class_names=None):
    """Classification report for integer class indices as (dict, rendered text)."""
    text_json, rendered = classification_report(
        list(truths), list(preds), list(class_names or default_class_names()))
    return json.loads(text_json), rendered
