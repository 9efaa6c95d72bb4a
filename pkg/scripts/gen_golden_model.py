#!/usr/bin/env python3
"""Regenerate the golden model fixture at tests/data/golden_model.

The committed directory is the format-conformance anchor: any build of
this toolkit (or a compatible reimplementation) must load it and
reproduce the reference predictions printed below.  Rerun this script
only when the on-disk format itself changes, then refresh the frozen
values in tests/test_acceptance.py.
"""

from pathlib import Path

from ngramsent.corpus import label_to_class
from ngramsent.inference import predict, save_model
from ngramsent.model import ModelDims
from ngramsent.textproc import PRETOKENIZED, normalize, tokenize
from ngramsent.training import TrainConfig, train_ensemble
from ngramsent.vocab import build_vocabulary, featurize

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_model"

ROWS = [
    (1, "a superb little film"),
    (1, "warm and funny throughout"),
    (1, "a real gem of a movie"),
    (1, "quietly moving and well acted"),
    (1, "sharp writing , great cast"),
    (1, "an absolute delight"),
    (1, "beautifully shot and paced"),
    (1, "the ending is a triumph"),
    (-1, "a dull , lifeless mess"),
    (-1, "badly written and worse acted"),
    (-1, "never rises above tedious"),
    (-1, "a waste of a fine cast"),
    (-1, "flat jokes and flatter drama"),
    (-1, "the plot collapses halfway"),
    (-1, "grim without being interesting"),
    (-1, "ninety minutes of nothing"),
]

REFERENCE_TEXTS = [
    "a superb little gem",
    "a dull waste of film",
    "completely unseen words here",
]


def main() -> None:
    texts = [tokenize(normalize(text)) for _, text in ROWS]
    vocab = build_vocabulary(texts, max_n=2, capacity=60)
    data = [
        (featurize(tokens, vocab), label_to_class(label))
        for tokens, (label, _) in zip(texts, ROWS)
    ]
    config = TrainConfig(
        dims=ModelDims(len(vocab), 4, 3),
        batch_size=8,
        max_epochs=4,
        patience=4,
    )
    ensemble = train_ensemble(
        data, data, config, seeds=(11, 12, 13, 14, 15), vocab=vocab,
        tokenizer_mode=PRETOKENIZED, progress=False,
    )
    save_model(ensemble, OUT)
    print(f"wrote {OUT}")
    print("reference predictions (freeze these in the acceptance test):")
    for text in REFERENCE_TEXTS:
        pred = predict(ensemble, text)
        print(f"  {text!r}: label={pred.label} p=({pred.p[0]!r}, {pred.p[1]!r})")


if __name__ == "__main__":
    main()
