"""Command-line interface wiring the pipeline stages together.

Subcommands mirror the stages: build-vocab, train, predict, evaluate,
probe.  Data goes to standard output or named files; diagnostics go to
standard error; exit code 0 means the workflow completed.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import corpus, figures, metrics
from .corpus import Example, Kind, SplitSpec, filter_binary, label_to_class
from .inference import Ensemble, ModelFormatError, load_model, predict, save_model
from .model import DEFAULT_EMBED_DIM, DEFAULT_HIDDEN_DIM, ModelDims
from .probe import oov_substitution_probe
from .textproc import PRETOKENIZED, RULE_BASED, TOKENIZER_MODES, normalize, tokenize
from .training import (
    DEFAULT_BATCH_SIZE, DEFAULT_MAX_EPOCHS, DEFAULT_PATIENCE, TrainConfig,
    train_ensemble,
)
from .vocab import (
    DEFAULT_CAPACITY, count_ngrams, featurize, load_vocabulary,
    save_vocabulary, vocabulary_from_counts,
)

DEFAULT_SEEDS = "1,2,3,4,5"


def friendly_errors(fn):
    """Turn module errors into exit-1 CLI errors with the message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FileNotFoundError as exc:
            raise click.ClickException(f"cannot open {exc.filename}") from exc
        except (ValueError, OSError, ModelFormatError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.version_option(package_name="ngramsent")
def main():
    """Deterministic bag-of-ngrams sentence sentiment toolkit."""


def _load_binary_corpus(sentences: str, phrases: str) -> list[Example]:
    examples = corpus.load_examples(sentences, Kind.SENTENCE)
    examples += corpus.load_examples(phrases, Kind.PHRASE)
    return filter_binary(examples)


def _resolve_split(
    total: int, seed: int, train_count: int | None, valid_count: int | None
) -> SplitSpec:
    if train_count is None and valid_count is None:
        if total >= corpus.DEFAULT_SPLIT_THRESHOLD:
            return SplitSpec(seed, corpus.DEFAULT_TRAIN_COUNT, corpus.DEFAULT_VALID_COUNT)
        raise click.ClickException(
            f"corpus has {total} binary examples, below the "
            f"{corpus.DEFAULT_SPLIT_THRESHOLD} needed for the default "
            "160000/10000 split; pass --train-count and --valid-count"
        )
    if train_count is None or valid_count is None:
        raise click.ClickException(
            "--train-count and --valid-count must be given together"
        )
    return SplitSpec(seed, train_count, valid_count)


def _train_tokens(example: Example) -> list[str]:
    # Training files already carry token boundaries.
    return tokenize(normalize(example.text), PRETOKENIZED)


def _featurized(examples: list[Example], vocab) -> list[tuple[list[int], int]]:
    return [
        (featurize(_train_tokens(ex), vocab), label_to_class(ex.label))
        for ex in examples
    ]


@main.command("build-vocab")
@click.argument("sentences")
@click.argument("phrases")
@click.option("--out", required=True, help="Where to write the vocabulary TSV.")
@click.option("--seed", default=0, show_default=True, help="Shuffle seed for the split.")
@click.option("--train-count", type=int, default=None)
@click.option("--valid-count", type=int, default=None)
@click.option("--capacity", default=DEFAULT_CAPACITY, show_default=True,
              help="Maximum n-grams to keep.")
@friendly_errors
def cmd_build_vocab(sentences, phrases, out, seed, train_count, valid_count, capacity):
    """Build the n-gram vocabulary from the training split."""
    binary = _load_binary_corpus(sentences, phrases)
    spec = _resolve_split(len(binary), seed, train_count, valid_count)
    train, _ = corpus.shuffle_split(binary, spec)
    counts = count_ngrams([_train_tokens(ex) for ex in train])
    vocab = vocabulary_from_counts(counts, capacity=capacity)
    save_vocabulary(vocab, out)
    click.echo(f"distinct n-grams: {len(counts)}")
    click.echo(f"kept: {len(vocab)}")


def _parse_seeds(raw: str) -> list[int]:
    try:
        seeds = [int(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise click.ClickException(f"seeds must be integers, got {raw!r}") from None
    if len(seeds) != 5:
        raise click.ClickException("exactly 5 seeds required")
    if len(set(seeds)) != len(seeds):
        raise click.ClickException("seeds must be distinct")
    return seeds


@main.command("train")
@click.argument("sentences")
@click.argument("phrases")
@click.option("--out", "out_dir", required=True, help="Model directory to write.")
@click.option("--vocab", "vocab_path", default=None,
              help="Existing vocabulary TSV to reuse.")
@click.option("--build-vocab", "build_vocab_flag", is_flag=True,
              help="Build the vocabulary from the training split.")
@click.option("--capacity", default=DEFAULT_CAPACITY, show_default=True)
@click.option("--seed", default=0, show_default=True, help="Shuffle seed for the split.")
@click.option("--seeds", default=DEFAULT_SEEDS, show_default=True,
              help="Comma-separated member seeds (exactly five).")
@click.option("--train-count", type=int, default=None)
@click.option("--valid-count", type=int, default=None)
@click.option("--embed-dim", default=DEFAULT_EMBED_DIM, show_default=True)
@click.option("--hidden-dim", default=DEFAULT_HIDDEN_DIM, show_default=True)
@click.option("--batch-size", default=DEFAULT_BATCH_SIZE, show_default=True)
@click.option("--max-epochs", default=DEFAULT_MAX_EPOCHS, show_default=True)
@click.option("--patience", default=DEFAULT_PATIENCE, show_default=True)
@click.option("--tokenizer", type=click.Choice(TOKENIZER_MODES), default=RULE_BASED,
              show_default=True, help="Tokenizer mode recorded for inference.")
@friendly_errors
def cmd_train(sentences, phrases, out_dir, vocab_path, build_vocab_flag, capacity,
              seed, seeds, train_count, valid_count, embed_dim, hidden_dim,
              batch_size, max_epochs, patience, tokenizer):
    """Train the five-member ensemble and save the model directory."""
    member_seeds = _parse_seeds(seeds)
    if build_vocab_flag and vocab_path:
        raise click.ClickException("--vocab and --build-vocab are mutually exclusive")
    if not build_vocab_flag and not vocab_path:
        raise click.ClickException("pass --vocab FILE or --build-vocab")

    binary = _load_binary_corpus(sentences, phrases)
    spec = _resolve_split(len(binary), seed, train_count, valid_count)
    train_examples, valid_examples = corpus.shuffle_split(binary, spec)

    if build_vocab_flag:
        vocab = vocabulary_from_counts(
            count_ngrams([_train_tokens(ex) for ex in train_examples]),
            capacity=capacity,
        )
    else:
        vocab = load_vocabulary(vocab_path)

    config = TrainConfig(
        dims=ModelDims(len(vocab), embed_dim, hidden_dim),
        batch_size=batch_size,
        max_epochs=max_epochs,
        patience=patience,
    )
    train_set = _featurized(train_examples, vocab)
    valid_set = _featurized(valid_examples, vocab)
    ensemble = train_ensemble(
        train_set, valid_set, config, member_seeds, vocab, tokenizer_mode=tokenizer
    )
    save_model(ensemble, out_dir)

    for i, member in enumerate(ensemble.members):
        best = max(member.history, key=lambda s: s.valid_accuracy)
        click.echo(
            f"member {i}: seed={member.seed} best_epoch={best.epoch} "
            f"valid_acc={best.valid_accuracy:.6f}"
        )
    ens_correct = sum(
        1
        for bag, y in valid_set
        if _ensemble_class(ensemble, bag) == y
    )
    click.echo(f"ensemble: valid_acc={ens_correct / len(valid_set):.6f}")
    click.echo(f"saved model to {out_dir}")


def _ensemble_class(ensemble: Ensemble, bag) -> int:
    from .inference import ensemble_distribution
    from .training import predicted_class

    p, _ = ensemble_distribution(ensemble, bag)
    return predicted_class(p)


def _open_text(path: str):
    if path == "-":
        return sys.stdin
    return open(path, encoding="utf-8")


@main.command("predict")
@click.argument("model_dir")
@click.argument("input_path", default="-", metavar="[INPUT]")
@click.option("--tokenizer", type=click.Choice(TOKENIZER_MODES), default=None,
              help="Override the tokenizer mode recorded with the model.")
@friendly_errors
def cmd_predict(model_dir, input_path, tokenizer):
    """Classify one text per input line (INPUT defaults to stdin).

    Output lines are `label<TAB>p_neg<TAB>p_pos`.
    """
    ensemble = load_model(model_dir)
    with _open_text(input_path) as fh:
        for line in fh:
            pred = predict(ensemble, line.rstrip("\r\n"), mode=tokenizer)
            click.echo(f"{pred.label}\t{pred.p[0]:.6f}\t{pred.p[1]:.6f}")


@main.command("evaluate")
@click.argument("model_dir")
@click.argument("data_path")
@click.option("--pairs", "pairs_flag", is_flag=True,
              help="DATA is a minimal-pair file; also report the broken rate.")
@click.option("--tokenizer", type=click.Choice(TOKENIZER_MODES), default=None)
@click.option("--figures-dir", default=None,
              help="Also render report figures (PNG) into this directory.")
@friendly_errors
def cmd_evaluate(model_dir, data_path, pairs_flag, tokenizer, figures_dir):
    """Score a labeled TSV file (or pair file) and print a JSON report."""
    ensemble = load_model(model_dir)

    if pairs_flag:
        pairs = metrics.load_pairs(data_path)
        rate = metrics.broken_rate(
            pairs, lambda text: predict(ensemble, text, mode=tokenizer).label
        )
        texts = [t for pair in pairs for t in (pair.text_a, pair.text_b)]
        golds = [g for pair in pairs for g in (pair.gold_a, pair.gold_b)]
    else:
        examples = corpus.load_examples(data_path, Kind.SENTENCE)
        binary = filter_binary(examples)
        if dropped := len(examples) - len(binary):
            click.echo(f"ignoring {dropped} neutral examples", err=True)
        if not binary:
            raise click.ClickException("no binary-labeled examples to score")
        texts = [ex.text for ex in binary]
        golds = [ex.label for ex in binary]
        rate = None

    predictions = [predict(ensemble, t, mode=tokenizer) for t in texts]
    report = metrics.f1_report([p.label for p in predictions], golds)
    report.broken_rate = rate
    click.echo(json.dumps(report.to_dict(), indent=2))

    if figures_dir:
        out = Path(figures_dir)
        out.mkdir(parents=True, exist_ok=True)
        samples = [(g, float(p.p[1])) for g, p in zip(golds, predictions)]
        for written in (
            figures.save_metrics_figure(report, out / "metrics.png"),
            figures.save_probability_figure(samples, out / "probabilities.png"),
        ):
            click.echo(f"wrote {written}", err=True)


@main.command("probe")
@click.argument("model_dir")
@click.argument("input_path", default="-", metavar="[INPUT]")
@click.option("--substitutes", "substitutes_path", required=True,
              help="Candidate replacement tokens, one per line.")
@click.option("--tokenizer", type=click.Choice(TOKENIZER_MODES), default=None)
@friendly_errors
def cmd_probe(model_dir, input_path, substitutes_path, tokenizer):
    """Search each input sentence for label-flipping OOV substitutions.

    Output lines are
    `position<TAB>old<TAB>new<TAB>orig_label<TAB>new_label<TAB>destroyed_bigrams`.
    """
    ensemble = load_model(model_dir)
    with open(substitutes_path, encoding="utf-8") as fh:
        substitutes = [tok for line in fh if (tok := normalize(line).strip())]
    if not substitutes:
        raise click.ClickException(f"substitute lexicon {substitutes_path} is empty")
    with _open_text(input_path) as fh:
        for line in fh:
            text = line.rstrip("\r\n")
            if not text.strip():
                continue
            for result in oov_substitution_probe(
                ensemble, text, substitutes, mode=tokenizer
            ):
                click.echo(result.tsv_row())


if __name__ == "__main__":
    main()
