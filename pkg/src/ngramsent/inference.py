"""Ensemble prediction and the on-disk model directory format.

A model directory contains:

    manifest.json    format_version, dims, seeds, member count,
                     tokenizer mode, max n-gram order
    vocab.tsv        one ``ngram<TAB>count`` line per id, in id order
    member_<i>.bin   little-endian float32, row-major, tensors
                     concatenated in the order E, W1, b1, W2, b2,
                     no padding

The format is the compatibility contract: floats round-trip bit-exactly,
so save followed by load reproduces a model byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import NEGATIVE, POSITIVE
from .model import ModelDims, ModelParams, forward
from .textproc import RULE_BASED, TOKENIZER_MODES, normalize, tokenize
from .training import TrainedModel
from .vocab import FeatureBag, NgramVocabulary, featurize, load_vocabulary, save_vocabulary

FORMAT_VERSION = 1


class ModelFormatError(Exception):
    """A model directory that cannot be loaded as written."""


@dataclass
class Ensemble:
    """Trained members sharing one vocabulary; prediction averages their
    output distributions."""

    members: list[TrainedModel]
    vocab: NgramVocabulary
    dims: ModelDims
    tokenizer_mode: str = RULE_BASED

    def __post_init__(self):
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        if self.tokenizer_mode not in TOKENIZER_MODES:
            raise ValueError(f"unknown tokenizer mode {self.tokenizer_mode!r}")
        for i, m in enumerate(self.members):
            if m.params.dims != ModelDims(*self.dims):
                raise ValueError(
                    f"member {i} has dims {m.params.dims}, ensemble has {self.dims}"
                )

    @property
    def seeds(self) -> list[int]:
        return [m.seed for m in self.members]


@dataclass
class Prediction:
    """Averaged distribution, decoded label, and each member's distribution."""

    p: np.ndarray
    label: int
    member_ps: list[np.ndarray] = field(repr=False)


def ensemble_distribution(ensemble: Ensemble, bag: FeatureBag) -> tuple[np.ndarray, list[np.ndarray]]:
    """Mean of the members' output distributions on one feature bag."""
    member_ps = [forward(m.params, bag).p for m in ensemble.members]
    return np.mean(member_ps, axis=0), member_ps


def decode_label(p: np.ndarray) -> int:
    """+1 when p1 >= p0, else -1 (ties go positive)."""
    return POSITIVE if p[1] >= p[0] else NEGATIVE


def predict_bag(ensemble: Ensemble, bag: FeatureBag) -> Prediction:
    p, member_ps = ensemble_distribution(ensemble, bag)
    return Prediction(p=p, label=decode_label(p), member_ps=member_ps)


def predict_tokens(ensemble: Ensemble, tokens: list[str]) -> Prediction:
    return predict_bag(ensemble, featurize(tokens, ensemble.vocab))


def predict(ensemble: Ensemble, text: str, mode: str | None = None) -> Prediction:
    """Normalize, tokenize, featurize, and classify one text.

    `mode` overrides the tokenizer mode recorded with the model.  Fully
    out-of-vocabulary text still yields a prediction via the empty-bag
    convention.
    """
    tokens = tokenize(normalize(text), mode or ensemble.tokenizer_mode)
    return predict_tokens(ensemble, tokens)


def _member_filename(i: int) -> str:
    return f"member_{i}.bin"


def save_model(ensemble: Ensemble, model_dir: str | Path) -> None:
    """Write the model directory format described in the module docstring."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    v, d, h = ensemble.dims
    manifest = {
        "format_version": FORMAT_VERSION,
        "dims": {"vocab_size": v, "embed_dim": d, "hidden_dim": h},
        "seeds": ensemble.seeds,
        "members": len(ensemble.members),
        "tokenizer_mode": ensemble.tokenizer_mode,
        "max_n": ensemble.vocab.max_n,
    }
    with open(model_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    save_vocabulary(ensemble.vocab, model_dir / "vocab.tsv")
    for i, member in enumerate(ensemble.members):
        if member.params.dtype != np.float32:
            raise ValueError(
                "model files store float32; convert member "
                f"{i} from {member.params.dtype} before saving"
            )
        with open(model_dir / _member_filename(i), "wb") as fh:
            for _, tensor in member.params.tensors():
                fh.write(np.ascontiguousarray(tensor, dtype="<f4").tobytes())


def _read_manifest(model_dir: Path) -> dict:
    path = model_dir / "manifest.json"
    try:
        with open(path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise ModelFormatError(f"missing manifest.json in {model_dir}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from None
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported format version {version!r} (this build reads {FORMAT_VERSION})"
        )
    return manifest


def _read_member(path: Path, i: int, dims: ModelDims) -> ModelParams:
    v, d, h = dims
    try:
        buf = path.read_bytes()
    except FileNotFoundError:
        raise ModelFormatError(f"missing member file {path.name}") from None
    shapes = [("E", (v, d)), ("W1", (d, h)), ("b1", (h,)), ("W2", (h, 2)), ("b2", (2,))]
    offset = 0
    tensors = {}
    for name, shape in shapes:
        nbytes = int(np.prod(shape)) * 4
        if offset + nbytes > len(buf):
            raise ModelFormatError(f"truncated tensor {name} in member {i}")
        flat = np.frombuffer(buf, dtype="<f4", count=int(np.prod(shape)), offset=offset)
        tensors[name] = flat.reshape(shape).astype(np.float32)  # copy, native order
        offset += nbytes
    if offset != len(buf):
        raise ModelFormatError(
            f"member {i} has {len(buf) - offset} unexpected trailing bytes"
        )
    return ModelParams(**tensors)


def load_model(model_dir: str | Path) -> Ensemble:
    """Load a directory written by :func:`save_model`.

    Members come back with empty training histories; history is not part
    of the on-disk format.
    """
    model_dir = Path(model_dir)
    manifest = _read_manifest(model_dir)
    try:
        dims = ModelDims(
            int(manifest["dims"]["vocab_size"]),
            int(manifest["dims"]["embed_dim"]),
            int(manifest["dims"]["hidden_dim"]),
        )
        count = int(manifest["members"])
        seeds = [int(s) for s in manifest["seeds"]]
        tokenizer_mode = str(manifest["tokenizer_mode"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"manifest.json is missing or malforms a field: {exc}") from None
    if len(seeds) != count:
        raise ModelFormatError(f"manifest lists {len(seeds)} seeds for {count} members")
    if tokenizer_mode not in TOKENIZER_MODES:
        raise ModelFormatError(f"unknown tokenizer mode {tokenizer_mode!r} in manifest")

    vocab = load_vocabulary(model_dir / "vocab.tsv", max_n=int(manifest.get("max_n", 2)))
    if len(vocab) != dims.vocab_size:
        raise ModelFormatError(
            f"vocab.tsv has {len(vocab)} entries, manifest says {dims.vocab_size}"
        )
    members = [
        TrainedModel(
            params=_read_member(model_dir / _member_filename(i), i, dims),
            seed=seeds[i],
            history=[],
        )
        for i in range(count)
    ]
    return Ensemble(members=members, vocab=vocab, dims=dims, tokenizer_mode=tokenizer_mode)
