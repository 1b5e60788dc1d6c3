"""Sparse multi-label datasets in the extreme-classification text format.

File layout::

    M V L
    l1,l2,...,lk f1:v1 f2:v2 ...

Label ids and feature ids are zero-based. A document without labels starts
with a space (or directly with its first ``feature:value`` pair).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 1000


class CorpusFormatError(ValueError):
    """Malformed corpus file. Carries the 1-based line number when known."""

    def __init__(self, message: str, path: str | os.PathLike | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class CorpusBoundsError(CorpusFormatError):
    """A feature or label id lies outside the range declared in the header."""


class CorpusValueError(CorpusFormatError):
    """A feature value is negative or not a number."""


def tokenize(value: float, max_tokens: int = DEFAULT_MAX_TOKENS) -> int:
    """Number of feature tokens a feature value turns into.

    Rounds half up, but any strictly positive value yields at least one token.

    >>> tokenize(3.0), tokenize(0.2), tokenize(2.5), tokenize(0.0)
    (3, 1, 3, 0)
    """
    if value <= 0:
        return 0
    if value < 0.5:
        return 1
    return min(int(math.floor(value + 0.5)), max_tokens)


def tokenize_array(values: np.ndarray, max_tokens: int = DEFAULT_MAX_TOKENS) -> np.ndarray:
    """Vectorized :func:`tokenize`."""
    values = np.asarray(values, dtype=np.float64)
    counts = np.minimum(np.floor(values + 0.5), max_tokens).astype(np.int64)
    counts[(values > 0) & (counts < 1)] = 1
    counts[values <= 0] = 0
    return counts


@dataclass(frozen=True)
class SparseDocument:
    doc_id: int
    indices: np.ndarray  # ascending feature ids, int32
    values: np.ndarray  # positive float64, aligned with indices
    labels: tuple[int, ...]  # ascending label ids

    @property
    def features(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}

    def token_counts(self, max_tokens: int = DEFAULT_MAX_TOKENS) -> np.ndarray:
        return tokenize_array(self.values, max_tokens)

    @property
    def token_count(self) -> int:
        return int(self.token_counts().sum())

    def tokens(self, max_tokens: int = DEFAULT_MAX_TOKENS) -> np.ndarray:
        """Feature id of every token: ascending feature id, repeats contiguous."""
        return np.repeat(self.indices, self.token_counts(max_tokens)).astype(np.int32)


def make_document(doc_id: int, features: dict[int, float] | Iterable[tuple[int, float]],
                  labels: Iterable[int] = ()) -> SparseDocument:
    """Build a document from a ``{feature: value}`` mapping; zero entries are dropped."""
    items = features.items() if isinstance(features, dict) else features
    merged: dict[int, float] = {}
    for f, v in items:
        if v < 0:
            raise CorpusValueError(f"negative value {v} for feature {f}")
        if v > 0:
            merged[int(f)] = float(v)
    order = sorted(merged)
    return SparseDocument(
        doc_id=int(doc_id),
        indices=np.asarray(order, dtype=np.int32),
        values=np.asarray([merged[f] for f in order], dtype=np.float64),
        labels=tuple(sorted(set(int(l) for l in labels))),
    )


@dataclass
class Corpus:
    documents: list[SparseDocument]
    num_features: int
    num_labels: int
    num_dropped: int = 0
    max_tokens: int = DEFAULT_MAX_TOKENS
    role: str = "train"

    def __post_init__(self):
        for doc in self.documents:
            if len(doc.indices) and (doc.indices.max() >= self.num_features or doc.indices.min() < 0):
                raise CorpusBoundsError(f"document {doc.doc_id}: feature id out of range [0, {self.num_features})")
            if doc.labels and (max(doc.labels) >= self.num_labels or min(doc.labels) < 0):
                raise CorpusBoundsError(f"document {doc.doc_id}: label id out of range [0, {self.num_labels})")

    def __len__(self) -> int:
        return len(self.documents)

    def __getitem__(self, i: int) -> SparseDocument:
        return self.documents[i]

    def __iter__(self) -> Iterator[SparseDocument]:
        return iter(self.documents)

    @cached_property
    def label_counts(self) -> np.ndarray:
        """Number of documents carrying each label (N_l)."""
        counts = np.zeros(self.num_labels, dtype=np.int64)
        for doc in self.documents:
            if doc.labels:
                counts[list(doc.labels)] += 1
        return counts

    @cached_property
    def label_frequencies(self) -> np.ndarray:
        """Fraction of documents carrying each label, f_l in [0, 1]."""
        if not self.documents:
            return np.zeros(self.num_labels)
        return self.label_counts / len(self.documents)

    @cached_property
    def cardinality(self) -> float:
        if not self.documents:
            return 0.0
        return sum(len(d.labels) for d in self.documents) / len(self.documents)

    @cached_property
    def feature_matrix(self) -> sp.csr_matrix:
        """Raw feature values as an ``M x V`` CSR matrix."""
        indptr = np.zeros(len(self.documents) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(d.indices) for d in self.documents])
        if self.documents:
            indices = np.concatenate([d.indices for d in self.documents]).astype(np.int32)
            data = np.concatenate([d.values for d in self.documents])
        else:
            indices = np.zeros(0, dtype=np.int32)
            data = np.zeros(0)
        return sp.csr_matrix((data, indices, indptr), shape=(len(self.documents), self.num_features))

    @cached_property
    def token_matrix(self) -> sp.csr_matrix:
        """Token counts (tokenized feature values) as an ``M x V`` CSR matrix."""
        X = self.feature_matrix.copy()
        X.data = tokenize_array(X.data, self.max_tokens).astype(np.float64)
        return X

    def token_stream(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened token stream: ``(doc_ptr, token_feature)``.

        Tokens of document ``m`` are ``token_feature[doc_ptr[m]:doc_ptr[m+1]]``.
        """
        X = self.token_matrix
        counts = X.data.astype(np.int64)
        feats = np.repeat(X.indices, counts).astype(np.int32)
        cum = np.zeros(counts.size + 1, dtype=np.int64)
        cum[1:] = np.cumsum(counts)
        return cum[X.indptr], feats

    @property
    def label_sets(self) -> list[tuple[int, ...]]:
        return [d.labels for d in self.documents]


def corpus_from_documents(docs: Sequence[SparseDocument], num_features: int, num_labels: int,
                          role: str = "train", max_tokens: int = DEFAULT_MAX_TOKENS) -> Corpus:
    """Assemble a corpus, applying the same empty-label rule as :func:`load_corpus`."""
    kept = list(docs)
    dropped = 0
    if role == "train":
        kept = [d for d in docs if d.labels]
        dropped = len(docs) - len(kept)
    return Corpus(kept, num_features, num_labels, num_dropped=dropped, max_tokens=max_tokens, role=role)


def _parse_header(line: str, path) -> tuple[int, int, int]:
    parts = line.split()
    if len(parts) != 3:
        raise CorpusFormatError("header must be 'M V L'", path, 1)
    try:
        m, v, l = (int(p) for p in parts)
    except ValueError:
        raise CorpusFormatError(f"non-integer header {line.strip()!r}", path, 1) from None
    if m < 0 or v <= 0 or l <= 0:
        raise CorpusFormatError(f"invalid header sizes {line.strip()!r}", path, 1)
    return m, v, l


def _parse_line(line: str, doc_id: int, num_features: int, num_labels: int, path, lineno: int) -> SparseDocument:
    line = line.rstrip("\r\n")
    if line[:1] == " " or line[:1] == "\t":
        label_part, feat_part = "", line.strip()
    else:
        head, _, rest = line.partition(" ")
        if ":" in head:
            label_part, feat_part = "", line.strip()
        else:
            label_part, feat_part = head, rest.strip()

    labels: list[int] = []
    if label_part:
        for tok in label_part.split(","):
            if not tok:
                continue
            try:
                lab = int(tok)
            except ValueError:
                raise CorpusFormatError(f"bad label id {tok!r}", path, lineno) from None
            if lab < 0 or lab >= num_labels:
                raise CorpusBoundsError(f"label id {lab} outside [0, {num_labels})", path, lineno)
            labels.append(lab)

    feats: dict[int, float] = {}
    for tok in feat_part.split():
        fid, sep, val = tok.partition(":")
        if not sep:
            raise CorpusFormatError(f"bad feature entry {tok!r}", path, lineno)
        try:
            f = int(fid)
            x = float(val)
        except ValueError:
            raise CorpusFormatError(f"bad feature entry {tok!r}", path, lineno) from None
        if f < 0 or f >= num_features:
            raise CorpusBoundsError(f"feature id {f} outside [0, {num_features})", path, lineno)
        if not math.isfinite(x) or x < 0:
            raise CorpusValueError(f"invalid feature value {val!r}", path, lineno)
        if x > 0:
            feats[f] = feats.get(f, 0.0) + x
    return make_document(doc_id, feats, labels)


def load_corpus(path: str | os.PathLike, role: str = "train", max_tokens: int = DEFAULT_MAX_TOKENS) -> Corpus:
    """Read a corpus file.

    For ``role="train"`` documents without labels are dropped (the count is kept
    in ``num_dropped``); for ``role="test"`` they are kept. ``doc_id`` is the
    zero-based position of the document line in the file.
    """
    if role not in ("train", "test"):
        raise ValueError(f"role must be 'train' or 'test', got {role!r}")
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise CorpusFormatError("missing header", path, 1)
        m, v, l = _parse_header(header, path)
        lines = fh.read().split("\n")
    # trailing empty lines are padding; " " is a document with no labels or features
    while lines and lines[-1].rstrip("\r") == "":
        lines.pop()
    docs = [_parse_line(line, k, v, l, path, k + 2) for k, line in enumerate(lines)]
    if len(docs) != m:
        raise CorpusFormatError(f"header declares {m} documents, found {len(docs)}", path)
    corpus = corpus_from_documents(docs, v, l, role=role, max_tokens=max_tokens)
    if corpus.num_dropped:
        logger.info("dropped=%d path=%s reason=empty_label_set", corpus.num_dropped, path)
    return corpus


def _format_value(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def format_document(doc: SparseDocument) -> str:
    labels = ",".join(str(l) for l in doc.labels)
    feats = " ".join(f"{f}:{_format_value(x)}" for f, x in zip(doc.indices, doc.values))
    if labels:
        return f"{labels} {feats}".rstrip()
    return f" {feats}"


def write_corpus(corpus: Corpus, path: str | os.PathLike) -> None:
    """Write ``corpus`` back out in the same text format."""
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(corpus)} {corpus.num_features} {corpus.num_labels}\n")
        for doc in corpus:
            fh.write(format_document(doc) + "\n")
    os.replace(tmp, path)


@dataclass(frozen=True)
class CorpusStats:
    num_documents: int
    num_features: int
    num_labels: int
    cardinality: float
    avg_label_frequency: float
    density: float
    num_tokens: int
    num_dropped: int

    def as_dict(self) -> dict:
        return {
            "M": self.num_documents,
            "V": self.num_features,
            "L": self.num_labels,
            "cardinality": self.cardinality,
            "avg_label_frequency": self.avg_label_frequency,
            "density": self.density,
            "tokens": self.num_tokens,
            "dropped": self.num_dropped,
        }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Summary statistics.

    ``avg_label_frequency`` is the mean absolute document count over all L
    labels; ``density`` is the mean fraction of the vocabulary present in a
    document.
    """
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    counts = corpus.label_counts
    nnz = corpus.feature_matrix.nnz
    return CorpusStats(
        num_documents=len(corpus),
        num_features=corpus.num_features,
        num_labels=corpus.num_labels,
        cardinality=corpus.cardinality,
        avg_label_frequency=float(counts.mean()),
        density=nnz / (len(corpus) * corpus.num_features),
        num_tokens=int(corpus.token_matrix.data.sum()),
        num_dropped=corpus.num_dropped,
    )
