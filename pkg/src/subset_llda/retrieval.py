"""tf-idf cosine nearest neighbours and candidate label sets."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, SparseDocument, tokenize_array

logger = logging.getLogger(__name__)

DEFAULT_NEIGHBORS = 10


@dataclass(frozen=True)
class TfIdfIndex:
    idf: np.ndarray  # (V,)
    normalized_docs: sp.csr_matrix  # (M_train, V), unit rows or zero rows
    inverted_index: sp.csc_matrix  # same matrix, column access: feature -> (doc, weight)
    zero_docs: np.ndarray  # bool (M_train,), rows that normalized to the zero vector
    doc_ids: np.ndarray  # training doc_id per row
    max_tokens: int

    @property
    def num_docs(self) -> int:
        return self.normalized_docs.shape[0]

    def postings(self, feature: int) -> tuple[np.ndarray, np.ndarray]:
        """Rows and weights of the training documents containing ``feature``."""
        inv = self.inverted_index
        lo, hi = inv.indptr[feature], inv.indptr[feature + 1]
        return inv.indices[lo:hi], inv.data[lo:hi]


@dataclass(frozen=True)
class CandidateSet:
    test_doc_id: int
    neighbor_ids: tuple[int, ...]  # training row indices, most similar first
    similarities: tuple[float, ...]
    labels: tuple[int, ...]  # ascending

    @property
    def is_fallback(self) -> bool:
        return not self.neighbor_ids


def _l2_normalize_rows(X: sp.csr_matrix) -> tuple[sp.csr_matrix, np.ndarray]:
    X = X.tocsr(copy=True)
    X.eliminate_zeros()
    sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    norms = np.sqrt(sq)
    zero = norms == 0
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=~zero)
    X = sp.diags(scale) @ X
    X = X.tocsr()
    X.sort_indices()
    return X, zero


def build_index(train: Corpus) -> TfIdfIndex:
    """Index the training corpus.

    tf is the raw token count, idf is ``ln(M / df)`` and every document
    vector is L2-normalized.
    """
    if len(train) == 0:
        raise ValueError("cannot index an empty corpus")
    tf = train.token_matrix
    m = tf.shape[0]
    df = np.bincount(tf.indices, minlength=train.num_features).astype(np.float64)
    idf = np.zeros(train.num_features)
    seen = df > 0
    idf[seen] = np.log(m / df[seen])
    weighted = tf @ sp.diags(idf)
    docs, zero = _l2_normalize_rows(sp.csr_matrix(weighted))
    if zero.any():
        logger.info("zero_vector_docs=%d", int(zero.sum()))
    return TfIdfIndex(
        idf=idf,
        normalized_docs=docs,
        inverted_index=docs.tocsc(),
        zero_docs=zero,
        doc_ids=np.asarray([d.doc_id for d in train], dtype=np.int64),
        max_tokens=train.max_tokens,
    )


def transform(index: TfIdfIndex, docs: Sequence[SparseDocument]) -> tuple[sp.csr_matrix, np.ndarray]:
    """tf-idf vectors of query documents, weighted with the training idf."""
    V = index.idf.shape[0]
    rows, cols, vals = [], [], []
    for r, doc in enumerate(docs):
        keep = doc.indices < V
        idx = doc.indices[keep]
        tf = tokenize_array(doc.values[keep], index.max_tokens)
        rows.append(np.full(idx.size, r))
        cols.append(idx)
        vals.append(tf * index.idf[idx])
    if docs:
        Q = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(len(docs), V))
    else:
        Q = sp.csr_matrix((0, V))
    return _l2_normalize_rows(Q)


def _top_n(sims: np.ndarray, n: int) -> np.ndarray:
    """Row indices of the ``n`` largest entries; ties go to the smaller index."""
    m = sims.size
    if n >= m:
        return np.lexsort((np.arange(m), -sims))
    kth = np.partition(sims, m - n)[m - n]
    pool = np.flatnonzero(sims >= kth)
    order = np.lexsort((pool, -sims[pool]))
    return pool[order[:n]]


def _similarities(index: TfIdfIndex, q_idx: np.ndarray, q_w: np.ndarray) -> np.ndarray:
    # accumulate over the postings of the query's features
    sims = np.zeros(index.num_docs)
    inv = index.inverted_index
    for f, w in zip(q_idx, q_w):
        lo, hi = inv.indptr[f], inv.indptr[f + 1]
        sims[inv.indices[lo:hi]] += w * inv.data[lo:hi]
    return sims


def nearest_neighbors(index: TfIdfIndex, query: SparseDocument, n: int) -> list[tuple[int, float]]:
    """The ``n`` training rows most cosine-similar to ``query``.

    Returns ``(row, similarity)`` pairs, most similar first. An empty list means
    the query has no weight on any indexed feature.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    Q, zero = transform(index, [query])
    if zero[0]:
        return []
    sims = _similarities(index, Q.indices, Q.data)
    top = _top_n(sims, n)
    return [(int(r), float(sims[r])) for r in top]


def fallback_labels(train: Corpus) -> tuple[int, ...]:
    return tuple(int(l) for l in np.flatnonzero(train.label_counts > 0))


def candidate_labels(index: TfIdfIndex, train: Corpus, query: SparseDocument, n: int = DEFAULT_NEIGHBORS,
                     *, _fallback: tuple[int, ...] | None = None) -> CandidateSet:
    """Union of the label sets of the ``n`` nearest training documents."""
    neighbors = nearest_neighbors(index, query, n)
    if not neighbors:
        labels = _fallback if _fallback is not None else fallback_labels(train)
        return CandidateSet(query.doc_id, (), (), labels)
    union: set[int] = set()
    for row, _ in neighbors:
        union.update(train[row].labels)
    return CandidateSet(
        test_doc_id=query.doc_id,
        neighbor_ids=tuple(r for r, _ in neighbors),
        similarities=tuple(s for _, s in neighbors),
        labels=tuple(sorted(union)),
    )


def all_candidates(index: TfIdfIndex, train: Corpus, test: Corpus, n: int = DEFAULT_NEIGHBORS) -> list[CandidateSet]:
    fallback = fallback_labels(train)
    out = [candidate_labels(index, train, doc, n, _fallback=fallback) for doc in test]
    sizes = np.array([len(c.labels) for c in out]) if out else np.zeros(1)
    logger.info("retrieved docs=%d neighbors=%d mean_candidates=%.2f fallbacks=%d",
                len(out), n, sizes.mean(), sum(c.is_fallback for c in out))
    return out


def format_candidates(cands: Sequence[CandidateSet], train: Corpus | None = None) -> str:
    """Tab-separated candidate file: ``doc_id  neighbor:sim,...  label,label,...``.

    Neighbors are written as training doc ids when ``train`` is given, otherwise
    as row indices.
    """
    lines = []
    for c in cands:
        ids = [train[r].doc_id for r in c.neighbor_ids] if train is not None else list(c.neighbor_ids)
        neigh = ",".join(f"{i}:{s:.6f}" for i, s in zip(ids, c.similarities))
        labels = ",".join(str(l) for l in c.labels)
        lines.append(f"{c.test_doc_id}\t{neigh}\t{labels}\n")
    return "".join(lines)


def parse_candidates(text: str) -> list[CandidateSet]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"candidates line {lineno}: expected 3 tab-separated fields")
        doc_id = int(parts[0])
        ids, sims = [], []
        for item in filter(None, parts[1].split(",")):
            i, _, s = item.partition(":")
            ids.append(int(i))
            sims.append(float(s))
        labels = tuple(sorted(int(l) for l in filter(None, parts[2].split(","))))
        out.append(CandidateSet(doc_id, tuple(ids), tuple(sims), labels))
    return out
