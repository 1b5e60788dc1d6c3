"""Labeled LDA training and the four prediction methods.

* ``llda``   – unconstrained inference over all labels, symmetric prior;
* ``prior``  – asymmetric prior from training label frequencies (Prior-LDA);
* ``dep``    – per-document prior from an auxiliary LDA over label sets (Dep-LDA);
* ``subset`` – inference restricted to the labels of the nearest training
  documents (Subset LLDA).
"""

from __future__ import annotations

import hashlib
import logging
import os
import shutil
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

from . import sampler
from .corpus import Corpus, SparseDocument, tokenize_array
from .retrieval import CandidateSet, TfIdfIndex, all_candidates
from .sampler import Hyperparameters

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = "subset-llda"
SAVE_THRESHOLD = 1e-8

TRAIN_ALPHA_SUM = 50.0
PREDICT_ALPHA_SUM = 30.0
PRIOR_ETA = 50.0
DEP_ETA = 120.0
DEP_TOPICS = 100
DEP_ALPHA = 0.1
DEP_BETA = 0.01
DEP_SWEEPS = 5
METHODS = ("llda", "prior", "dep", "subset")


class ModelError(ValueError):
    pass


class ModelFormatError(ModelError):
    pass


# ---------------------------------------------------------------------------
# models


@numba.njit(cache=True, nogil=True)
def _phi_block(features, active, col_ptr, col_label, col_val, den, S, beta):
    out = np.empty((features.size, active.size))
    for j in range(features.size):
        f = features[j]
        p = col_ptr[f]
        hi = col_ptr[f + 1]
        for k in range(active.size):
            l = active[k]
            while p < hi and col_label[p] < l:
                p += 1
            a = 0.0
            if p < hi and col_label[p] == l:
                a = col_val[p]
            out[j, k] = (a / S + beta) / den[l]
    return out


class PhiTable:
    """Column-wise access to phi without materializing the ``L x V`` matrix."""

    def __init__(self, acc_lv: sp.spmatrix, num_samples: int, beta: float):
        L, V = acc_lv.shape
        csc = sp.csc_matrix(acc_lv)
        csc.sort_indices()
        self.col_ptr = csc.indptr.astype(np.int64)
        self.col_label = csc.indices.astype(np.int64)
        self.col_val = csc.data.astype(np.float64)
        self.S = float(num_samples)
        self.beta = float(beta)
        self.den = np.asarray(acc_lv.sum(axis=1)).ravel() / self.S + V * self.beta
        self.shape = (L, V)

    def block(self, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
        """``phi[labels][:, features].T`` as a dense ``len(features) x len(labels)`` array."""
        return _phi_block(np.asarray(features, np.int64), np.asarray(labels, np.int64), self.col_ptr,
                          self.col_label, self.col_val, self.den, self.S, self.beta)

    def dense(self) -> np.ndarray:
        L, V = self.shape
        return self.block(np.arange(V), np.arange(L)).T.copy()


@dataclass
class TrainedModel:
    """Sufficient statistics of a trained Labeled LDA model."""

    acc_lv: sp.csr_matrix  # accumulated expected label-feature counts (L x V)
    num_samples: int
    beta: float
    train_alpha_sum: float
    label_counts: np.ndarray  # N_l on the training set
    num_train: int
    cardinality: float
    format_version: int = FORMAT_VERSION
    _phi: PhiTable | None = field(default=None, repr=False, compare=False)

    @property
    def num_labels(self) -> int:
        return self.acc_lv.shape[0]

    @property
    def num_features(self) -> int:
        return self.acc_lv.shape[1]

    @property
    def label_frequencies(self) -> np.ndarray:
        return self.label_counts / self.num_train

    @property
    def phi_table(self) -> PhiTable:
        if self._phi is None:
            self._phi = PhiTable(self.acc_lv, self.num_samples, self.beta)
        return self._phi

    def phi(self) -> np.ndarray:
        return self.phi_table.dense()

    def with_beta(self, beta: float) -> "TrainedModel":
        return TrainedModel(self.acc_lv, self.num_samples, float(beta), self.train_alpha_sum,
                            self.label_counts, self.num_train, self.cardinality, self.format_version)


@dataclass
class DepAuxModel:
    """Unsupervised LDA over label-set pseudo-documents (topics x labels)."""

    acc: np.ndarray  # T x L accumulated expected counts
    num_samples: int
    alpha: float = DEP_ALPHA
    beta: float = DEP_BETA

    @property
    def num_topics(self) -> int:
        return self.acc.shape[0]

    @property
    def num_labels(self) -> int:
        return self.acc.shape[1]

    @property
    def phi_prime(self) -> np.ndarray:
        S = self.num_samples
        den = self.acc.sum(axis=1) / S + self.num_labels * self.beta
        return (self.acc / S + self.beta) / den[:, None]


@dataclass
class PredictionConfig:
    method: str = "subset"
    eta: float | None = None  # None -> method default
    alpha_sum: float = PREDICT_ALPHA_SUM
    neighbors: int = 10
    iterations: int = 200
    burn_in: int = 50
    lag: int = 5
    chains: int = 1
    seed: int = 0
    dep_sweeps: int = DEP_SWEEPS
    threads: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ModelError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.neighbors < 1:
            raise ModelError("neighbors must be >= 1")
        if self.dep_sweeps < 1:
            raise ModelError("dep_sweeps must be >= 1")

    @property
    def resolved_eta(self) -> float:
        if self.eta is not None:
            return float(self.eta)
        return DEP_ETA if self.method == "dep" else PRIOR_ETA

    def schedule(self, num_labels: int) -> Hyperparameters:
        return Hyperparameters.symmetric(num_labels, self.alpha_sum, iterations=self.iterations,
                                         burn_in=self.burn_in, lag=self.lag, chains=self.chains)


@dataclass
class DocScores:
    doc_id: int
    labels: np.ndarray  # ranked, best first
    scores: np.ndarray
    num_active: int
    num_tokens: int = 0
    candidates: CandidateSet | None = None

    def top(self, k: int) -> np.ndarray:
        return self.labels[:k]


@dataclass
class ScoreMatrix:
    method: str
    docs: list[DocScores]

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    def __getitem__(self, i) -> DocScores:
        return self.docs[i]

    def rankings(self) -> list[np.ndarray]:
        return [d.labels for d in self.docs]

    def to_text(self, top: int | None = None) -> str:
        """One line per document: ``doc_id<TAB>label:score label:score ...``.

        By default ``max(100, |active labels|)`` entries are written.
        """
        lines = []
        for d in self.docs:
            k = max(100, d.num_active) if top is None else top
            body = " ".join(f"{l}:{s:.6f}" for l, s in zip(d.labels[:k], d.scores[:k]))
            lines.append(f"{d.doc_id}\t{body}\n")
        return "".join(lines)


def parse_scores(text: str, method: str = "file") -> ScoreMatrix:
    docs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        head, sep, body = line.partition("\t")
        if not sep:
            raise ModelFormatError(f"score line {lineno}: missing tab")
        try:
            pairs = [item.split(":") for item in body.split()]
            labels = np.array([int(a) for a, _ in pairs], dtype=np.int64)
            scores = np.array([float(b) for _, b in pairs])
            doc_id = int(head)
        except ValueError:
            raise ModelFormatError(f"score line {lineno}: malformed entry") from None
        docs.append(DocScores(doc_id, labels, scores, labels.size))
    return ScoreMatrix(method, docs)


def rank(labels: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort by score descending, ties by ascending label id."""
    order = np.lexsort((labels, -theta))
    return labels[order], theta[order]


# ---------------------------------------------------------------------------
# training


def train_llda(train: Corpus, hp: Hyperparameters | None = None, seed: int = 0,
               callback: Callable | None = None) -> TrainedModel:
    """Train Labeled LDA: each token may only take one of its document's labels."""
    L = train.num_labels
    if hp is None:
        hp = Hyperparameters.symmetric(L, TRAIN_ALPHA_SUM)
    if len(train) == 0:
        raise ModelError("empty training corpus")
    if any(not d.labels for d in train):
        raise ModelError("training documents must have at least one label")
    doc_ptr, feats = train.token_stream()
    layout = sampler.build_layout(doc_ptr, feats, train.label_sets, L, train.num_features, dense=False)
    logger.info("train docs=%d tokens=%d L=%d V=%d pairs=%d iterations=%d burn_in=%d lag=%d chains=%d",
                len(train), layout.num_tokens, L, train.num_features, layout.num_pairs,
                hp.iterations, hp.burn_in, hp.lag, hp.chains)

    last = [time.perf_counter()]

    def log_sweep(it, state):
        now = time.perf_counter()
        logger.debug("sweep=%d seconds=%.4f", it, now - last[0])
        last[0] = now
        if callback is not None:
            callback(it, state)

    expected = sampler.run_chains(layout, hp, seed, log_sweep)
    logger.info("samples_retained=%d", expected.num_samples)
    alpha_sum = float(hp.alpha.sum())
    return TrainedModel(expected.acc_lv, expected.num_samples, float(hp.beta), alpha_sum,
                        train.label_counts.copy(), len(train), float(train.cardinality))


def label_pseudo_documents(train: Corpus) -> tuple[np.ndarray, np.ndarray]:
    """Each document's label set as a document whose tokens are label ids."""
    sizes = np.array([len(d.labels) for d in train], dtype=np.int64)
    doc_ptr = np.zeros(len(train) + 1, dtype=np.int64)
    doc_ptr[1:] = np.cumsum(sizes)
    toks = np.array([l for d in train for l in d.labels], dtype=np.int32)
    return doc_ptr, toks


def train_dep_aux(train: Corpus, num_topics: int = DEP_TOPICS, iterations: int = 200, burn_in: int = 50,
                  lag: int = 5, alpha: float = DEP_ALPHA, beta: float = DEP_BETA, seed: int = 0) -> DepAuxModel:
    """Unsupervised LDA with ``num_topics`` topics over label-set pseudo-documents."""
    if num_topics < 1:
        raise ModelError("num_topics must be >= 1")
    doc_ptr, toks = label_pseudo_documents(train)
    allowed = [np.arange(num_topics)] * len(train)
    layout = sampler.build_layout(doc_ptr, toks, allowed, num_topics, train.num_labels, dense=True)
    hp = Hyperparameters(alpha=np.full(num_topics, alpha), beta=beta, iterations=iterations,
                         burn_in=burn_in, lag=lag)
    expected = sampler.run_chains(layout, hp, seed)
    logger.info("dep_aux topics=%d label_tokens=%d samples_retained=%d", num_topics, toks.size,
                expected.num_samples)
    acc = expected.acc_pair.reshape(num_topics, train.num_labels).copy()
    return DepAuxModel(acc, expected.num_samples, float(alpha), float(beta))


# ---------------------------------------------------------------------------
# priors


def prior_alpha(frequencies: np.ndarray, eta: float, alpha_base: float) -> np.ndarray:
    """Frequency-aware prior: ``eta * f_l + alpha_base`` for every label."""
    f = np.asarray(frequencies, dtype=np.float64)
    if eta <= 0 or alpha_base <= 0:
        raise ModelError("eta and alpha_base must be positive")
    return eta * f + alpha_base


def dep_alpha(theta_prime: np.ndarray, aux: DepAuxModel | np.ndarray, eta: float, alpha_base: float) -> np.ndarray:
    """Dependency-aware prior ``eta * (theta' . phi') + alpha_base`` over all labels."""
    phi_prime = aux.phi_prime if isinstance(aux, DepAuxModel) else np.asarray(aux, dtype=np.float64)
    theta_prime = np.asarray(theta_prime, dtype=np.float64)
    if theta_prime.ndim != 1 or theta_prime.size != phi_prime.shape[0]:
        raise ModelError(f"theta' has {theta_prime.size} entries, phi' has {phi_prime.shape[0]} topics")
    return eta * (theta_prime @ phi_prime) + alpha_base


# ---------------------------------------------------------------------------
# prediction


def _doc_tokens(doc: SparseDocument, max_tokens: int) -> tuple[np.ndarray, np.ndarray]:
    counts = tokenize_array(doc.values, max_tokens)
    keep = counts > 0
    features = doc.indices[keep].astype(np.int64)
    tok_local = np.repeat(np.arange(features.size), counts[keep])
    return features, tok_local


def _predict(model: TrainedModel, test: Corpus, cfg: PredictionConfig,
             active_for: Callable[[int], np.ndarray],
             alpha_for: Callable[[np.ndarray], np.ndarray],
             dep: dict | None = None,
             candidates: Sequence[CandidateSet] | None = None) -> ScoreMatrix:
    if test.num_features != model.num_features:
        raise ModelError(f"corpus has V={test.num_features}, model has V={model.num_features}")
    hp = cfg.schedule(model.num_labels)
    table = model.phi_table

    def one(i: int) -> DocScores:
        doc = test[i]
        features, tok_local = _doc_tokens(doc, test.max_tokens)
        active = np.asarray(active_for(i), dtype=np.int64)
        phi_local = table.block(features, active)
        alpha = alpha_for(active)
        dep_args = None
        if dep is not None:
            dep_args = dict(dep, phi_prime=dep["phi_prime"][:, active])
        acc = np.zeros(active.size)
        mean_alpha = np.zeros(active.size)
        S = 0
        for c in range(hp.chains):
            seed = sampler.chain_seed(cfg.seed, c)
            res = sampler.predict_document(
                tok_local, phi_local, active, alpha, hp, sampler.make_rng(seed, doc.doc_id, 0),
                dep=dep_args, aux_rng=sampler.make_rng(seed, doc.doc_id, 1) if dep else None)
            acc += res.acc
            S += res.num_samples
            mean_alpha += res.mean_alpha
        mean_alpha /= hp.chains
        theta = (acc / S + mean_alpha) / (tok_local.size + mean_alpha.sum())
        labels, scores = rank(active, theta)
        return DocScores(doc.doc_id, labels, scores, active.size, int(tok_local.size),
                         candidates[i] if candidates is not None else None)

    t0 = time.perf_counter()
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            docs = list(pool.map(one, range(len(test))))
    else:
        docs = [one(i) for i in range(len(test))]
    logger.info("predicted method=%s docs=%d seconds=%.3f", cfg.method, len(docs), time.perf_counter() - t0)
    return ScoreMatrix(cfg.method, docs)


def predict_llda(model: TrainedModel, test: Corpus, cfg: PredictionConfig | None = None) -> ScoreMatrix:
    """Inference over all labels with a symmetric prior ``alpha_sum / L``."""
    cfg = cfg or PredictionConfig(method="llda")
    L = model.num_labels
    every = np.arange(L)
    base = cfg.alpha_sum / L
    return _predict(model, test, cfg, lambda i: every, lambda active: np.full(active.size, base))


def predict_prior(model: TrainedModel, test: Corpus, cfg: PredictionConfig | None = None,
                  frequencies: np.ndarray | None = None) -> ScoreMatrix:
    """Inference over all labels with ``alpha_l = eta * f_l + alpha_sum / L``."""
    cfg = cfg or PredictionConfig(method="prior")
    L = model.num_labels
    f = model.label_frequencies if frequencies is None else np.asarray(frequencies, dtype=np.float64)
    alpha = prior_alpha(f, cfg.resolved_eta, cfg.alpha_sum / L)
    every = np.arange(L)
    return _predict(model, test, cfg, lambda i: every, lambda active: alpha[active])


def predict_dep(model: TrainedModel, aux: DepAuxModel, test: Corpus,
                cfg: PredictionConfig | None = None) -> ScoreMatrix:
    """Inference over all labels with a per-document prior from the auxiliary model.

    Every iteration, the current label assignments of the document form a
    pseudo-document; ``cfg.dep_sweeps`` sweeps of auxiliary inference (phi'
    fixed) give theta', and the prior for the next LLDA sweep is
    ``eta * theta' . phi' + alpha_sum / L``.
    """
    cfg = cfg or PredictionConfig(method="dep")
    L = model.num_labels
    if aux.num_labels != L:
        raise ModelError(f"auxiliary model covers {aux.num_labels} labels, model has {L}")
    base = cfg.alpha_sum / L
    dep = {"phi_prime": aux.phi_prime, "alpha": aux.alpha, "eta": cfg.resolved_eta,
           "alpha_base": base, "sweeps": cfg.dep_sweeps}
    every = np.arange(L)
    return _predict(model, test, cfg, lambda i: every, lambda active: np.full(active.size, base), dep=dep)


def predict_subset(model: TrainedModel, test: Corpus, cfg: PredictionConfig | None = None, *,
                   index: TfIdfIndex | None = None, train: Corpus | None = None,
                   candidates: Sequence[CandidateSet] | str | None = None) -> ScoreMatrix:
    """Inference restricted to candidate labels.

    Candidates come from ``candidates`` (precomputed sets, or ``"all"`` for
    every label) or are retrieved with ``index``/``train`` using
    ``cfg.neighbors`` nearest training documents.
    """
    cfg = cfg or PredictionConfig(method="subset")
    L = model.num_labels
    if isinstance(candidates, str):
        if candidates != "all":
            raise ModelError(f"unknown candidate policy {candidates!r}")
        every = tuple(range(L))
        candidates = [CandidateSet(d.doc_id, (), (), every) for d in test]
    elif candidates is None:
        if index is None or train is None:
            raise ModelError("subset prediction needs a retrieval index and training corpus, or candidates")
        candidates = all_candidates(index, train, test, cfg.neighbors)
    if len(candidates) != len(test):
        raise ModelError(f"{len(candidates)} candidate sets for {len(test)} documents")
    for c, d in zip(candidates, test):
        if c.test_doc_id != d.doc_id:
            raise ModelError(f"candidate set for doc {c.test_doc_id} does not match doc {d.doc_id}")
        if not c.labels:
            raise ModelError(f"empty candidate set for doc {d.doc_id}")
    active = [np.asarray(c.labels, dtype=np.int64) for c in candidates]
    base = cfg.alpha_sum / L
    return _predict(model, test, cfg, lambda i: active[i], lambda a: np.full(a.size, base),
                    candidates=candidates)


def predict(model: TrainedModel, test: Corpus, cfg: PredictionConfig, *, aux: DepAuxModel | None = None,
            index: TfIdfIndex | None = None, train: Corpus | None = None,
            candidates: Sequence[CandidateSet] | str | None = None) -> ScoreMatrix:
    if cfg.method == "llda":
        return predict_llda(model, test, cfg)
    if cfg.method == "prior":
        return predict_prior(model, test, cfg)
    if cfg.method == "dep":
        if aux is None:
            raise ModelError("method 'dep' needs an auxiliary model")
        return predict_dep(model, aux, test, cfg)
    return predict_subset(model, test, cfg, index=index, train=train, candidates=candidates)


# ---------------------------------------------------------------------------
# persistence


def _fmt(x: float) -> str:
    return repr(float(x))


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_meta(items: dict) -> bytes:
    return "".join(f"{k}={v}\n" for k, v in items.items()).encode()


def _read_meta(path: Path) -> dict:
    try:
        text = (path / "meta").read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ModelFormatError(f"cannot read {path / 'meta'}: {e}") from None
    meta = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ModelFormatError(f"{path / 'meta'}: malformed line {line!r}")
        meta[key] = val
    if meta.get("magic") != MAGIC:
        raise ModelFormatError(f"{path}: not a model directory (bad magic)")
    version = meta.get("format_version")
    if version != str(FORMAT_VERSION):
        raise ModelFormatError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    return meta


def _read_checked(path: Path, name: str, digest: str | None) -> bytes:
    try:
        data = (path / name).read_bytes()
    except OSError as e:
        raise ModelFormatError(f"cannot read {path / name}: {e}") from None
    if digest != _sha256(data):
        raise ModelFormatError(f"{path / name}: checksum mismatch")
    return data


def _model_files(model: TrainedModel) -> dict[str, bytes]:
    acc = sp.coo_matrix(model.acc_lv)
    keep = acc.data / model.num_samples >= SAVE_THRESHOLD
    order = np.lexsort((acc.col[keep], acc.row[keep]))
    rows, cols, vals = acc.row[keep][order], acc.col[keep][order], acc.data[keep][order]
    counts = "".join(f"{r} {c} {_fmt(v)}\n" for r, c, v in zip(rows, cols, vals)).encode()
    freq = "".join(f"{_fmt(f)}\n" for f in model.label_frequencies).encode()
    meta = _write_meta({
        "magic": MAGIC,
        "format_version": FORMAT_VERSION,
        "kind": "llda",
        "L": model.num_labels,
        "V": model.num_features,
        "beta": _fmt(model.beta),
        "train_alpha_sum": _fmt(model.train_alpha_sum),
        "num_samples": model.num_samples,
        "num_train": model.num_train,
        "cardinality": _fmt(model.cardinality),
        "counts_sha256": _sha256(counts),
        "freq_sha256": _sha256(freq),
    })
    return {"meta": meta, "counts": counts, "freq": freq}


def _aux_files(aux: DepAuxModel) -> dict[str, bytes]:
    t, l = np.nonzero(aux.acc / aux.num_samples >= SAVE_THRESHOLD)
    counts = "".join(f"{a} {b} {_fmt(aux.acc[a, b])}\n" for a, b in zip(t, l)).encode()
    meta = _write_meta({
        "magic": MAGIC,
        "format_version": FORMAT_VERSION,
        "kind": "dep_aux",
        "T": aux.num_topics,
        "L": aux.num_labels,
        "alpha": _fmt(aux.alpha),
        "beta": _fmt(aux.beta),
        "num_samples": aux.num_samples,
        "counts_sha256": _sha256(counts),
    })
    return {"meta": meta, "counts": counts}


def save_model(obj: TrainedModel | DepAuxModel, path: str | os.PathLike, aux: DepAuxModel | None = None) -> Path:
    """Write a model directory atomically (temp dir, then rename).

    A :class:`TrainedModel` may carry its Dep-LDA auxiliary model in ``aux/``.
    Expected counts below ``SAVE_THRESHOLD`` per sample are dropped.
    """
    path = Path(path)
    files = _model_files(obj) if isinstance(obj, TrainedModel) else _aux_files(obj)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=path.name + ".", dir=path.parent))
    try:
        for name, data in files.items():
            (tmp / name).write_bytes(data)
        if aux is not None:
            (tmp / "aux").mkdir()
            for name, data in _aux_files(aux).items():
                (tmp / "aux" / name).write_bytes(data)
        if path.exists():
            shutil.rmtree(path)
        os.replace(tmp, path)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return path


def _parse_triplets(data: bytes, shape: tuple[int, int], where: Path):
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(data.decode().splitlines(), 1):
        parts = line.split()
        if len(parts) != 3:
            raise ModelFormatError(f"{where}:{lineno}: expected 'row col value'")
        try:
            r, c, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ModelFormatError(f"{where}:{lineno}: malformed number") from None
        if not (0 <= r < shape[0] and 0 <= c < shape[1]):
            raise ModelFormatError(f"{where}:{lineno}: index out of range")
        rows.append(r)
        cols.append(c)
        vals.append(v)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals, dtype=np.float64)


def _load_aux_dir(path: Path, meta: dict) -> DepAuxModel:
    T, L = int(meta["T"]), int(meta["L"])
    counts = _read_checked(path, "counts", meta.get("counts_sha256"))
    r, c, v = _parse_triplets(counts, (T, L), path / "counts")
    acc = np.zeros((T, L))
    acc[r, c] = v
    return DepAuxModel(acc, int(meta["num_samples"]), float(meta["alpha"]), float(meta["beta"]))


def load_model(path: str | os.PathLike, beta: float | None = None) -> TrainedModel | DepAuxModel:
    """Read a model directory written by :func:`save_model`.

    ``beta`` overrides the stored phi smoothing.
    """
    path = Path(path)
    meta = _read_meta(path)
    try:
        if meta.get("kind") == "dep_aux":
            return _load_aux_dir(path, meta)
        if meta.get("kind") != "llda":
            raise ModelFormatError(f"{path}: unknown model kind {meta.get('kind')!r}")
        L, V = int(meta["L"]), int(meta["V"])
        counts = _read_checked(path, "counts", meta.get("counts_sha256"))
        freq = _read_checked(path, "freq", meta.get("freq_sha256"))
        r, c, v = _parse_triplets(counts, (L, V), path / "counts")
        f = np.array([float(x) for x in freq.decode().split()])
        if f.size != L:
            raise ModelFormatError(f"{path / 'freq'}: {f.size} entries, expected {L}")
        num_train = int(meta["num_train"])
        acc = sp.csr_matrix((v, (r, c)), shape=(L, V))
        acc.sort_indices()
        model = TrainedModel(acc, int(meta["num_samples"]), float(meta["beta"]), float(meta["train_alpha_sum"]),
                             np.rint(f * num_train).astype(np.int64), num_train, float(meta["cardinality"]))
    except KeyError as e:
        raise ModelFormatError(f"{path / 'meta'}: missing key {e}") from None
    return model.with_beta(beta) if beta is not None else model


def load_aux(path: str | os.PathLike) -> DepAuxModel | None:
    """The auxiliary model stored under ``path/aux``, if any."""
    sub = Path(path) / "aux"
    if not sub.is_dir():
        return None
    aux = load_model(sub)
    if not isinstance(aux, DepAuxModel):
        raise ModelFormatError(f"{sub}: not an auxiliary model")
    return aux
