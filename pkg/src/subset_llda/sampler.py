"""Collapsed Gibbs sampling for (Labeled) LDA with expected-count estimators.

Two sampling modes share the same conditional:

* training, where the label-feature counts are part of the state and each
  token may only take a label from its document's allowed set;
* prediction, where the label-feature distributions are fixed and every test
  document is sampled on its own (documents are independent given phi).

Instead of hard sample counts, every retained iteration adds each token's full
normalized conditional to the accumulators, giving the expected-count form of
the usual plug-in estimators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numba
import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class SamplerError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Hyperparameters:
    """Dirichlet priors and the Gibbs schedule.

    ``alpha`` is indexed by label id (length L) for training; prediction code
    builds its own per-document alpha over the active labels.
    """

    alpha: np.ndarray
    beta: float = 0.01
    iterations: int = 200
    burn_in: int = 50
    lag: int = 5
    chains: int = 1

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=np.float64))
        object.__setattr__(self, "alpha", alpha)
        if not np.all(alpha > 0):
            raise SamplerError("alpha must be positive")
        if not self.beta > 0:
            raise SamplerError("beta must be positive")
        if self.lag < 1:
            raise SamplerError("lag must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise SamplerError("need 0 <= burn_in < iterations")
        if self.num_samples < 1:
            raise SamplerError("schedule retains no samples")
        if self.chains < 1:
            raise SamplerError("chains must be >= 1")

    @classmethod
    def symmetric(cls, num_labels: int, alpha_sum: float = 50.0, **kw) -> "Hyperparameters":
        return cls(alpha=np.full(num_labels, alpha_sum / num_labels), **kw)

    @property
    def num_samples(self) -> int:
        return (self.iterations - self.burn_in) // self.lag

    def is_retained(self, it: int) -> bool:
        return it >= self.burn_in and (it + 1 - self.burn_in) % self.lag == 0

    def with_alpha(self, alpha) -> "Hyperparameters":
        return replace(self, alpha=np.asarray(alpha, dtype=np.float64))


def chain_seed(seed: int, chain: int) -> int:
    return int(seed) ^ int(chain)


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    """PCG64 stream for ``seed``; ``spawn_key`` selects an independent sub-stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(spawn_key))))


# ---------------------------------------------------------------------------
# training state


@dataclass
class TokenLayout:
    """Flattened tokens and allowed label sets of a corpus.

    Tokens of document ``m`` are ``tok_feat[doc_ptr[m]:doc_ptr[m+1]]`` and its
    allowed labels are ``lab_ids[lab_ptr[m]:lab_ptr[m+1]]``. For each
    (token, allowed label) there is a slot into the label-feature count array;
    with ``dense`` the slot is simply ``label * V + feature``.
    """

    doc_ptr: np.ndarray
    tok_feat: np.ndarray
    lab_ptr: np.ndarray
    lab_ids: np.ndarray
    num_labels: int
    num_features: int
    dense: bool
    tok_slot_ptr: np.ndarray
    tok_slot: np.ndarray
    pair_label: np.ndarray
    pair_feat: np.ndarray

    @property
    def num_docs(self) -> int:
        return self.doc_ptr.size - 1

    @property
    def num_tokens(self) -> int:
        return self.tok_feat.size

    @property
    def num_pairs(self) -> int:
        return self.num_labels * self.num_features if self.dense else self.pair_label.size

    def doc_lengths(self) -> np.ndarray:
        return np.diff(self.doc_ptr)

    def allowed(self, m: int) -> np.ndarray:
        return self.lab_ids[self.lab_ptr[m]:self.lab_ptr[m + 1]]

    def token_doc(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_docs), self.doc_lengths())

    def pair_keys(self) -> tuple[np.ndarray, np.ndarray]:
        if self.dense:
            keys = np.arange(self.num_labels * self.num_features)
            return keys // self.num_features, keys % self.num_features
        return self.pair_label, self.pair_feat


def build_layout(doc_ptr: np.ndarray, tok_feat: np.ndarray, allowed: Sequence[Sequence[int]],
                 num_labels: int, num_features: int, dense: bool | None = None) -> TokenLayout:
    """Index the (label, feature) pairs every token can touch.

    ``dense=None`` picks the dense layout when every document may use every
    label (unconstrained LDA).
    """
    doc_ptr = np.asarray(doc_ptr, dtype=np.int64)
    tok_feat = np.asarray(tok_feat, dtype=np.int32)
    M = doc_ptr.size - 1
    if len(allowed) != M:
        raise SamplerError("allowed sets do not match the number of documents")
    sizes = np.fromiter((len(a) for a in allowed), dtype=np.int64, count=M)
    for m in np.flatnonzero(sizes == 0):
        raise SamplerError(f"document {m} has an empty allowed label set")
    lab_ptr = np.zeros(M + 1, dtype=np.int64)
    lab_ptr[1:] = np.cumsum(sizes)
    lab_ids = (np.concatenate([np.asarray(a, dtype=np.int32) for a in allowed])
               if M else np.zeros(0, dtype=np.int32))
    if lab_ids.size and (lab_ids.min() < 0 or lab_ids.max() >= num_labels):
        raise SamplerError("allowed label id out of range")
    if dense is None:
        dense = bool(M) and bool(np.all(sizes == num_labels))

    empty = np.zeros(0, dtype=np.int32)
    if dense:
        return TokenLayout(doc_ptr, tok_feat, lab_ptr, lab_ids, num_labels, num_features, True,
                           np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), empty, empty)

    n_tok = np.diff(doc_ptr)
    tok_doc = np.repeat(np.arange(M), n_tok)
    a_tok = sizes[tok_doc]
    tok_slot_ptr = np.zeros(tok_feat.size + 1, dtype=np.int64)
    tok_slot_ptr[1:] = np.cumsum(a_tok)
    n_slots = int(tok_slot_ptr[-1])
    slot_tok = np.repeat(np.arange(tok_feat.size), a_tok)
    k = np.arange(n_slots) - tok_slot_ptr[slot_tok]
    slot_label = lab_ids[lab_ptr[tok_doc[slot_tok]] + k].astype(np.int64)
    keys = slot_label * num_features + tok_feat[slot_tok]
    uniq, inverse = np.unique(keys, return_inverse=True)
    return TokenLayout(
        doc_ptr, tok_feat, lab_ptr, lab_ids, num_labels, num_features, False,
        tok_slot_ptr, inverse.astype(np.int64),
        (uniq // num_features).astype(np.int32), (uniq % num_features).astype(np.int32),
    )


@dataclass
class CountState:
    """Token assignments and the count matrices they induce.

    ``z`` holds, per token, the index into its document's allowed label list.
    ``n_dl`` is laid out like ``layout.lab_ids`` (per document, per allowed
    label); ``n_pair`` follows the layout's slot numbering.
    """

    layout: TokenLayout
    z: np.ndarray
    n_dl: np.ndarray
    n_pair: np.ndarray
    n_l: np.ndarray
    seed: int
    rng: np.random.Generator = field(repr=False)

    @property
    def labels(self) -> np.ndarray:
        """Global label id assigned to every token."""
        lay = self.layout
        tok_doc = lay.token_doc()
        return lay.lab_ids[lay.lab_ptr[tok_doc] + self.z]

    @property
    def n_lv(self) -> sp.csr_matrix:
        rows, cols = self.layout.pair_keys()
        return sp.csr_matrix((self.n_pair.astype(np.int64), (rows, cols)),
                             shape=(self.layout.num_labels, self.layout.num_features))

    @property
    def n_ml(self) -> sp.csr_matrix:
        lay = self.layout
        rows = np.repeat(np.arange(lay.num_docs), np.diff(lay.lab_ptr))
        return sp.csr_matrix((self.n_dl.astype(np.int64), (rows, lay.lab_ids)),
                             shape=(lay.num_docs, lay.num_labels))

    def copy(self) -> "CountState":
        rng = np.random.Generator(np.random.PCG64())
        rng.bit_generator.state = self.rng.bit_generator.state
        return CountState(self.layout, self.z.copy(), self.n_dl.copy(), self.n_pair.copy(),
                          self.n_l.copy(), self.seed, rng)


def recount(layout: TokenLayout, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rebuild ``(n_dl, n_pair, n_l)`` from scratch; used to audit sweeps."""
    tok_doc = layout.token_doc()
    pos = layout.lab_ptr[tok_doc] + z
    n_dl = np.bincount(pos, minlength=layout.lab_ids.size).astype(np.int32)
    labels = layout.lab_ids[pos].astype(np.int64)
    if layout.dense:
        slots = labels * layout.num_features + layout.tok_feat
    else:
        slots = layout.tok_slot[layout.tok_slot_ptr[:-1] + z]
    n_pair = np.bincount(slots, minlength=layout.num_pairs).astype(np.int32)
    n_l = np.bincount(labels, minlength=layout.num_labels).astype(np.int32)
    return n_dl, n_pair, n_l


def init_assignments(layout: TokenLayout, seed: int) -> CountState:
    """Assign every token a label drawn uniformly from its allowed set."""
    rng = make_rng(seed)
    sizes = np.diff(layout.lab_ptr)
    a_tok = np.repeat(sizes, layout.doc_lengths())
    u = rng.random(layout.num_tokens)
    z = np.minimum((u * a_tok).astype(np.int32), a_tok - 1).astype(np.int32)
    n_dl, n_pair, n_l = recount(layout, z)
    return CountState(layout, z, n_dl, n_pair, n_l, int(seed), rng)


@dataclass
class ExpectedCounts:
    """Accumulated conditional probability mass (expected counts)."""

    layout: TokenLayout
    acc_pair: np.ndarray
    acc_dl: np.ndarray
    num_samples: int = 0

    @classmethod
    def zeros(cls, layout: TokenLayout) -> "ExpectedCounts":
        return cls(layout, np.zeros(layout.num_pairs), np.zeros(layout.lab_ids.size), 0)

    @property
    def acc_lv(self) -> sp.csr_matrix:
        rows, cols = self.layout.pair_keys()
        M = sp.coo_matrix((self.acc_pair, (rows, cols)),
                          shape=(self.layout.num_labels, self.layout.num_features)).tocsr()
        M.sort_indices()
        return M

    @property
    def acc_ml(self) -> sp.csr_matrix:
        lay = self.layout
        rows = np.repeat(np.arange(lay.num_docs), np.diff(lay.lab_ptr))
        return sp.csr_matrix((self.acc_dl, (rows, lay.lab_ids)), shape=(lay.num_docs, lay.num_labels))

    def merge(self, other: "ExpectedCounts") -> "ExpectedCounts":
        return ExpectedCounts(self.layout, self.acc_pair + other.acc_pair, self.acc_dl + other.acc_dl,
                              self.num_samples + other.num_samples)


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True, nogil=True, inline="always")
def _slot(dense, V, label, feat, tok_slot_ptr, tok_slot, t, k):
    if dense:
        return label * V + feat
    return tok_slot[tok_slot_ptr[t] + k]


@numba.njit(cache=True, nogil=True)
def _fill_train_probs(t, a0, A, v, lab_ids, dense, V, tok_slot_ptr, tok_slot,
                      n_dl, n_pair, n_l, alpha, beta, vbeta, p):
    """Unnormalized conditional of token ``t`` (already excluded) into ``p[:A]``."""
    total = 0.0
    for k in range(A):
        l = lab_ids[a0 + k]
        s = _slot(dense, V, l, v, tok_slot_ptr, tok_slot, t, k)
        w = (n_pair[s] + beta) / (n_l[l] + vbeta) * (n_dl[a0 + k] + alpha[l])
        p[k] = w
        total += w
    return total


@numba.njit(cache=True, nogil=True)
def _draw(p, A, total, u):
    target = u * total
    c = 0.0
    for k in range(A):
        c += p[k]
        if target < c:
            return k
    return A - 1


@numba.njit(cache=True, nogil=True)
def _train_pass(doc_ptr, tok_feat, lab_ptr, lab_ids, dense, V, tok_slot_ptr, tok_slot,
                z, n_dl, n_pair, n_l, alpha, beta, uniforms, resample, accumulate, acc_pair, acc_dl):
    vbeta = V * beta
    max_a = 1
    for m in range(doc_ptr.size - 1):
        max_a = max(max_a, lab_ptr[m + 1] - lab_ptr[m])
    p = np.empty(max_a)
    for m in range(doc_ptr.size - 1):
        a0 = lab_ptr[m]
        A = lab_ptr[m + 1] - a0
        for t in range(doc_ptr[m], doc_ptr[m + 1]):
            v = tok_feat[t]
            k_old = z[t]
            l_old = lab_ids[a0 + k_old]
            s_old = _slot(dense, V, l_old, v, tok_slot_ptr, tok_slot, t, k_old)
            n_dl[a0 + k_old] -= 1
            n_pair[s_old] -= 1
            n_l[l_old] -= 1
            total = _fill_train_probs(t, a0, A, v, lab_ids, dense, V, tok_slot_ptr, tok_slot,
                                      n_dl, n_pair, n_l, alpha, beta, vbeta, p)
            if accumulate:
                for k in range(A):
                    q = p[k] / total
                    acc_dl[a0 + k] += q
                    acc_pair[_slot(dense, V, lab_ids[a0 + k], v, tok_slot_ptr, tok_slot, t, k)] += q
            k_new = _draw(p, A, total, uniforms[t]) if resample else k_old
            l_new = lab_ids[a0 + k_new]
            z[t] = k_new
            n_dl[a0 + k_new] += 1
            n_pair[_slot(dense, V, l_new, v, tok_slot_ptr, tok_slot, t, k_new)] += 1
            n_l[l_new] += 1


@numba.njit(cache=True, nogil=True)
def _train_conditional(t, m, doc_ptr, tok_feat, lab_ptr, lab_ids, dense, V, tok_slot_ptr, tok_slot,
                       z, n_dl, n_pair, n_l, alpha, beta):
    a0 = lab_ptr[m]
    A = lab_ptr[m + 1] - a0
    v = tok_feat[t]
    k_old = z[t]
    l_old = lab_ids[a0 + k_old]
    s_old = _slot(dense, V, l_old, v, tok_slot_ptr, tok_slot, t, k_old)
    n_dl[a0 + k_old] -= 1
    n_pair[s_old] -= 1
    n_l[l_old] -= 1
    p = np.empty(A)
    total = _fill_train_probs(t, a0, A, v, lab_ids, dense, V, tok_slot_ptr, tok_slot,
                              n_dl, n_pair, n_l, alpha, beta, V * beta, p)
    n_dl[a0 + k_old] += 1
    n_pair[s_old] += 1
    n_l[l_old] += 1
    return p / total


def _run_pass(state: CountState, hp: Hyperparameters, uniforms, resample: bool,
              expected: ExpectedCounts | None) -> None:
    lay = state.layout
    if hp.alpha.size != lay.num_labels:
        raise SamplerError(f"alpha has {hp.alpha.size} entries, expected {lay.num_labels}")
    acc = expected is not None
    acc_pair = expected.acc_pair if acc else np.zeros(0)
    acc_dl = expected.acc_dl if acc else np.zeros(0)
    _train_pass(lay.doc_ptr, lay.tok_feat, lay.lab_ptr, lay.lab_ids, lay.dense, lay.num_features,
                lay.tok_slot_ptr, lay.tok_slot, state.z, state.n_dl, state.n_pair, state.n_l,
                hp.alpha, float(hp.beta), uniforms, resample, acc, acc_pair, acc_dl)


def sweep(state: CountState, hp: Hyperparameters, expected: ExpectedCounts | None = None) -> CountState:
    """Resample every token once, in document then token order.

    When ``expected`` is given, each token's normalized conditional (computed
    before its draw) is added to it and ``num_samples`` is incremented.
    """
    uniforms = state.rng.random(state.layout.num_tokens)
    _run_pass(state, hp, uniforms, True, expected)
    if expected is not None:
        expected.num_samples += 1
    return state


def accumulate(state: CountState, hp: Hyperparameters, expected: ExpectedCounts) -> ExpectedCounts:
    """Add every token's conditional under the current state, without resampling."""
    _run_pass(state, hp, np.zeros(0), False, expected)
    expected.num_samples += 1
    return expected


def conditional_train(state: CountState, hp: Hyperparameters, m: int, t: int) -> np.ndarray:
    """Normalized conditional of token ``t`` (a global token index in document ``m``).

    Returns a length-L vector that is zero outside the document's allowed set.
    The token is excluded from the counts for the evaluation only.
    """
    lay = state.layout
    if not lay.doc_ptr[m] <= t < lay.doc_ptr[m + 1]:
        raise SamplerError(f"token {t} is not in document {m}")
    p_local = _train_conditional(t, m, lay.doc_ptr, lay.tok_feat, lay.lab_ptr, lay.lab_ids, lay.dense,
                                 lay.num_features, lay.tok_slot_ptr, lay.tok_slot, state.z, state.n_dl,
                                 state.n_pair, state.n_l, hp.alpha, float(hp.beta))
    out = np.zeros(lay.num_labels)
    out[lay.allowed(m)] = p_local
    return out


def conditional_predict(phi_column: np.ndarray, doc_counts: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Normalized conditional of a test token given fixed phi.

    ``phi_column[k]`` is phi for the token's feature under the k-th allowed
    label, ``doc_counts`` the document's label counts with the token excluded.
    Falls back to uniform when phi vanishes on every allowed label.
    """
    w = np.asarray(phi_column, float) * (np.asarray(doc_counts, float) + np.asarray(alpha, float))
    total = w.sum()
    if total <= 0:
        return np.full(w.size, 1.0 / w.size)
    return w / total


def estimate_phi(expected: ExpectedCounts, beta: float) -> np.ndarray:
    """Dense ``L x V`` label-feature distributions from expected counts."""
    if expected.num_samples < 1:
        raise SamplerError("no retained samples")
    V = expected.layout.num_features
    S = expected.num_samples
    acc = expected.acc_lv.toarray()
    den = acc.sum(axis=1) / S + V * beta
    return (acc / S + beta) / den[:, None]


def estimate_theta(expected: ExpectedCounts, alpha: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``(labels, theta)`` of training document ``m`` over its allowed labels."""
    if expected.num_samples < 1:
        raise SamplerError("no retained samples")
    lay = expected.layout
    labels = lay.allowed(m)
    a = np.asarray(alpha, dtype=np.float64)[labels]
    n = lay.doc_ptr[m + 1] - lay.doc_ptr[m]
    acc = expected.acc_dl[lay.lab_ptr[m]:lay.lab_ptr[m + 1]]
    return labels, (acc / expected.num_samples + a) / (n + a.sum())


def run_chain(layout: TokenLayout, hp: Hyperparameters, seed: int, callback=None) -> tuple[CountState, ExpectedCounts]:
    """Initialize, then run the full schedule, accumulating on retained sweeps."""
    state = init_assignments(layout, seed)
    expected = ExpectedCounts.zeros(layout)
    for it in range(hp.iterations):
        sweep(state, hp, expected if hp.is_retained(it) else None)
        if callback is not None:
            callback(it, state)
    return state, expected


def run_chains(layout: TokenLayout, hp: Hyperparameters, seed: int, callback=None) -> ExpectedCounts:
    """Run ``hp.chains`` chains (chain ``c`` seeded ``seed ^ c``) and merge their expected counts."""
    merged = None
    for c in range(hp.chains):
        _, expected = run_chain(layout, hp, chain_seed(seed, c), callback)
        merged = expected if merged is None else merged.merge(expected)
    return merged


# ---------------------------------------------------------------------------
# prediction (fixed phi), one document at a time


@numba.njit(cache=True, nogil=True)
def _predict_doc(tok_local, phi_local, alpha0, uniforms, iterations, burn_in, lag,
                 dep, phi_prime_local, aux_alpha, eta, alpha_base, aux_sweeps, aux_uniforms,
                 acc, alpha_acc, alpha_trace, z):
    """Run the whole prediction schedule for one document.

    ``phi_local[f, k]`` is phi of the document's f-th distinct feature under the
    k-th active label. With ``dep`` the prior is re-derived every iteration from
    an auxiliary topic model over the current label assignments.
    Returns the number of retained samples.
    """
    N = tok_local.size
    A = phi_local.shape[1]
    nd = np.zeros(A)
    p = np.empty(A)
    alpha = alpha0.copy()
    for i in range(N):
        k = min(int(uniforms[i] * A), A - 1)
        z[i] = k
        nd[k] += 1.0

    T = phi_prime_local.shape[0]
    zt = np.zeros(N, dtype=np.int64)
    nt = np.zeros(T)
    q = np.empty(T)
    theta_acc = np.zeros(T)
    theta_prime = np.zeros(T)
    if dep:
        for i in range(N):
            t = min(int(aux_uniforms[i] * T), T - 1)
            zt[i] = t
            nt[t] += 1.0
    au = N
    taux = T * aux_alpha

    samples = 0
    for it in range(iterations):
        if dep:
            theta_acc[:] = 0.0
            for _ in range(aux_sweeps):
                for i in range(N):
                    k = z[i]
                    nt[zt[i]] -= 1.0
                    tot = 0.0
                    for t in range(T):
                        w = phi_prime_local[t, k] * (nt[t] + aux_alpha)
                        q[t] = w
                        tot += w
                    for t in range(T):
                        theta_acc[t] += q[t] / tot
                    tn = _draw(q, T, tot, aux_uniforms[au])
                    au += 1
                    zt[i] = tn
                    nt[tn] += 1.0
            for t in range(T):
                theta_prime[t] = (theta_acc[t] / aux_sweeps + aux_alpha) / (N + taux)
            for k in range(A):
                s = 0.0
                for t in range(T):
                    s += theta_prime[t] * phi_prime_local[t, k]
                alpha[k] = eta * s + alpha_base
        asum = 0.0
        for k in range(A):
            asum += alpha[k]
        alpha_trace[it] = asum

        retained = it >= burn_in and (it + 1 - burn_in) % lag == 0
        base = N * (it + 1)
        for i in range(N):
            f = tok_local[i]
            k_old = z[i]
            nd[k_old] -= 1.0
            total = 0.0
            for k in range(A):
                w = phi_local[f, k] * (nd[k] + alpha[k])
                p[k] = w
                total += w
            if total <= 0.0:
                for k in range(A):
                    p[k] = 1.0
                total = float(A)
            if retained:
                for k in range(A):
                    acc[k] += p[k] / total
            k_new = _draw(p, A, total, uniforms[base + i])
            z[i] = k_new
            nd[k_new] += 1.0
        if retained:
            samples += 1
            for k in range(A):
                alpha_acc[k] += alpha[k]
    return samples


@dataclass
class DocumentPrediction:
    labels: np.ndarray  # active global label ids (ascending)
    theta: np.ndarray
    acc: np.ndarray
    num_samples: int
    mean_alpha: np.ndarray  # prior averaged over retained iterations
    alpha_trace: np.ndarray  # sum of the prior at every iteration


def predict_document(tok_local: np.ndarray, phi_local: np.ndarray, labels: np.ndarray, alpha: np.ndarray,
                     hp: Hyperparameters, rng: np.random.Generator, *, dep: dict | None = None,
                     aux_rng: np.random.Generator | None = None) -> DocumentPrediction:
    """Infer theta for one test document with phi fixed.

    ``dep`` (optional) holds ``phi_prime`` (T x A, restricted to ``labels``),
    ``alpha`` (aux prior), ``eta``, ``alpha_base`` and ``sweeps``.
    """
    N = tok_local.size
    A = labels.size
    if A == 0:
        raise SamplerError("empty active label set")
    uniforms = rng.random(N * (hp.iterations + 1))
    if dep is not None:
        aux_uniforms = aux_rng.random(N * (1 + hp.iterations * dep["sweeps"]))
        args = (True, np.ascontiguousarray(dep["phi_prime"]), float(dep["alpha"]), float(dep["eta"]),
                float(dep["alpha_base"]), int(dep["sweeps"]), aux_uniforms)
    else:
        args = (False, np.zeros((1, A)), 1.0, 0.0, 0.0, 1, np.zeros(0))
    acc = np.zeros(A)
    alpha_acc = np.zeros(A)
    trace = np.zeros(hp.iterations)
    z = np.zeros(N, dtype=np.int64)
    S = _predict_doc(tok_local, phi_local, np.asarray(alpha, dtype=np.float64), uniforms,
                     hp.iterations, hp.burn_in, hp.lag, *args, acc, alpha_acc, trace, z)
    mean_alpha = alpha_acc / S if dep is not None else np.asarray(alpha, dtype=np.float64)
    theta = (acc / S + mean_alpha) / (N + mean_alpha.sum())
    return DocumentPrediction(labels, theta, acc, S, mean_alpha, trace)
