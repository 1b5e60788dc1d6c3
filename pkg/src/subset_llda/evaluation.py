"""Multi-label metrics: rcut F-measures, precision@k and propensity-scored precision@k."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus

DEFAULT_A = 0.55
DEFAULT_B = 1.5


def rcut_threshold(train_cardinality: float) -> int:
    """Labels kept per document: the training cardinality rounded half up, at least 1."""
    if not train_cardinality > 0:
        raise ValueError("train_cardinality must be positive")
    return max(1, int(math.floor(train_cardinality + 0.5)))


def rcut_assign(rankings: Iterable[Sequence[int]], train_cardinality: float) -> list[set[int]]:
    t = rcut_threshold(train_cardinality)
    return [set(int(l) for l in list(r)[:t]) for r in _as_rankings(rankings)]


def _as_rankings(scores) -> list[Sequence[int]]:
    if hasattr(scores, "rankings"):
        return scores.rankings()
    return list(scores)


def _label_stats(assigned: Sequence[Iterable[int]], gold: Sequence[Iterable[int]], num_labels: int | None):
    if len(assigned) != len(gold):
        raise ValueError(f"{len(assigned)} predictions for {len(gold)} gold label sets")
    tp: dict[int, int] = {}
    fp: dict[int, int] = {}
    fn: dict[int, int] = {}
    for a, g in zip(assigned, gold):
        a, g = set(a), set(g)
        for l in a & g:
            tp[l] = tp.get(l, 0) + 1
        for l in a - g:
            fp[l] = fp.get(l, 0) + 1
        for l in g - a:
            fn[l] = fn.get(l, 0) + 1
    labels = set(tp) | set(fp) | set(fn)
    L = num_labels if num_labels is not None else (max(labels) + 1 if labels else 0)
    stats = np.zeros((L, 3), dtype=np.int64)
    for col, d in enumerate((tp, fp, fn)):
        for l, c in d.items():
            if l < L:
                stats[l, col] = c
    return stats


def _f1(tp, fp, fn) -> float:
    den = 2 * tp + fp + fn
    return 2 * tp / den if den else 0.0


def micro_f(assigned: Sequence[Iterable[int]], gold: Sequence[Iterable[int]], variant: str = "pooled",
            num_labels: int | None = None) -> float:
    """Micro-averaged F1.

    ``variant="pooled"`` pools TP/FP/FN over all (document, label) decisions;
    ``variant="weighted"`` averages per-label F1 weighted by gold frequency.
    """
    stats = _label_stats(assigned, gold, num_labels)
    tp, fp, fn = stats.sum(axis=0) if stats.size else (0, 0, 0)
    if variant == "pooled":
        return _f1(int(tp), int(fp), int(fn))
    if variant == "weighted":
        support = stats[:, 0] + stats[:, 2]
        if support.sum() == 0:
            return 0.0
        f1 = np.array([_f1(*row) for row in stats])
        return float((f1 * support).sum() / support.sum())
    raise ValueError(f"unknown micro-F variant {variant!r}")


def macro_f(assigned: Sequence[Iterable[int]], gold: Sequence[Iterable[int]], num_labels: int) -> float:
    """Mean per-label F1 over all ``num_labels`` labels; labels never seen or predicted count as 0."""
    if num_labels < 1:
        raise ValueError("num_labels must be >= 1")
    stats = _label_stats(assigned, gold, num_labels)
    return sum(_f1(*row) for row in stats) / num_labels


def _hits_at_k(rankings, gold, k: int, weights: np.ndarray | None = None) -> np.ndarray:
    if k < 1:
        raise ValueError("k must be >= 1")
    rankings = _as_rankings(rankings)
    if len(rankings) != len(gold):
        raise ValueError(f"{len(rankings)} rankings for {len(gold)} gold label sets")
    out = np.zeros(len(rankings))
    for i, (r, g) in enumerate(zip(rankings, gold)):
        g = set(g)
        for l in list(r)[:k]:
            l = int(l)
            if l in g:
                out[i] += 1.0 if weights is None else 1.0 / weights[l]
    return out


def precision_at_k(rankings, gold: Sequence[Iterable[int]], k: int) -> float:
    """Mean over documents of (correct labels among the top k) / k."""
    hits = _hits_at_k(rankings, gold, k)
    return float(hits.mean() / k) if hits.size else 0.0


@dataclass(frozen=True)
class PropensityModel:
    propensities: np.ndarray
    label_counts: np.ndarray
    num_train: int
    A: float
    B: float

    @property
    def C(self) -> float:
        return (math.log(self.num_train) - 1.0) * (self.B + 1.0) ** self.A

    @classmethod
    def ones(cls, num_labels: int) -> "PropensityModel":
        return cls(np.ones(num_labels), np.zeros(num_labels, dtype=np.int64), 0, 0.0, 0.0)


def propensities(label_counts: np.ndarray | Corpus, num_train: int | None = None,
                 A: float = DEFAULT_A, B: float = DEFAULT_B) -> PropensityModel:
    """Per-label propensities ``1 / (1 + C (N_l + B)^-A)``, ``C = (ln N - 1)(B + 1)^A``."""
    if isinstance(label_counts, Corpus):
        num_train = len(label_counts) if num_train is None else num_train
        label_counts = label_counts.label_counts
    counts = np.asarray(label_counts, dtype=np.float64)
    if num_train is None or num_train < 2:
        raise ValueError("need at least two training documents")
    C = (math.log(num_train) - 1.0) * (B + 1.0) ** A
    p = 1.0 / (1.0 + C * np.exp(-A * np.log(counts + B)))
    return PropensityModel(p, np.asarray(label_counts), int(num_train), float(A), float(B))


def ps_precision_at_k(rankings, gold: Sequence[Iterable[int]], prop: PropensityModel | np.ndarray, k: int) -> float:
    """Like :func:`precision_at_k`, but each hit on label l counts ``1 / p_l``."""
    p = prop.propensities if isinstance(prop, PropensityModel) else np.asarray(prop, dtype=np.float64)
    hits = _hits_at_k(rankings, gold, k, weights=p)
    return float(hits.mean() / k) if hits.size else 0.0


# ---------------------------------------------------------------------------
# significance


@dataclass(frozen=True)
class ZTest:
    z: float
    p_value: float
    significant: bool | None  # None when the test is undefined
    level: float

    @property
    def verdict(self) -> str:
        if self.significant is None:
            return "undefined"
        return "significant" if self.significant else "not significant"


def two_proportion_z(successes_a: float, trials_a: int, successes_b: float, trials_b: int,
                     level: float = 0.05) -> ZTest:
    """Pooled two-proportion z-test, two-sided."""
    if trials_a <= 0 or trials_b <= 0:
        return ZTest(float("nan"), float("nan"), None, level)
    pa, pb = successes_a / trials_a, successes_b / trials_b
    pooled = (successes_a + successes_b) / (trials_a + trials_b)
    var = pooled * (1 - pooled) * (1 / trials_a + 1 / trials_b)
    if var <= 0:
        if pa == pb:
            return ZTest(0.0, 1.0, None, level)
        return ZTest(float("nan"), float("nan"), None, level)
    z = (pa - pb) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2))
    return ZTest(z, p, p < level, level)


# ---------------------------------------------------------------------------
# reports


@dataclass
class EvalReport:
    micro_f: float
    macro_f: float
    precision: dict[int, float]
    ps_precision: dict[int, float]
    rcut_t: int
    num_docs: int
    indicators: dict[str, tuple[np.ndarray, int]] = field(default_factory=dict, repr=False)
    metadata: dict = field(default_factory=dict)

    def metrics(self) -> dict[str, float]:
        out = {"micro_f": self.micro_f, "macro_f": self.macro_f}
        for k, v in self.precision.items():
            out[f"p@{k}"] = v
        for k, v in self.ps_precision.items():
            out[f"psp@{k}"] = v
        return out

    def key_values(self) -> str:
        lines = [f"{k}={v:.6f}" for k, v in self.metrics().items()]
        lines.append(f"rcut_t={self.rcut_t}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        rows = [f"documents evaluated: {self.num_docs}", f"rcut threshold:      {self.rcut_t}"]
        for k, v in self.metadata.items():
            rows.append(f"{k + ':':<21}{v}")
        rows.append("")
        rows.append(f"{'measure':<10}{'value':>10}")
        for k, v in self.metrics().items():
            rows.append(f"{k:<10}{v:>10.4f}")
        return "\n".join(rows) + "\n"


def evaluate(scores, gold: Sequence[Iterable[int]], train_cardinality: float, prop: PropensityModel,
             num_labels: int, ks: Sequence[int] = (1, 5), include_empty: bool = False,
             micro_variant: str = "pooled") -> EvalReport:
    """Score a ranking against gold label sets.

    Documents with an empty gold set are left out of every measure, except that
    ``include_empty`` lets their rcut assignments count as false positives in
    the F-measures.
    """
    rankings = _as_rankings(scores)
    gold = [tuple(g) for g in gold]
    if len(rankings) != len(gold):
        raise ValueError(f"{len(rankings)} rankings for {len(gold)} gold label sets")
    keep = [i for i, g in enumerate(gold) if g]
    f_rows = range(len(gold)) if include_empty else keep
    t = rcut_threshold(train_cardinality)
    assigned = rcut_assign([rankings[i] for i in f_rows], train_cardinality)
    f_gold = [gold[i] for i in f_rows]
    r_kept = [rankings[i] for i in keep]
    g_kept = [gold[i] for i in keep]

    indicators = {}
    for name in ("micro_f", "macro_f"):
        indicators[name] = (_hits_at_k(r_kept, g_kept, t), t)
    precision, ps_precision = {}, {}
    for k in ks:
        precision[k] = precision_at_k(r_kept, g_kept, k)
        ps_precision[k] = ps_precision_at_k(r_kept, g_kept, prop, k)
        indicators[f"p@{k}"] = (_hits_at_k(r_kept, g_kept, k), k)
    return EvalReport(
        micro_f=micro_f(assigned, f_gold, micro_variant, num_labels),
        macro_f=macro_f(assigned, f_gold, num_labels),
        precision=precision,
        ps_precision=ps_precision,
        rcut_t=t,
        num_docs=len(keep),
        indicators=indicators,
    )


def z_test(report_a: EvalReport, report_b: EvalReport, measure: str, level: float = 0.05) -> ZTest:
    """Compare two reports on the per-document success indicators behind ``measure``.

    For ``p@k`` the trials are the top-k slots of every document; for the
    F-measures they are the top-t rcut slots.
    """
    try:
        hits_a, k_a = report_a.indicators[measure]
        hits_b, k_b = report_b.indicators[measure]
    except KeyError:
        raise ValueError(f"no per-document indicators for {measure!r}") from None
    return two_proportion_z(float(hits_a.sum()), k_a * hits_a.size, float(hits_b.sum()), k_b * hits_b.size, level)


def average_metrics(reports: Sequence[EvalReport]) -> dict[str, float]:
    keys = reports[0].metrics().keys()
    return {k: float(np.mean([r.metrics()[k] for r in reports])) for k in keys}


def format_table(columns: Mapping[str, Mapping[str, float]], title: str = "") -> str:
    """Metric rows by method columns."""
    methods = list(columns)
    metrics = list(next(iter(columns.values())).keys()) if columns else []
    out = [title] if title else []
    out.append(f"{'':<10}" + "".join(f"{m:>12}" for m in methods))
    for metric in metrics:
        out.append(f"{metric:<10}" + "".join(f"{columns[m][metric]:>12.3f}" for m in methods))
    return "\n".join(out) + "\n"
