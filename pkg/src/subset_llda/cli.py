"""Command-line interface: ``sllda train|retrieve|predict|evaluate|reproduce``.

Logs go to stderr as ``key=value`` lines; results go to stdout or files.
Exit codes: 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import CorpusFormatError, corpus_stats, load_corpus
from .evaluation import (PropensityModel, average_metrics, evaluate, format_table, propensities,
                         z_test)
from .models import (DEP_TOPICS, METHODS, PREDICT_ALPHA_SUM, TRAIN_ALPHA_SUM, ModelError,
                     ModelFormatError, PredictionConfig, load_aux, load_model, parse_scores,
                     predict, save_model, train_dep_aux, train_llda)
from .retrieval import all_candidates, build_index, format_candidates, parse_candidates
from .sampler import Hyperparameters, SamplerError

logger = logging.getLogger("subset_llda")

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3
DATASETS = ("bibtex", "delicious")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _need_file(path: str | None, what: str) -> Path:
    if path is None:
        raise UsageError(f"--{what} is required")
    p = Path(path)
    if not p.exists():
        raise DataError(f"{what} file not found: {p}")
    return p


def _load(path, role):
    p = _need_file(path, role)
    corpus = load_corpus(p, role=role)
    return corpus


def _log_stats(corpus, name):
    s = corpus_stats(corpus).as_dict()
    logger.info("corpus=%s " + " ".join(f"{k}=%s" for k in s), name, *(
        f"{v:.4f}" if isinstance(v, float) else v for v in s.values()))


def _ks(text: str) -> list[int]:
    try:
        ks = [int(k) for k in text.split(",") if k.strip()]
    except ValueError:
        raise UsageError(f"bad --k value {text!r}") from None
    if not ks or min(ks) < 1:
        raise UsageError(f"bad --k value {text!r}")
    return ks


# ---------------------------------------------------------------------------
# commands


def cmd_train(args) -> int:
    train = _load(args.train, "train")
    _log_stats(train, "train")
    hp = Hyperparameters.symmetric(train.num_labels, args.alpha_sum, beta=args.beta, iterations=args.iterations,
                                   burn_in=args.burnin, lag=args.lag, chains=args.chains)
    logger.info("schedule samples_expected=%d", hp.num_samples * hp.chains)
    last = [time.perf_counter()]

    def on_sweep(it, state):
        now = time.perf_counter()
        logger.info("sweep=%d seconds=%.4f", it + 1, now - last[0])
        last[0] = now

    t0 = time.perf_counter()
    model = train_llda(train, hp, seed=args.seed, callback=on_sweep)
    logger.info("train_seconds=%.3f", time.perf_counter() - t0)
    aux = None
    if args.dep_topics > 0:
        t0 = time.perf_counter()
        aux = train_dep_aux(train, args.dep_topics, iterations=args.iterations, burn_in=args.burnin,
                            lag=args.lag, seed=args.seed)
        logger.info("dep_aux_seconds=%.3f", time.perf_counter() - t0)
    save_model(model, args.model, aux=aux)
    logger.info("model=%s samples_retained=%d", args.model, model.num_samples)
    return 0


def cmd_retrieve(args) -> int:
    train = _load(args.train, "train")
    test = _load(args.test, "test")
    index = build_index(train)
    cands = all_candidates(index, train, test, args.neighbors)
    text = format_candidates(cands, train)
    if args.output:
        _write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _prediction_config(args) -> PredictionConfig:
    return PredictionConfig(method=args.method, eta=args.eta, alpha_sum=args.alpha_sum, neighbors=args.neighbors,
                            iterations=args.iterations, burn_in=args.burnin, lag=args.lag, chains=args.chains,
                            seed=args.seed, dep_sweeps=args.dep_sweeps, threads=args.threads)


def cmd_predict(args) -> int:
    model_dir = _need_file(args.model, "model")
    model = load_model(model_dir, beta=args.beta)
    test = _load(args.test, "test")
    cfg = _prediction_config(args)
    aux = index = train = candidates = None
    if cfg.method == "dep":
        aux = load_aux(model_dir)
        if aux is None:
            raise UsageError(f"method 'dep' needs an auxiliary model; {model_dir} has none (train with --dep-topics)")
    if cfg.method == "subset":
        if args.candidates == "all":
            candidates = "all"
        elif args.candidates:
            path = _need_file(args.candidates, "candidates")
            try:
                candidates = parse_candidates(path.read_text(encoding="utf-8"))
            except ValueError as e:
                raise DataError(f"{path}: {e}") from None
        elif args.train:
            train = _load(args.train, "train")
            index = build_index(train)
        else:
            raise UsageError("method 'subset' needs --train or --candidates")
    elif args.candidates:
        raise UsageError(f"--candidates only applies to method 'subset', not {cfg.method!r}")

    t0 = time.perf_counter()
    scores = predict(model, test, cfg, aux=aux, index=index, train=train, candidates=candidates)
    wall = time.perf_counter() - t0
    if cfg.method == "subset":
        sizes = np.array([d.num_active for d in scores])
        for d in scores:
            logger.debug("doc=%d candidates=%d", d.doc_id, d.num_active)
        if sizes.size:
            logger.info("candidates mean=%.2f min=%d max=%d", sizes.mean(), sizes.min(), sizes.max())
    logger.info("method=%s docs=%d wall_seconds=%.3f", cfg.method, len(scores), wall)
    text = scores.to_text(args.top)
    if args.output:
        _write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _train_info(args):
    """Training cardinality and propensity inputs, from --train or --model."""
    if args.train:
        train = _load(args.train, "train")
        return train.cardinality, train.label_counts, len(train), train.num_labels
    if args.model:
        m = load_model(_need_file(args.model, "model"))
        return m.cardinality, m.label_counts, m.num_train, m.num_labels
    raise UsageError("evaluate needs --train or --model for the rcut threshold and propensities")


def cmd_evaluate(args) -> int:
    ks = _ks(args.k)
    gold_corpus = _load(args.gold, "test")
    scores = parse_scores(_need_file(args.scores, "scores").read_text(encoding="utf-8"))
    if len(scores) != len(gold_corpus):
        raise DataError(f"score file has {len(scores)} documents, gold file has {len(gold_corpus)}")
    cardinality, counts, n_train, L = _train_info(args)
    prop = (PropensityModel.ones(L) if args.unit_propensities
            else propensities(counts, n_train, A=args.A, B=args.B))
    gold = gold_corpus.label_sets
    report = evaluate(scores, gold, cardinality, prop, L, ks=ks, include_empty=args.include_empty,
                      micro_variant=args.micro_variant)
    report.metadata["scores"] = args.scores
    out = report.key_values() if args.format == "kv" else report.to_text()
    if args.compare:
        other_scores = parse_scores(_need_file(args.compare, "compare").read_text(encoding="utf-8"))
        if len(other_scores) != len(gold_corpus):
            raise DataError(f"comparison file has {len(other_scores)} documents, gold file has {len(gold_corpus)}")
        other = evaluate(other_scores, gold, cardinality, prop, L, ks=ks, include_empty=args.include_empty,
                         micro_variant=args.micro_variant)
        lines = []
        for measure in ("micro_f", "macro_f", *(f"p@{k}" for k in ks)):
            zt = z_test(report, other, measure)
            lines.append(f"ztest_{measure}: z={zt.z:.4f} p={zt.p_value:.4g} {zt.verdict}")
        out += "\n".join(lines) + "\n"
    sys.stdout.write(out)
    return 0


def reproduce(train, test, *, seed: int = 0, runs: int = 5, neighbors: int = 10, dep_topics: int = DEP_TOPICS,
              iterations: int = 200, burn_in: int = 50, lag: int = 5, threads: int = 1,
              outdir: Path | None = None, name: str = "run") -> dict[str, dict[str, float]]:
    """Train once, then predict with every method under seeds ``seed .. seed+runs-1``.

    Returns the run-averaged metrics per method. With ``outdir``, the model and
    every score file are written there.
    """
    L = train.num_labels
    hp = Hyperparameters.symmetric(L, TRAIN_ALPHA_SUM, iterations=iterations, burn_in=burn_in, lag=lag)
    model = train_llda(train, hp, seed=seed)
    aux = train_dep_aux(train, dep_topics, iterations=iterations, burn_in=burn_in, lag=lag, seed=seed)
    if outdir is not None:
        save_model(model, outdir / f"{name}_model", aux=aux)
    index = build_index(train)
    cands = all_candidates(index, train, test, neighbors)
    prop = propensities(train)
    gold = test.label_sets

    per_method: dict[str, list] = {m: [] for m in METHODS}
    for run in range(runs):
        run_seed = seed + run
        for method in METHODS:
            cfg = PredictionConfig(method=method, neighbors=neighbors, iterations=iterations, burn_in=burn_in,
                                   lag=lag, seed=run_seed, threads=threads)
            scores = predict(model, test, cfg, aux=aux, candidates=cands if method == "subset" else None)
            if outdir is not None:
                _write_atomic(outdir / f"{name}_{method}_seed{run_seed}.scores", scores.to_text())
            rep = evaluate(scores, gold, train.cardinality, prop, L, ks=(1, 5))
            logger.info("run=%d method=%s %s", run, method,
                        " ".join(f"{k}={v:.4f}" for k, v in rep.metrics().items()))
            per_method[method].append(rep)
    return {m: average_metrics(reps) for m, reps in per_method.items()}


def cmd_reproduce(args) -> int:
    workdir = Path(args.workdir)
    train = _load(str(workdir / f"{args.dataset}_train.txt"), "train")
    test = _load(str(workdir / f"{args.dataset}_test.txt"), "test")
    _log_stats(train, "train")
    _log_stats(test, "test")
    columns = reproduce(train, test, seed=args.seed, runs=args.runs, neighbors=args.neighbors,
                        dep_topics=args.dep_topics, iterations=args.iterations, burn_in=args.burnin,
                        lag=args.lag, threads=args.threads, outdir=workdir, name=args.dataset)
    if args.format == "kv":
        table = "".join(f"{m}.{k}={v:.6f}\n" for m, col in columns.items() for k, v in col.items())
    else:
        table = format_table(columns, title=f"{args.dataset}: mean over {args.runs} runs")
    _write_atomic(workdir / f"{args.dataset}_results.txt", table)
    sys.stdout.write(table)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--threads", type=int, default=1, help="prediction threads")
    shared.add_argument("--format", choices=("text", "kv"), default="text")
    shared.add_argument("--log-level", default="INFO")

    schedule = argparse.ArgumentParser(add_help=False)
    schedule.add_argument("--iterations", type=int, default=200)
    schedule.add_argument("--burnin", type=int, default=50)
    schedule.add_argument("--lag", type=int, default=5)
    schedule.add_argument("--chains", type=int, default=1)

    p = _Parser(prog="sllda", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", parents=[shared, schedule], help="train a Labeled LDA model")
    t.add_argument("--train", required=True)
    t.add_argument("--model", required=True, help="output model directory")
    t.add_argument("--alpha-sum", type=float, default=TRAIN_ALPHA_SUM, help="alpha_l = alpha_sum / L")
    t.add_argument("--beta", type=float, default=0.01)
    t.add_argument("--dep-topics", type=int, default=DEP_TOPICS, help="0 skips the Dep-LDA auxiliary model")
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("retrieve", parents=[shared], help="candidate labels from tf-idf nearest neighbours")
    r.add_argument("--train", required=True)
    r.add_argument("--test", required=True)
    r.add_argument("--neighbors", type=int, default=10)
    r.add_argument("--output")
    r.set_defaults(func=cmd_retrieve)

    pr = sub.add_parser("predict", parents=[shared, schedule], help="score test documents")
    pr.add_argument("--model", required=True)
    pr.add_argument("--test", required=True)
    pr.add_argument("--method", choices=METHODS, default="subset")
    pr.add_argument("--train", help="training corpus (subset retrieval)")
    pr.add_argument("--candidates", help="candidate file from 'retrieve', or 'all'")
    pr.add_argument("--neighbors", type=int, default=10)
    pr.add_argument("--eta", type=float, default=None, help="default 50 (prior) / 120 (dep)")
    pr.add_argument("--alpha-sum", type=float, default=PREDICT_ALPHA_SUM, help="base alpha = alpha_sum / L")
    pr.add_argument("--beta", type=float, default=None, help="override the model's beta")
    pr.add_argument("--dep-sweeps", type=int, default=5)
    pr.add_argument("--top", type=int, default=None, help="entries per line (default max(100, |active|))")
    pr.add_argument("--output")
    pr.set_defaults(func=cmd_predict)

    e = sub.add_parser("evaluate", parents=[shared], help="metrics for a score file")
    e.add_argument("--scores", required=True)
    e.add_argument("--gold", required=True, help="test corpus with true labels")
    e.add_argument("--train", help="training corpus (cardinality, propensities)")
    e.add_argument("--model", help="model directory (alternative to --train)")
    e.add_argument("--k", default="1,5")
    e.add_argument("--A", type=float, default=0.55)
    e.add_argument("--B", type=float, default=1.5)
    e.add_argument("--unit-propensities", action="store_true")
    e.add_argument("--micro-variant", choices=("pooled", "weighted"), default="pooled")
    e.add_argument("--include-empty", action="store_true")
    e.add_argument("--compare", help="second score file for z-tests")
    e.set_defaults(func=cmd_evaluate)

    rp = sub.add_parser("reproduce", parents=[shared, schedule], help="train once, run all methods, tabulate")
    rp.add_argument("--dataset", choices=DATASETS, required=True)
    rp.add_argument("--workdir", required=True, help="directory holding <dataset>_train.txt and <dataset>_test.txt")
    rp.add_argument("--runs", type=int, default=5)
    rp.add_argument("--neighbors", type=int, default=10)
    rp.add_argument("--dep-topics", type=int, default=DEP_TOPICS)
    rp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(message)s", force=True)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"sllda: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, SamplerError) as e:
        if isinstance(e, ModelFormatError):
            print(f"sllda: data error: {e}", file=sys.stderr)
            return EXIT_DATA
        print(f"sllda: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CorpusFormatError, FileNotFoundError) as e:
        print(f"sllda: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001
        logger.exception("internal error")
        print(f"sllda: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
