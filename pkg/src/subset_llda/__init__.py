"""Labeled LDA with Prior-LDA, Dep-LDA and Subset LLDA prediction."""

__version__ = "0.1.0"

from .corpus import Corpus, SparseDocument, corpus_stats, load_corpus, make_document, tokenize, write_corpus
from .evaluation import (EvalReport, evaluate, macro_f, micro_f, precision_at_k, propensities,
                         ps_precision_at_k, rcut_assign, z_test)
from .models import (DepAuxModel, PredictionConfig, ScoreMatrix, TrainedModel, dep_alpha, load_aux,
                     load_model, predict, predict_dep, predict_llda, predict_prior, predict_subset,
                     prior_alpha, save_model, train_dep_aux, train_llda)
from .retrieval import CandidateSet, TfIdfIndex, build_index, candidate_labels, nearest_neighbors
from .sampler import Hyperparameters
