import numpy as np
import pytest

import synthetic
from subset_llda.models import (DepAuxModel, ModelError, ModelFormatError, PredictionConfig, TrainedModel,
                                dep_alpha, load_aux, load_model, parse_scores, predict, predict_dep,
                                predict_llda, predict_prior, predict_subset, prior_alpha, save_model,
                                train_dep_aux, train_llda)
from subset_llda.retrieval import all_candidates, build_index
from subset_llda.sampler import Hyperparameters

FAST = dict(iterations=40, burn_in=20, lag=5)


@pytest.fixture(scope="module")
def trained(small_pair):
    train, test = small_pair
    model = train_llda(train, Hyperparameters.symmetric(train.num_labels, **FAST), seed=3)
    aux = train_dep_aux(train, num_topics=4, seed=3, **FAST)
    return train, test, model, aux


class TestTraining:
    def test_shapes_and_samples(self, trained):
        train, _, model, _ = trained
        assert model.num_labels == 12 and model.num_features == 60
        assert model.num_samples == 4
        np.testing.assert_allclose(model.phi().sum(axis=1), 1.0)
        np.testing.assert_array_equal(model.label_counts, train.label_counts)

    def test_mass_only_on_document_labels(self, small_pair):
        train, _ = small_pair
        model = train_llda(train, Hyperparameters.symmetric(12, **FAST))
        # every (label, feature) with mass co-occurs in some training document
        allowed = np.zeros((12, 60), dtype=bool)
        for d in train:
            allowed[np.ix_(list(d.labels), d.indices)] = True
        rows, cols = model.acc_lv.nonzero()
        assert allowed[rows, cols].all()

    def test_learns_label_vocabularies(self, trained):
        _, _, model, _ = trained
        phi = model.phi()
        for l in range(12):
            own = synthetic.label_vocab(l, 60, 5)
            assert phi[l, own].sum() > 0.8

    def test_same_seed_same_model(self, small_pair):
        train, _ = small_pair
        hp = Hyperparameters.symmetric(12, **FAST)
        a, b = train_llda(train, hp, seed=1), train_llda(train, hp, seed=1)
        assert (a.acc_lv != b.acc_lv).nnz == 0

    def test_rejects_unlabelled_corpus(self):
        from subset_llda.corpus import Corpus, make_document
        c = Corpus([make_document(0, {0: 1}, [])], 1, 1, role="test")
        with pytest.raises(ModelError):
            train_llda(c)


class TestPriors:
    def test_prior_example(self):
        np.testing.assert_allclose(prior_alpha(np.array([0.1]), 50, 0.3), [5.3])

    def test_dep_example(self):
        phi_prime = np.array([[0.7, 0.3], [0.5, 0.5]])
        np.testing.assert_allclose(dep_alpha(np.array([1.0, 0.0]), phi_prime, 10, 0.5), [7.5, 3.5])

    def test_dep_dimension_mismatch(self):
        with pytest.raises(ModelError):
            dep_alpha(np.array([1.0, 0.0, 0.0]), np.ones((2, 4)) / 4, 10, 0.5)

    def test_prior_positive(self):
        with pytest.raises(ModelError):
            prior_alpha(np.array([0.1]), 0, 0.3)


class TestDepAux:
    def test_pairs_share_a_topic(self):
        corpus = synthetic.paired_labels(200, 2, 12, seed=4)
        aux = train_dep_aux(corpus, num_topics=2, seed=0)
        phi = aux.phi_prime
        assert phi.shape == (2, 4)
        for a, b in [(0, 1), (2, 3)]:
            assert any(phi[t, a] >= 0.4 and phi[t, b] >= 0.4 for t in range(2))

    def test_rows_normalized(self, trained):
        np.testing.assert_allclose(trained[3].phi_prime.sum(axis=1), 1.0)


class TestPrediction:
    def test_candidates_restrict_labels(self, trained):
        train, test, model, _ = trained
        cfg = PredictionConfig(method="subset", neighbors=3, **FAST)
        scores = predict_subset(model, test, cfg, index=build_index(train), train=train)
        for d in scores:
            assert set(d.labels) == set(d.candidates.labels)
            np.testing.assert_allclose(d.scores.sum(), 1.0)

    def test_full_methods_rank_every_label(self, trained):
        _, test, model, aux = trained
        for method in ("llda", "prior", "dep"):
            scores = predict(model, test, PredictionConfig(method=method, **FAST), aux=aux)
            assert all(d.num_active == 12 and sorted(d.labels) == list(range(12)) for d in scores)

    def test_scores_descending(self, trained):
        _, test, model, _ = trained
        for d in predict_llda(model, test, PredictionConfig(method="llda", **FAST)):
            assert np.all(np.diff(d.scores) <= 0)

    def test_gold_labels_rank_high(self, trained):
        _, test, model, _ = trained
        scores = predict_llda(model, test, PredictionConfig(method="llda", **FAST))
        hits = np.mean([d.labels[0] in test[i].labels for i, d in enumerate(scores)])
        assert hits > 0.9

    def test_threads_do_not_change_results(self, trained):
        _, test, model, aux = trained
        a = predict_dep(model, aux, test, PredictionConfig(method="dep", threads=1, **FAST)).to_text()
        b = predict_dep(model, aux, test, PredictionConfig(method="dep", threads=3, **FAST)).to_text()
        assert a == b

    def test_dep_needs_aux(self, trained):
        _, test, model, _ = trained
        with pytest.raises(ModelError):
            predict(model, test, PredictionConfig(method="dep", **FAST))

    def test_unknown_method(self):
        with pytest.raises(ModelError):
            PredictionConfig(method="bogus")


class TestReductions:
    def test_subset_with_all_labels_is_llda(self, trained):
        _, test, model, _ = trained
        llda = predict_llda(model, test, PredictionConfig(method="llda", seed=7, **FAST)).to_text()
        subset = predict_subset(model, test, PredictionConfig(method="subset", seed=7, **FAST),
                                candidates="all").to_text()
        assert subset == llda

    def test_prior_with_zero_frequencies_is_llda(self, trained):
        _, test, model, _ = trained
        llda = predict_llda(model, test, PredictionConfig(method="llda", seed=7, **FAST)).to_text()
        prior = predict_prior(model, test, PredictionConfig(method="prior", seed=7, **FAST),
                              frequencies=np.zeros(12)).to_text()
        assert prior == llda

    def test_single_topic_dep_is_prior(self, trained):
        train, test, model, _ = trained
        aux = train_dep_aux(train, num_topics=1, seed=0, **FAST)
        eta = 120.0
        dep = predict_dep(model, aux, test, PredictionConfig(method="dep", eta=eta, seed=7, **FAST))
        prior = predict_prior(model, test, PredictionConfig(method="prior", eta=eta, seed=7, **FAST),
                              frequencies=aux.phi_prime[0])
        for a, b in zip(dep, prior):
            order_a, order_b = np.argsort(a.labels), np.argsort(b.labels)
            np.testing.assert_array_equal(a.labels[order_a], b.labels[order_b])
            np.testing.assert_allclose(a.scores[order_a], b.scores[order_b], rtol=0, atol=1e-12)


class TestScoreFile:
    def test_format_and_parse(self, trained):
        train, test, model, _ = trained
        cands = all_candidates(build_index(train), train, test, 2)
        scores = predict_subset(model, test, PredictionConfig(method="subset", **FAST), candidates=cands)
        text = scores.to_text()
        first = text.splitlines()[0]
        doc_id, body = first.split("\t")
        assert int(doc_id) == test[0].doc_id
        assert all(len(item.split(":")[1].split(".")[1]) == 6 for item in body.split())
        back = parse_scores(text)
        assert [list(d.labels) for d in back] == [list(d.labels) for d in scores]

    def test_top_limits_entries(self, trained):
        _, test, model, _ = trained
        text = predict_llda(model, test, PredictionConfig(method="llda", **FAST)).to_text(top=3)
        assert all(len(line.split("\t")[1].split()) == 3 for line in text.splitlines())

    def test_malformed(self):
        with pytest.raises(ModelFormatError):
            parse_scores("0 1:0.5\n")


class TestPersistence:
    def test_round_trip(self, trained, tmp_path):
        _, test, model, aux = trained
        save_model(model, tmp_path / "m", aux=aux)
        back = load_model(tmp_path / "m")
        assert isinstance(back, TrainedModel)
        assert back.num_samples == model.num_samples and back.beta == model.beta
        assert back.cardinality == model.cardinality
        np.testing.assert_array_equal(back.label_counts, model.label_counts)
        np.testing.assert_allclose(back.phi(), model.phi(), atol=1e-7)
        back_aux = load_aux(tmp_path / "m")
        assert isinstance(back_aux, DepAuxModel)
        np.testing.assert_allclose(back_aux.phi_prime, aux.phi_prime, atol=1e-7)

    def test_resave_is_byte_identical(self, trained, tmp_path):
        _, _, model, aux = trained
        save_model(model, tmp_path / "a", aux=aux)
        save_model(load_model(tmp_path / "a"), tmp_path / "b", aux=load_aux(tmp_path / "a"))
        for name in ("meta", "counts", "freq", "aux/meta", "aux/counts"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_overwrite(self, trained, tmp_path):
        _, _, model, _ = trained
        save_model(model, tmp_path / "m")
        save_model(model, tmp_path / "m")
        assert load_aux(tmp_path / "m") is None
        assert sorted(p.name for p in tmp_path.iterdir()) == ["m"]

    def test_bad_magic(self, trained, tmp_path):
        save_model(trained[2], tmp_path / "m")
        meta = tmp_path / "m" / "meta"
        meta.write_text(meta.read_text().replace("magic=subset-llda", "magic=other"))
        with pytest.raises(ModelFormatError, match="magic"):
            load_model(tmp_path / "m")

    def test_bad_version(self, trained, tmp_path):
        save_model(trained[2], tmp_path / "m")
        meta = tmp_path / "m" / "meta"
        meta.write_text(meta.read_text().replace("format_version=1", "format_version=9"))
        with pytest.raises(ModelFormatError, match="version"):
            load_model(tmp_path / "m")

    def test_checksum_detects_corruption(self, trained, tmp_path):
        save_model(trained[2], tmp_path / "m")
        counts = tmp_path / "m" / "counts"
        data = bytearray(counts.read_bytes())
        data[-3] = ord("7") if data[-3] != ord("7") else ord("8")
        counts.write_bytes(bytes(data))
        with pytest.raises(ModelFormatError, match="checksum"):
            load_model(tmp_path / "m")

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "nope")

    def test_beta_override(self, trained, tmp_path):
        save_model(trained[2], tmp_path / "m")
        assert load_model(tmp_path / "m", beta=0.5).beta == 0.5
