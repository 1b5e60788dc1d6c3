import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subset_llda.corpus import (CorpusBoundsError, CorpusFormatError, CorpusValueError, corpus_from_documents,
                                corpus_stats, load_corpus, make_document, tokenize, tokenize_array,
                                write_corpus)


def _write(tmp_path, text, name="data.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestTokenize:
    @pytest.mark.parametrize("value,expected", [(3.0, 3), (0.2, 1), (2.5, 3), (0.0, 0), (0.5, 1), (1.49, 1)])
    def test_examples(self, value, expected):
        assert tokenize(value) == expected

    def test_cap(self):
        assert tokenize(1e9) == 1000
        assert tokenize(1e9, max_tokens=7) == 7

    def test_nonpositive_gives_no_tokens(self):
        assert tokenize(-1.0) == 0

    def test_array_matches_scalar(self):
        values = np.array([0.0, 0.2, 0.49, 0.5, 1.5, 2.5, 3.0, 7.2, 5000.0])
        assert tokenize_array(values).tolist() == [tokenize(v) for v in values]


class TestLoadCorpus:
    def test_basic_parse(self, tmp_path):
        p = _write(tmp_path, "2 3 2\n0 0:1 2:4\n1 1:2\n")
        c = load_corpus(p)
        assert len(c) == 2 and c.num_features == 3 and c.num_labels == 2
        assert c[0].features == {0: 1.0, 2: 4.0}
        assert c[0].labels == (0,)
        assert c[1].labels == (1,)

    def test_no_trailing_newline(self, tmp_path):
        p = _write(tmp_path, "2 3 2\n0 0:1 2:4\n1 1:2")
        assert len(load_corpus(p)) == 2

    def test_multi_label_line(self, tmp_path):
        p = _write(tmp_path, "1 4 5\n0,3,4 1:2.5 3:1\n")
        doc = load_corpus(p)[0]
        assert doc.labels == (0, 3, 4)
        assert doc.token_count == 4  # 3 + 1

    def test_empty_label_training_doc_dropped(self, tmp_path):
        p = _write(tmp_path, "3 3 2\n0 0:1\n 1:1 2:1\n1 2:3\n")
        c = load_corpus(p, role="train")
        assert len(c) == 2
        assert c.num_dropped == 1
        assert [d.doc_id for d in c] == [0, 2]

    def test_empty_label_test_doc_kept(self, tmp_path):
        p = _write(tmp_path, "3 3 2\n0 0:1\n 1:1 2:1\n1 2:3\n")
        c = load_corpus(p, role="test")
        assert len(c) == 3
        assert c[1].labels == ()
        assert c[1].features == {1: 1.0, 2: 1.0}

    def test_malformed_header_reports_line(self, tmp_path):
        p = _write(tmp_path, "2 3\n0 0:1\n")
        with pytest.raises(CorpusFormatError) as err:
            load_corpus(p)
        assert err.value.line == 1

    def test_feature_out_of_bounds(self, tmp_path):
        p = _write(tmp_path, "1 3 2\n0 3:1\n")
        with pytest.raises(CorpusBoundsError) as err:
            load_corpus(p)
        assert err.value.line == 2

    def test_label_out_of_bounds(self, tmp_path):
        with pytest.raises(CorpusBoundsError):
            load_corpus(_write(tmp_path, "1 3 2\n2 0:1\n"))

    def test_negative_value(self, tmp_path):
        with pytest.raises(CorpusValueError):
            load_corpus(_write(tmp_path, "1 3 2\n0 0:-1\n"))

    def test_document_count_mismatch(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="declares 3"):
            load_corpus(_write(tmp_path, "3 3 2\n0 0:1\n"))

    def test_zero_values_are_absent(self, tmp_path):
        doc = load_corpus(_write(tmp_path, "1 3 2\n0 0:0 1:2\n"))[0]
        assert doc.features == {1: 2.0}


class TestTokenStream:
    def test_order_and_length(self):
        c = corpus_from_documents([make_document(0, {2: 2, 0: 1.0, 1: 0.3}, [0])], 3, 1)
        ptr, feats = c.token_stream()
        assert ptr.tolist() == [0, 4]
        assert feats.tolist() == [0, 1, 2, 2]

    def test_empty_document(self):
        c = corpus_from_documents([make_document(0, {}, [0]), make_document(1, {1: 3}, [0])], 2, 1)
        ptr, feats = c.token_stream()
        assert ptr.tolist() == [0, 0, 3]
        assert feats.tolist() == [1, 1, 1]


class TestStats:
    def test_two_doc_example(self):
        c = corpus_from_documents([make_document(0, {0: 1}, [0]), make_document(1, {1: 1}, [0, 1])], 2, 2)
        assert c.cardinality == 1.5
        np.testing.assert_allclose(c.label_frequencies, [1.0, 0.5])
        s = corpus_stats(c)
        assert s.avg_label_frequency == 1.5  # (2 + 1) / 2 labels
        assert s.density == 0.5

    def test_frequency_cardinality_consistency(self, small_pair):
        train, _ = small_pair
        assert np.isclose((train.label_frequencies * len(train)).sum(), sum(len(d.labels) for d in train))


_doc = st.tuples(
    st.lists(st.integers(0, 4), max_size=3, unique=True),
    st.dictionaries(st.integers(0, 9), st.one_of(st.integers(1, 50).map(float),
                                                 st.floats(0.01, 100, allow_nan=False)), max_size=6),
)


class TestRoundTrip:
    @settings(max_examples=60, deadline=None)
    @given(st.lists(_doc, min_size=1, max_size=8))
    def test_write_then_load_is_identity(self, tmp_path_factory, raw):
        docs = [make_document(i, feats, labels) for i, (labels, feats) in enumerate(raw)]
        c = corpus_from_documents(docs, 10, 5, role="test")
        p = tmp_path_factory.mktemp("rt") / "c.txt"
        write_corpus(c, p)
        back = load_corpus(p, role="test")
        assert len(back) == len(c)
        for a, b in zip(c, back):
            assert a.labels == b.labels
            assert a.features == b.features
