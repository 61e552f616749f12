import numpy as np
import pytest

from jointspace.errors import AllOOVError, EmptyVocabularyError
from jointspace.textemb import LdaConfig, train_lda

SLIM = dict(k_topics=2, gibbs_iters=60, burn_in=30, seed=0)


@pytest.fixture(scope="module")
def model(two_concept_docs):
    return train_lda(two_concept_docs, LdaConfig(**SLIM))


@pytest.fixture(scope="module")
def sharp_model(two_concept_docs):
    # the 50/K default prior is far too flat for 3-8 token documents;
    # a sub-1 alpha lets short documents commit to a topic
    return train_lda(two_concept_docs, LdaConfig(k_topics=2, alpha=0.5, gibbs_iters=60, burn_in=30, seed=0))


class TestTraining:
    def test_word_rows_on_simplex(self, model):
        for token in model.vocab.tokens:
            vec = model.embed_word(token)
            assert vec.shape == (2,)
            assert np.all(vec >= 0.0)
            assert abs(vec.sum() - 1.0) < 1e-6

    def test_vector_table_on_simplex(self, model):
        rows = model.vectors.astype(np.float64)
        assert np.all(rows >= 0.0)
        np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-6)

    def test_deterministic_assignments(self, two_concept_docs, model):
        again = train_lda(two_concept_docs, LdaConfig(**SLIM))
        assert again.assignments == model.assignments
        assert again.topic_word_counts.tobytes() == model.topic_word_counts.tobytes()

    def test_topic_purity_on_disjoint_vocabularies(self, sharp_model, concept_words):
        # dominant topic should agree within each concept's vocabulary
        words_a, words_b = concept_words
        tops_a = [int(np.argmax(sharp_model.embed_word(w))) for w in sorted(words_a)]
        tops_b = [int(np.argmax(sharp_model.embed_word(w))) for w in sorted(words_b)]
        purity_a = max(tops_a.count(0), tops_a.count(1)) / len(tops_a)
        purity_b = max(tops_b.count(0), tops_b.count(1)) / len(tops_b)
        assert purity_a >= 0.9
        assert purity_b >= 0.9
        # and the two concepts land on different topics
        assert max(set(tops_a), key=tops_a.count) != max(set(tops_b), key=tops_b.count)

    def test_count_conservation(self, two_concept_docs, model):
        n_tokens = sum(len(d.tokens) for d in two_concept_docs)
        per_sweep = model.topic_word_counts.sum() / model.n_sweeps
        assert per_sweep == n_tokens

    def test_alpha_defaults_to_fifty_over_k(self):
        assert LdaConfig(k_topics=25).resolved_alpha() == pytest.approx(2.0)
        assert LdaConfig(k_topics=25, alpha=0.3).resolved_alpha() == 0.3

    def test_k_below_two_rejected(self, two_concept_docs):
        with pytest.raises(ValueError):
            train_lda(two_concept_docs, LdaConfig(k_topics=1))

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyVocabularyError):
            train_lda([], LdaConfig(**SLIM))

    def test_all_burn_in_falls_back_to_final_state(self, two_concept_docs):
        model = train_lda(
            two_concept_docs,
            LdaConfig(k_topics=2, gibbs_iters=5, burn_in=10, seed=0),
        )
        assert model.n_sweeps == 1
        assert model.topic_word_counts.sum() == sum(
            len(d.tokens) for d in two_concept_docs
        )


class TestFoldIn:
    def test_native_document_on_simplex(self, model, two_concept_docs):
        theta = model.embed_document(two_concept_docs[0].tokens, "native")
        assert theta.shape == (2,)
        assert np.all(theta >= 0.0)
        assert theta.sum() == pytest.approx(1.0, abs=1e-9)

    def test_fold_in_deterministic(self, model, two_concept_docs):
        tokens = two_concept_docs[0].tokens
        a = model.embed_document(tokens, "native")
        b = model.embed_document(tokens, "native")
        np.testing.assert_array_equal(a, b)

    def test_fold_in_tracks_concept(self, sharp_model, two_concept_docs):
        # a document of concept words should land mostly on that
        # concept's dominant topic
        doc0 = next(d for d in two_concept_docs if "concept0" in d.tags)
        doc1 = next(d for d in two_concept_docs if "concept1" in d.tags)
        t0 = sharp_model.embed_document(doc0.tokens, "native")
        t1 = sharp_model.embed_document(doc1.tokens, "native")
        assert int(np.argmax(t0)) != int(np.argmax(t1))

    def test_all_oov_rejected(self, model):
        with pytest.raises(AllOOVError):
            model.embed_document(["zeppelin"], "native")

    def test_mean_aggregation_also_works(self, model, two_concept_docs):
        out = model.embed_document(two_concept_docs[0].tokens, "mean")
        assert out.shape == (2,)
        assert out.sum() == pytest.approx(1.0, abs=1e-6)
