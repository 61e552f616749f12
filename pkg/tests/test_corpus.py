import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointspace.corpus import (
    Document,
    PairDataset,
    build_vocabulary,
    generate_synthetic,
    inject_caption_noise,
    load_pairs,
    read_features,
    save_pairs,
    tfidf_weights,
    tokenize,
    write_features,
)
from jointspace.errors import (
    AllOOVError,
    DatasetFormatError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyVocabularyError,
)


class TestTokenize:
    def test_caption_with_hashtag_and_url(self):
        assert tokenize("Skyline at Night! #nyc http://t.co/x") == [
            "skyline",
            "at",
            "night",
            "nyc",
        ]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_punctuation_splits(self):
        assert tokenize("SNOW+ski, snow") == ["snow", "ski", "snow"]

    def test_https_url_removed(self):
        assert tokenize("look https://example.com/a?b=1 here") == ["look", "here"]

    def test_at_prefix_stripped(self):
        assert tokenize("@alice waves") == ["alice", "waves"]

    @given(st.text(max_size=80))
    def test_idempotent_on_own_output(self, raw):
        once = tokenize(raw)
        assert tokenize(" ".join(once)) == once

    @given(st.text(max_size=80))
    def test_tokens_lowercase_alnum(self, raw):
        for tok in tokenize(raw):
            assert tok
            assert tok == tok.lower()
            assert all(c.isalnum() for c in tok)


def docs_from_token_lists(token_lists):
    return [
        Document(id=f"d{i}", raw=" ".join(ts), tokens=tuple(ts))
        for i, ts in enumerate(token_lists)
    ]


class TestVocabulary:
    CORPUS = [["cat", "cat", "dog"], ["dog"], ["bird"]]

    def test_min_count_two_keeps_cat_and_dog(self):
        vocab = build_vocabulary(docs_from_token_lists(self.CORPUS), min_count=2)
        assert set(vocab.tokens) == {"cat", "dog"}
        assert vocab.counts == {"cat": 2, "dog": 2}
        assert vocab.doc_freq == {"cat": 1, "dog": 2}

    def test_min_count_one_keeps_all(self):
        vocab = build_vocabulary(docs_from_token_lists(self.CORPUS), min_count=1)
        assert len(vocab) == 3
        assert vocab.n_docs == 3

    def test_all_filtered_raises(self):
        with pytest.raises(EmptyVocabularyError):
            build_vocabulary(docs_from_token_lists(self.CORPUS), min_count=10)

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyVocabularyError):
            build_vocabulary([], min_count=1)

    def test_index_invariant_under_doc_order(self):
        a = build_vocabulary(docs_from_token_lists(self.CORPUS), min_count=1)
        b = build_vocabulary(docs_from_token_lists(self.CORPUS[::-1]), min_count=1)
        assert a.index == b.index

    def test_index_orders_by_count_then_token(self):
        vocab = build_vocabulary(
            docs_from_token_lists([["b", "b", "a", "a", "c"]]), min_count=1
        )
        assert vocab.tokens == ["a", "b", "c"]

    def test_token_lists_accepted_directly(self):
        vocab = build_vocabulary(self.CORPUS, min_count=2)
        assert set(vocab.tokens) == {"cat", "dog"}


class TestTfidf:
    def test_hand_example(self):
        vocab = build_vocabulary(docs_from_token_lists(TestVocabulary.CORPUS), min_count=1)
        assert vocab.idf("cat") == pytest.approx(math.log(4 / 2) + 1)
        assert vocab.idf("dog") == pytest.approx(math.log(4 / 3) + 1)
        w = tfidf_weights(["cat", "cat", "dog"], vocab)
        # brute-force hand values from the stated formula
        assert w["cat"] == pytest.approx(0.7244996651667359, abs=1e-12)
        assert w["dog"] == pytest.approx(0.275500334833264, abs=1e-12)

    def test_single_token_doc(self):
        vocab = build_vocabulary(docs_from_token_lists(TestVocabulary.CORPUS), min_count=1)
        assert tfidf_weights(["dog"], vocab) == {"dog": 1.0}

    def test_all_oov_raises(self):
        vocab = build_vocabulary(docs_from_token_lists(TestVocabulary.CORPUS), min_count=1)
        with pytest.raises(AllOOVError):
            tfidf_weights(["whale", "squid"], vocab)

    def test_oov_tokens_carry_zero_weight(self):
        vocab = build_vocabulary(docs_from_token_lists(TestVocabulary.CORPUS), min_count=1)
        w = tfidf_weights(["cat", "whale"], vocab)
        assert w["whale"] == 0.0
        assert w["cat"] == 1.0

    @given(
        st.lists(
            st.sampled_from(["cat", "dog", "bird", "oov1", "oov2"]),
            min_size=1,
            max_size=12,
        )
    )
    def test_weights_sum_to_one_and_nonnegative(self, tokens):
        vocab = build_vocabulary(docs_from_token_lists(TestVocabulary.CORPUS), min_count=1)
        if not any(t in vocab for t in tokens):
            with pytest.raises(AllOOVError):
                tfidf_weights(tokens, vocab)
            return
        w = tfidf_weights(tokens, vocab)
        assert sum(w.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(v >= 0.0 for v in w.values())


def tiny_dataset():
    docs = [
        Document.from_raw("a", "red square", tags=("red",)),
        Document.from_raw("b", "blue circle", tags=("blue",)),
    ]
    feats = {
        "a": np.array([1.0, 0.0, 2.0]),
        "b": np.array([0.0, 1.0, -1.0]),
    }
    return PairDataset(docs, feats)


class TestPairDatasetIO:
    def test_round_trip(self, tmp_path):
        ds = tiny_dataset()
        rec, feat = tmp_path / "ds.jsonl", tmp_path / "ds.feat"
        save_pairs(ds, rec, feat)
        loaded = load_pairs(rec, feat)
        assert len(loaded) == 2
        assert loaded[0].id == "a"
        assert loaded[0].tokens == ("red", "square")
        assert loaded[0].tags == frozenset({"red"})
        np.testing.assert_allclose(loaded.features["a"], ds.features["a"], atol=1e-6)
        assert loaded.feature_dim == 3

    def test_feat_round_trip_exact_float32(self, tmp_path):
        path = tmp_path / "x.feat"
        vecs = np.array([[0.1, 0.2], [3.5, -7.25]], dtype=np.float32)
        write_features(path, ["p", "q"], vecs)
        out = read_features(path)
        assert out["p"].tobytes() == vecs[0].tobytes()
        assert out["q"].tobytes() == vecs[1].tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.feat"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(DatasetFormatError, match="magic"):
            read_features(path)

    def test_truncated_feature_record(self, tmp_path):
        path = tmp_path / "x.feat"
        write_features(path, ["p"], np.ones((1, 4), dtype=np.float32))
        data = path.read_bytes()
        path.write_bytes(data[:-3])
        with pytest.raises(DatasetFormatError, match="truncated"):
            read_features(path)

    def test_malformed_record_reports_line(self, tmp_path):
        ds = tiny_dataset()
        rec, feat = tmp_path / "ds.jsonl", tmp_path / "ds.feat"
        save_pairs(ds, rec, feat)
        lines = rec.read_text().splitlines()
        lines.insert(1, "{not json")
        rec.write_text("\n".join(lines) + "\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_pairs(rec, feat)

    def test_missing_feature_for_id(self, tmp_path):
        ds = tiny_dataset()
        rec, feat = tmp_path / "ds.jsonl", tmp_path / "ds.feat"
        save_pairs(ds, rec, feat)
        with open(rec, "a", encoding="utf-8") as fh:
            fh.write('{"id": "c", "caption": "green dot"}\n')
        with pytest.raises(DatasetFormatError, match="c"):
            load_pairs(rec, feat)

    def test_duplicate_id_rejected(self, tmp_path):
        ds = tiny_dataset()
        rec, feat = tmp_path / "ds.jsonl", tmp_path / "ds.feat"
        save_pairs(ds, rec, feat)
        lines = rec.read_text().splitlines()
        rec.write_text("\n".join(lines + [lines[0]]) + "\n")
        with pytest.raises(DuplicateIdError):
            load_pairs(rec, feat)

    def test_extra_feature_ids_rejected(self, tmp_path):
        ds = tiny_dataset()
        rec, feat = tmp_path / "ds.jsonl", tmp_path / "ds.feat"
        save_pairs(ds, rec, feat)
        write_features(feat, ["a", "b", "zz"], np.ones((3, 3), dtype=np.float32))
        with pytest.raises(DatasetFormatError, match="zz"):
            load_pairs(rec, feat)

    def test_mixed_dims_rejected_in_constructor(self):
        docs = [Document.from_raw("a", "x"), Document.from_raw("b", "y")]
        feats = {"a": np.ones(3), "b": np.ones(4)}
        with pytest.raises(DimensionMismatchError):
            PairDataset(docs, feats)

    def test_duplicate_doc_ids_rejected_in_constructor(self):
        docs = [Document.from_raw("a", "x"), Document.from_raw("a", "y")]
        with pytest.raises(DuplicateIdError):
            PairDataset(docs, {"a": np.ones(3)})


class TestCaptionNoise:
    def make_ds(self, n):
        docs = [
            Document.from_raw(f"d{i}", f"unique caption number {i}", tags=(f"t{i}",))
            for i in range(n)
        ]
        feats = {f"d{i}": np.full(2, float(i)) for i in range(n)}
        return PairDataset(docs, feats)

    def test_fraction_zero_is_identity(self):
        ds = self.make_ds(10)
        out = inject_caption_noise(ds, 0.0, seed=0)
        assert [d.raw for d in out.documents] == [d.raw for d in ds.documents]

    def test_exact_replacement_count(self):
        ds = self.make_ds(1000)
        out = inject_caption_noise(ds, 0.1, seed=0)
        changed = sum(
            1 for a, b in zip(ds.documents, out.documents) if a.raw != b.raw
        )
        assert changed == 100

    def test_fraction_one_replaces_all_with_other_captions(self):
        ds = self.make_ds(10)
        out = inject_caption_noise(ds, 1.0, seed=0)
        for orig, noisy in zip(ds.documents, out.documents):
            assert noisy.raw != orig.raw
            assert noisy.raw in {d.raw for d in ds.documents}

    def test_tags_features_ids_untouched(self):
        ds = self.make_ds(10)
        out = inject_caption_noise(ds, 1.0, seed=0)
        for orig, noisy in zip(ds.documents, out.documents):
            assert noisy.id == orig.id
            assert noisy.tags == orig.tags
            np.testing.assert_array_equal(out.features[noisy.id], ds.features[orig.id])

    def test_deterministic_per_seed(self):
        ds = self.make_ds(50)
        a = inject_caption_noise(ds, 0.3, seed=7)
        b = inject_caption_noise(ds, 0.3, seed=7)
        c = inject_caption_noise(ds, 0.3, seed=8)
        assert [d.raw for d in a.documents] == [d.raw for d in b.documents]
        assert [d.raw for d in a.documents] != [d.raw for d in c.documents]

    def test_rounding_is_half_up(self):
        ds = self.make_ds(10)
        out = inject_caption_noise(ds, 0.25, seed=0)  # round(2.5) -> 3
        changed = sum(
            1 for a, b in zip(ds.documents, out.documents) if a.raw != b.raw
        )
        assert changed == 3

    def test_bad_fraction_rejected(self):
        ds = self.make_ds(4)
        with pytest.raises(ValueError):
            inject_caption_noise(ds, 1.5, seed=0)

    @given(st.integers(0, 2**16), st.sampled_from([0.1, 0.5, 0.9]))
    def test_replacement_count_property(self, seed, fraction):
        ds = self.make_ds(20)
        out = inject_caption_noise(ds, fraction, seed=seed)
        changed = sum(
            1 for a, b in zip(ds.documents, out.documents) if a.raw != b.raw
        )
        assert changed == int(math.floor(fraction * 20 + 0.5))


class TestGenerateSynthetic:
    def test_counts_and_tags(self):
        ds = generate_synthetic(2, 3, 4, seed=0)
        assert len(ds) == 6
        assert {t for d in ds.documents for t in d.tags} == {"concept0", "concept1"}

    def test_disjoint_concept_vocabularies(self):
        ds = generate_synthetic(3, 10, 4, seed=0)
        by_tag = {}
        for doc in ds.documents:
            tag = next(iter(doc.tags))
            by_tag.setdefault(tag, set()).update(doc.tokens)
        tags = sorted(by_tag)
        for i in range(len(tags)):
            for j in range(i + 1, len(tags)):
                assert not by_tag[tags[i]] & by_tag[tags[j]]

    def test_doc_length_bounds(self):
        ds = generate_synthetic(2, 50, 4, seed=1)
        for doc in ds.documents:
            assert 3 <= len(doc.tokens) <= 8

    def test_zero_noise_gives_identical_features_per_concept(self):
        ds = generate_synthetic(2, 4, 4, noise_sigma=0.0, seed=0)
        first = {}
        for doc in ds.documents:
            tag = next(iter(doc.tags))
            feat = ds.features[doc.id]
            if tag in first:
                np.testing.assert_array_equal(feat, first[tag])
            else:
                first[tag] = feat

    def test_deterministic(self):
        a = generate_synthetic(2, 5, 4, seed=3)
        b = generate_synthetic(2, 5, 4, seed=3)
        assert [d.raw for d in a.documents] == [d.raw for d in b.documents]
        for doc in a.documents:
            assert a.features[doc.id].tobytes() == b.features[doc.id].tobytes()

    def test_parameter_violations(self):
        with pytest.raises(ValueError):
            generate_synthetic(1, 5, 4)
        with pytest.raises(ValueError):
            generate_synthetic(2, 0, 4)
        with pytest.raises(ValueError):
            generate_synthetic(4, 5, 2)
