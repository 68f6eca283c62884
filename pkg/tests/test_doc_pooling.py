import numpy as np
import pytest

from lawdr import doc_pooling as dp
from lawdr.corpus_store import CorpusManifest, DocumentRecord, EmbeddingMatrix
from lawdr.density_weighting import compute_weights
from lawdr.errors import PoolingError, RowCountMismatch, WeightRowMismatch


def corpus(rng, counts, dim=4):
    rows = sum(counts)
    data = rng.standard_normal((rows, dim)).astype(np.float32)
    docs = []
    start = 0
    for i, c in enumerate(counts):
        docs.append(DocumentRecord(f"d{i}", start, c))
        start += c
    return EmbeddingMatrix(dim, data), CorpusManifest("aa", tuple(docs))


def test_mean_pooling_matches_hand_computation():
    rng = np.random.default_rng(0)
    m, man = corpus(rng, [2, 3])
    docs = dp.pool_mean(m, man, normalize=False)
    assert docs.doc_ids == ("d0", "d1")
    assert np.allclose(docs.data[0], m.data[:2].astype(np.float64).mean(axis=0))
    assert np.allclose(docs.data[1], m.data[2:].astype(np.float64).mean(axis=0))
    assert docs.pooling == "mean" and docs.normalized is False


def test_weighted_pooling_matches_loop_oracle():
    rng = np.random.default_rng(1)
    m, man = corpus(rng, [3, 1, 4])
    w = rng.uniform(0.1, 1.0, m.rows)
    docs = dp.pool_weighted(m, man, w, normalize=False)
    start = 0
    for row, doc in enumerate(man.docs):
        expect = np.zeros(m.dim)
        for s in range(doc.sentence_count):
            expect = expect + w[start + s] * m.data[start + s].astype(np.float64)
        start += doc.sentence_count
        assert np.allclose(docs.data[row], expect, atol=1e-12)


def test_normalization_default_gives_unit_rows():
    rng = np.random.default_rng(2)
    m, man = corpus(rng, [2, 2, 2])
    docs = dp.pool_mean(m, man)
    assert np.allclose(np.linalg.norm(docs.data, axis=1), 1.0)
    assert docs.normalized is True


def test_uniform_weights_agree_with_mean_after_normalization():
    rng = np.random.default_rng(3)
    m, man = corpus(rng, [3, 5])
    a = dp.pool_mean(m, man).data
    b = dp.pool_weighted(m, man, np.full(m.rows, 0.37), normalize=True).data
    assert np.allclose(a, b, atol=1e-12)


def test_weighted_accepts_sentence_weights_object():
    rng = np.random.default_rng(4)
    m, man = corpus(rng, [4, 4])
    sw = compute_weights(rng.uniform(0.5, 2.0, m.rows))
    docs = dp.pool_weighted(m, man, sw)
    assert docs.count == 2


def test_weight_row_mismatch():
    rng = np.random.default_rng(5)
    m, man = corpus(rng, [2, 2])
    with pytest.raises(WeightRowMismatch):
        dp.pool_weighted(m, man, np.ones(3))


def test_manifest_must_cover_matrix():
    rng = np.random.default_rng(6)
    m, _ = corpus(rng, [4])
    short = CorpusManifest("aa", (DocumentRecord("d0", 0, 3),))
    with pytest.raises(RowCountMismatch):
        dp.pool_mean(m, short)


def test_zero_document_stays_zero(caplog):
    data = np.zeros((2, 3), dtype=np.float32)
    data[1] = [1.0, 0.0, 0.0]
    m = EmbeddingMatrix(3, data)
    man = CorpusManifest("aa", (DocumentRecord("d0", 0, 1), DocumentRecord("d1", 1, 1)))
    with caplog.at_level("WARNING", logger="lawdr.doc_pooling"):
        docs = dp.pool_mean(m, man)
    assert np.all(docs.data[0] == 0.0)
    assert np.allclose(docs.data[1], [1.0, 0.0, 0.0])
    assert any("zero" in r.message for r in caplog.records)


def test_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    m, man = corpus(rng, [2, 3, 1])
    docs = dp.pool_weighted(m, man, rng.uniform(0.1, 1.0, m.rows))
    path = tmp_path / "docs.emb"
    dp.save_doc_embeddings(docs, path)
    again = dp.load_doc_embeddings(path)
    assert again.doc_ids == docs.doc_ids
    assert again.pooling == "weighted" and again.normalized is True
    assert np.allclose(again.data, docs.data, atol=1e-6)


def test_load_rejects_inconsistent_sidecar(tmp_path):
    rng = np.random.default_rng(8)
    m, man = corpus(rng, [2, 2])
    docs = dp.pool_mean(m, man)
    path = tmp_path / "docs.emb"
    dp.save_doc_embeddings(docs, path)
    sidecar = path.with_name("docs.emb.json")
    sidecar.write_text(sidecar.read_text().replace('"d1"', '"d1", "d2"'))
    with pytest.raises(PoolingError):
        dp.load_doc_embeddings(path)
