import json
import math
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from citescope.errors import (
    CorpusError,
    EmptyReferenceSetError,
    ProviderError,
    ZeroVectorError,
)
from citescope.model import ReferenceEntry
from citescope.relatedness import (
    EmbeddingVector,
    HashedBagOfWordsEmbedder,
    HttpProvider,
    Missing,
    RelatednessRecord,
    VectorFileProvider,
    cosine,
    make_provider,
    ochiai,
    reference_relatedness,
    relatedness_profile,
    textual_relatedness,
)

import oracles
from conftest import make_doc, make_target


def vec(values, source_id="v"):
    return EmbeddingVector(values=tuple(values), source_id=source_id)


# --- cosine -------------------------------------------------------------------


def test_cosine_self_similarity():
    u = vec([0.3, -1.2, 0.5])
    assert cosine(u, u) == pytest.approx(1.0, abs=1e-6)


def test_cosine_orthogonal():
    assert cosine(vec([1, 0]), vec([0, 1])) == 0.0


def test_cosine_zero_vector_raises():
    with pytest.raises(ZeroVectorError):
        cosine(vec([0.0, 0.0]), vec([1.0, 0.0]))


def test_cosine_dimension_mismatch():
    with pytest.raises(ValueError):
        cosine(vec([1.0]), vec([1.0, 2.0]))


def test_cosine_matches_exact_oracle_on_random_pairs():
    rng = random.Random(50)
    for _ in range(50):
        dim = rng.randint(2, 64)
        u = [rng.uniform(-3, 3) for _ in range(dim)]
        v = [rng.uniform(-3, 3) for _ in range(dim)]
        got = cosine(vec(u), vec(v))
        assert got == pytest.approx(oracles.fraction_cosine(u, v), abs=1e-9)
        assert abs(got) <= 1.0 + 1e-12


# --- ochiai --------------------------------------------------------------------


def test_ochiai_hand_case():
    a = {f"a{i}" for i in range(4)}
    b = {f"b{i}" for i in range(7)} | {"a0", "a1"}
    assert len(b) == 9
    assert ochiai(a, b) == pytest.approx(1 / 3)


def test_ochiai_identity_and_disjoint():
    a = {"x", "y"}
    assert ochiai(a, set(a)) == 1.0
    assert ochiai(a, {"z"}) == 0.0


def test_ochiai_empty_set_raises():
    with pytest.raises(EmptyReferenceSetError):
        ochiai(set(), {"x"})


def test_ochiai_symmetric_and_bounded():
    rng = random.Random(51)
    universe = [f"w{i}" for i in range(40)]
    for _ in range(50):
        a = set(rng.sample(universe, rng.randint(1, 20)))
        b = set(rng.sample(universe, rng.randint(1, 20)))
        got = ochiai(a, b)
        assert got == ochiai(b, a)
        assert 0.0 <= got <= 1.0
        assert got == pytest.approx(oracles.brute_force_ochiai(a, b), abs=0)


def test_ochiai_one_iff_equal_sets():
    a = {"x", "y", "z"}
    assert ochiai(a, set(a)) == pytest.approx(1.0)
    assert ochiai(a, {"x", "y"}) < 1.0


# --- test embedder ----------------------------------------------------------------


def test_hashed_embedder_deterministic():
    provider = HashedBagOfWordsEmbedder()
    a = provider.embed([("x", "some scholarly text")])[0]
    b = provider.embed([("x", "some scholarly text")])[0]
    assert a == b


def test_hashed_embedder_unit_norm():
    provider = HashedBagOfWordsEmbedder()
    v = provider.embed([("x", "tokens appear here repeatedly tokens")])[0]
    norm = math.sqrt(sum(c * c for c in v.values))
    assert norm == pytest.approx(1.0, abs=1e-6)


def test_hashed_embedder_word_order_invariant():
    provider = HashedBagOfWordsEmbedder()
    a = provider.embed([("x", "alpha beta gamma")])[0]
    b = provider.embed([("x", "gamma alpha beta")])[0]
    assert a.values == b.values


# --- file provider ------------------------------------------------------------------


def test_file_provider_roundtrip(tmp_path):
    path = tmp_path / "vectors.tsv"
    path.write_text("A\t1.0,0.0\nB\t0.5,0.5\n", encoding="utf-8")
    provider = VectorFileProvider(str(path))
    a, b, missing = provider.embed([("A", ""), ("B", ""), ("C", "")])
    assert a.values == (1.0, 0.0)
    assert b.values == (0.5, 0.5)
    assert missing is None


def test_file_provider_rejects_ragged_dimensions(tmp_path):
    path = tmp_path / "vectors.tsv"
    path.write_text("A\t1.0,0.0\nB\t0.5\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        VectorFileProvider(str(path))


def test_make_provider_specs(tmp_path):
    assert make_provider("test").info()["provider"] == "test-hash"
    path = tmp_path / "v.tsv"
    path.write_text("A\t1,2\n", encoding="utf-8")
    assert make_provider(f"file:{path}").info()["provider"] == "file"
    assert make_provider("url:http://localhost:1/embed").info()["provider"] == "url"
    with pytest.raises(CorpusError):
        make_provider("magic")


# --- http provider against a stub service ----------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    calls: list[int] = []
    fail_next = 0

    def do_POST(self):
        if self.path != "/embed":
            self.send_error(404)
            return
        if _StubHandler.fail_next > 0:
            _StubHandler.fail_next -= 1
            self.send_error(503)
            return
        length = int(self.headers["Content-Length"])
        texts = json.loads(self.rfile.read(length))["texts"]
        _StubHandler.calls.append(len(texts))
        vectors = []
        for text in texts:
            total = sum(ord(c) for c in text) or 1
            vectors.append([len(text) / total, 1.0, float(len(text))])
        body = json.dumps({"dim": 3, "vectors": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.calls = []
    _StubHandler.fail_next = 0
    yield f"http://127.0.0.1:{server.server_address[1]}/embed"
    server.shutdown()


def test_http_provider_batch_equals_singletons(stub_server):
    texts = [f"text number {i}" for i in range(20)]
    batched = HttpProvider(stub_server).embed([(f"id{i}", t) for i, t in enumerate(texts)])
    single_provider = HttpProvider(stub_server, batch_size=1)
    singles = [single_provider.embed([(f"id{i}", t)])[0] for i, t in enumerate(texts)]
    assert [v.values for v in batched] == [v.values for v in singles]


def test_http_provider_retries_transport_errors(stub_server):
    _StubHandler.fail_next = 0
    provider = HttpProvider(stub_server, retries=2)
    out = provider.embed([("a", "alpha")])
    assert out[0].values[1] == 1.0


def test_http_provider_unreachable_raises():
    provider = HttpProvider("http://127.0.0.1:9/embed", retries=0, timeout=0.2)
    with pytest.raises(ProviderError):
        provider.embed([("a", "alpha")])


def test_caching_provider_deduplicates(stub_server):
    provider = make_provider(f"url:{stub_server}")
    provider.embed([("a", "alpha"), ("b", "beta")])
    provider.embed([("a", "alpha"), ("c", "gamma")])
    assert sum(_StubHandler.calls) == 3  # a and b, then only c


# --- pairwise relatedness ------------------------------------------------------------


def test_textual_identical_text_scores_one():
    provider = make_provider("test")
    target = make_target(title="same words here", abstract="matching abstract body")
    doc = make_doc("Body.", [], title="same words here", abstract="matching abstract body")
    got = textual_relatedness(target, doc, provider)
    assert got == pytest.approx(1.0, abs=1e-6)


def test_textual_missing_on_empty_abstract():
    provider = make_provider("test")
    target = make_target()
    doc = make_doc("Body.", [], abstract="")
    got = textual_relatedness(target, doc, provider)
    assert got == Missing("empty-abstract")


def test_textual_missing_when_vector_unavailable(tmp_path):
    path = tmp_path / "v.tsv"
    path.write_text("T1\t1.0,0.0\n", encoding="utf-8")
    provider = make_provider(f"file:{path}")
    got = textual_relatedness(make_target(), make_doc("Body.", []), provider)
    assert got == Missing("embedding-unavailable")


def coupling_doc(cited_ids, include_target=False, target_id="T1"):
    refs = [
        ReferenceEntry(key=str(i + 1), raw="r", cited_id=cid)
        for i, cid in enumerate(cited_ids)
    ]
    if include_target:
        refs.append(ReferenceEntry(key="t", raw="t", cited_id=target_id))
    return make_doc("Body.", refs)


def test_reference_relatedness_full_overlap():
    target = make_target(reference_ids=("r1", "r2", "r3", "r4", "r5"))
    doc = coupling_doc(["r1", "r2", "r3", "r4", "r5"])
    assert reference_relatedness(target, doc) == pytest.approx(1.0)


def test_reference_relatedness_disjoint():
    target = make_target(reference_ids=("r1", "r2"))
    doc = coupling_doc(["x1", "x2"])
    assert reference_relatedness(target, doc) == 0.0


def test_reference_relatedness_missing_reasons():
    empty_target = make_target(reference_ids=())
    assert reference_relatedness(empty_target, coupling_doc(["x"])) == Missing("missing-basis")
    target = make_target()
    no_ids = coupling_doc([None, None])
    assert reference_relatedness(target, no_ids) == Missing("no-coupling-basis")


def test_reference_relatedness_excludes_target_id_by_default():
    target = make_target(reference_ids=("r1", "r2", "r3", "r4"))
    doc = coupling_doc(["r1", "r2"], include_target=True)
    excluded = reference_relatedness(target, doc, exclude_target=True)
    included = reference_relatedness(target, doc, exclude_target=False)
    assert excluded == pytest.approx(2 / math.sqrt(4 * 2))
    assert included == pytest.approx(2 / math.sqrt(4 * 3))
    assert excluded > included


def test_reference_relatedness_matches_brute_force():
    rng = random.Random(52)
    universe = [f"w{i}" for i in range(30)]
    for _ in range(50):
        basis = rng.sample(universe, rng.randint(1, 15))
        cited = rng.sample(universe, rng.randint(1, 15))
        target = make_target(reference_ids=tuple(basis))
        doc = coupling_doc(cited)
        got = reference_relatedness(target, doc)
        assert got == pytest.approx(oracles.brute_force_ochiai(set(basis), set(cited)), abs=0)


# --- profile -----------------------------------------------------------------------------


def record(year, textual, bib):
    return RelatednessRecord(
        doc_id="D",
        target_id="T",
        citing_year=year,
        textual=textual,
        textual_reason=None if textual is not None else "empty-abstract",
        bibliographic=bib,
        bibliographic_reason=None if bib is not None else "no-coupling-basis",
    )


def test_profile_means_and_counts():
    rows = relatedness_profile([record(2005, 0.2, 0.1), record(2005, 0.4, None)])
    row = rows[0]
    assert row.mean_textual == pytest.approx(0.3)
    assert row.n_textual == 2
    assert row.mean_bibliographic == pytest.approx(0.1)
    assert row.n_bibliographic == 1


def test_profile_missing_never_contributes():
    rows = relatedness_profile(
        [record(2005, None, 0.5), record(2005, 0.8, 0.5), record(2006, 0.1, None)]
    )
    assert rows[0].n_textual == 1
    assert rows[0].mean_textual == pytest.approx(0.8)
    assert rows[1].mean_bibliographic is None
    assert rows[1].n_bibliographic == 0


def test_planted_coupling_decay_strictly_decreasing(aging_corpus):
    corpus, _ = aging_corpus
    gt = corpus.ground_truth["per_year"]
    means = [gt[str(y)]["realized"]["mean_bibliographic"] for y in range(2000, 2017)]
    assert all(b < a for a, b in zip(means, means[1:]))
