import random
import threading

import pytest
from fastapi.testclient import TestClient

from embed_service.app import MAX_BATCH, create_app
from embed_service.backends import HashBackend, build_backend


@pytest.fixture(scope="module")
def client():
    app = create_app(model_spec="hash:96", load_in_background=False)
    with TestClient(app) as c:
        yield c


def test_health_ready(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["dim"] > 0
    assert body["model_id"] == "hash-v1:96"
    assert body["pooling"] == "bag-of-words-count"


def test_health_model_id_stable(client):
    ids = {client.get("/health").json()["model_id"] for _ in range(5)}
    assert len(ids) == 1


def test_health_503_before_ready():
    app = create_app(model_spec="hash:8", load_in_background=True)
    # do not enter the lifespan: the model has not loaded yet
    client = TestClient(app)
    response = client.get("/health")
    assert response.status_code == 503
    assert response.json()["status"] == "loading"
    assert client.post("/embed", json={"texts": ["x"]}).status_code == 503


def test_health_reports_load_error():
    app = create_app(model_spec="hash:0", load_in_background=False)
    with TestClient(app) as client:
        response = client.get("/health")
        assert response.status_code == 503
        assert response.json()["status"] == "error"


def test_embed_deterministic(client):
    a = client.post("/embed", json={"texts": ["alpha"]}).json()
    b = client.post("/embed", json={"texts": ["alpha"]}).json()
    assert a == b


def test_embed_batch_equals_singletons(client):
    texts = [f"text number {i} with tokens" for i in range(20)]
    batched = client.post("/embed", json={"texts": texts}).json()["vectors"]
    singles = [
        client.post("/embed", json={"texts": [t]}).json()["vectors"][0] for t in texts
    ]
    for u, v in zip(batched, singles):
        assert all(abs(a - b) <= 1e-6 for a, b in zip(u, v))


def test_embed_dim_matches_health(client):
    health_dim = client.get("/health").json()["dim"]
    body = client.post("/embed", json={"texts": ["a", "b"]}).json()
    assert body["dim"] == health_dim
    assert all(len(v) == health_dim for v in body["vectors"])


def test_embed_empty_list_is_400(client):
    assert client.post("/embed", json={"texts": []}).status_code == 400


def test_embed_oversize_batch_is_400_and_states_limit(client):
    response = client.post("/embed", json={"texts": ["x"] * (MAX_BATCH + 1)})
    assert response.status_code == 400
    assert str(MAX_BATCH) in response.json()["detail"]


def test_embed_blank_text_is_400(client):
    assert client.post("/embed", json={"texts": ["ok", "   "]}).status_code == 400


def test_embed_inference_failure_is_500_with_opaque_id():
    class Exploding(HashBackend):
        def embed(self, texts):
            raise RuntimeError("boom")

    app = create_app(backend=Exploding(dim=8), load_in_background=False)
    with TestClient(app) as client:
        response = client.post("/embed", json={"texts": ["x"]})
        assert response.status_code == 500
        assert "error_id" in response.json()["detail"]
        assert "boom" not in response.text


def test_fuzz_vector_count_equals_text_count(client):
    rng = random.Random(99)
    for _ in range(100):
        n = rng.randint(1, 40)
        texts = [f"word{rng.randint(0, 500)} and more" for _ in range(n)]
        body = client.post("/embed", json={"texts": texts}).json()
        assert len(body["vectors"]) == n
        assert all(len(v) == body["dim"] for v in body["vectors"])


def test_vectors_are_unnormalized_counts(client):
    body = client.post("/embed", json={"texts": ["one one one"]}).json()
    assert sum(body["vectors"][0]) == pytest.approx(3.0)


def test_build_backend_specs():
    assert build_backend("hash:12").dim == 12
    assert build_backend("hash").dim == 384
    with pytest.raises(ValueError):
        build_backend("hash:0")


def test_concurrent_requests_safe(client):
    errors = []

    def hit():
        try:
            response = client.post("/embed", json={"texts": ["alpha", "beta"]})
            assert response.status_code == 200
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=hit) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors == []
