import json

import pytest

from citescope.model import (
    CitingDocument,
    ReferenceEntry,
    Section,
    document_to_json,
    target_to_json,
)
from citescope.pipeline import RunConfig, collect_records, run_analysis

from conftest import make_doc, make_target, numeric_refs, write_jsonl


@pytest.fixture()
def small_corpus(tmp_path, lexicon_path):
    target = make_target("T1", year=2000, reference_ids=("r1", "r2"))
    normal = make_doc(
        "Cited here [1]. And again [1].",
        numeric_refs(2, cited={1: "T1", 2: "r1"}),
        doc_id="D-normal",
        year=2005,
    )
    empty = CitingDocument(
        id="D-empty",
        year=2005,
        title="no text retrieved",
        abstract="an abstract exists",
        sections=(Section(label="Body", text=""),),
        references=(ReferenceEntry(key="1", raw="x", cited_id="T1"),),
    )
    corpus = write_jsonl(
        tmp_path / "c.jsonl", [document_to_json(normal), document_to_json(empty)]
    )
    targets = write_jsonl(tmp_path / "t.jsonl", [target_to_json(target)])
    return RunConfig(corpus=corpus, targets=targets, lexicon=lexicon_path)


def test_empty_body_documents_excluded_from_metrics(small_corpus):
    records, _targets, extra = collect_records(small_corpus)
    assert extra["empty_body"] == 1
    doc_ids = {r.doc_id for r in records.locations}
    assert doc_ids == {"D-normal"}
    assert all(u.doc_id == "D-normal" for _y, u in records.ref_usages)
    assert all(r.doc_id == "D-normal" for r in records.relatedness)
    # corpus tallies also skip the empty-body document
    assert records.stats_all.documents == 1


def test_empty_body_documents_counted_in_coverage(small_corpus):
    report, summary = run_analysis(small_corpus)
    assert summary["documents"] == 2
    row = report.rows[0]
    assert row.coverage.citing_docs == 2
    assert row.coverage.docs_with_fulltext_pct == pytest.approx(50.0)


def test_metadata_carries_digests_and_audit(small_corpus):
    report, _ = run_analysis(small_corpus)
    meta = report.metadata
    assert len(meta["corpus_sha256"]) == 64
    assert len(meta["targets_sha256"]) == 64
    assert meta["provider"]["provider"] == "test-hash"
    assert meta["load"]["empty_body"] == 1
    assert meta["group_by"] == "year"


def test_jobs1_and_jobs2_records_identical(small_corpus):
    report1, _ = run_analysis(small_corpus)
    config2 = RunConfig(
        corpus=small_corpus.corpus,
        targets=small_corpus.targets,
        lexicon=small_corpus.lexicon,
        jobs=2,
    )
    report2, _ = run_analysis(config2)
    assert report1 == report2
