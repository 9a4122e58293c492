import json

import pytest

from citescope.errors import ScenarioError
from citescope.model import load_corpus, load_targets, validate_document
from citescope.pipeline import run_analysis
from citescope.synth import (
    SyntheticCorpus,
    load_scenario,
    parse_scenario,
    quota_counts,
    write_corpus,
)

from conftest import data_path, run_config, write_scenario


def tiny_scenario(**year_overrides):
    year = {
        "year": 2005,
        "documents": 12,
        "mean_location": 0.45,
        "location_spread": 0.1,
        "mention_counts": {"1": 0.7, "2": 0.3},
        "citation_sizes": {"1": 0.8, "2": 0.2},
        "vocab_overlap": 0.4,
        "coupling_overlap": 0.25,
        "filler_citations": 2,
        "targets_per_doc": 1,
    }
    year.update(year_overrides)
    return {
        "name": "tiny",
        "targets": {"count": 2, "references_per_target": 8, "year": 2000},
        "body": {"chars": 600, "sentence_words": 7},
        "styles": {"numeric": 0.5, "parenthetical": 0.3, "narrative": 0.2},
        "years": [year],
    }


def test_quota_counts_largest_remainder():
    counts = quota_counts({1: 0.5, 2: 0.3, 3: 0.2}, 10)
    assert counts == {1: 5, 2: 3, 3: 2}
    counts = quota_counts({1: 1 / 3, 2: 1 / 3, 3: 1 / 3}, 10)
    assert sum(counts.values()) == 10


def test_same_seed_same_bytes(tmp_path):
    scenario = load_scenario(data_path("scenarios/flat.json"))
    a = write_corpus(SyntheticCorpus(scenario, seed=42), tmp_path / "a")
    b = write_corpus(SyntheticCorpus(scenario, seed=42), tmp_path / "b")
    for key in a:
        assert open(a[key], "rb").read() == open(b[key], "rb").read()


def test_different_seed_different_bytes(tmp_path):
    scenario = load_scenario(data_path("scenarios/flat.json"))
    a = write_corpus(SyntheticCorpus(scenario, seed=1), tmp_path / "a")
    b = write_corpus(SyntheticCorpus(scenario, seed=2), tmp_path / "b")
    assert open(a["corpus"], "rb").read() != open(b["corpus"], "rb").read()


def test_generated_documents_validate(tmp_path):
    corpus = SyntheticCorpus(parse_scenario(tiny_scenario()), seed=3)
    for doc in corpus.documents:
        assert [f for f in validate_document(doc) if f.severity == "error"] == []


def test_generated_files_load_cleanly(tmp_path):
    corpus = SyntheticCorpus(parse_scenario(tiny_scenario()), seed=3)
    paths = write_corpus(corpus, tmp_path)
    docs = list(load_corpus(paths["corpus"]))
    targets = load_targets(paths["targets"])
    assert len(docs) == 12
    assert len(targets) == 2
    truth = json.loads(open(paths["ground_truth"], encoding="utf-8").read())
    assert truth["rng"] == "python-random-mt19937"
    assert truth["seed"] == 3


@pytest.mark.parametrize(
    "mutate,path_fragment",
    [
        (lambda s: s["years"][0].update(mean_location=1.5), "years[0].mean_location"),
        (lambda s: s["years"][0].update(mention_counts={"1": 0.5}), "years[0].mention_counts"),
        (lambda s: s["years"][0].update(documents=0), "years[0].documents"),
        (lambda s: s["targets"].update(count=0), "targets.count"),
        (lambda s: s.update(styles={"numeric": 0.5}), "styles"),
        (lambda s: s["years"][0].update(targets_per_doc=9), "years[0].targets_per_doc"),
        (
            lambda s: s["years"][0].update(citation_sizes={"0": 1.0}),
            "years[0].citation_sizes.0",
        ),
    ],
)
def test_scenario_validation_reports_field_path(mutate, path_fragment):
    record = tiny_scenario()
    mutate(record)
    with pytest.raises(ScenarioError, match=__import__("re").escape(path_fragment)):
        parse_scenario(record)


def test_scenario_unreadable_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(str(tmp_path / "missing.json"))


def test_flat_schedule_yields_flat_profiles(flat_corpus, lexicon_path):
    corpus, paths = flat_corpus
    report, _ = run_analysis(run_config(paths, lexicon_path))
    gt = corpus.ground_truth["per_year"]
    planted_loc = {int(y): v["planted"]["mean_location"] for y, v in gt.items()}
    for row in report.rows:
        assert row.location.mean_progression == pytest.approx(
            planted_loc[row.group_key], abs=0.02
        )
    locs = [row.location.mean_progression for row in report.rows]
    mmrs = [row.mentions.pct_mmr for row in report.rows]
    assert max(locs) - min(locs) < 0.02
    assert max(mmrs) - min(mmrs) < 2.0


def test_analysis_counts_match_ground_truth_exactly(flat_corpus, lexicon_path):
    corpus, paths = flat_corpus
    _, summary = run_analysis(run_config(paths, lexicon_path))
    gt = corpus.ground_truth["totals"]
    for scope, stats in (("all", summary["stats_all"]), ("targets", summary["stats_targets"])):
        for key in (
            "documents",
            "references",
            "reference_mentions",
            "in_text_citations",
            "citation_sentences",
        ):
            assert stats[key] == gt[scope][key], (scope, key)


def test_unmentioned_mass_produces_unmentioned_refs(tmp_path):
    record = tiny_scenario(mention_counts={"0": 0.25, "1": 0.5, "2": 0.25})
    corpus = SyntheticCorpus(parse_scenario(record), seed=4)
    year = corpus.ground_truth["per_year"]["2005"]["realized"]
    assert year["unmentioned"] == 3  # quota of 25% over 12 slots
