"""Acceptance suite: one test per release criterion, at fixed tolerances.

Each test prints exactly one "ACCEPTANCE <name>: PASS|FAIL" line (visible
with ``pytest -s``); tolerances are pinned here and nowhere else.
"""

import math
import random
import time

import pytest

from citescope.locations import text_progression
from citescope.parser import CitationParser, load_abbreviations, tally
from citescope.pipeline import RunConfig, run_analysis
from citescope.relatedness import (
    EmbeddingVector,
    HashedBagOfWordsEmbedder,
    cosine,
    ochiai,
)
from citescope.report import CSV_FILES, emit_csv, emit_json
from citescope.sentiment import ValenceLexicon, load_lexicon, score
from citescope.synth import SyntheticCorpus, load_scenario, parse_scenario, write_corpus

import oracles
from conftest import data_path, run_config


def criterion(name, body):
    try:
        body()
    except BaseException as exc:
        print(f"ACCEPTANCE {name}: FAIL ({exc})")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def fresh_parser():
    return CitationParser()


def analyzed(paths, lexicon_path, **overrides):
    report, summary = run_analysis(run_config(paths, lexicon_path, **overrides))
    return report, summary


def test_table1_ordering(demo_paths, flat_corpus, aging_corpus, lexicon_path):
    def body():
        corpora = [demo_paths, flat_corpus[1], aging_corpus[1]]
        for paths in corpora:
            _, summary = analyzed(paths, lexicon_path)
            st = summary["stats_targets"]
            assert (
                st["reference_mentions"]
                >= st["in_text_citations"]
                >= st["citation_sentences"]
            ), st

    criterion("table1-ordering", body)


def test_parser_oracle_equivalence(abbreviations):
    def body():
        scenario = load_scenario(data_path("scenarios/flat.json"))
        corpus = SyntheticCorpus(scenario, seed=1234)
        docs = corpus.documents[:100]
        assert len(docs) == 100
        parser = fresh_parser()
        started = time.perf_counter()
        for doc in docs:
            parsed = parser.extract(doc)
            naive = oracles.naive_parse(doc, abbreviations)
            assert len(parsed.citations) == len(naive["citations"])
            assert len(parsed.mentions) == len(naive["mentions"])
            assert len(parsed.citation_sentences) == len(naive["citation_sentences"])
            got = [(m.char_start, m.reference_key) for m in parsed.mentions]
            assert got == naive["mentions"]
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"

    criterion("parser-oracle-equivalence", body)


def test_location_formula(flat_corpus, lexicon_path, abbreviations):
    def body():
        corpus, paths = flat_corpus
        parser = fresh_parser()
        for doc in corpus.documents[:100]:
            parsed = parser.extract(doc)
            naive = oracles.naive_parse(doc, abbreviations)
            got = [text_progression(parsed, m) for m in parsed.mentions]
            expected = [offset / naive["n"] for offset, _ in naive["mentions"]]
            assert got == expected  # full precision, no tolerance
        report, _ = analyzed(paths, lexicon_path)
        for row in report.rows:
            total = row.location.pct_begin + row.location.pct_middle + row.location.pct_end
            assert abs(total - 100.0) <= 1e-9

    criterion("location-formula", body)


def test_location_trend_replication(lexicon_path, tmp_path):
    def body():
        started = time.perf_counter()
        scenario = load_scenario(data_path("scenarios/aging.json"))
        corpus = SyntheticCorpus(scenario, seed=42)
        paths = write_corpus(corpus, tmp_path / "aging")
        report, _ = analyzed(paths, lexicon_path)
        elapsed = time.perf_counter() - started
        gt = corpus.ground_truth["per_year"]
        years = [row.group_key for row in report.rows]
        assert years == list(range(2000, 2017))
        means = []
        for row in report.rows:
            assert row.location.n_mentions >= 1000
            planted = gt[str(row.group_key)]["planted"]["mean_location"]
            assert abs(row.location.mean_progression - planted) <= 0.02
            means.append(row.location.mean_progression)
        n = len(means)
        xbar = (n - 1) / 2
        ybar = sum(means) / n
        slope = sum((i - xbar) * (y - ybar) for i, y in enumerate(means)) / sum(
            (i - xbar) ** 2 for i in range(n)
        )
        assert slope < 0, f"fitted slope {slope}"
        assert elapsed < 30.0, f"took {elapsed:.2f}s"

    criterion("location-trend-replication", body)


def test_mention_citation_identities(demo_paths, flat_corpus, aging_corpus, lexicon_path):
    def body():
        for paths in (demo_paths, flat_corpus[1], aging_corpus[1]):
            report, _ = analyzed(paths, lexicon_path)
            for row in report.rows:
                if row.mentions:
                    assert abs(row.mentions.pct_smr + row.mentions.pct_mmr - 100.0) <= 1e-9
                    assert row.mentions.mean_mentions >= 1.0
                if row.citations:
                    assert abs(row.citations.pct_src + row.citations.pct_mrc - 100.0) <= 1e-9
                    assert row.citations.mean_refs_per_citation >= 1.0
        corpus, paths = aging_corpus
        report, _ = analyzed(paths, lexicon_path)
        gt = corpus.ground_truth["per_year"]
        for row in report.rows:
            planted = gt[str(row.group_key)]["planted"]
            assert abs(row.mentions.pct_mmr / 100 - planted["pct_mmr"] / 100) <= 0.02
            assert abs(row.citations.pct_mrc / 100 - planted["pct_mrc"] / 100) <= 0.02

    criterion("mention-citation-identities", body)


def test_sentiment_formula(lexicon):
    def body():
        empty = score("", lexicon)
        assert (empty.pos, empty.neu, empty.neg, empty.compound) == (0.0, 1.0, 0.0, 0.0)
        lone = ValenceLexicon(entries={"token": 2.0}, boosters={}, negators=frozenset())
        got = score("token", lone)
        assert abs(got.compound - 2 / math.sqrt(19)) <= 1e-9
        rng = random.Random(987)
        vocabulary = (
            list(lexicon.entries)
            + list(lexicon.boosters)
            + list(lexicon.negators)
            + ["cite", "method", "data", "but", "result", "the", "we"]
        )
        for _ in range(1000):
            words = [rng.choice(vocabulary) for _ in range(rng.randint(0, 24))]
            if rng.random() < 0.4:
                words.append("!" * rng.randint(1, 6))
            got = score(" ".join(words), lexicon)
            assert abs(got.pos + got.neu + got.neg - 1.0) <= 1e-6
            assert -1.0 <= got.compound <= 1.0
        shares = []
        for line in open(data_path("golden_sentences.tsv"), encoding="utf-8"):
            if line.startswith("#") or not line.strip():
                continue
            _, text = line.rstrip("\n").split("\t", 1)
            shares.append(score(text, lexicon).neu)
        assert len(shares) == 50
        assert sum(shares) / len(shares) > 0.9

    criterion("sentiment-formula", body)


def test_relatedness_formulas():
    def body():
        rng = random.Random(2024)
        universe = [f"w{i}" for i in range(60)]
        for _ in range(50):
            a = frozenset(rng.sample(universe, rng.randint(1, 30)))
            b = frozenset(rng.sample(universe, rng.randint(1, 30)))
            assert ochiai(a, b) == oracles.brute_force_ochiai(a, b)
        hand_a = frozenset(f"a{i}" for i in range(4))
        hand_b = frozenset([f"b{i}" for i in range(7)] + ["a0", "a1"])
        assert len(hand_b) == 9
        assert abs(ochiai(hand_a, hand_b) - 1 / 3) <= 1e-15
        embedder = HashedBagOfWordsEmbedder()
        v = embedder.embed([("x", "scholarly text about citation analysis")])[0]
        assert abs(cosine(v, v) - 1.0) <= 1e-6
        for _ in range(50):
            dim = rng.randint(2, 96)
            u = [rng.uniform(-2, 2) for _ in range(dim)]
            w = [rng.uniform(-2, 2) for _ in range(dim)]
            got = cosine(
                EmbeddingVector(tuple(u), "u"), EmbeddingVector(tuple(w), "w")
            )
            assert abs(got - oracles.fraction_cosine(u, w)) <= 1e-9

    criterion("relatedness-formulas", body)


def test_output_determinism(demo_paths, lexicon_path, tmp_path):
    def body():
        outputs = []
        for jobs, name in ((1, "a"), (4, "b")):
            report, _ = run_analysis(
                run_config(demo_paths, lexicon_path, jobs=jobs)
            )
            out = tmp_path / name
            emit_csv(report, out)
            emit_json(report, out / "report.json")
            outputs.append(out)
        for name in CSV_FILES + ("report.json",):
            a = (outputs[0] / name).read_bytes()
            b = (outputs[1] / name).read_bytes()
            assert a == b, f"{name} differs between --jobs runs"

    criterion("output-determinism", body)


def test_throughput(lexicon_path, tmp_path):
    def body():
        record = {
            "name": "throughput",
            "targets": {"count": 3, "references_per_target": 20, "year": 2000},
            "body": {"chars": 2000, "sentence_words": 9},
            "styles": {"numeric": 0.6, "parenthetical": 0.25, "narrative": 0.15},
            "years": [
                {
                    "year": 2000 + i,
                    "documents": 2000,
                    "mean_location": 0.45,
                    "location_spread": 0.1,
                    "mention_counts": {"1": 0.6, "2": 0.4},
                    "citation_sizes": {"1": 0.7, "2": 0.2, "3": 0.1},
                    "vocab_overlap": 0.4,
                    "coupling_overlap": 0.2,
                    "filler_citations": 3,
                    "targets_per_doc": 1,
                }
                for i in range(5)
            ],
        }
        corpus = SyntheticCorpus(parse_scenario(record), seed=11)
        assert len(corpus.documents) == 10_000
        paths = write_corpus(corpus, tmp_path / "big")
        started = time.perf_counter()
        report, summary = run_analysis(
            run_config(paths, lexicon_path, jobs=1)
        )
        emit_csv(report, tmp_path / "big-out")
        emit_json(report, tmp_path / "big-out" / "report.json")
        elapsed = time.perf_counter() - started
        assert summary["documents"] == 10_000
        assert elapsed < 60.0, f"took {elapsed:.2f}s"

    criterion("throughput", body)
