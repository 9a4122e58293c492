import json
from importlib import resources
from pathlib import Path

import pytest

from citescope.model import CitingDocument, ReferenceEntry, Section, TargetPaper
from citescope.parser import CitationParser, load_abbreviations
from citescope.pipeline import RunConfig
from citescope.sentiment import load_lexicon
from citescope.synth import SyntheticCorpus, load_scenario, write_corpus


def data_path(name: str) -> str:
    return str(resources.files("citescope.data").joinpath(name))


@pytest.fixture(scope="session")
def parser() -> CitationParser:
    return CitationParser()


@pytest.fixture(scope="session")
def abbreviations():
    return load_abbreviations()


@pytest.fixture(scope="session")
def lexicon_path() -> str:
    return data_path("lexicon.txt")


@pytest.fixture(scope="session")
def lexicon(lexicon_path):
    return load_lexicon(lexicon_path)


@pytest.fixture(scope="session")
def demo_paths():
    return {
        "corpus": data_path("demo/corpus.jsonl"),
        "targets": data_path("demo/targets.jsonl"),
    }


@pytest.fixture(scope="session")
def flat_corpus(tmp_path_factory):
    scenario = load_scenario(data_path("scenarios/flat.json"))
    corpus = SyntheticCorpus(scenario, seed=42)
    out = tmp_path_factory.mktemp("flat")
    paths = write_corpus(corpus, out)
    return corpus, paths


@pytest.fixture(scope="session")
def aging_corpus(tmp_path_factory):
    scenario = load_scenario(data_path("scenarios/aging.json"))
    corpus = SyntheticCorpus(scenario, seed=42)
    out = tmp_path_factory.mktemp("aging")
    paths = write_corpus(corpus, out)
    return corpus, paths


def run_config(paths: dict, lexicon_path: str, **overrides) -> RunConfig:
    defaults = dict(
        corpus=paths["corpus"],
        targets=paths["targets"],
        lexicon=lexicon_path,
        embeddings="test",
        out_dir=".",
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def make_doc(
    body: str | list[str],
    references: list[ReferenceEntry],
    doc_id: str = "D1",
    year: int = 2005,
    title: str = "a test document",
    abstract: str = "an abstract about the test document",
) -> CitingDocument:
    texts = [body] if isinstance(body, str) else body
    return CitingDocument(
        id=doc_id,
        year=year,
        title=title,
        abstract=abstract,
        sections=tuple(Section(label=f"S{i}", text=t) for i, t in enumerate(texts)),
        references=tuple(references),
    )


def numeric_refs(n: int, cited: dict[int, str] | None = None) -> list[ReferenceEntry]:
    cited = cited or {}
    return [
        ReferenceEntry(key=str(i), raw=f"Reference number {i}.", cited_id=cited.get(i))
        for i in range(1, n + 1)
    ]


def make_target(
    target_id: str = "T1",
    year: int = 2000,
    reference_ids: tuple[str, ...] = ("r1", "r2", "r3"),
    title: str = "the cited landmark",
    abstract: str = "abstract of the cited landmark paper",
) -> TargetPaper:
    return TargetPaper(
        id=target_id,
        year=year,
        title=title,
        abstract=abstract,
        reference_ids=frozenset(reference_ids),
    )


def write_jsonl(path: Path, lines: list[str]) -> str:
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return str(path)


def write_scenario(path: Path, record: dict) -> str:
    path.write_text(json.dumps(record), encoding="utf-8")
    return str(path)
