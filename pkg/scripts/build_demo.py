#!/usr/bin/env python3
"""Regenerate the bundled demo corpus under src/citescope/data/demo/.

Seventeen documents come from the demo scenario; three handcrafted documents
exercise year-suffix disambiguation, unresolved markers, and missing
abstracts / empty sections. Output bytes are deterministic.
"""

import os

from citescope.model import (
    CitingDocument,
    ReferenceEntry,
    Section,
    document_to_json,
    target_to_json,
)
from citescope.synth import SyntheticCorpus, load_scenario

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "..", "src", "citescope", "data")


def handcrafted(targets) -> list[CitingDocument]:
    t0, t1 = targets[0], targets[1]
    coupling0 = sorted(t0.reference_ids)[:4]

    suffix_doc = CitingDocument(
        id="H2008a",
        year=2008,
        title="perception thresholds in noisy channels",
        abstract="We compare perception thresholds across noisy channels and report topic0w1 topic0w5 variance under load.",
        sections=(
            Section(
                label="Introduction",
                text=(
                    "Threshold studies go back decades (Kemplund, 2003a). The revised "
                    "protocol of Kemplund (2003b) is now standard. Our baseline follows "
                    "the excellent landmark study (Dornhale, 2000) of this field. The "
                    "improved design proved robust (Kemplund, 2003a; Salazorn, 2005)."
                ),
            ),
            Section(
                label="Discussion",
                text=(
                    "The weak correlation reported by Salazorn (2005) was not replicated. "
                    "A broader survey appears in Wernlund et al. (2006)."
                ),
            ),
        ),
        references=(
            ReferenceEntry(
                key="kemplund2003a",
                raw="Kemplund, T. (2003a). Perception thresholds I.",
                cited_id="X-KEMP-A",
                first_author_surname="Kemplund",
                pub_year=2003,
                year_suffix="a",
            ),
            ReferenceEntry(
                key="kemplund2003b",
                raw="Kemplund, T. (2003b). Perception thresholds II.",
                cited_id="X-KEMP-B",
                first_author_surname="Kemplund",
                pub_year=2003,
                year_suffix="b",
            ),
            ReferenceEntry(
                key="dornhale2000",
                raw="Dornhale, A. (2000). The landmark study.",
                cited_id=t0.id,
                first_author_surname="Dornhale",
                pub_year=2000,
            ),
            ReferenceEntry(
                key="salazorn2005",
                raw="Salazorn, B. (2005). Correlations revisited.",
                cited_id=coupling0[0],
                first_author_surname="Salazorn",
                pub_year=2005,
            ),
            ReferenceEntry(
                key="wernlund2006",
                raw="Wernlund, C. et al. (2006). A survey.",
                first_author_surname="Wernlund",
                pub_year=2006,
            ),
        ),
    )

    unresolved_doc = CitingDocument(
        id="H2008b",
        year=2008,
        title="drift compensation for field sensors",
        abstract="Field sensors drift with temperature topic1w2 topic1w7; we propose a compensation table.",
        sections=(
            Section(
                label="Body",
                text=(
                    "Drift models are classical and remarkably robust [1]. The compensation scheme extends the "
                    "canonical formulation [2] with a lookup stage [99]. Unknown (1999) "
                    "described a similar artefact. The effect also appears in (Kemplund, "
                    "2003) under vibration. See also [1,2]."
                ),
            ),
        ),
        references=(
            ReferenceEntry(
                key="1",
                raw="Mora, V. (2001). Drift models.",
                cited_id=t1.id,
                first_author_surname="Mora",
                pub_year=2001,
            ),
            ReferenceEntry(
                key="2",
                raw="Kemplund, T. (2003). Canonical formulation A.",
                cited_id=sorted(t1.reference_ids)[0],
                first_author_surname="Kemplund",
                pub_year=2003,
            ),
            ReferenceEntry(
                key="3",
                raw="Kemplund, T. (2003). Canonical formulation B.",
                first_author_surname="Kemplund",
                pub_year=2003,
            ),
        ),
    )

    sparse_doc = CitingDocument(
        id="H2013c",
        year=2013,
        title="a short communication on calibration",
        abstract="",
        sections=(
            Section(label="Note", text="Calibration remains problematic [1]. No further data."),
            Section(label="Appendix", text=""),
        ),
        references=(
            ReferenceEntry(key="1", raw="Dornhale, A. (2000). The landmark study.", cited_id=t0.id),
            ReferenceEntry(key="2", raw="Unused, U. (1990). Never mentioned.", cited_id=t1.id),
        ),
    )
    return [suffix_doc, unresolved_doc, sparse_doc]


def main() -> None:
    scenario = load_scenario(os.path.join(DATA, "scenarios", "demo.json"))
    corpus = SyntheticCorpus(scenario, seed=7)
    out_dir = os.path.join(DATA, "demo")
    os.makedirs(out_dir, exist_ok=True)
    docs = list(corpus.documents) + handcrafted(corpus.targets)
    with open(os.path.join(out_dir, "corpus.jsonl"), "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(document_to_json(doc) + "\n")
    with open(os.path.join(out_dir, "targets.jsonl"), "w", encoding="utf-8", newline="\n") as fh:
        for target in corpus.targets:
            fh.write(target_to_json(target) + "\n")
    print(f"wrote {len(docs)} documents, {len(corpus.targets)} targets to {out_dir}")


if __name__ == "__main__":
    main()
