#!/usr/bin/env python3
"""Regenerate the bundled scenario files under src/citescope/data/scenarios/.

The aging scenario drifts every schedule the way long-lived highly cited
papers drift in real corpora: citations move toward the front of the text,
repeat mentions thin out, citations pool more references, and both vocabulary
and coupling overlap decay. Distributions are expressed as explicit pmfs so
the generator needs no interpretation.
"""

import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "citescope", "data", "scenarios")


def lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def mention_pmf(mmr_share: float, mean_mentions: float) -> dict:
    # mix counts {1, 2, 4}: singletons carry 1-m, the MMR mass m is split
    # between 2 and 4 to hit the scheduled mean exactly
    m = mmr_share
    mu = (mean_mentions - 1.0 + m) / m  # mean count among MMR, must be in [2, 4]
    assert 2.0 <= mu <= 4.0, mu
    x = (4.0 - mu) / 2.0
    return {"1": 1.0 - m, "2": x * m, "4": (1.0 - x) * m}


def size_pmf(mrc_share: float, mean_refs: float) -> dict:
    r = mrc_share
    nu = (mean_refs - 1.0 + r) / r
    assert 2.0 <= nu <= 4.0, nu
    x = (4.0 - nu) / 2.0
    return {"1": 1.0 - r, "2": x * r, "4": (1.0 - x) * r}


def aging() -> dict:
    years = []
    for i in range(17):
        t = i / 16.0
        year = 2000 + i
        mean_refs = lerp(1.7, 2.1, i / 7.0) if i <= 7 else lerp(2.1, 2.0, (i - 7) / 9.0)
        vocab = 0.50 + 0.05 * (i / 2.0) if i <= 2 else lerp(0.55, 0.26, (i - 2) / 14.0)
        years.append(
            {
                "year": year,
                "documents": 370,
                "mean_location": lerp(0.49, 0.40, t),
                "location_spread": 0.08,
                "mention_counts": mention_pmf(lerp(0.37, 0.25, t), lerp(1.8, 1.4, t)),
                "citation_sizes": size_pmf(lerp(0.327, 0.457, t), mean_refs),
                "vocab_overlap": round(vocab, 6),
                "coupling_overlap": 0.02 + 0.07 * math.exp(-i / 4.0),
                "filler_citations": 3,
                "targets_per_doc": 2,
            }
        )
    return {
        "name": "aging",
        "targets": {"count": 4, "references_per_target": 24, "year": 2000},
        "body": {"chars": 900, "sentence_words": 8},
        "styles": {"numeric": 0.6, "parenthetical": 0.25, "narrative": 0.15},
        "years": years,
    }


def flat() -> dict:
    years = []
    for year in (2001, 2002, 2003):
        years.append(
            {
                "year": year,
                "documents": 60,
                "mean_location": 0.45,
                "location_spread": 0.1,
                "mention_counts": {"1": 0.6, "2": 0.25, "3": 0.15},
                "citation_sizes": {"1": 0.65, "2": 0.25, "3": 0.1},
                "vocab_overlap": 0.45,
                "coupling_overlap": 0.25,
                "filler_citations": 3,
                "targets_per_doc": 1,
            }
        )
    return {
        "name": "flat",
        "targets": {"count": 3, "references_per_target": 20, "year": 2000},
        "body": {"chars": 1500, "sentence_words": 9},
        "styles": {"numeric": 0.5, "parenthetical": 0.3, "narrative": 0.2},
        "years": years,
    }


def demo() -> dict:
    years = []
    for year, docs in ((2003, 5), (2008, 6), (2013, 6)):
        years.append(
            {
                "year": year,
                "documents": docs,
                "mean_location": {2003: 0.48, 2008: 0.44, 2013: 0.41}[year],
                "location_spread": 0.22,
                "mention_counts": {"0": 0.1, "1": 0.5, "2": 0.3, "3": 0.1},
                "citation_sizes": {"1": 0.6, "2": 0.3, "3": 0.1},
                "vocab_overlap": {2003: 0.5, 2008: 0.42, 2013: 0.36}[year],
                "coupling_overlap": {2003: 0.3, 2008: 0.22, 2013: 0.15}[year],
                "filler_citations": 2,
                "targets_per_doc": 2,
            }
        )
    return {
        "name": "demo",
        "targets": {"count": 2, "references_per_target": 12, "year": 2000},
        "body": {"chars": 1200, "sentence_words": 9},
        "styles": {"numeric": 0.4, "parenthetical": 0.35, "narrative": 0.25},
        "years": years,
    }


def main() -> None:
    os.makedirs(OUT, exist_ok=True)
    for name, build in (("aging", aging), ("flat", flat), ("demo", demo)):
        path = os.path.join(OUT, f"{name}.json")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(build(), handle, indent=2)
            handle.write("\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
