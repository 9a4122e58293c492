"""Deterministic synthetic corpus generator with recorded ground truth.

A scenario file declares per-year schedules (mean citation location,
mention-count distribution, citation-size distribution, vocabulary overlap,
coupling overlap). The generator plants those schedules with quota
assignment rather than independent draws, so realized per-year values sit
within rounding distance of the planted ones, and records every planted and
realized value in a ground-truth file at emission time.

Randomness comes from a single seeded random.Random (MT19937), which makes
the output bytes a pure function of (scenario, seed).
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import dataclass, field

from .errors import ScenarioError
from .model import (
    CitingDocument,
    ReferenceEntry,
    Section,
    TargetPaper,
    document_to_json,
    target_to_json,
)

GENERATOR_VERSION = "1"
RNG_NAME = "python-random-mt19937"

_FILLER_WORDS = (
    "terra", "vola", "mirum", "sonde", "quema", "ridel", "fonta", "gessa",
    "ovale", "nitor", "sable", "corin", "pruna", "vetus", "orbis", "lumen",
    "calor", "umbra", "ferox", "talus",
)
_SYLLABLES = (
    "Bar", "Chen", "Dorn", "Ells", "Fava", "Gold", "Hale", "Ivers", "Jona",
    "Kemp", "Lund", "Mora", "Nars", "Oble", "Pern", "Quil", "Rost", "Sala",
    "Tarn", "Ulmo", "Vance", "Wern", "Yole", "Zorn",
)

_SECTION_LABELS = ("Introduction", "Methods", "Discussion")


# --- scenario ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class YearSchedule:
    year: int
    documents: int
    mean_location: float
    location_spread: float
    mention_counts: dict[int, float]
    citation_sizes: dict[int, float]
    vocab_overlap: float
    coupling_overlap: float
    filler_citations: int
    targets_per_doc: int


@dataclass(frozen=True, slots=True)
class Scenario:
    name: str
    target_count: int
    references_per_target: int
    target_year: int
    body_chars: int
    sentence_words: int
    styles: dict[str, float]
    years: tuple[YearSchedule, ...] = field(default=())


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise ScenarioError(f"{path}: {message}")


def _check_pmf(weights: dict, path: str, allow_zero_key: bool) -> dict[int, float]:
    _require(isinstance(weights, dict) and weights, path, "must be a non-empty object")
    out: dict[int, float] = {}
    for key, value in weights.items():
        try:
            k = int(key)
        except (TypeError, ValueError):
            raise ScenarioError(f"{path}.{key}: key must be an integer") from None
        _require(k >= (0 if allow_zero_key else 1), f"{path}.{key}", "key out of range")
        _require(isinstance(value, (int, float)) and value >= 0, f"{path}.{key}", "weight must be >= 0")
        out[k] = float(value)
    total = sum(out.values())
    _require(abs(total - 1.0) <= 1e-6, path, f"weights must sum to 1 (got {total})")
    _require(sum(w for k, w in out.items() if k >= 1) > 0, path, "needs mass on keys >= 1")
    return out


def parse_scenario(record: dict) -> Scenario:
    """Validate a scenario object; error messages carry the field path."""
    _require(isinstance(record, dict), "$", "scenario must be a JSON object")
    targets = record.get("targets", {})
    _require(isinstance(targets, dict), "targets", "must be an object")
    count = targets.get("count", 2)
    refs = targets.get("references_per_target", 20)
    tyear = targets.get("year", 2000)
    _require(isinstance(count, int) and count >= 1, "targets.count", "must be an integer >= 1")
    _require(
        isinstance(refs, int) and refs >= 1,
        "targets.references_per_target",
        "must be an integer >= 1",
    )
    _require(isinstance(tyear, int) and 1800 <= tyear <= 2100, "targets.year", "must be a year")

    body = record.get("body", {})
    chars = body.get("chars", 2000)
    words = body.get("sentence_words", 9)
    _require(isinstance(chars, int) and chars >= 400, "body.chars", "must be an integer >= 400")
    _require(isinstance(words, int) and 4 <= words <= 30, "body.sentence_words", "must be in [4, 30]")

    styles = record.get("styles", {"numeric": 0.6, "parenthetical": 0.25, "narrative": 0.15})
    _require(isinstance(styles, dict) and styles, "styles", "must be a non-empty object")
    for name, weight in styles.items():
        _require(
            name in ("numeric", "parenthetical", "narrative"),
            f"styles.{name}",
            "unknown style",
        )
        _require(isinstance(weight, (int, float)) and weight >= 0, f"styles.{name}", "weight >= 0")
    _require(abs(sum(styles.values()) - 1.0) <= 1e-6, "styles", "weights must sum to 1")

    years_in = record.get("years")
    _require(isinstance(years_in, list) and years_in, "years", "must be a non-empty array")
    years: list[YearSchedule] = []
    seen_years: set[int] = set()
    for i, item in enumerate(years_in):
        path = f"years[{i}]"
        _require(isinstance(item, dict), path, "must be an object")
        year = item.get("year")
        _require(isinstance(year, int) and 1800 <= year <= 2100, f"{path}.year", "must be a year")
        _require(year not in seen_years, f"{path}.year", "duplicate year")
        seen_years.add(year)
        docs = item.get("documents")
        _require(isinstance(docs, int) and docs >= 1, f"{path}.documents", "must be an integer >= 1")
        mean = item.get("mean_location")
        _require(
            isinstance(mean, (int, float)) and 0.0 <= mean <= 1.0,
            f"{path}.mean_location",
            "must be in [0, 1]",
        )
        spread = item.get("location_spread", 0.08)
        _require(
            isinstance(spread, (int, float)) and 0.0 <= spread <= 0.5,
            f"{path}.location_spread",
            "must be in [0, 0.5]",
        )
        _require(
            0.01 <= mean - spread and mean + spread <= 0.99,
            f"{path}.mean_location",
            "mean +/- spread must stay inside [0.01, 0.99]",
        )
        mention_counts = _check_pmf(
            item.get("mention_counts"), f"{path}.mention_counts", allow_zero_key=True
        )
        citation_sizes = _check_pmf(
            item.get("citation_sizes"), f"{path}.citation_sizes", allow_zero_key=False
        )
        vocab = item.get("vocab_overlap", 0.5)
        coupling = item.get("coupling_overlap", 0.3)
        _require(
            isinstance(vocab, (int, float)) and 0.0 <= vocab <= 1.0,
            f"{path}.vocab_overlap",
            "must be in [0, 1]",
        )
        _require(
            isinstance(coupling, (int, float)) and 0.0 <= coupling <= 1.0,
            f"{path}.coupling_overlap",
            "must be in [0, 1]",
        )
        filler = item.get("filler_citations", 3)
        _require(
            isinstance(filler, int) and filler >= 0, f"{path}.filler_citations", "must be >= 0"
        )
        per_doc = item.get("targets_per_doc", 1)
        _require(
            isinstance(per_doc, int) and 1 <= per_doc <= count,
            f"{path}.targets_per_doc",
            "must be in [1, targets.count]",
        )
        years.append(
            YearSchedule(
                year=year,
                documents=docs,
                mean_location=float(mean),
                location_spread=float(spread),
                mention_counts=mention_counts,
                citation_sizes=citation_sizes,
                vocab_overlap=float(vocab),
                coupling_overlap=float(coupling),
                filler_citations=filler,
                targets_per_doc=per_doc,
            )
        )
    return Scenario(
        name=str(record.get("name", "scenario")),
        target_count=count,
        references_per_target=refs,
        target_year=tyear,
        body_chars=chars,
        sentence_words=words,
        styles={k: float(v) for k, v in styles.items()},
        years=tuple(years),
    )


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as handle:
            record = json.load(handle)
    except OSError as exc:
        raise ScenarioError(f"$: cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"$: invalid JSON: {exc}") from exc
    return parse_scenario(record)


# --- quota assignment ---------------------------------------------------------


def quota_counts(weights: dict[int, float], total: int) -> dict[int, int]:
    """Largest-remainder apportionment of ``total`` slots to the pmf keys."""
    keys = sorted(weights)
    raw = {k: weights[k] * total for k in keys}
    floors = {k: int(math.floor(raw[k])) for k in keys}
    remaining = total - sum(floors.values())
    by_remainder = sorted(keys, key=lambda k: (-(raw[k] - floors[k]), k))
    for k in by_remainder[:remaining]:
        floors[k] += 1
    return floors


def quota_list(weights: dict[int, float], total: int, rng: random.Random) -> list[int]:
    counts = quota_counts(weights, total)
    out: list[int] = []
    for key in sorted(counts):
        out.extend([key] * counts[key])
    rng.shuffle(out)
    return out


def mixed_quota_list(value: float, total: int, rng: random.Random) -> list[int]:
    """Integer assignments whose mean is ``value`` up to quota rounding."""
    low = int(math.floor(value))
    frac = value - low
    if frac <= 1e-12:
        weights = {low: 1.0}
    else:
        weights = {low: 1.0 - frac, low + 1: frac}
    return quota_list(weights, total, rng)


def pmf_mean(weights: dict[int, float], minimum: int = 1) -> float:
    mass = sum(w for k, w in weights.items() if k >= minimum)
    return sum(k * w for k, w in weights.items() if k >= minimum) / mass


def pmf_share_at_least(weights: dict[int, float], threshold: int, minimum: int = 1) -> float:
    mass = sum(w for k, w in weights.items() if k >= minimum)
    return sum(w for k, w in weights.items() if k >= threshold) / mass


# --- generation ----------------------------------------------------------------


@dataclass(slots=True)
class _PlannedMarker:
    desired_fraction: float  # planted progression, converted to an offset later
    surface: str
    target_id: str | None  # None for filler citations
    n_refs: int
    order: int
    desired: int = 0
    realized: int = -1
    sentence: int = -1


def _surname(index: int) -> str:
    a = _SYLLABLES[index % len(_SYLLABLES)]
    b = _SYLLABLES[(index // len(_SYLLABLES)) % len(_SYLLABLES)].lower()
    return a + b + ("sen" if index >= len(_SYLLABLES) ** 2 else "")


def _numeric_surface(indices: list[int], rng: random.Random) -> str:
    indices = sorted(indices)
    parts: list[str] = []
    i = 0
    while i < len(indices):
        j = i
        while j + 1 < len(indices) and indices[j + 1] == indices[j] + 1:
            j += 1
        if j - i >= 2:
            dash = "–" if rng.random() < 0.5 else "-"
            parts.append(f"{indices[i]}{dash}{indices[j]}")
            i = j + 1
        else:
            parts.extend(str(indices[k]) for k in range(i, j + 1))
            i = j + 1
    return "[" + ",".join(parts) + "]"


def _author_segment(ref: ReferenceEntry, rng: random.Random) -> str:
    et_al = " et al." if rng.random() < 0.3 else ""
    return f"{ref.first_author_surname}{et_al}, {ref.pub_year}"


class SyntheticCorpus:
    """One generated corpus: documents, targets, and the ground truth."""

    def __init__(self, scenario: Scenario, seed: int):
        self.scenario = scenario
        self.seed = seed
        self.rng = random.Random(seed)
        self.targets: list[TargetPaper] = []
        self.documents: list[CitingDocument] = []
        self.ground_truth: dict = {}
        self._generate()

    # vocabulary pools

    def _target_vocab(self, index: int) -> list[str]:
        return [f"topic{index}w{j}" for j in range(40)]

    def _noise_vocab(self, year: int) -> list[str]:
        return [f"noise{year}w{j}" for j in range(60)]

    def _mixed_tokens(
        self, n: int, n_overlap: int, pools: list[list[str]], noise: list[str]
    ) -> str:
        n_overlap = min(n_overlap, n)
        tokens: list[str] = []
        for i in range(n_overlap):
            pool = pools[i % len(pools)]
            tokens.append(self.rng.choice(pool))
        for _ in range(n - n_overlap):
            tokens.append(self.rng.choice(noise))
        self.rng.shuffle(tokens)
        return " ".join(tokens)

    def _generate(self) -> None:
        sc = self.scenario
        for t in range(sc.target_count):
            vocab = self._target_vocab(t)
            self.targets.append(
                TargetPaper(
                    id=f"T{t:02d}",
                    year=sc.target_year,
                    title=" ".join(self.rng.choice(vocab) for _ in range(6)),
                    abstract=" ".join(self.rng.choice(vocab) for _ in range(30)),
                    reference_ids=frozenset(
                        f"R{t:02d}x{j:03d}" for j in range(sc.references_per_target)
                    ),
                )
            )

        per_year: dict[str, dict] = {}
        totals_all = [0, 0, 0, 0, 0]
        totals_targets = [0, 0, 0, 0, 0]
        doc_seq = 0

        for schedule in sc.years:
            year_stats = self._generate_year(schedule, doc_seq)
            doc_seq += schedule.documents
            per_year[str(schedule.year)] = year_stats
            for i in range(5):
                totals_all[i] += year_stats["counts"]["all"][_COUNT_KEYS[i]]
                totals_targets[i] += year_stats["counts"]["targets"][_COUNT_KEYS[i]]

        self.ground_truth = {
            "generator_version": GENERATOR_VERSION,
            "rng": RNG_NAME,
            "seed": self.seed,
            "scenario": sc.name,
            "per_year": per_year,
            "totals": {
                "all": dict(zip(_COUNT_KEYS, totals_all)),
                "targets": dict(zip(_COUNT_KEYS, totals_targets)),
            },
        }

    def _generate_year(self, schedule: YearSchedule, doc_seq0: int) -> dict:
        sc = self.scenario
        rng = self.rng
        docs = schedule.documents

        # quota-assigned document styles
        style_list = []
        style_counts = quota_counts(
            {i: w for i, w in enumerate((schedule_weight(sc.styles, name) for name in ("numeric", "parenthetical", "narrative")))},
            docs,
        )
        for idx, count in sorted(style_counts.items()):
            style_list.extend([("numeric", "parenthetical", "narrative")[idx]] * count)
        rng.shuffle(style_list)

        # (doc, target) slots and their mention counts
        slots: list[tuple[int, int]] = []  # (doc index, target index)
        for d in range(docs):
            for k in range(schedule.targets_per_doc):
                slots.append((d, (d * schedule.targets_per_doc + k) % sc.target_count))
        mention_assignment = quota_list(schedule.mention_counts, len(slots), rng)
        shared_assignment = mixed_quota_list(
            schedule.coupling_overlap * sc.references_per_target, len(slots), rng
        )
        overlap_assignment = mixed_quota_list(schedule.vocab_overlap * 30, docs, rng)

        total_mentions = sum(mention_assignment)
        size_assignment = quota_list(schedule.citation_sizes, total_mentions, rng)
        filler_total = docs * schedule.filler_citations
        filler_sizes = quota_list(schedule.citation_sizes, filler_total, rng)

        # stratified location fractions for target mentions
        if total_mentions:
            grid = [(k + 0.5) / total_mentions for k in range(total_mentions)]
            rng.shuffle(grid)
            locations = [
                schedule.mean_location + schedule.location_spread * (2.0 * u - 1.0)
                for u in grid
            ]
        else:
            locations = []

        mention_cursor = 0
        size_cursor = 0
        filler_cursor = 0
        loc_cursor = 0

        realized_loc: list[float] = []
        smr = mmr = unmentioned = 0
        mention_count_sum = 0
        src = mrc = 0
        refs_in_citations = 0
        bib_values: list[float] = []
        counts_all = [0, 0, 0, 0, 0]
        counts_targets = [0, 0, 0, 0, 0]

        slot_index = 0
        for d in range(docs):
            doc_id = f"D{schedule.year}{doc_seq0 + d:05d}"
            style = style_list[d]
            doc_slots = slots[slot_index : slot_index + schedule.targets_per_doc]
            shared_counts = shared_assignment[slot_index : slot_index + schedule.targets_per_doc]
            slot_index += schedule.targets_per_doc

            plan: list[tuple[str, int, int]] = []  # (target id, mentions, target index)
            for _, t_index in doc_slots:
                m = mention_assignment[mention_cursor]
                mention_cursor += 1
                plan.append((self.targets[t_index].id, m, t_index))
                if m == 0:
                    unmentioned += 1
                elif m == 1:
                    smr += 1
                else:
                    mmr += 1
                if m >= 1:
                    mention_count_sum += m

            sizes: list[list[int]] = []
            for _tid, m, _t in plan:
                these = size_assignment[size_cursor : size_cursor + m]
                size_cursor += m
                sizes.append(these)
                for s in these:
                    if s == 1:
                        src += 1
                    else:
                        mrc += 1
                    refs_in_citations += s

            doc_fillers = filler_sizes[filler_cursor : filler_cursor + schedule.filler_citations]
            filler_cursor += schedule.filler_citations

            n_target_mentions = sum(m for _t, m, _i in plan)
            doc_locs = locations[loc_cursor : loc_cursor + n_target_mentions]
            loc_cursor += n_target_mentions

            doc, stats = self._build_document(
                doc_id,
                schedule,
                style,
                plan,
                sizes,
                doc_fillers,
                doc_locs,
                shared_counts,
                overlap_assignment[d],
            )
            self.documents.append(doc)
            realized_loc.extend(stats["progressions"])
            bib_values.extend(stats["bibliographic"])
            for i in range(5):
                counts_all[i] += stats["all"][i]
                counts_targets[i] += stats["targets"][i]

        mentioned = smr + mmr
        realized = {
            "mean_location": (sum(realized_loc) / len(realized_loc)) if realized_loc else None,
            "n_mentions": len(realized_loc),
            "smr": smr,
            "mmr": mmr,
            "unmentioned": unmentioned,
            "pct_smr": 100.0 * smr / mentioned if mentioned else None,
            "pct_mmr": 100.0 * mmr / mentioned if mentioned else None,
            "mean_mentions": mention_count_sum / mentioned if mentioned else None,
            "src": src,
            "mrc": mrc,
            "pct_src": 100.0 * src / (src + mrc) if (src + mrc) else None,
            "pct_mrc": 100.0 * mrc / (src + mrc) if (src + mrc) else None,
            "mean_refs_per_citation": refs_in_citations / (src + mrc) if (src + mrc) else None,
            "mean_bibliographic": (sum(bib_values) / len(bib_values)) if bib_values else None,
        }
        refs_per = sc.references_per_target
        coupling_size = (schedule.targets_per_doc - 1) + schedule.targets_per_doc * refs_per
        planted = {
            "mean_location": schedule.mean_location,
            "pct_mmr": 100.0 * pmf_share_at_least(schedule.mention_counts, 2),
            "pct_smr": 100.0 * (1.0 - pmf_share_at_least(schedule.mention_counts, 2)),
            "mean_mentions": pmf_mean(schedule.mention_counts),
            "pct_mrc": 100.0 * pmf_share_at_least(schedule.citation_sizes, 2),
            "pct_src": 100.0 * (1.0 - pmf_share_at_least(schedule.citation_sizes, 2)),
            "mean_refs_per_citation": pmf_mean(schedule.citation_sizes),
            "vocab_overlap": schedule.vocab_overlap,
            "coupling_overlap": schedule.coupling_overlap,
            "bibliographic": (schedule.coupling_overlap * refs_per)
            / math.sqrt(refs_per * coupling_size),
        }
        return {
            "documents": docs,
            "planted": planted,
            "realized": realized,
            "counts": {
                "all": dict(zip(_COUNT_KEYS, counts_all)),
                "targets": dict(zip(_COUNT_KEYS, counts_targets)),
            },
        }

    def _build_document(
        self,
        doc_id: str,
        schedule: YearSchedule,
        style: str,
        plan: list[tuple[str, int, int]],
        sizes: list[list[int]],
        filler_sizes: list[int],
        doc_locs: list[float],
        shared_counts: list[int],
        overlap_tokens: int,
    ) -> tuple[CitingDocument, dict]:
        sc = self.scenario
        rng = self.rng

        # --- reference list -------------------------------------------------
        entries: list[ReferenceEntry] = []
        author_style = style in ("parenthetical", "narrative")

        def add_entry(cited_id: str | None, surname_index: int, raw_hint: str) -> int:
            pub_year = rng.randint(1980, max(1981, schedule.year - 1))
            surname = _surname(surname_index)
            entries.append(
                ReferenceEntry(
                    key="",  # assigned after shuffling
                    raw=f"{surname}, {raw_hint} ({pub_year}).",
                    cited_id=cited_id,
                    first_author_surname=surname if author_style else None,
                    pub_year=pub_year if author_style else None,
                )
            )
            return len(entries) - 1

        surname_counter = rng.randrange(0, 200)
        target_entry: dict[str, int] = {}
        coupling_by_target: dict[str, float] = {}
        filler_pool: list[int] = []

        for tid, _m, t_index in plan:
            target_entry[tid] = add_entry(tid, surname_counter, "landmark study")
            surname_counter += 1

        refs_per = sc.references_per_target
        coupling_size = (len(plan) - 1) + len(plan) * refs_per
        for (tid, _m, t_index), shared_n in zip(plan, shared_counts):
            target = self.targets[t_index]
            shared_ids = rng.sample(sorted(target.reference_ids), shared_n)
            unique_ids = [f"U{doc_id}t{t_index}n{j}" for j in range(refs_per - shared_n)]
            for cid in shared_ids + unique_ids:
                filler_pool.append(add_entry(cid, surname_counter, "related work"))
                surname_counter += 1
            coupling_by_target[tid] = shared_n / math.sqrt(refs_per * coupling_size)

        # entries without a resolved cited id: excluded from coupling
        for j in range(2):
            filler_pool.append(add_entry(None, surname_counter, "unlinked report"))
            surname_counter += 1

        order = list(range(len(entries)))
        rng.shuffle(order)
        entries = [entries[i] for i in order]
        position = {old: new for new, old in enumerate(order)}
        entries = [
            ReferenceEntry(
                key=str(i + 1),
                raw=e.raw,
                cited_id=e.cited_id,
                first_author_surname=e.first_author_surname,
                pub_year=e.pub_year,
                year_suffix=e.year_suffix,
            )
            for i, e in enumerate(entries)
        ]
        filler_positions = [position[i] for i in filler_pool]

        # --- citation plan ---------------------------------------------------
        def surface_for(ref_positions: list[int]) -> str:
            refs = [entries[p] for p in ref_positions]
            if style == "numeric":
                return _numeric_surface([p + 1 for p in ref_positions], rng)
            if len(refs) == 1 and style == "narrative" and rng.random() < 0.5:
                et_al = " et al." if rng.random() < 0.3 else ""
                return f"{refs[0].first_author_surname}{et_al} ({refs[0].pub_year})"
            return "(" + "; ".join(_author_segment(r, rng) for r in refs) + ")"

        markers: list[_PlannedMarker] = []
        order_counter = 0
        loc_cursor = 0
        for (tid, _m, _t), these_sizes in zip(plan, sizes):
            for size in these_sizes:
                extra = rng.sample(filler_positions, min(size - 1, len(filler_positions)))
                ref_positions = [position[target_entry[tid]]] + extra
                markers.append(
                    _PlannedMarker(
                        desired_fraction=doc_locs[loc_cursor],
                        surface=surface_for(ref_positions),
                        target_id=tid,
                        n_refs=len(ref_positions),
                        order=order_counter,
                    )
                )
                loc_cursor += 1
                order_counter += 1
        for size in filler_sizes:
            chosen = rng.sample(filler_positions, min(size, len(filler_positions)))
            markers.append(
                _PlannedMarker(
                    desired_fraction=rng.uniform(0.03, 0.97),
                    surface=surface_for(chosen),
                    target_id=None,
                    n_refs=len(chosen),
                    order=order_counter,
                )
            )
            order_counter += 1

        # --- body assembly ----------------------------------------------------
        sentences: list[list[str]] = []
        base_len = 0
        while True:
            words = [rng.choice(_FILLER_WORDS) for _ in range(sc.sentence_words)]
            words[0] = words[0].capitalize()
            sentence_len = sum(len(w) for w in words) + (len(words) - 1) + 1  # + period
            joiner = 1 if sentences else 0  # space between sentences in a section
            if base_len + joiner + sentence_len > sc.body_chars and sentences:
                break
            base_len += joiner + sentence_len
            sentences.append(words)

        n_sections = min(len(_SECTION_LABELS), max(1, len(sentences)))
        per_section = max(1, len(sentences) // n_sections)
        section_slices = [
            sentences[i * per_section : (i + 1) * per_section if i < n_sections - 1 else len(sentences)]
            for i in range(n_sections)
        ]
        section_slices = [s for s in section_slices if s]
        # sentences within a section are space-joined; sections newline-joined
        base_total = 0
        for idx, sec in enumerate(section_slices):
            if idx:
                base_total += 1  # newline
            sec_len = 0
            for j, words in enumerate(sec):
                if j:
                    sec_len += 1  # inter-sentence space
                sec_len += sum(len(w) for w in words) + (len(words) - 1) + 1
            base_total += sec_len

        final_n = base_total + sum(len(m.surface) + 1 for m in markers)
        top = max(0, final_n - 80)
        for marker in markers:
            # realized offsets land at the next word boundary at or after the
            # desired one; nudging down by a few characters centers the error
            marker.desired = max(0, min(int(marker.desired_fraction * final_n) - 6, top))
        queue = sorted(markers, key=lambda m: (m.desired, m.order))

        section_texts: list[str] = []
        offset = 0
        q = 0
        sentence_index = -1
        marker_sentences: list[int] = []
        for idx, sec in enumerate(section_slices):
            if idx:
                offset += 1  # the '\n' joining sections
            parts: list[str] = []
            for j, words in enumerate(sec):
                if j:
                    parts.append(" ")
                    offset += 1
                sentence_index += 1
                for w, word in enumerate(words):
                    if w:
                        parts.append(" ")
                        offset += 1
                    while q < len(queue) and queue[q].desired <= offset:
                        queue[q].realized = offset
                        queue[q].sentence = sentence_index
                        parts.append(queue[q].surface + " ")
                        offset += len(queue[q].surface) + 1
                        q += 1
                    parts.append(word)
                    offset += len(word)
                parts.append(".")
                offset += 1
            section_texts.append("".join(parts))
        # flush any leftovers after the last period (their own trailing sentence)
        if q < len(queue):
            sentence_index += 1
            tail: list[str] = []
            for marker in queue[q:]:
                marker.realized = offset + 1
                marker.sentence = sentence_index
                tail.append(" " + marker.surface)
                offset += len(marker.surface) + 1
            section_texts[-1] += "".join(tail)
            q = len(queue)
        assert offset == final_n, f"assembled {offset} chars, expected {final_n}"

        body = "\n".join(section_texts)
        assert len(body) == final_n

        # --- ground truth for this document -----------------------------------
        progressions = [
            m.realized / final_n for m in sorted(markers, key=lambda m: m.order) if m.target_id
        ]
        all_sentences_cited = len({m.sentence for m in markers})
        per_sentence_targets: dict[int, set[str]] = {}
        for m in markers:
            if m.target_id:
                per_sentence_targets.setdefault(m.sentence, set()).add(m.target_id)
        target_sentences = sum(len(v) for v in per_sentence_targets.values())
        n_target_mentions = sum(1 for m in markers if m.target_id)
        stats = {
            "progressions": progressions,
            "bibliographic": [coupling_by_target[tid] for tid, _m, _t in plan],
            "all": (
                1,
                len(entries),
                sum(m.n_refs for m in markers),
                len(markers),
                all_sentences_cited,
            ),
            "targets": (
                1,
                len(plan),
                n_target_mentions,
                n_target_mentions,
                target_sentences,
            ),
        }

        t_indices = [t for _tid, _m, t in plan]
        pools = [self._target_vocab(t) for t in t_indices]
        noise = self._noise_vocab(schedule.year)
        title_overlap = round(overlap_tokens * 6 / 30)
        doc = CitingDocument(
            id=doc_id,
            year=schedule.year,
            title=self._mixed_tokens(6, title_overlap, pools, noise),
            abstract=self._mixed_tokens(30, overlap_tokens, pools, noise),
            sections=tuple(
                Section(label=_SECTION_LABELS[i], text=text)
                for i, text in enumerate(section_texts)
            ),
            references=tuple(entries),
        )
        return doc, stats


_COUNT_KEYS = (
    "documents",
    "references",
    "reference_mentions",
    "in_text_citations",
    "citation_sentences",
)


def schedule_weight(styles: dict[str, float], name: str) -> float:
    return styles.get(name, 0.0)


def write_corpus(corpus: SyntheticCorpus, out_dir: str | os.PathLike) -> dict[str, str]:
    """Write corpus.jsonl, targets.jsonl, and ground_truth.json; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "corpus": os.path.join(out_dir, "corpus.jsonl"),
        "targets": os.path.join(out_dir, "targets.jsonl"),
        "ground_truth": os.path.join(out_dir, "ground_truth.json"),
    }
    with open(paths["corpus"], "w", encoding="utf-8", newline="\n") as handle:
        for doc in corpus.documents:
            handle.write(document_to_json(doc) + "\n")
    with open(paths["targets"], "w", encoding="utf-8", newline="\n") as handle:
        for target in corpus.targets:
            handle.write(target_to_json(target) + "\n")
    with open(paths["ground_truth"], "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(corpus.ground_truth, ensure_ascii=False, indent=2) + "\n")
    return paths
