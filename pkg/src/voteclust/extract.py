"""Turn vote records into a weighted signed agreement graph.

Two agreement schemes are supported for abstention handling; obstruction is
always scored as a vote against, and a pair involving an absent deputy scores
zero so that low-attendance deputies do not get distorted averages. The
average agreement over all propositions of the period becomes the edge
weight, and edges below the magnitude threshold are dropped.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, TextIO

import numpy as np

from .core import DataError, Deputy, SignedGraph, Vote, VoteRecord

DEFAULT_EDGE_THRESHOLD = 0.001

DENOMINATOR_ALL = "all_propositions"
DENOMINATOR_BOTH_VOTED = "both_voted"


class AgreementScheme(Enum):
    """How abstention pairs are scored."""

    V1_HALF_AGREEMENT = "v1"
    V2_ABSENCE_OF_OPINION = "v2"


def _symmetric_table(entries: dict[tuple[Vote, Vote], float]) -> dict[tuple[Vote, Vote], float]:
    table = {}
    for (a, b), score in entries.items():
        table[(a, b)] = score
        table[(b, a)] = score
    return table


# Scores for the three effective opinions (obstruction is rewritten to AGAINST
# and absence short-circuits to 0 before lookup).
_V1_TABLE = _symmetric_table({
    (Vote.FOR, Vote.FOR): 1.0,
    (Vote.FOR, Vote.AGAINST): -1.0,
    (Vote.FOR, Vote.ABSTAIN): 0.5,
    (Vote.AGAINST, Vote.AGAINST): 1.0,
    (Vote.AGAINST, Vote.ABSTAIN): 0.5,
    (Vote.ABSTAIN, Vote.ABSTAIN): 0.5,
})

_V2_TABLE = _symmetric_table({
    (Vote.FOR, Vote.FOR): 1.0,
    (Vote.FOR, Vote.AGAINST): -1.0,
    (Vote.FOR, Vote.ABSTAIN): 0.0,
    (Vote.AGAINST, Vote.AGAINST): 1.0,
    (Vote.AGAINST, Vote.ABSTAIN): 0.0,
    (Vote.ABSTAIN, Vote.ABSTAIN): 1.0,
})

_TABLES = {
    AgreementScheme.V1_HALF_AGREEMENT: _V1_TABLE,
    AgreementScheme.V2_ABSENCE_OF_OPINION: _V2_TABLE,
}

# Vote tokens accepted by the parsers. Upstream files mix accented and
# unaccented Portuguese; both spellings (and the canonical names) parse.
_TOKEN_MAP = {
    "sim": Vote.FOR,
    "for": Vote.FOR,
    "nao": Vote.AGAINST,
    "não": Vote.AGAINST,
    "against": Vote.AGAINST,
    "abstencao": Vote.ABSTAIN,
    "abstenção": Vote.ABSTAIN,
    "abstain": Vote.ABSTAIN,
    "obstrucao": Vote.OBSTRUCTION,
    "obstrução": Vote.OBSTRUCTION,
    "obstruction": Vote.OBSTRUCTION,
    "ausencia": Vote.ABSENT,
    "ausência": Vote.ABSENT,
    "ausente": Vote.ABSENT,
    "absent": Vote.ABSENT,
}

_CSV_COLUMNS = ["proposition_id", "deputy_id", "deputy_name", "party", "state", "vote"]


@dataclass(frozen=True)
class ExtractionConfig:
    """Parameters of one extraction run.

    period_filter, when given, is a predicate over proposition ids selecting
    the extraction period. The denominator switch picks between dividing the
    summed scores by all propositions of the period (absent pairs contribute
    zero) or only by the propositions both deputies attended.
    """

    scheme: AgreementScheme
    edge_threshold: float = DEFAULT_EDGE_THRESHOLD
    period_filter: Callable[[str], bool] | None = None
    denominator: str = DENOMINATOR_ALL

    def __post_init__(self) -> None:
        if self.edge_threshold < 0:
            raise ValueError("edge_threshold must be non-negative")
        if self.denominator not in (DENOMINATOR_ALL, DENOMINATOR_BOTH_VOTED):
            raise ValueError(f"unknown denominator mode {self.denominator!r}")


def parse_vote_token(token: str) -> Vote:
    """Map a raw vote token to a Vote, case-insensitively."""
    vote = _TOKEN_MAP.get(token.strip().casefold())
    if vote is None:
        raise DataError(f"unknown vote token {token!r}")
    return vote


def pairwise_score(vote_u: Vote, vote_v: Vote, scheme: AgreementScheme) -> float:
    """Agreement score of one vote pair under the given scheme.

    Obstruction counts as AGAINST; any pair involving an absent deputy is
    neutral (zero). Symmetric in its vote arguments.
    """
    if vote_u is Vote.OBSTRUCTION:
        vote_u = Vote.AGAINST
    if vote_v is Vote.OBSTRUCTION:
        vote_v = Vote.AGAINST
    if vote_u is Vote.ABSENT or vote_v is Vote.ABSENT:
        return 0.0
    return _TABLES[scheme][(vote_u, vote_v)]


def average_agreement(
    records_u: Sequence[VoteRecord],
    records_v: Sequence[VoteRecord],
    propositions: Sequence[str],
    scheme: AgreementScheme,
    denominator: str = DENOMINATOR_ALL,
) -> float | None:
    """Average pairwise score of two deputies over the period's propositions.

    A deputy with no record for a proposition is treated as absent. With the
    "both_voted" denominator the average runs over propositions both deputies
    attended, and None is returned when there is no such proposition.
    """
    if not propositions:
        raise DataError("empty extraction period: no propositions to average over")

    def by_proposition(records: Sequence[VoteRecord]) -> dict[str, Vote]:
        votes: dict[str, Vote] = {}
        for rec in records:
            if rec.proposition_id in votes:
                raise DataError(
                    f"duplicate record for (proposition {rec.proposition_id!r}, "
                    f"deputy {rec.deputy_id!r})"
                )
            votes[rec.proposition_id] = rec.vote
        return votes

    votes_u = by_proposition(records_u)
    votes_v = by_proposition(records_v)

    scores = []
    common = 0
    for pid in propositions:
        vu = votes_u.get(pid, Vote.ABSENT)
        vv = votes_v.get(pid, Vote.ABSENT)
        if vu is not Vote.ABSENT and vv is not Vote.ABSENT:
            common += 1
        scores.append(pairwise_score(vu, vv, scheme))

    if denominator == DENOMINATOR_BOTH_VOTED:
        if common == 0:
            return None
        return math.fsum(scores) / common
    return math.fsum(scores) / len(propositions)


# Codes used by the vectorized path: obstruction is folded into AGAINST at
# encoding time, absence is the fill value for missing records.
_CODE = {Vote.FOR: 0, Vote.AGAINST: 1, Vote.OBSTRUCTION: 1, Vote.ABSTAIN: 2, Vote.ABSENT: 3}


def _agreement_matrix(codes: np.ndarray, scheme: AgreementScheme,
                      denominator: str) -> np.ndarray:
    """All-pairs average agreement from an (n, l) vote-code matrix.

    Scores are dyadic rationals, so the matrix products below are exact and
    the result is bit-identical to averaging pairwise_score per pair.
    """
    n, n_props = codes.shape
    e_for = (codes == 0).astype(np.float64)
    e_against = (codes == 1).astype(np.float64)
    e_abstain = (codes == 2).astype(np.float64)

    diff = e_for - e_against
    numer = diff @ diff.T
    if scheme is AgreementScheme.V2_ABSENCE_OF_OPINION:
        numer += e_abstain @ e_abstain.T
    else:
        voted = e_for + e_against + e_abstain
        numer += 0.5 * (e_abstain @ voted.T + voted @ e_abstain.T - e_abstain @ e_abstain.T)

    if denominator == DENOMINATOR_BOTH_VOTED:
        present = (codes != 3).astype(np.float64)
        counts = present @ present.T
        with np.errstate(invalid="ignore", divide="ignore"):
            m = np.where(counts > 0, numer / np.where(counts > 0, counts, 1.0), 0.0)
        return m
    return numer / n_props


def build_network(
    records: Sequence[VoteRecord],
    deputies: Sequence[Deputy],
    config: ExtractionConfig,
) -> SignedGraph:
    """Build the signed agreement graph for one extraction period.

    Vertices are the deputies with at least one non-absent record in the
    period, in the order they appear in `deputies`; an edge is kept when the
    magnitude of the average agreement reaches the configured threshold.
    """
    roster = {d.id: d for d in deputies}
    if len(roster) != len(deputies):
        raise DataError("duplicate deputy id in roster")

    if config.period_filter is None:
        period_records = list(records)
    else:
        period_records = [r for r in records if config.period_filter(r.proposition_id)]

    propositions: list[str] = []
    prop_index: dict[str, int] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for rec in period_records:
        if rec.deputy_id not in roster:
            raise DataError(f"record references unknown deputy {rec.deputy_id!r}")
        pair = (rec.proposition_id, rec.deputy_id)
        if pair in seen_pairs:
            raise DataError(
                f"duplicate record for (proposition {rec.proposition_id!r}, "
                f"deputy {rec.deputy_id!r})"
            )
        seen_pairs.add(pair)
        if rec.proposition_id not in prop_index:
            prop_index[rec.proposition_id] = len(propositions)
            propositions.append(rec.proposition_id)

    if not propositions:
        raise DataError("empty extraction period: no propositions after filtering")

    voted_ids = {
        rec.deputy_id for rec in period_records if rec.vote is not Vote.ABSENT
    }
    vertex_deputies = [d for d in deputies if d.id in voted_ids]
    if not vertex_deputies:
        raise DataError("no deputy voted within the extraction period")

    dep_index = {d.id: i for i, d in enumerate(vertex_deputies)}
    codes = np.full((len(vertex_deputies), len(propositions)), _CODE[Vote.ABSENT],
                    dtype=np.int8)
    for rec in period_records:
        row = dep_index.get(rec.deputy_id)
        if row is not None:
            codes[row, prop_index[rec.proposition_id]] = _CODE[rec.vote]

    m = _agreement_matrix(codes, config.scheme, config.denominator)

    iu, iv = np.triu_indices(len(vertex_deputies), k=1)
    weights = m[iu, iv]
    keep = (np.abs(weights) >= config.edge_threshold) & (weights != 0.0)

    ids = tuple(d.id for d in vertex_deputies)
    edges = [
        (ids[int(u)], ids[int(v)], float(w))
        for u, v, w in zip(iu[keep], iv[keep], weights[keep])
    ]
    return SignedGraph(ids, edges)


@dataclass(frozen=True)
class VoteData:
    """Parsed vote file: roster, records, and optional proposition dates."""

    deputies: tuple[Deputy, ...]
    records: tuple[VoteRecord, ...]
    proposition_dates: dict[str, str] = field(default_factory=dict)


def parse_vote_records(
    stream: TextIO | str,
    format: str,
) -> tuple[list[Deputy], list[VoteRecord]]:
    """Parse a CSV or JSON vote stream into (deputies, records).

    Deputies are deduplicated by id with first-appearance attributes winning;
    unknown vote tokens and malformed rows are rejected with their position.
    """
    data = parse_vote_data(stream, format)
    return list(data.deputies), list(data.records)


def parse_vote_data(stream: TextIO | str, format: str) -> VoteData:
    """Like parse_vote_records but also captures the optional date column."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    fmt = format.strip().lower()
    if fmt == "csv":
        return _parse_csv(stream)
    if fmt == "json":
        return _parse_json(stream)
    raise ValueError(f"unknown vote file format {format!r}")


def _parse_csv(stream: TextIO) -> VoteData:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise DataError("empty vote file: missing header row")
    missing = [c for c in _CSV_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise DataError(f"vote CSV header lacks column(s): {', '.join(missing)}")
    has_date = "date" in reader.fieldnames

    deputies: dict[str, Deputy] = {}
    records: list[VoteRecord] = []
    dates: dict[str, str] = {}
    for row in reader:
        line = reader.line_num
        values = {c: (row.get(c) or "").strip() for c in _CSV_COLUMNS}
        if any(row.get(c) is None for c in _CSV_COLUMNS):
            raise DataError(f"line {line}: truncated row")
        try:
            vote = parse_vote_token(values["vote"])
            deputy = Deputy(values["deputy_id"], values["deputy_name"],
                            values["party"], values["state"])
        except DataError as exc:
            raise DataError(f"line {line}: {exc}") from None
        if not values["proposition_id"]:
            raise DataError(f"line {line}: empty proposition_id")
        deputies.setdefault(deputy.id, deputy)
        records.append(VoteRecord(values["proposition_id"], deputy.id, vote))
        if has_date:
            date = (row.get("date") or "").strip()
            if date:
                previous = dates.setdefault(values["proposition_id"], date)
                if previous != date:
                    raise DataError(
                        f"line {line}: proposition {values['proposition_id']!r} "
                        f"has conflicting dates {previous!r} and {date!r}"
                    )
    return VoteData(tuple(deputies.values()), tuple(records), dates)


def _parse_json(stream: TextIO) -> VoteData:
    try:
        payload = json.load(stream)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON vote file: {exc}") from None
    if not isinstance(payload, list):
        raise DataError("JSON vote file must be an array of objects")

    deputies: dict[str, Deputy] = {}
    records: list[VoteRecord] = []
    dates: dict[str, str] = {}
    for i, obj in enumerate(payload):
        if not isinstance(obj, dict):
            raise DataError(f"record {i}: expected an object")
        try:
            values = {c: str(obj[c]).strip() for c in _CSV_COLUMNS}
        except KeyError as exc:
            raise DataError(f"record {i}: missing key {exc.args[0]!r}") from None
        try:
            vote = parse_vote_token(values["vote"])
            deputy = Deputy(values["deputy_id"], values["deputy_name"],
                            values["party"], values["state"])
        except DataError as exc:
            raise DataError(f"record {i}: {exc}") from None
        if not values["proposition_id"]:
            raise DataError(f"record {i}: empty proposition_id")
        deputies.setdefault(deputy.id, deputy)
        records.append(VoteRecord(values["proposition_id"], deputy.id, vote))
        date = str(obj.get("date") or "").strip()
        if date:
            previous = dates.setdefault(values["proposition_id"], date)
            if previous != date:
                raise DataError(
                    f"record {i}: proposition {values['proposition_id']!r} "
                    f"has conflicting dates {previous!r} and {date!r}"
                )
    return VoteData(tuple(deputies.values()), tuple(records), dates)
