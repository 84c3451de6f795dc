"""On-disk formats: the graph text format, partition JSON, vote files,
coalition/leader CSVs, report tables, and run manifests.

Every writer is deterministic for identical in-memory inputs, which is what
makes whole-pipeline reruns byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from .analysis import CoalitionMap, LeaderMap
from .core import DataError, Deputy, Partition, SignedGraph, VoteRecord

# The graph format stores weights with six decimals; weights that are exact
# multiples of 1e-6 round-trip identically.
_WEIGHT_DECIMALS = 6


def _token(value: str, what: str) -> str:
    if not value or any(ch.isspace() for ch in value):
        raise DataError(f"{what} {value!r} must be non-empty and whitespace-free")
    return value


def write_graph(path: str | Path, graph: SignedGraph,
                deputies: Sequence[Deputy]) -> None:
    """Write the space-separated graph format:

    n m / n lines "index deputy_id party state" / m lines "u v weight"
    with u < v as vertex indices, edges sorted by (u, v).
    """
    roster = {d.id: d for d in deputies}
    lines = [f"{graph.n} {graph.m}"]
    for i, vid in enumerate(graph.vertex_ids):
        deputy = roster.get(vid)
        if deputy is None:
            raise DataError(f"graph vertex {vid!r} missing from the deputy roster")
        lines.append(
            f"{i} {_token(vid, 'deputy id')} {_token(deputy.party, 'party')} "
            f"{_token(deputy.state, 'state')}"
        )
    for u, v, w in graph.edges:
        text = f"{w:.{_WEIGHT_DECIMALS}f}"
        if float(text) == 0.0:
            raise DataError(
                f"edge ({u}, {v}) weight {w} is below the format resolution "
                f"of 1e-{_WEIGHT_DECIMALS}"
            )
        lines.append(f"{u} {v} {text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_graph(path: str | Path) -> tuple[SignedGraph, list[Deputy]]:
    """Read the graph format back; deputy names are not stored, so the id is
    reused as the display name."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataError(f"{path}: empty graph file")

    def fail(line_no: int, message: str) -> DataError:
        return DataError(f"{path}:{line_no}: {message}")

    head = lines[0].split()
    if len(head) != 2:
        raise fail(1, "expected header 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise fail(1, "header counts must be integers") from None
    if len(lines) < 1 + n + m:
        raise fail(len(lines), f"expected {1 + n + m} lines, found {len(lines)}")

    deputies: list[Deputy] = []
    ids: list[str] = []
    for i in range(n):
        row = lines[1 + i].split()
        if len(row) != 4:
            raise fail(2 + i, "expected 'index deputy_id party state'")
        if row[0] != str(i):
            raise fail(2 + i, f"expected vertex index {i}, found {row[0]}")
        ids.append(row[1])
        deputies.append(Deputy(id=row[1], name=row[1], party=row[2], state=row[3]))

    edges = []
    for j in range(m):
        row = lines[1 + n + j].split()
        if len(row) != 3:
            raise fail(2 + n + j, "expected 'u v weight'")
        try:
            u, v, w = int(row[0]), int(row[1]), float(row[2])
        except ValueError:
            raise fail(2 + n + j, "malformed edge row") from None
        if not 0 <= u < v < n:
            raise fail(2 + n + j, f"edge indices ({u}, {v}) out of order or range")
        edges.append((ids[u], ids[v], w))
    return SignedGraph(ids, edges), deputies


def write_partition(path: str | Path, partition: Partition) -> None:
    payload = {"k": partition.k, "assignment": dict(partition.assignment)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_partition(path: str | Path) -> Partition:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid partition JSON: {exc}") from None
    if not isinstance(payload, dict) or "k" not in payload or "assignment" not in payload:
        raise DataError(f"{path}: partition JSON needs 'k' and 'assignment'")
    try:
        return Partition(dict(payload["assignment"]), int(payload["k"]))
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def write_votes_csv(path: str | Path, deputies: Sequence[Deputy],
                    records: Sequence[VoteRecord],
                    proposition_dates: dict[str, str] | None = None) -> None:
    roster = {d.id: d for d in deputies}
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        header = ["proposition_id", "deputy_id", "deputy_name", "party", "state", "vote"]
        if proposition_dates:
            header.append("date")
        writer.writerow(header)
        for rec in records:
            deputy = roster[rec.deputy_id]
            row = [rec.proposition_id, deputy.id, deputy.name, deputy.party,
                   deputy.state, rec.vote.value]
            if proposition_dates:
                row.append(proposition_dates.get(rec.proposition_id, ""))
            writer.writerow(row)


def read_coalition_map(path: str | Path, default: str | None = None) -> CoalitionMap:
    """CSV with header 'party,alliance'."""
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"party", "alliance"} <= set(reader.fieldnames):
            raise DataError(f"{path}: expected header 'party,alliance'")
        alliances = {}
        for row in reader:
            party = (row.get("party") or "").strip()
            alliance = (row.get("alliance") or "").strip()
            if not party or not alliance:
                raise DataError(f"{path}:{reader.line_num}: empty party or alliance")
            if party in alliances and alliances[party] != alliance:
                raise DataError(f"{path}:{reader.line_num}: conflicting rows for {party!r}")
            alliances[party] = alliance
    return CoalitionMap(alliances, default=default)


def read_leader_map(path: str | Path, deputies: Sequence[Deputy]) -> LeaderMap:
    """CSV with header 'party,leader_deputy_id', validated against the roster."""
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        expected = {"party", "leader_deputy_id"}
        if reader.fieldnames is None or not expected <= set(reader.fieldnames):
            raise DataError(f"{path}: expected header 'party,leader_deputy_id'")
        leaders = {}
        for row in reader:
            party = (row.get("party") or "").strip()
            leader = (row.get("leader_deputy_id") or "").strip()
            if not party or not leader:
                raise DataError(f"{path}:{reader.line_num}: empty party or leader id")
            if party in leaders and leaders[party] != leader:
                raise DataError(f"{path}:{reader.line_num}: conflicting rows for {party!r}")
            leaders[party] = leader
    return LeaderMap.validated(leaders, deputies)


def write_report_csv(path: str | Path, header: Sequence[str],
                     rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))


def write_json(path: str | Path, payload: Any) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
