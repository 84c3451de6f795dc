"""Iterated local search for both clustering objectives, plus an exact
brute-force oracle for small instances.

The search keeps incremental structures (per-vertex weight-to-cluster sums
and, for the relaxed objective, per-block totals) so every candidate 1-move
delta is available without rescanning the graph. All randomness flows through
an explicit numpy Generator; identical seeds give bit-identical runs.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Partition, SignedGraph, partition_from_labels, partition_labels
from .imbalance import (
    ImbalanceBreakdown,
    ProblemKind,
    block_totals,
    cc_imbalance,
    srcc_imbalance,
)

IMPROVEMENT_TOL = 1e-9
BRUTE_FORCE_MAX_N = 12


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the iterated local search.

    perturbation_strength is the base fraction of vertices a kick reassigns;
    the solve loop escalates it while iterations fail to improve and resets
    it on every improvement.
    """

    problem: ProblemKind
    seed: int
    max_iterations: int = 500
    max_no_improve: int = 50
    time_limit_seconds: float | None = None
    perturbation_strength: float = 0.1
    construction_alpha: float = 0.3
    restarts: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.max_no_improve < 1:
            raise ValueError("max_no_improve must be positive")
        if self.time_limit_seconds is not None and self.time_limit_seconds <= 0:
            raise ValueError("time_limit_seconds must be positive")
        if not 0.0 < self.perturbation_strength <= 1.0:
            raise ValueError("perturbation_strength must be in (0, 1]")
        if not 0.0 <= self.construction_alpha <= 1.0:
            raise ValueError("construction_alpha must be in [0, 1]")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")


@dataclass(frozen=True)
class SolveResult:
    best_partition: Partition
    best_value: float
    breakdown: ImbalanceBreakdown
    iterations_run: int
    wall_time_seconds: float
    trace: tuple[tuple[int, float], ...]


class _GraphArrays:
    """Numpy views of a graph shared by all search routines of one solve."""

    def __init__(self, graph: SignedGraph) -> None:
        self.graph = graph
        self.n = graph.n
        edges = graph.edges
        self.eu = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
        self.ev = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
        self.ew = np.fromiter((e[2] for e in edges), dtype=np.float64, count=len(edges))
        pos_nbr, pos_w, neg_nbr, neg_w = [], [], [], []
        for v in range(graph.n):
            nbrs = graph.neighbors(v)
            pn = [(u, w) for u, w in nbrs if w > 0]
            nn = [(u, -w) for u, w in nbrs if w < 0]
            pos_nbr.append(np.array([u for u, _ in pn], dtype=np.int64))
            pos_w.append(np.array([w for _, w in pn], dtype=np.float64))
            neg_nbr.append(np.array([u for u, _ in nn], dtype=np.int64))
            neg_w.append(np.array([w for _, w in nn], dtype=np.float64))
        self.pos_nbr, self.pos_w = pos_nbr, pos_w
        self.neg_nbr, self.neg_w = neg_nbr, neg_w


def _objective_from_labels(ga: _GraphArrays, labels: np.ndarray, k: int,
                           problem: ProblemKind) -> float:
    """Objective value recomputed from the edge list (vectorized)."""
    if ga.eu.size == 0:
        return 0.0
    lu, lv = labels[ga.eu], labels[ga.ev]
    if not problem.is_srcc:
        cost = np.where(lu == lv, np.maximum(-ga.ew, 0.0), np.maximum(ga.ew, 0.0))
        return float(cost.sum())
    a, b = np.minimum(lu, lv), np.maximum(lu, lv)
    pos = np.zeros((k, k))
    neg = np.zeros((k, k))
    wpos = ga.ew > 0
    np.add.at(pos, (a[wpos], b[wpos]), ga.ew[wpos])
    np.add.at(neg, (a[~wpos], b[~wpos]), -ga.ew[~wpos])
    iu = np.triu_indices(k)
    return float(np.minimum(pos[iu], neg[iu]).sum())


def _weight_to_cluster(ga: _GraphArrays, labels: np.ndarray, k: int):
    """Per-vertex positive / absolute-negative weight toward each cluster."""
    pos_to = np.zeros((ga.n, k))
    neg_to = np.zeros((ga.n, k))
    lu, lv = labels[ga.eu], labels[ga.ev]
    wpos = ga.ew > 0
    np.add.at(pos_to, (ga.eu[wpos], lv[wpos]), ga.ew[wpos])
    np.add.at(pos_to, (ga.ev[wpos], lu[wpos]), ga.ew[wpos])
    np.add.at(neg_to, (ga.eu[~wpos], lv[~wpos]), -ga.ew[~wpos])
    np.add.at(neg_to, (ga.ev[~wpos], lu[~wpos]), -ga.ew[~wpos])
    return pos_to, neg_to


def _block_matrices(ga: _GraphArrays, labels: np.ndarray, k: int):
    """Symmetric (k, k) block totals; the diagonal holds intra sums once."""
    pos = np.zeros((k, k))
    neg = np.zeros((k, k))
    if ga.eu.size:
        lu, lv = labels[ga.eu], labels[ga.ev]
        a, b = np.minimum(lu, lv), np.maximum(lu, lv)
        wpos = ga.ew > 0
        np.add.at(pos, (a[wpos], b[wpos]), ga.ew[wpos])
        np.add.at(neg, (a[~wpos], b[~wpos]), -ga.ew[~wpos])
        pos = pos + pos.T - np.diag(np.diag(pos))
        neg = neg + neg.T - np.diag(np.diag(neg))
    return pos, neg


def _badd(mat: np.ndarray, a: int, b: int, x: float) -> None:
    mat[a, b] += x
    if a != b:
        mat[b, a] += x


class _CCState:
    """Single-owner working state for CC local search (k is emergent)."""

    def __init__(self, ga: _GraphArrays, labels: np.ndarray, k: int) -> None:
        self.ga = ga
        self.labels = labels.astype(np.int64)
        self.k = k
        self.sizes = np.bincount(self.labels, minlength=k).astype(np.int64)
        self.pos_to, self.neg_to = _weight_to_cluster(ga, self.labels, k)

    def delta_matrix(self) -> np.ndarray:
        """(n, k+1) move deltas; column k opens a new singleton cluster."""
        n, k = self.ga.n, self.k
        rows = np.arange(n)
        base = self.neg_to[rows, self.labels] - self.pos_to[rows, self.labels]
        deltas = np.empty((n, k + 1))
        deltas[:, :k] = (self.neg_to - self.pos_to) - base[:, None]
        deltas[rows, self.labels] = np.inf
        deltas[:, k] = -base
        sole = self.sizes[self.labels] == 1
        deltas[sole, k] = np.inf
        return deltas

    def apply(self, v: int, t: int) -> None:
        if t == self.k:
            self.pos_to = np.hstack([self.pos_to, np.zeros((self.ga.n, 1))])
            self.neg_to = np.hstack([self.neg_to, np.zeros((self.ga.n, 1))])
            self.sizes = np.append(self.sizes, 0)
            self.k += 1
        s = int(self.labels[v])
        self.labels[v] = t
        self.sizes[s] -= 1
        self.sizes[t] += 1
        ga = self.ga
        self.pos_to[ga.pos_nbr[v], s] -= ga.pos_w[v]
        self.pos_to[ga.pos_nbr[v], t] += ga.pos_w[v]
        self.neg_to[ga.neg_nbr[v], s] -= ga.neg_w[v]
        self.neg_to[ga.neg_nbr[v], t] += ga.neg_w[v]
        if self.sizes[s] == 0:
            last = self.k - 1
            if s != last:
                self.labels[self.labels == last] = s
                self.pos_to[:, s] = self.pos_to[:, last]
                self.neg_to[:, s] = self.neg_to[:, last]
                self.sizes[s] = self.sizes[last]
            self.pos_to = self.pos_to[:, :last].copy()
            self.neg_to = self.neg_to[:, :last].copy()
            self.sizes = self.sizes[:last].copy()
            self.k = last


class _SRCCState:
    """Single-owner working state for the relaxed objective (k fixed)."""

    def __init__(self, ga: _GraphArrays, labels: np.ndarray, k: int) -> None:
        self.ga = ga
        self.labels = labels.astype(np.int64)
        self.k = k
        self.sizes = np.bincount(self.labels, minlength=k).astype(np.int64)
        self.pos_to, self.neg_to = _weight_to_cluster(ga, self.labels, k)
        self.bpos, self.bneg = _block_matrices(ga, self.labels, k)

    def delta_matrix(self) -> np.ndarray:
        """(n, k) move deltas from the adjusted totals of affected blocks.

        Moving v from s to t adjusts blocks {s,c} (lose v's weight to c) and
        {t,c} (gain it); the {s,t} block receives both adjustments at once.
        """
        n, k = self.ga.n, self.k
        rows = np.arange(n)
        lab = self.labels
        P, N = self.pos_to, self.neg_to
        POS, NEG = self.bpos, self.bneg
        MIN0 = np.minimum(POS, NEG)

        pos_s, neg_s, min_s = POS[lab], NEG[lab], MIN0[lab]      # (n, k): row s_v
        m1 = np.minimum(pos_s - P, neg_s - N) - min_s            # blocks {s, c}
        s1 = m1.sum(axis=1)

        m2 = np.minimum(POS[None] + P[:, None, :], NEG[None] + N[:, None, :]) - MIN0[None]
        sum2 = m2.sum(axis=2)                                    # (n, k): blocks {t, c}
        m2_at_s = m2[rows[:, None], np.arange(k)[None, :], lab[:, None]]

        p_s, n_s = P[rows, lab][:, None], N[rows, lab][:, None]
        term_st = np.minimum(pos_s - P + p_s, neg_s - N + n_s) - min_s

        deltas = (s1[:, None] - m1) + (sum2 - m2_at_s) + term_st
        deltas[rows, lab] = np.inf
        deltas[self.sizes[lab] == 1, :] = np.inf
        return deltas

    def apply(self, v: int, t: int) -> None:
        s = int(self.labels[v])
        p_v = self.pos_to[v].copy()
        n_v = self.neg_to[v].copy()
        for c in range(self.k):
            p, q = float(p_v[c]), float(n_v[c])
            if p == 0.0 and q == 0.0:
                continue
            if c == s:
                _badd(self.bpos, s, s, -p)
                _badd(self.bneg, s, s, -q)
                _badd(self.bpos, s, t, p)
                _badd(self.bneg, s, t, q)
            elif c == t:
                _badd(self.bpos, s, t, -p)
                _badd(self.bneg, s, t, -q)
                _badd(self.bpos, t, t, p)
                _badd(self.bneg, t, t, q)
            else:
                _badd(self.bpos, s, c, -p)
                _badd(self.bneg, s, c, -q)
                _badd(self.bpos, t, c, p)
                _badd(self.bneg, t, c, q)
        self.labels[v] = t
        self.sizes[s] -= 1
        self.sizes[t] += 1
        ga = self.ga
        self.pos_to[ga.pos_nbr[v], s] -= ga.pos_w[v]
        self.pos_to[ga.pos_nbr[v], t] += ga.pos_w[v]
        self.neg_to[ga.neg_nbr[v], s] -= ga.neg_w[v]
        self.neg_to[ga.neg_nbr[v], t] += ga.neg_w[v]


def _pick_best(deltas: np.ndarray) -> tuple[float, int, int]:
    """First flat minimum, scanning vertices then targets (deterministic)."""
    flat = int(np.argmin(deltas))
    v, t = divmod(flat, deltas.shape[1])
    return float(deltas[v, t]), v, t


def _apply_plain(labels: np.ndarray, sizes: np.ndarray, k: int, v: int, t: int,
                 is_cc: bool) -> tuple[np.ndarray, int]:
    """Move application on bare labels, mirroring the states' renumber rule."""
    if is_cc and t == k:
        sizes = np.append(sizes, 0)
        k += 1
    s = int(labels[v])
    labels[v] = t
    sizes[s] -= 1
    sizes[t] += 1
    if is_cc and sizes[s] == 0:
        last = k - 1
        if s != last:
            labels[labels == last] = s
            sizes[s] = sizes[last]
        sizes = sizes[:last].copy()
        k = last
    return sizes, k


def _scratch_delta_matrix(ga: _GraphArrays, labels: np.ndarray, sizes: np.ndarray,
                          k: int, problem: ProblemKind) -> np.ndarray:
    """Candidate deltas via full recomputation; debug reference for the
    incremental matrices, candidate order identical."""
    is_cc = not problem.is_srcc
    width = k + 1 if is_cc else k
    base = _objective_from_labels(ga, labels, k, problem)
    deltas = np.full((ga.n, width), np.inf)
    for v in range(ga.n):
        s = int(labels[v])
        for t in range(width):
            if t == s:
                continue
            if not is_cc and sizes[s] == 1:
                continue
            if is_cc and t == k and sizes[s] == 1:
                continue
            trial = labels.copy()
            trial[v] = t
            kk = k + 1 if (is_cc and t == k) else k
            deltas[v, t] = _objective_from_labels(ga, trial, kk, problem) - base
    return deltas


def _descend(ga: _GraphArrays, labels: np.ndarray, k: int, problem: ProblemKind,
             mode: str = "incremental",
             collect_moves: list | None = None) -> tuple[np.ndarray, int]:
    """Best-improvement 1-move descent until no move improves by > tolerance."""
    if mode not in ("incremental", "scratch"):
        raise ValueError(f"unknown local search mode {mode!r}")
    if mode == "incremental":
        state: _CCState | _SRCCState
        if problem.is_srcc:
            state = _SRCCState(ga, labels, k)
        else:
            state = _CCState(ga, labels, k)
        while True:
            delta, v, t = _pick_best(state.delta_matrix())
            if not delta < -IMPROVEMENT_TOL:
                break
            state.apply(v, t)
            if collect_moves is not None:
                collect_moves.append((v, t))
        return state.labels, state.k

    labels = labels.astype(np.int64).copy()
    sizes = np.bincount(labels, minlength=k).astype(np.int64)
    while True:
        deltas = _scratch_delta_matrix(ga, labels, sizes, k, problem)
        delta, v, t = _pick_best(deltas)
        if not delta < -IMPROVEMENT_TOL:
            break
        sizes, k = _apply_plain(labels, sizes, k, v, t, not problem.is_srcc)
        if collect_moves is not None:
            collect_moves.append((v, t))
    return labels, k


def _construct_labels(ga: _GraphArrays, problem: ProblemKind, alpha: float,
                      rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Greedy randomized construction over a random insertion order."""
    n = ga.n
    graph = ga.graph
    order = rng.permutation(n)
    labels = np.full(n, -1, dtype=np.int64)

    def incident(v: int) -> tuple[dict[int, float], dict[int, float], float]:
        pos: dict[int, float] = {}
        neg: dict[int, float] = {}
        pos_total = 0.0
        for u, w in graph.neighbors(v):
            c = labels[u]
            if c < 0:
                continue
            if w > 0:
                pos[c] = pos.get(c, 0.0) + w
                pos_total += w
            else:
                neg[c] = neg.get(c, 0.0) - w
        return pos, neg, pos_total

    def rcl_pick(deltas: list[float]) -> int:
        best, worst = min(deltas), max(deltas)
        threshold = best + alpha * (worst - best)
        candidates = [i for i, d in enumerate(deltas) if d <= threshold]
        return candidates[int(rng.integers(len(candidates)))]

    if problem.is_srcc:
        k = problem.k
        assert k is not None
        if n < k:
            raise ValueError(f"srcc with k={k} needs at least {k} vertices, got {n}")
        # Dispersed seeding: after a random first seed, each further seed is
        # drawn from the vertices with the least summed agreement to the
        # seeds so far (restricted-candidate randomization, same alpha).
        # Uniform seeds routinely land in one natural group, and the fixed-k
        # search cannot undo that (the unsplitting move would empty a
        # cluster), so spread seeds are what make the descent start sound.
        affinity = np.zeros(n)
        seeds = [int(order[0])]
        affinity[seeds[0]] = np.inf
        while len(seeds) < k:
            for u, w in graph.neighbors(seeds[-1]):
                if np.isfinite(affinity[u]):
                    affinity[u] += w
            open_vertices = np.flatnonzero(np.isfinite(affinity))
            scores = affinity[open_vertices]
            threshold = scores.min() + alpha * (scores.max() - scores.min())
            candidates = open_vertices[scores <= threshold]
            nxt = int(candidates[int(rng.integers(len(candidates)))])
            seeds.append(nxt)
            affinity[nxt] = np.inf
        for seat, v in enumerate(seeds):
            labels[v] = seat
        seed_set = set(seeds)
        # Placements are scored by the unrelaxed agreement delta (negatives
        # joined plus positives left behind). The relaxed objective itself is
        # blind while clusters are young: a half-built cluster absorbs
        # hostile vertices for free, since a mostly-negative block is
        # legitimate. Agreement-guided insertion builds the homogeneous
        # clusters the relaxed descent then refines.
        for v in order:
            if int(v) in seed_set:
                continue
            pos, neg, pos_total = incident(int(v))
            deltas = [neg.get(c, 0.0) + (pos_total - pos.get(c, 0.0)) for c in range(k)]
            labels[v] = rcl_pick(deltas)
        return labels, k

    k = 0
    for v in order:
        pos, neg, pos_total = incident(int(v))
        # joining cluster c costs its negatives plus the positives left behind;
        # a fresh singleton costs all inserted positives
        deltas = [neg.get(c, 0.0) + (pos_total - pos.get(c, 0.0)) for c in range(k)]
        deltas.append(pos_total)
        chosen = rcl_pick(deltas)
        if chosen == k:
            k += 1
        labels[v] = chosen
    return labels, k


def _perturb_labels(labels: np.ndarray, k: int, strength: float,
                    problem: ProblemKind,
                    rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Reassign ceil(strength * n) distinct vertices to random clusters."""
    labels = labels.astype(np.int64).copy()
    n = len(labels)
    sizes = np.bincount(labels, minlength=k).astype(np.int64)
    count = min(n, math.ceil(strength * n))
    chosen = rng.choice(n, size=count, replace=False)
    is_cc = not problem.is_srcc
    for v in chosen:
        v = int(v)
        s = int(labels[v])
        if problem.is_srcc:
            if sizes[s] == 1:
                continue
            t = int(rng.integers(k - 1))
            if t >= s:
                t += 1
        else:
            candidates = list(range(s)) + list(range(s + 1, k))
            if sizes[s] > 1:
                candidates.append(k)
            if not candidates:
                continue
            t = candidates[int(rng.integers(len(candidates)))]
        sizes, k = _apply_plain(labels, sizes, k, v, t, is_cc)
    return labels, k


def greedy_randomized_construction(
    graph: SignedGraph,
    problem: ProblemKind,
    alpha: float,
    rng_state: np.random.Generator,
) -> Partition:
    """Insert vertices in random order, each into a placement drawn uniformly
    from the restricted candidate list within alpha of the best delta."""
    if graph.n == 0:
        raise ValueError("cannot construct a partition of an empty graph")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    labels, k = _construct_labels(_GraphArrays(graph), problem, alpha, rng_state)
    return partition_from_labels(graph, labels, k)


def local_search(
    graph: SignedGraph,
    start: Partition,
    problem: ProblemKind,
    mode: str = "incremental",
) -> Partition:
    """Best-improvement relocation descent to a 1-move local optimum.

    mode="scratch" recomputes every candidate from the edge list instead of
    the incremental structures; it must choose the same move sequence.
    """
    labels = np.array(partition_labels(graph, start), dtype=np.int64)
    if problem.is_srcc and start.k != problem.k:
        raise ValueError(f"partition has k={start.k}, problem expects k={problem.k}")
    out, k = _descend(_GraphArrays(graph), labels, start.k, problem, mode=mode)
    return partition_from_labels(graph, out, k)


def perturb(
    partition: Partition,
    strength: float,
    problem: ProblemKind,
    rng_state: np.random.Generator,
) -> Partition:
    """Random reassignment of ceil(strength * n) vertices, never emptying a
    cluster for the fixed-k problem; CC moves may open fresh clusters."""
    if not 0.0 < strength <= 1.0:
        raise ValueError("strength must be in (0, 1]")
    vertex_ids = list(partition.assignment)
    labels = np.array([partition.assignment[v] for v in vertex_ids], dtype=np.int64)
    out, k = _perturb_labels(labels, partition.k, strength, problem, rng_state)
    return Partition(dict(zip(vertex_ids, (int(c) for c in out))), k)


@dataclass
class _RestartOutcome:
    labels: np.ndarray
    k: int
    value: float
    trace: list[tuple[int, float]]
    iterations: int


def _run_restart(ga: _GraphArrays, params: SolverParams, restart: int,
                 deadline: float | None) -> _RestartOutcome:
    rng = np.random.default_rng(params.seed ^ restart)
    problem = params.problem
    labels, k = _construct_labels(ga, problem, params.construction_alpha, rng)
    labels, k = _descend(ga, labels, k, problem)
    value = _objective_from_labels(ga, labels, k, problem)
    trace = [(0, value)]
    iterations = 0
    stall = 0
    while iterations < params.max_iterations and stall < params.max_no_improve:
        if deadline is not None and time.perf_counter() >= deadline:
            break
        iterations += 1
        # Kicks escalate while the search stalls: a one-vertex nudge explores
        # only a handful of descent outcomes, so repeated failures widen the
        # kick up to a full reshuffle. Any improvement resets the strength.
        strength = min(1.0, params.perturbation_strength * (1 + stall))
        cand, ck = _perturb_labels(labels, k, strength, problem, rng)
        cand, ck = _descend(ga, cand, ck, problem)
        cand_value = _objective_from_labels(ga, cand, ck, problem)
        if cand_value < value - IMPROVEMENT_TOL:
            labels, k, value = cand, ck, cand_value
            trace.append((iterations, value))
            stall = 0
        else:
            stall += 1
    return _RestartOutcome(labels, k, value, trace, iterations)


def ils_solve(graph: SignedGraph, params: SolverParams, threads: int = 1) -> SolveResult:
    """Construct, descend, then iterate perturbation + descent, keeping
    strictly better incumbents; best over restarts wins (lower restart index
    on ties). Deterministic for a fixed seed; restart r derives seed ^ r.
    """
    if graph.n == 0:
        raise ValueError("cannot solve on an empty graph")
    if params.problem.is_srcc and graph.n < (params.problem.k or 1):
        raise ValueError(
            f"srcc with k={params.problem.k} needs at least that many vertices, "
            f"got {graph.n}"
        )
    if threads < 1:
        raise ValueError("threads must be positive")

    start = time.perf_counter()
    deadline = None
    if params.time_limit_seconds is not None:
        deadline = start + params.time_limit_seconds

    ga = _GraphArrays(graph)
    if threads == 1 or params.restarts == 1:
        outcomes = [_run_restart(ga, params, r, deadline) for r in range(params.restarts)]
    else:
        # Restarts are independent replicas; merging below is order-free.
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_restart, ga, params, r, deadline)
                       for r in range(params.restarts)]
            outcomes = [f.result() for f in futures]

    best_index = min(range(len(outcomes)), key=lambda r: (outcomes[r].value, r))
    best = outcomes[best_index]
    partition = partition_from_labels(graph, best.labels, best.k)

    if params.problem.is_srcc:
        breakdown = srcc_imbalance(graph, partition)
    else:
        breakdown = ImbalanceBreakdown(
            total=cc_imbalance(graph, partition),
            blocks=block_totals(graph, partition),
        )
    return SolveResult(
        best_partition=partition,
        best_value=breakdown.total,
        breakdown=breakdown,
        iterations_run=sum(o.iterations for o in outcomes),
        wall_time_seconds=time.perf_counter() - start,
        trace=tuple(best.trace),
    )


def _all_restricted_growth_strings(n: int, max_labels: int) -> np.ndarray:
    """All restricted-growth strings of length n using at most max_labels
    labels, as an array in lexicographic order."""
    rows = np.zeros((1, 1), dtype=np.int8)
    max_label = np.zeros(1, dtype=np.int8)
    for i in range(1, n):
        counts = np.minimum(max_label.astype(np.int64) + 2, max_labels)
        total = int(counts.sum())
        repeat_idx = np.repeat(np.arange(len(rows)), counts)
        new_rows = np.empty((total, i + 1), dtype=np.int8)
        new_rows[:, :i] = rows[repeat_idx]
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        new_col = (np.arange(total) - np.repeat(offsets, counts)).astype(np.int8)
        new_rows[:, i] = new_col
        rows = new_rows
        max_label = np.maximum(max_label[repeat_idx], new_col)
    return rows


def _evaluate_cc_rows(ga: _GraphArrays, rows: np.ndarray) -> np.ndarray:
    values = np.zeros(len(rows))
    for u, v, w in zip(ga.eu, ga.ev, ga.ew):
        same = rows[:, u] == rows[:, v]
        if w > 0:
            values += np.where(same, 0.0, w)
        else:
            values += np.where(same, -w, 0.0)
    return values


def _evaluate_srcc_rows(ga: _GraphArrays, rows: np.ndarray, k: int,
                        chunk: int = 50_000) -> np.ndarray:
    n_blocks = k * (k + 1) // 2
    # upper-triangle block index for a <= b
    block_of = np.zeros((k, k), dtype=np.int64)
    idx = 0
    for a in range(k):
        for b in range(a, k):
            block_of[a, b] = idx
            block_of[b, a] = idx
            idx += 1
    values = np.empty(len(rows))
    for start in range(0, len(rows), chunk):
        part = rows[start:start + chunk]
        pos = np.zeros((len(part), n_blocks))
        neg = np.zeros((len(part), n_blocks))
        sample = np.arange(len(part))
        for u, v, w in zip(ga.eu, ga.ev, ga.ew):
            blocks = block_of[part[:, u], part[:, v]]
            if w > 0:
                np.add.at(pos, (sample, blocks), w)
            else:
                np.add.at(neg, (sample, blocks), -w)
        values[start:start + chunk] = np.minimum(pos, neg).sum(axis=1)
    return values


def brute_force(graph: SignedGraph, problem: ProblemKind,
                max_k: int) -> tuple[Partition, float]:
    """Exhaustive optimum by enumerating set partitions as restricted-growth
    strings. CC scans every partition into at most max_k clusters; the
    relaxed problem scans partitions into exactly max_k clusters. Ties go to
    the lexicographically smallest string."""
    n = graph.n
    if n == 0:
        raise ValueError("cannot enumerate partitions of an empty graph")
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"refusing to enumerate partitions of {n} > {BRUTE_FORCE_MAX_N} vertices"
        )
    if max_k < 1:
        raise ValueError("max_k must be positive")
    if problem.is_srcc:
        if problem.k is not None and problem.k != max_k:
            raise ValueError(
                f"problem fixes k={problem.k} but max_k={max_k} was requested"
            )
        if max_k > n:
            raise ValueError(f"cannot split {n} vertices into {max_k} non-empty clusters")

    ga = _GraphArrays(graph)
    rows = _all_restricted_growth_strings(n, min(max_k, n))
    if problem.is_srcc:
        rows = rows[rows.max(axis=1) == max_k - 1]
        values = _evaluate_srcc_rows(ga, rows, max_k)
        k_of = np.full(len(rows), max_k)
    else:
        values = _evaluate_cc_rows(ga, rows)
        k_of = rows.max(axis=1).astype(np.int64) + 1

    best = int(np.argmin(values))
    partition = partition_from_labels(graph, rows[best].astype(int), int(k_of[best]))
    if problem.is_srcc:
        exact = srcc_imbalance(graph, partition).total
    else:
        exact = cc_imbalance(graph, partition)
    return partition, exact
