"""Planted-coalition vote generator with known ground-truth bloc structure.

Propositions come in two kinds. A consensus proposition gives every bloc the
same uniform stance; a divisive one splits the blocs into two opposed halves
drawn at random. With the consensus rate below the level that balances the
divisive disagreement, cross-bloc agreement is negative on average while
within-bloc agreement concentrates near (2 * discipline - 1)^2, which is the
block-sign structure real chambers show and what makes the planted partition
identifiable. Mediators ignore bloc lines and follow the chamber majority
(the consensus stance when there is one, a shared coin on ties), so their
relationships with every bloc are mostly positive: the profile a mediation
detector must flag without flagging any bloc cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Deputy, Partition, Vote, VoteRecord

DEFAULT_CONSENSUS_RATE = 0.15

_STATES = tuple(f"S{i}" for i in range(1, 10))


@dataclass(frozen=True)
class BlocSpec:
    """One voting bloc: its size and the party mix of its members."""

    size: int
    parties: Mapping[str, float]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("bloc size must be positive")
        parties = dict(self.parties)
        if not parties:
            raise ValueError("bloc needs at least one party")
        total = math.fsum(parties.values())
        if total <= 0 or any(w < 0 for w in parties.values()):
            raise ValueError("party weights must be non-negative with positive sum")
        object.__setattr__(self, "parties", parties)


@dataclass(frozen=True)
class SynthConfig:
    n_deputies: int
    n_propositions: int
    blocs: tuple[BlocSpec, ...]
    discipline: float = 0.95
    abstain_rate: float = 0.0
    absent_rate: float = 0.0
    obstruction_rate: float = 0.0
    mediator_fraction: float = 0.0
    consensus_rate: float = DEFAULT_CONSENSUS_RATE
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocs", tuple(self.blocs))
        if self.n_deputies < 1 or self.n_propositions < 1:
            raise ValueError("need at least one deputy and one proposition")
        if sum(b.size for b in self.blocs) != self.n_deputies:
            raise ValueError("bloc sizes must sum to n_deputies")
        if not 0.5 <= self.discipline <= 1.0:
            raise ValueError("discipline must be in [0.5, 1]")
        rates = (self.abstain_rate, self.absent_rate, self.obstruction_rate)
        if any(r < 0 or r > 1 for r in rates) or sum(rates) > 1.0:
            raise ValueError("noise rates must be in [0, 1] and sum to at most 1")
        if not 0.0 <= self.mediator_fraction <= 1.0:
            raise ValueError("mediator_fraction must be in [0, 1]")
        if not 0.0 <= self.consensus_rate <= 1.0:
            raise ValueError("consensus_rate must be in [0, 1]")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _bloc_stances(rng: np.random.Generator, n_blocs: int, n_props: int,
                  consensus_rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Stance matrix (blocs x propositions, 1 = FOR) and the majority stance.

    Divisive propositions split the blocs into halves of sizes ceil(B/2) and
    floor(B/2); majority ties are broken by a coin shared chamber-wide.
    """
    is_consensus = rng.random(n_props) < consensus_rate
    consensus_stance = rng.integers(0, 2, size=n_props)
    # random half of the blocs votes FOR on a divisive proposition
    ranks = np.argsort(rng.random((n_props, n_blocs)), axis=1)
    half = (n_blocs + 1) // 2
    divisive = (ranks < half).astype(np.int64).T

    stances = np.where(is_consensus[None, :], consensus_stance[None, :], divisive)
    for_count = stances.sum(axis=0)
    tie_coin = rng.integers(0, 2, size=n_props)
    majority = np.where(
        2 * for_count == n_blocs, tie_coin, (2 * for_count > n_blocs).astype(np.int64)
    )
    return stances, majority


def generate(config: SynthConfig) -> tuple[list[Deputy], list[VoteRecord], Partition]:
    """Draw one synthetic vote dataset.

    Returns the roster, the records in proposition-major deputy-minor order,
    and the planted partition: one label per bloc, mediators (when any) in a
    label of their own. Deterministic for a fixed config.
    """
    rng = np.random.default_rng(config.seed)
    n, n_props = config.n_deputies, config.n_propositions
    n_blocs = len(config.blocs)

    bloc_of = np.concatenate([
        np.full(spec.size, b, dtype=np.int64) for b, spec in enumerate(config.blocs)
    ])

    deputies: list[Deputy] = []
    for spec in config.blocs:
        parties = list(spec.parties)
        weights = np.array([spec.parties[p] for p in parties])
        drawn = rng.choice(len(parties), size=spec.size, p=weights / weights.sum())
        for j in range(spec.size):
            i = len(deputies)
            deputies.append(Deputy(
                id=f"d{i + 1:04d}",
                name=f"Deputy {i + 1:04d}",
                party=parties[int(drawn[j])],
                state=_STATES[i % len(_STATES)],
            ))

    n_mediators = int(round(config.mediator_fraction * n))
    is_mediator = np.zeros(n, dtype=bool)
    if n_mediators:
        is_mediator[rng.choice(n, size=n_mediators, replace=False)] = True

    labels = bloc_of.copy()
    if n_mediators:
        labels[is_mediator] = n_blocs
        remaining = np.bincount(bloc_of[~is_mediator], minlength=n_blocs)
        empty = [b for b in range(n_blocs) if remaining[b] == 0]
        if empty:
            raise ValueError(
                f"mediator draw emptied bloc(s) {empty}; lower mediator_fraction"
            )
    k = n_blocs + (1 if n_mediators else 0)
    ground_truth = Partition({deputies[i].id: int(labels[i]) for i in range(n)}, k)

    stances, majority = _bloc_stances(rng, n_blocs, n_props, config.consensus_rate)
    base = stances[bloc_of, :]
    base[is_mediator, :] = majority[None, :]

    follows = rng.random((n, n_props)) < config.discipline
    stance_vote = np.where(follows, base, 1 - base)

    noise = rng.random((n, n_props))
    t_abstain = config.abstain_rate
    t_absent = t_abstain + config.absent_rate
    t_obstruct = t_absent + config.obstruction_rate

    vote_values = (Vote.FOR, Vote.AGAINST, Vote.ABSTAIN, Vote.OBSTRUCTION, Vote.ABSENT)
    codes = np.where(stance_vote == 1, 0, 1)
    codes = np.where(noise < t_abstain, 2, codes)
    codes = np.where((noise >= t_abstain) & (noise < t_absent), 4, codes)
    codes = np.where((noise >= t_absent) & (noise < t_obstruct), 3, codes)

    records = []
    for p in range(n_props):
        pid = f"p{p + 1:04d}"
        column = codes[:, p]
        for i in range(n):
            records.append(VoteRecord(pid, deputies[i].id, vote_values[column[i]]))
    return deputies, records, ground_truth
