"""Sampled checking of alternating-bisimulation witnesses.

A witness packages the relation between configurations of two games together
with the move translation in both directions.  The local check takes one
related pair and verifies, on a sampled set of enabled moves, that labels
agree and that each player's moves are matched by the translated move with
related successors.  Checks are sampled, not exhaustive: a Pass is evidence,
a Fail is definite (it carries a counterexample that replays).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .core import Game, MoveNotEnabled, OwnershipMismatch, Player
from .semantics import Configuration, DelayWindow, Move, enabled_edges, step


@dataclass(frozen=True)
class BisimWitness:
    """A claimed bisimulation between g1 and g2.

    contains(q1, q2) decides relation membership.  forward_configs(q1) lists
    the finitely many partners a g1 configuration can take (one per reachable
    bookkeeping annotation); backward_config(q2) strips the bookkeeping off a
    constructed g2 configuration.  move_forward(q2, m1) translates a g1 move
    in the context of the related g2 configuration, and move_backward(q1, m2)
    does the opposite; both keep the delay and follow edge provenance, and
    both return None when no counterpart edge exists.
    """

    name: str
    g1: Game
    g2: Game
    contains: Callable[[Configuration, Configuration], bool]
    forward_configs: Callable[[Configuration], tuple[Configuration, ...]]
    backward_config: Callable[[Configuration], Configuration]
    move_forward: Callable[[Configuration, Move], Optional[Move]]
    move_backward: Callable[[Configuration, Move], Optional[Move]]


def identity_witness(g: Game) -> BisimWitness:
    """The identity relation on one game, useful as a composition unit."""
    return BisimWitness(
        name="identity",
        g1=g,
        g2=g,
        contains=lambda q1, q2: q1 == q2,
        forward_configs=lambda q1: (q1,),
        backward_config=lambda q2: q2,
        move_forward=lambda q2, m: m,
        move_backward=lambda q1, m: m,
    )


def compose(ab: BisimWitness, bc: BisimWitness) -> BisimWitness:
    """Relational composition of two witnesses sharing the middle game."""
    if ab.g2 is not bc.g1 and ab.g2 != bc.g1:
        raise ValueError("witnesses do not share the middle game")

    def contains(qa: Configuration, qc: Configuration) -> bool:
        qb = bc.backward_config(qc)
        return bc.contains(qb, qc) and ab.contains(qa, qb)

    def forward_configs(qa: Configuration) -> tuple[Configuration, ...]:
        out = []
        for qb in ab.forward_configs(qa):
            out.extend(bc.forward_configs(qb))
        return tuple(out)

    def backward_config(qc: Configuration) -> Configuration:
        return ab.backward_config(bc.backward_config(qc))

    def move_forward(qc: Configuration, m: Move) -> Optional[Move]:
        qb = bc.backward_config(qc)
        mb = ab.move_forward(qb, m)
        if mb is None:
            return None
        return bc.move_forward(qc, mb)

    def move_backward(qa: Configuration, m: Move) -> Optional[Move]:
        # Translate in two hops; the middle configuration is recovered by
        # pushing qa forward, which is unique per bookkeeping annotation.
        for qb in ab.forward_configs(qa):
            if ab.contains(qa, qb):
                mb = bc.move_backward(qb, m)
                if mb is None:
                    return None
                return ab.move_backward(qa, mb)
        return None

    return BisimWitness(
        name=f"{ab.name}*{bc.name}",
        g1=ab.g1,
        g2=bc.g2,
        contains=contains,
        forward_configs=forward_configs,
        backward_config=backward_config,
        move_forward=move_forward,
        move_backward=move_backward,
    )


@dataclass
class MoveSampler:
    """Deterministic move sampling: window boundaries plus seeded rationals.

    For every enabled edge the low endpoint, the midpoint and the high
    endpoint are sampled (a probe of lo+1 and lo+2 stands in for the missing
    endpoints of an unbounded ray), plus `extra` random in-window delays with
    denominators at most `max_den`.
    """

    rng: random.Random = field(default_factory=lambda: random.Random(0))
    extra: int = 1
    max_den: int = 8

    def delays(self, w: DelayWindow) -> list[Fraction]:
        out = [w.lo]
        if w.hi is None:
            out.append(w.lo + 1)
            out.append(w.lo + 2)
            span = Fraction(2)
        else:
            if w.hi != w.lo:
                out.append((w.lo + w.hi) / 2)
                out.append(w.hi)
            span = w.hi - w.lo
        for _ in range(self.extra):
            if span == 0:
                break
            den = self.rng.randint(1, self.max_den)
            num = self.rng.randint(0, den)
            out.append(w.lo + Fraction(num, den) * span)
        seen = set()
        uniq = []
        for t in out:
            if t not in seen:
                seen.add(t)
                uniq.append(t)
        return uniq

    def moves(self, g: Game, q: Configuration) -> list[Move]:
        out = []
        for e, w in enabled_edges(g, q):
            for t in self.delays(w):
                out.append(Move(e.id, t))
        return out


@dataclass(frozen=True)
class Counterexample:
    """A concrete violation of one matching clause, sufficient to replay."""

    witness: str
    direction: str  # "forward" (a g1 move unmatched) or "backward"
    q1: Configuration
    q2: Configuration
    move: Move
    reason: str


@dataclass(frozen=True)
class Verdict:
    passed: bool
    checked: int
    counterexample: Optional[Counterexample] = None
    reason: str = ""


def _match_forward(w: BisimWitness, q1: Configuration, q2: Configuration,
                   m1: Move) -> Optional[str]:
    m2 = w.move_forward(q2, m1)
    if m2 is None:
        return "no counterpart move"
    if m2.delay != m1.delay:
        return "counterpart changes the delay"
    try:
        q1n = step(w.g1, q1, m1)
        q2n = step(w.g2, q2, m2)
    except MoveNotEnabled as exc:
        return f"counterpart not enabled ({exc})"
    if not w.contains(q1n, q2n):
        return "successors not related"
    return None


def _match_backward(w: BisimWitness, q1: Configuration, q2: Configuration,
                    m2: Move) -> Optional[str]:
    m1 = w.move_backward(q1, m2)
    if m1 is None:
        return "no counterpart move"
    if m1.delay != m2.delay:
        return "counterpart changes the delay"
    try:
        q2n = step(w.g2, q2, m2)
        q1n = step(w.g1, q1, m1)
    except MoveNotEnabled as exc:
        return f"counterpart not enabled ({exc})"
    if not w.contains(q1n, q2n):
        return "successors not related"
    return None


def check_local_bisim(w: BisimWitness, q1: Configuration, q2: Configuration,
                      sampler: Optional[MoveSampler] = None,
                      both_directions: bool = True) -> Verdict:
    """Check the matching clauses at one related pair on sampled moves.

    With both_directions the inverse-simulation clauses are checked too, so a
    Pass certifies sampled bisimulation rather than one-way simulation.
    """
    sampler = sampler or MoveSampler()
    if not w.contains(q1, q2):
        return Verdict(False, 0, None, "pair not in the relation")
    own1 = w.g1.owner(q1.loc)
    own2 = w.g2.owner(q2.loc)
    if own1 is not own2:
        raise OwnershipMismatch(
            f"{q1.loc.render()} owned by {own1.name}, {q2.loc.render()} by {own2.name}")
    if w.g1.locations[q1.loc].obs != w.g2.locations[q2.loc].obs:
        cex = Counterexample(w.name, "label", q1, q2, Move("-", Fraction(0)),
                             "observations differ")
        return Verdict(False, 0, cex, "observations differ")

    checked = 0
    directions = []
    if own1 is Player.ONE:
        directions.append("forward")
        if both_directions:
            directions.append("backward")
    else:
        directions.append("backward")
        if both_directions:
            directions.append("forward")

    for direction in directions:
        if direction == "forward":
            for m1 in sampler.moves(w.g1, q1):
                checked += 1
                problem = _match_forward(w, q1, q2, m1)
                if problem:
                    cex = Counterexample(w.name, "forward", q1, q2, m1, problem)
                    return Verdict(False, checked, cex, problem)
        else:
            for m2 in sampler.moves(w.g2, q2):
                checked += 1
                problem = _match_backward(w, q1, q2, m2)
                if problem:
                    cex = Counterexample(w.name, "backward", q1, q2, m2, problem)
                    return Verdict(False, checked, cex, problem)
    return Verdict(True, checked)


def replay_counterexample(w: BisimWitness, cex: Counterexample) -> bool:
    """Re-execute a counterexample from scratch; True when it still violates
    a matching clause (label mismatch, missing or unenabled counterpart, or
    unrelated successors)."""
    if cex.direction == "label":
        return w.g1.locations[cex.q1.loc].obs != w.g2.locations[cex.q2.loc].obs
    if cex.direction == "forward":
        return _match_forward(w, cex.q1, cex.q2, cex.move) is not None
    return _match_backward(w, cex.q1, cex.q2, cex.move) is not None


@dataclass
class StageResult:
    name: str
    pairs: int = 0
    moves_checked: int = 0
    failures: list[Counterexample] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ChainReport:
    stages: list[StageResult]
    warnings: list[str]
    samples_used: int

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def render(self) -> str:
        lines = []
        for s in self.stages:
            status = "pass" if s.passed else "FAIL"
            lines.append(f"{s.name}: {status} ({s.pairs} pairs, {s.moves_checked} moves)")
            for cex in s.failures[:3]:
                lines.append(f"  {cex.direction} {cex.reason} at {cex.q1.loc.render()}"
                             f" move {cex.move.edge}@{cex.move.delay}")
        for wtext in self.warnings:
            lines.append(f"warning: {wtext}")
        return "\n".join(lines)


def verify_chain(g_isr: Game, samples: int, depth: int, seed: int = 0,
                 max_failures: int = 5) -> ChainReport:
    """Build the whole lowering chain of an ISR game and check every stage
    witness (and the composed end-to-end witness) on sampled reachable pairs.

    Reachable pairs come from random plays of the source game, lifted through
    the chain so each stage sees genuinely related configurations.
    """
    from .chain import build_chain, lift_run, stage_witnesses

    chain = build_chain(g_isr)
    witnesses = stage_witnesses(chain)
    rng = random.Random(seed)
    sampler = MoveSampler(rng=random.Random(seed + 1))

    stages = {w.name: StageResult(w.name) for w in witnesses}
    tuples = _sample_lifted_tuples(chain, samples, depth, rng)
    for lifted in tuples:
        for w, (qa, qb) in zip(witnesses, _stage_pairs(lifted)):
            result = stages[w.name]
            if len(result.failures) >= max_failures:
                continue
            verdict = check_local_bisim(w, qa, qb, sampler)
            result.pairs += 1
            result.moves_checked += verdict.checked
            if not verdict.passed and verdict.counterexample is not None:
                result.failures.append(verdict.counterexample)

    warnings = []
    if not tuples:
        warnings.append("no reachable configurations sampled; result is vacuous")
    return ChainReport(list(stages.values()), warnings, len(tuples))


def _stage_pairs(lifted) -> list[tuple[Configuration, Configuration]]:
    qs, qw, qa, qu, qt = lifted
    return [(qs, qw), (qw, qa), (qa, qu), (qw, qu), (qu, qt), (qs, qt)]


def _sample_lifted_tuples(chain, samples: int, depth: int, rng: random.Random):
    """Collect up to `samples` reachable lifted configuration tuples by
    random play of the source game (each play at most `depth` moves)."""
    from .chain import initial_lifted, lift_step

    out = []
    guard = 0
    while len(out) < samples and guard < samples * 4:
        guard += 1
        lifted = initial_lifted(chain)
        out.append(lifted.snapshot())
        for _ in range(depth):
            if len(out) >= samples:
                break
            q = lifted.source_config()
            options = enabled_edges(chain.isr, q)
            if not options:
                break
            e, w = options[rng.randrange(len(options))]
            t = _random_delay(w, rng)
            lifted = lift_step(chain, lifted, Move(e.id, t))
            out.append(lifted.snapshot())
    return out[:samples]


def _random_delay(w: DelayWindow, rng: random.Random) -> Fraction:
    if w.hi is None:
        span = Fraction(3)
    else:
        span = w.hi - w.lo
    if span == 0:
        return w.lo
    den = rng.randint(1, 6)
    num = rng.randint(0, den)
    return w.lo + Fraction(num, den) * span
