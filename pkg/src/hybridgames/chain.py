"""The full lowering chain of one source game, with exact run lifting.

Building the chain once and lifting runs through it is the workhorse behind
witness checking, strategy pull-back and trace comparison: every stage sees
the same delays, and edges correspond by provenance, so a source run maps to
one run per stage with pointwise related configurations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bisim import BisimWitness, compose
from .core import Flavor, Game, InvalidGame, InvalidHistory, LocId, MoveNotEnabled, validate_game
from .semantics import Configuration, Move, Run, initial_config, step
from .to_stopwatch import stopwatch_witness, to_stopwatch
from .to_timed import offset_witness, to_timed
from .to_updatable import annotation_witness, annotate_resets, rewrite_witness, to_updatable


@dataclass(frozen=True)
class Chain:
    isr: Game
    stopwatch: Game
    annotated: Game
    updatable: Game
    timed: Game
    _ann_by_prov: Mapping[tuple[LocId, str], str] = field(init=False, repr=False, compare=False)
    _timed_by_prov: Mapping[tuple[LocId, str], str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ann = {(e.src, e.provenance): eid for eid, e in self.annotated.edges.items()}
        timed = {(e.src, e.provenance): eid for eid, e in self.timed.edges.items()}
        object.__setattr__(self, "_ann_by_prov", ann)
        object.__setattr__(self, "_timed_by_prov", timed)

    def games(self) -> tuple[Game, Game, Game, Game, Game]:
        return (self.isr, self.stopwatch, self.annotated, self.updatable, self.timed)


def build_chain(g_isr: Game) -> Chain:
    """Validate the source game and run all lowering stages."""
    problems = validate_game(g_isr)
    if problems:
        raise InvalidGame("; ".join(v.render() for v in problems[:5]))
    g_w = to_stopwatch(g_isr)
    g_ann = annotate_resets(g_w)
    g_u = to_updatable(g_ann)
    g_t = to_timed(g_u)
    return Chain(g_isr, g_w, g_ann, g_u, g_t)


def stage_witnesses(chain: Chain) -> list[BisimWitness]:
    """Every stage witness, the composed annotation witness and the composed
    end-to-end witness, in the order matching lifted snapshots."""
    w_slope = stopwatch_witness(chain.isr, chain.stopwatch)
    w_ann = annotation_witness(chain.stopwatch, chain.annotated)
    w_rw = rewrite_witness(chain.annotated, chain.updatable)
    w_beta = compose(w_ann, w_rw)
    w_off = offset_witness(chain.updatable, chain.timed)
    w_end = compose(compose(w_slope, w_beta), w_off)
    return [w_slope, w_ann, w_rw, w_beta, w_off, w_end]


@dataclass(frozen=True)
class LiftedRun:
    """One run per stage, all driven by the same source moves and delays."""

    source: Run
    stopwatch: Run
    annotated: Run
    updatable: Run
    timed: Run

    def snapshot(self) -> tuple[Configuration, ...]:
        return (self.source.last(), self.stopwatch.last(), self.annotated.last(),
                self.updatable.last(), self.timed.last())

    def source_config(self) -> Configuration:
        return self.source.last()

    def __len__(self) -> int:
        return len(self.source)


def initial_lifted(chain: Chain) -> LiftedRun:
    return LiftedRun(
        source=Run(initial_config(chain.isr)),
        stopwatch=Run(initial_config(chain.stopwatch)),
        annotated=Run(initial_config(chain.annotated)),
        updatable=Run(initial_config(chain.updatable)),
        timed=Run(initial_config(chain.timed)),
    )


def lift_step(chain: Chain, lifted: LiftedRun, move: Move) -> LiftedRun:
    """Advance every stage by the counterparts of one source move."""
    t = move.delay
    try:
        q_s = step(chain.isr, lifted.source.last(), move)
    except MoveNotEnabled as exc:
        raise InvalidHistory(f"source move not enabled: {exc}") from exc

    # The slope normalization keeps edge ids; later stages follow provenance.
    move_w = Move(move.edge, t)
    ann_eid = chain._ann_by_prov.get((lifted.annotated.last().loc, move.edge))
    if ann_eid is None:
        raise InvalidHistory(
            f"no annotated counterpart of {move.edge} at "
            f"{lifted.annotated.last().loc.render()}")
    move_ann = Move(ann_eid, t)
    if ann_eid not in chain.updatable.edges:
        raise InvalidHistory(f"edge {ann_eid} was dropped by the guard rewrite")
    move_u = Move(ann_eid, t)
    timed_eid = chain._timed_by_prov.get((lifted.timed.last().loc, ann_eid))
    if timed_eid is None:
        raise InvalidHistory(
            f"no timed counterpart of {ann_eid} at {lifted.timed.last().loc.render()}")
    move_t = Move(timed_eid, t)

    q_w = step(chain.stopwatch, lifted.stopwatch.last(), move_w)
    q_ann = step(chain.annotated, lifted.annotated.last(), move_ann)
    q_u = step(chain.updatable, lifted.updatable.last(), move_u)
    q_t = step(chain.timed, lifted.timed.last(), move_t)

    return LiftedRun(
        source=lifted.source.extended(move, q_s),
        stopwatch=lifted.stopwatch.extended(move_w, q_w),
        annotated=lifted.annotated.extended(move_ann, q_ann),
        updatable=lifted.updatable.extended(move_u, q_u),
        timed=lifted.timed.extended(move_t, q_t),
    )


def lift_run(chain: Chain, run: Run) -> LiftedRun:
    """Lift a whole source run; InvalidHistory if it is not a legal history."""
    if run.start != initial_config(chain.isr):
        raise InvalidHistory("history does not start at the initial configuration")
    lifted = initial_lifted(chain)
    for s in run.steps:
        lifted = lift_step(chain, lifted, s.move)
        if lifted.source.last() != s.config:
            raise InvalidHistory("history configurations do not replay")
    return lifted


def flavor_progression(chain: Chain) -> dict[str, Flavor]:
    """The classified flavor of each constructed stage."""
    from .core import classify_flavor

    return {
        "stopwatch": classify_flavor(chain.stopwatch),
        "annotated": classify_flavor(chain.annotated),
        "updatable": classify_flavor(chain.updatable),
        "timed": classify_flavor(chain.timed),
    }
