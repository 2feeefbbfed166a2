"""Operational semantics shared by every game flavor.

A play is a sequence of joint moves: the owner of the current location picks
an outgoing edge and a rational delay, the variables advance along their
slopes for that long, the guard is checked at the end of the delay, and the
reset is applied on the jump.  There are no standalone delay transitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    ZERO,
    Edge,
    Game,
    GameError,
    IllegalStrategyMove,
    LocId,
    MoveNotEnabled,
    Player,
)


@dataclass(frozen=True)
class Configuration:
    """A location plus one exact value per variable, in game variable order."""

    loc: LocId
    val: tuple[Fraction, ...]

    def value(self, g: Game, var: str) -> Fraction:
        return self.val[g.var_index(var)]


@dataclass(frozen=True)
class Move:
    edge: str
    delay: Fraction


@dataclass(frozen=True)
class Step:
    move: Move
    config: Configuration


@dataclass(frozen=True)
class Run:
    """A finite alternating sequence of configurations and moves."""

    start: Configuration
    steps: tuple[Step, ...] = ()

    def last(self) -> Configuration:
        return self.steps[-1].config if self.steps else self.start

    def configs(self) -> tuple[Configuration, ...]:
        return (self.start,) + tuple(s.config for s in self.steps)

    def moves(self) -> tuple[Move, ...]:
        return tuple(s.move for s in self.steps)

    def extended(self, move: Move, config: Configuration) -> "Run":
        return Run(self.start, self.steps + (Step(move, config),))

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class DelayWindow:
    """The closed set of delays enabling one edge from one configuration.

    `hi` is None for an unbounded ray [lo, oo).  Windows are never open and
    never empty; an empty delay set is represented by None at the call site.
    """

    lo: Fraction
    hi: Optional[Fraction]

    def contains(self, t: Fraction) -> bool:
        if t < self.lo:
            return False
        return self.hi is None or t <= self.hi

    def is_point(self) -> bool:
        return self.hi is not None and self.lo == self.hi


def initial_config(g: Game) -> Configuration:
    """The start of every play: the initial location with the zero vector."""
    return Configuration(g.init, (ZERO,) * len(g.vars))


def delay_window(g: Game, q: Configuration, edge_id: str) -> Optional[DelayWindow]:
    """Solve {t >= 0 | forall constrained x: v(x) + t*slope(x) in guard(x)}.

    Returns None when the set is empty.  The result is always a closed
    interval or a closed unbounded ray intersected with t >= 0.
    """
    e = g.edges[edge_id]
    if e.src != q.loc:
        raise GameError(f"edge {edge_id} does not leave {q.loc.render()}")
    flow = g.locations[q.loc].flow
    lo = ZERO
    hi: Optional[Fraction] = None
    for var, iv in e.guard.conjuncts.items():
        v = q.val[g.var_index(var)]
        slope = flow[var]
        if slope == 0:
            if not iv.contains(v):
                return None
            continue
        # v + t*slope in [iv.lo, iv.hi]; a negative slope swaps the endpoints.
        a = (iv.lo - v) / slope
        b = (iv.hi - v) / slope
        if slope < 0:
            a, b = b, a
        if a > lo:
            lo = a
        if hi is None or b < hi:
            hi = b
    if hi is not None and hi < lo:
        return None
    return DelayWindow(lo, hi)


def enabled_edges(g: Game, q: Configuration) -> list[tuple[Edge, DelayWindow]]:
    """Outgoing edges of q with a nonempty delay window, ordered by edge id."""
    out = []
    for e in g.edges_from(q.loc):
        w = delay_window(g, q, e.id)
        if w is not None:
            out.append((e, w))
    return out


def step(g: Game, q: Configuration, move: Move) -> Configuration:
    """Apply one move exactly; raises MoveNotEnabled when it is not legal."""
    e = g.edges.get(move.edge)
    if e is None or e.src != q.loc:
        raise MoveNotEnabled(f"edge {move.edge} is not available at {q.loc.render()}")
    if move.delay < 0:
        raise MoveNotEnabled("negative delay")
    w = delay_window(g, q, move.edge)
    if w is None or not w.contains(move.delay):
        raise MoveNotEnabled(
            f"delay {move.delay} outside the window of edge {move.edge}")
    flow = g.locations[q.loc].flow
    new = []
    for i, var in enumerate(g.vars):
        assigned = e.reset.value_for(var)
        if assigned is not None:
            new.append(assigned)
        else:
            new.append(q.val[i] + move.delay * flow[var])
    return Configuration(e.dst, tuple(new))


StrategyFn = Callable[[Run], Optional[Move]]


def play(g: Game, s1: StrategyFn, s2: StrategyFn, k: int) -> Run:
    """Play at most k joint moves from the initial configuration.

    The owner of the current location is consulted; a None answer halts the
    play (the objective layer decides what a halt means).  A returned move
    that is not enabled raises IllegalStrategyMove.
    """
    run = Run(initial_config(g))
    for _ in range(k):
        q = run.last()
        strategy = s1 if g.owner(q.loc) is Player.ONE else s2
        move = strategy(run)
        if move is None:
            break
        try:
            q2 = step(g, q, move)
        except MoveNotEnabled as exc:
            raise IllegalStrategyMove(str(exc)) from exc
        run = run.extended(move, q2)
    return run


def trace_of(g: Game, run: Run) -> tuple[str, ...]:
    """The observation sequence of a run, one entry per configuration."""
    return tuple(g.locations[q.loc].obs for q in run.configs())
