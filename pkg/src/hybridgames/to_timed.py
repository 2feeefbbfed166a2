"""Lowering step 3: updatable timed games down to plain timed games.

A reset to a nonzero constant is traded for bookkeeping: each location is
annotated with the accumulated offset of every clock (the value it was last
set to), the clock itself is reset to zero, and every guard bound is shifted
down by the offset at the edge's source.  Shifted lower bounds can become
negative; they are kept exact rather than clamped, which is harmless since
clocks in the produced game never go below zero.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .core import (
    OFFSET_KIND,
    ONE,
    ZERO,
    Annotation,
    Edge,
    Flavor,
    Game,
    Guard,
    InvalidGame,
    LocId,
    Location,
    Reset,
)
from .bisim import BisimWitness
from .semantics import Configuration, Move


def zero_offset(g_u: Game) -> Annotation:
    return Annotation.of(OFFSET_KIND, {var: ZERO for var in g_u.vars})


def successor_offset(g_u: Game, g1: Annotation, e: Edge) -> Annotation:
    """Offsets after taking e: reset clocks remember the value they were set
    to, the rest keep the offset they entered with."""
    values = {}
    for var in g_u.vars:
        assigned = e.reset.value_for(var)
        values[var] = assigned if assigned is not None else g1.value(var)
    return Annotation.of(OFFSET_KIND, values)


def offset_values(lid: LocId) -> dict:
    ann = lid.last_annotation()
    if ann is None or ann.kind != OFFSET_KIND:
        raise InvalidGame(f"{lid.render()} carries no offset annotation")
    return ann.as_dict()


def to_timed(g_u: Game) -> Game:
    """Replace constant resets by zero resets plus per-location offsets.

    Locations are the reachable (location, offset) pairs from the initial
    location with all offsets zero.  Guards are shifted by the source offset,
    resets all become zero, and each edge records the set of clocks it
    resets and the updatable edge it came from.
    """
    start = (g_u.init, zero_offset(g_u))
    seen = {start}
    frontier = deque([start])
    order = [start]
    while frontier:
        lid, off = frontier.popleft()
        for e in g_u.edges_from(lid):
            succ = (e.dst, successor_offset(g_u, off, e))
            if succ not in seen:
                seen.add(succ)
                frontier.append(succ)
                order.append(succ)

    locations = {}
    for (lid, off) in order:
        new_id = lid.annotated(off)
        base = g_u.locations[lid]
        flow = {var: ONE for var in g_u.vars}
        locations[new_id] = Location(new_id, base.owner, base.obs, flow)

    edges = {}
    for (lid, off) in order:
        src_id = lid.annotated(off)
        offsets = off.as_dict()
        for e in g_u.edges_from(lid):
            dst_id = e.dst.annotated(successor_offset(g_u, off, e))
            conjuncts = {var: iv.shifted(-offsets[var])
                         for var, iv in e.guard.conjuncts.items()}
            reset_set = e.reset.domain()
            reset = Reset({var: ZERO for var in reset_set})
            eid = f"{e.id}@{off.render()}"
            edges[eid] = Edge(eid, src_id, e.action, Guard(conjuncts), reset,
                              dst_id, reset_set=reset_set, provenance=e.id)

    init = g_u.init.annotated(zero_offset(g_u))
    return Game(Flavor.TIMED, g_u.vars, g_u.actions, g_u.obs, locations,
                edges, init)


def shift_config(g_u: Game, q_u: Configuration, timed_loc: LocId) -> Configuration:
    """The timed counterpart of an updatable configuration at a given
    reachable offset annotation for its location."""
    if timed_loc.parent() != q_u.loc:
        raise InvalidGame(f"{timed_loc.render()} does not annotate {q_u.loc.render()}")
    offsets = offset_values(timed_loc)
    vals = tuple(q_u.val[i] - offsets[var] for i, var in enumerate(g_u.vars))
    return Configuration(timed_loc, vals)


def unshift_config(g_u: Game, q_t: Configuration) -> Configuration:
    """Add the offsets back: the updatable configuration a timed one stands for."""
    offsets = offset_values(q_t.loc)
    vals = tuple(q_t.val[i] + offsets[var] for i, var in enumerate(g_u.vars))
    return Configuration(q_t.loc.parent(), vals)


def offset_witness(g_u: Game, g_t: Game) -> BisimWitness:
    """Updatable vs timed: locations related by stripping the offset map,
    values by subtracting it, edges by provenance."""
    partners: dict[LocId, list[LocId]] = {}
    for lid in g_t.locations:
        partners.setdefault(lid.parent(), []).append(lid)
    for lst in partners.values():
        lst.sort(key=lambda l: l.render())
    by_provenance: dict[tuple[LocId, str], str] = {}
    for eid, e in g_t.edges.items():
        by_provenance[(e.src, e.provenance)] = eid

    def contains(q1: Configuration, q2: Configuration) -> bool:
        if q2.loc not in g_t.locations or q2.loc.parent() != q1.loc:
            return False
        offsets = offset_values(q2.loc)
        return all(q2.val[i] == q1.val[i] - offsets[var]
                   for i, var in enumerate(g_u.vars))

    def forward_configs(q1: Configuration) -> tuple[Configuration, ...]:
        return tuple(shift_config(g_u, q1, lid)
                     for lid in partners.get(q1.loc, ()))

    def backward_config(q2: Configuration) -> Configuration:
        return unshift_config(g_u, q2)

    def move_forward(q2: Configuration, m1: Move) -> Optional[Move]:
        eid = by_provenance.get((q2.loc, m1.edge))
        return Move(eid, m1.delay) if eid is not None else None

    def move_backward(_q1: Configuration, m2: Move) -> Optional[Move]:
        e = g_t.edges.get(m2.edge)
        return Move(e.provenance, m2.delay) if e is not None else None

    return BisimWitness(
        name="offset-shift",
        g1=g_u,
        g2=g_t,
        contains=contains,
        forward_configs=forward_configs,
        backward_config=backward_config,
        move_forward=move_forward,
        move_backward=move_backward,
    )
