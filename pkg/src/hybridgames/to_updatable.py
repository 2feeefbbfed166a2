"""Lowering step 2: stopwatch games down to updatable timed games.

A stopwatch variable that is stopped somewhere holds a pinned value there,
and that value is determined by the resets seen on the way in.  The step
first annotates every reachable location with the map of pinned values
(the reset annotation), then sets every slope to 1 and repairs the semantics
with resets: entering a location where a variable is pinned forces a reset to
the pinned value, so the variable's drift while "running" is erased exactly
when it matters.

Guards over variables pinned at the source cannot be kept verbatim (the
drifting clock would be tested instead of the pinned value), so they are
evaluated statically at the source annotation: a satisfied conjunct is
dropped, an unsatisfiable one removes the edge.  `rewrite_guards=False`
keeps the literal guards, which is useful only to demonstrate that the
rewrite is necessary.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from typing import Optional

from .core import (
    FROZEN_KIND,
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


def initial_annotation(g_w: Game, lid: LocId) -> Annotation:
    """Pinned values at the start of play: every stopped variable sits at its
    initial value 0, running variables carry no pin."""
    flow = g_w.locations[lid].flow
    values = {var: (ZERO if flow[var] == 0 else None) for var in g_w.vars}
    return Annotation.of(FROZEN_KIND, values)


def successor_annotation(g_w: Game, f1: Annotation, e: Edge) -> Annotation:
    """Pinned values after taking e from a location annotated f1."""
    dst_flow = g_w.locations[e.dst].flow
    values: dict[str, Optional] = {}
    for var in g_w.vars:
        if dst_flow[var] == ONE:
            values[var] = None
        else:
            assigned = e.reset.value_for(var)
            values[var] = assigned if assigned is not None else f1.value(var)
    return Annotation.of(FROZEN_KIND, values)


def annotate_resets(g_w: Game, full_product: bool = False) -> Game:
    """Attach reset annotations to a stopwatch game.

    By default only the locations reachable from the annotated initial
    location are produced; `full_product` emits the whole product of
    locations and pin maps over the game's constants instead, for
    conformance inspection.
    """
    if full_product:
        pairs = _product_pairs(g_w)
    else:
        pairs = _reachable_pairs(g_w)

    locations = {}
    for (lid, ann) in pairs:
        new_id = lid.annotated(ann)
        base = g_w.locations[lid]
        locations[new_id] = Location(new_id, base.owner, base.obs, dict(base.flow))

    edges = {}
    for (lid, ann) in pairs:
        src_id = lid.annotated(ann)
        for e in g_w.edges_from(lid):
            f2 = successor_annotation(g_w, ann, e)
            dst_id = e.dst.annotated(f2)
            if dst_id not in locations:
                continue  # only in full_product mode can a target be pruned
            eid = f"{e.id}@{ann.render()}"
            edges[eid] = Edge(eid, src_id, e.action, e.guard, e.reset, dst_id,
                              provenance=e.id)

    init = g_w.init.annotated(initial_annotation(g_w, g_w.init))
    return Game(Flavor.ANNOTATED_STOPWATCH, g_w.vars, g_w.actions, g_w.obs,
                locations, edges, init)


def _reachable_pairs(g_w: Game) -> list[tuple[LocId, Annotation]]:
    start = (g_w.init, initial_annotation(g_w, g_w.init))
    seen = {start}
    frontier = deque([start])
    order = [start]
    while frontier:
        lid, ann = frontier.popleft()
        for e in g_w.edges_from(lid):
            succ = (e.dst, successor_annotation(g_w, ann, e))
            if succ not in seen:
                seen.add(succ)
                frontier.append(succ)
                order.append(succ)
    return order


def _product_pairs(g_w: Game) -> list[tuple[LocId, Annotation]]:
    consts = sorted(g_w.constants())
    pairs = []
    for lid in sorted(g_w.locations, key=lambda l: l.render()):
        flow = g_w.locations[lid].flow
        stopped = [var for var in g_w.vars if flow[var] == 0]
        running = [var for var in g_w.vars if flow[var] != 0]
        for combo in product(consts, repeat=len(stopped)):
            values: dict[str, Optional] = {var: None for var in running}
            values.update(dict(zip(stopped, combo)))
            pairs.append((lid, Annotation.of(FROZEN_KIND, values)))
    return pairs


def pinned_values(lid: LocId) -> dict:
    """The pin map recorded on an annotated location id."""
    ann = lid.last_annotation()
    if ann is None or ann.kind != FROZEN_KIND:
        raise InvalidGame(f"{lid.render()} carries no reset annotation")
    return ann.as_dict()


def to_updatable(g_ann: Game, rewrite_guards: bool = True) -> Game:
    """Set every slope to 1 and compensate with constant resets.

    The reset of each edge assigns, per variable, the pin at the target if
    there is one, else the original reset value if any.  With rewrite_guards
    (the default and the correct construction) conjuncts over source-pinned
    variables are evaluated statically and removed, and edges whose pinned
    value falls outside the conjunct are dropped.
    """
    locations = {}
    for lid, loc in g_ann.locations.items():
        flow = {var: ONE for var in g_ann.vars}
        locations[lid] = Location(lid, loc.owner, loc.obs, flow)

    edges = {}
    for eid in sorted(g_ann.edges):
        e = g_ann.edges[eid]
        f1 = pinned_values(e.src)
        f2 = pinned_values(e.dst)

        conjuncts = {}
        dead = False
        for var, iv in e.guard.conjuncts.items():
            pin = f1.get(var)
            if rewrite_guards and pin is not None:
                if iv.contains(pin):
                    continue
                dead = True
                break
            conjuncts[var] = iv
        if dead:
            continue

        assignments = {}
        for var in g_ann.vars:
            pin = f2.get(var)
            if pin is not None:
                assignments[var] = pin
            else:
                original = e.reset.value_for(var)
                if original is not None:
                    assignments[var] = original

        edges[eid] = Edge(eid, e.src, e.action, Guard(conjuncts),
                          Reset(assignments), e.dst, provenance=eid)

    return Game(Flavor.UPDATABLE, g_ann.vars, g_ann.actions, g_ann.obs,
                locations, edges, g_ann.init)


def annotation_relates(q_w: Configuration, q_u: Configuration) -> bool:
    """Membership test of the composed annotation relation: the updatable
    location is the stopwatch location plus a pin map, values are equal."""
    if not q_u.loc.anns or q_u.loc.last_annotation().kind != FROZEN_KIND:
        return False
    return q_u.loc.parent() == q_w.loc and q_u.val == q_w.val


def annotation_witness(g_w: Game, g_ann: Game) -> BisimWitness:
    """Stopwatch vs annotated stopwatch: identical valuations, locations
    related by stripping the pin map, edges related by provenance."""
    partners: dict[LocId, list[LocId]] = {}
    for lid in g_ann.locations:
        partners.setdefault(lid.parent(), []).append(lid)
    for lst in partners.values():
        lst.sort(key=lambda l: l.render())
    by_provenance: dict[tuple[LocId, str], str] = {}
    for eid, e in g_ann.edges.items():
        by_provenance[(e.src, e.provenance)] = eid

    def contains(q1: Configuration, q2: Configuration) -> bool:
        return (q2.loc in g_ann.locations and q2.loc.parent() == q1.loc
                and q1.val == q2.val)

    def forward_configs(q1: Configuration) -> tuple[Configuration, ...]:
        return tuple(Configuration(lid, q1.val) for lid in partners.get(q1.loc, ()))

    def backward_config(q2: Configuration) -> Configuration:
        return Configuration(q2.loc.parent(), q2.val)

    def move_forward(q2: Configuration, m1: Move) -> Optional[Move]:
        eid = by_provenance.get((q2.loc, m1.edge))
        return Move(eid, m1.delay) if eid is not None else None

    def move_backward(_q1: Configuration, m2: Move) -> Optional[Move]:
        e = g_ann.edges.get(m2.edge)
        return Move(e.provenance, m2.delay) if e is not None else None

    return BisimWitness(
        name="reset-annotation",
        g1=g_w,
        g2=g_ann,
        contains=contains,
        forward_configs=forward_configs,
        backward_config=backward_config,
        move_forward=move_forward,
        move_backward=move_backward,
    )


def rewrite_witness(g_ann: Game, g_u: Game) -> BisimWitness:
    """Annotated stopwatch vs updatable: the identity on configurations.

    Edges keep their ids across the rewrite; an edge dropped as dead has no
    counterpart, which is only ever visible from unreachable configurations.
    """

    def contains(q1: Configuration, q2: Configuration) -> bool:
        return q1.loc == q2.loc and q1.val == q2.val and q1.loc in g_u.locations

    def move_forward(_q2: Configuration, m1: Move) -> Optional[Move]:
        return m1 if m1.edge in g_u.edges else None

    def move_backward(_q1: Configuration, m2: Move) -> Optional[Move]:
        return m2 if m2.edge in g_ann.edges else None

    return BisimWitness(
        name="guard-rewrite",
        g1=g_ann,
        g2=g_u,
        contains=contains,
        forward_configs=lambda q1: (q1,),
        backward_config=lambda q2: q2,
        move_forward=move_forward,
        move_backward=move_backward,
    )
