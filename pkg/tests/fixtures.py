"""Validation fixtures: twenty games that must pass and twenty that must
each be rejected with a specific violation kind."""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from hybridgames.chain import build_chain
from hybridgames.core import (
    Edge,
    Flavor,
    Game,
    Guard,
    Interval,
    LocId,
    Location,
    Player,
    Reset,
    ViolationKind,
)
from hybridgames.samples import broken_initialization, small_timed, worked_example

from gamegen import gen_isr_game


def _replace_edge(g: Game, eid: str, **changes) -> Game:
    edges = dict(g.edges)
    edges[eid] = dataclasses.replace(g.edges[eid], **changes)
    return dataclasses.replace(g, edges=edges)


def _replace_location(g: Game, lid: LocId, **changes) -> Game:
    locations = dict(g.locations)
    locations[lid] = dataclasses.replace(g.locations[lid], **changes)
    return dataclasses.replace(g, locations=locations)


def _relabel_location(g: Game, old: LocId, new: LocId) -> Game:
    locations = {}
    for lid, loc in g.locations.items():
        if lid == old:
            locations[new] = dataclasses.replace(loc, id=new)
        else:
            locations[lid] = loc
    edges = {}
    for eid, e in g.edges.items():
        src = new if e.src == old else e.src
        dst = new if e.dst == old else e.dst
        edges[eid] = dataclasses.replace(e, src=src, dst=dst)
    init = new if g.init == old else g.init
    return dataclasses.replace(g, locations=locations, edges=edges, init=init)


def valid_fixtures() -> list[tuple[str, Game]]:
    chain = build_chain(worked_example())
    out = [
        ("worked-example", worked_example()),
        ("small-timed", small_timed()),
        ("worked-stopwatch-stage", chain.stopwatch),
        ("worked-annotated-stage", chain.annotated),
        ("worked-updatable-stage", chain.updatable),
        ("worked-timed-stage", chain.timed),
    ]
    for seed in range(100, 114):
        out.append((f"random-{seed}", gen_isr_game(seed)))
    return out


def invalid_fixtures() -> list[tuple[str, Game, ViolationKind]]:
    base = worked_example()
    timed = small_timed()
    chain = build_chain(base)
    stopwatch = chain.stopwatch
    annotated = chain.annotated

    out: list[tuple[str, Game, ViolationKind]] = []

    out.append(("missing-required-reset", broken_initialization(),
                ViolationKind.INITIALIZATION_BROKEN))
    out.append(("partial-guard", _replace_edge(base, "e1", guard=Guard({})),
                ViolationKind.GUARD_NOT_TOTAL))
    out.append(("inverted-guard",
                _replace_edge(base, "e0",
                              guard=Guard({"x": Interval(Fraction(4), Fraction(2))})),
                ViolationKind.GUARD_NOT_COMPACT))
    out.append(("dangling-init", dataclasses.replace(base, init=LocId("nowhere")),
                ViolationKind.INIT_MISSING))
    out.append(("opponent-owned-init",
                _replace_location(base, LocId("l0"), owner=Player.TWO),
                ViolationKind.INIT_NOT_PLAYER_ONE))
    out.append(("dangling-edge-target",
                _replace_edge(base, "e0", dst=LocId("ghost")),
                ViolationKind.UNKNOWN_LOCATION))
    out.append(("guard-on-undeclared-variable",
                _replace_edge(base, "e0",
                              guard=Guard({"x": Interval(Fraction(2), Fraction(4)),
                                           "q": Interval(Fraction(0), Fraction(1))})),
                ViolationKind.UNKNOWN_VARIABLE))
    out.append(("reset-of-undeclared-variable",
                _replace_edge(base, "e0",
                              reset=Reset({"x": Fraction(3), "q": Fraction(1)})),
                ViolationKind.UNKNOWN_VARIABLE))
    out.append(("flow-of-undeclared-variable",
                _replace_location(base, LocId("l0"),
                                  flow={"x": Fraction(2), "q": Fraction(1)}),
                ViolationKind.UNKNOWN_VARIABLE))
    out.append(("undeclared-action",
                _replace_edge(base, "e0", action="zap"),
                ViolationKind.UNKNOWN_ACTION))
    out.append(("undeclared-observation",
                _replace_location(base, LocId("l0"), obs="limbo"),
                ViolationKind.UNKNOWN_OBSERVATION))
    out.append(("partial-flow",
                _replace_location(base, LocId("l1"), flow={}),
                ViolationKind.FLOW_NOT_TOTAL))
    out.append(("stopwatch-with-steep-slope",
                _replace_location(stopwatch, LocId("l0"), flow={"x": Fraction(2)}),
                ViolationKind.FLOW_OUT_OF_FLAVOR))
    out.append(("timed-with-stopped-clock",
                _replace_location(timed, LocId("c"),
                                  flow={"x": Fraction(0), "y": Fraction(1)}),
                ViolationKind.FLOW_OUT_OF_FLAVOR))
    out.append(("timed-reset-off-zero",
                _replace_edge(timed, "t0", reset=Reset({"x": Fraction(1)})),
                ViolationKind.RESET_NOT_ZERO))
    out.append(("reset-set-disagrees",
                _replace_edge(timed, "t0", reset_set=frozenset()),
                ViolationKind.RESET_SET_MISMATCH))
    out.append(("reset-set-absent",
                _replace_edge(timed, "t0", reset_set=None),
                ViolationKind.RESET_SET_MISMATCH))
    out.append(("annotations-absent",
                dataclasses.replace(stopwatch, flavor=Flavor.ANNOTATED_STOPWATCH),
                ViolationKind.ANNOTATION_MISSING))

    pinned_l3 = next(l for l in annotated.locations
                     if l.root() == LocId("l3"))
    out.append(("pin-on-running-variable",
                _replace_location(annotated, pinned_l3, flow={"x": Fraction(1)}),
                ViolationKind.ANNOTATION_MISMATCH))

    from hybridgames.core import Annotation
    unpinned = pinned_l3.parent().annotated(Annotation.of("f", {"x": None}))
    out.append(("stopped-variable-unpinned",
                _relabel_location(annotated, pinned_l3, unpinned),
                ViolationKind.ANNOTATION_MISMATCH))
    return out
