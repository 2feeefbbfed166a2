"""Command-line front end: strict JSON round-tripping for games and
strategies, plus the validate / classify / transform / check-bisim / solve /
pull-back / simulate subcommands.

Exit codes: 0 success, 1 data problem (invalid game, failed check, losing
objective), 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bisim import verify_chain
from .chain import Chain, build_chain, lift_run
from .core import (
    Edge,
    Flavor,
    Game,
    GameError,
    Guard,
    Interval,
    LocId,
    Location,
    Player,
    Reset,
    classify_flavor,
    format_rational,
    parse_locid,
    parse_rational,
    scale_to_integers,
    validate_game,
)
from .semantics import Move, Run, play
from .solver import (
    Region,
    RegionGame,
    RegionMove,
    SolveResult,
    build_region_graph,
    solve_reachability,
    solve_safety,
)
from .strategy import random_strategy
from .to_stopwatch import to_stopwatch
from .to_timed import to_timed
from .to_updatable import annotate_resets, to_updatable


class ParseError(GameError):
    """A JSON document does not follow the expected schema; the message
    carries a JSONPath-style locator."""


# ---------------------------------------------------------------------------
# Game files


def _require_keys(obj: dict, path: str, required: set, optional: set = frozenset()):
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object at {path}")
    for key in obj:
        if key not in required and key not in optional:
            raise ParseError(f"unknown field at {path}.{key}")
    for key in required:
        if key not in obj:
            raise ParseError(f"missing field at {path}.{key}")


def _rational(value, path: str) -> Fraction:
    if not isinstance(value, str):
        raise ParseError(f"expected a rational string at {path}")
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise ParseError(f"bad rational at {path}: {exc}") from None


def _string(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ParseError(f"expected a nonempty string at {path}")
    return value


def parse_game(doc: dict) -> Game:
    """Parse a game document; schema errors raise ParseError, semantic
    problems are left to validate_game."""
    _require_keys(doc, "$", {"flavor", "vars", "actions", "obs", "init",
                             "locations", "edges"})
    flavor_text = _string(doc["flavor"], "$.flavor")
    try:
        flavor = Flavor(flavor_text)
    except ValueError:
        raise ParseError(f"unknown flavor at $.flavor: {flavor_text!r}") from None

    for key in ("vars", "actions", "obs"):
        if not isinstance(doc[key], list):
            raise ParseError(f"expected an array at $.{key}")
    gvars = tuple(_string(v, f"$.vars[{i}]") for i, v in enumerate(doc["vars"]))
    if len(set(gvars)) != len(gvars):
        raise ParseError("duplicate variable at $.vars")
    actions = frozenset(_string(a, f"$.actions[{i}]")
                        for i, a in enumerate(doc["actions"]))
    obs = frozenset(_string(o, f"$.obs[{i}]")
                    for i, o in enumerate(doc["obs"]))

    if not isinstance(doc["locations"], dict):
        raise ParseError("expected an object at $.locations")
    locations: dict[LocId, Location] = {}
    for lid_text, body in doc["locations"].items():
        path = f"$.locations[{lid_text!r}]"
        try:
            lid = parse_locid(lid_text)
        except (ValueError, GameError) as exc:
            raise ParseError(f"bad location id at {path}: {exc}") from None
        _require_keys(body, path, {"owner", "obs", "flow"})
        if body["owner"] not in (1, 2):
            raise ParseError(f"owner must be 1 or 2 at {path}.owner")
        owner = Player(body["owner"])
        lobs = _string(body["obs"], f"{path}.obs")
        if not isinstance(body["flow"], dict):
            raise ParseError(f"expected an object at {path}.flow")
        flow = {
            _string(var, f"{path}.flow"): _rational(val, f"{path}.flow.{var}")
            for var, val in body["flow"].items()
        }
        if lid in locations:
            raise ParseError(f"duplicate location id at {path}")
        locations[lid] = Location(lid, owner, lobs, flow)

    if not isinstance(doc["edges"], list):
        raise ParseError("expected an array at $.edges")
    edges: dict[str, Edge] = {}
    for i, body in enumerate(doc["edges"]):
        path = f"$.edges[{i}]"
        _require_keys(body, path, {"id", "src", "action", "guard", "reset", "dst"})
        eid = _string(body["id"], f"{path}.id")
        if eid in edges:
            raise ParseError(f"duplicate edge id at {path}.id")
        try:
            src = parse_locid(_string(body["src"], f"{path}.src"))
            dst = parse_locid(_string(body["dst"], f"{path}.dst"))
        except (ValueError, GameError) as exc:
            raise ParseError(f"bad location id at {path}: {exc}") from None
        action = _string(body["action"], f"{path}.action")
        if not isinstance(body["guard"], dict):
            raise ParseError(f"expected an object at {path}.guard")
        conjuncts = {}
        for var, pair in body["guard"].items():
            gpath = f"{path}.guard.{var}"
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"expected a [lo, hi] pair at {gpath}")
            conjuncts[var] = Interval(_rational(pair[0], f"{gpath}[0]"),
                                      _rational(pair[1], f"{gpath}[1]"))
        if not isinstance(body["reset"], dict):
            raise ParseError(f"expected an object at {path}.reset")
        assignments = {}
        for var, val in body["reset"].items():
            if val is None:
                continue  # explicit "keep" marker, same as leaving it out
            assignments[var] = _rational(val, f"{path}.reset.{var}")
        reset_set = None
        if flavor is Flavor.TIMED:
            reset_set = frozenset(assignments)
        edges[eid] = Edge(eid, src, action, Guard(conjuncts),
                          Reset(assignments), dst, reset_set=reset_set)

    try:
        init = parse_locid(_string(doc["init"], "$.init"))
    except (ValueError, GameError) as exc:
        raise ParseError(f"bad location id at $.init: {exc}") from None
    return Game(flavor, gvars, actions, obs, locations, edges, init)


def emit_game(g: Game) -> dict:
    """Canonical document for a game; emitting then parsing is the identity
    up to edge provenance, which is derived data and not serialized."""
    locations = {}
    for lid in sorted(g.locations, key=lambda l: l.render()):
        loc = g.locations[lid]
        locations[lid.render()] = {
            "owner": loc.owner.value,
            "obs": loc.obs,
            "flow": {var: format_rational(loc.flow[var])
                     for var in sorted(loc.flow)},
        }
    edges = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        edges.append({
            "id": e.id,
            "src": e.src.render(),
            "action": e.action,
            "guard": {var: [format_rational(iv.lo), format_rational(iv.hi)]
                      for var, iv in sorted(e.guard.conjuncts.items())},
            "reset": {var: format_rational(val)
                      for var, val in sorted(e.reset.assignments.items())},
            "dst": e.dst.render(),
        })
    return {
        "flavor": g.flavor.value,
        "vars": list(g.vars),
        "actions": sorted(g.actions),
        "obs": sorted(g.obs),
        "init": g.init.render(),
        "locations": locations,
        "edges": edges,
    }


def game_to_bytes(g: Game) -> bytes:
    return (json.dumps(emit_game(g), indent=2, sort_keys=True) + "\n").encode()


def game_hash(g: Game) -> str:
    return hashlib.sha256(game_to_bytes(g)).hexdigest()


def load_game(path: str) -> Game:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {path}: {exc}") from None
    return parse_game(doc)


# ---------------------------------------------------------------------------
# Strategy files


@dataclass
class StrategyEntry:
    location: str
    region: Region
    edge: str
    succ: Region
    timed_location: Optional[str] = None


@dataclass
class StrategyFile:
    game: str
    kind: str
    scale: int
    entries: list[StrategyEntry] = field(default_factory=list)

    @property
    def pulled_back(self) -> bool:
        return any(e.timed_location is not None for e in self.entries)


def _region_doc(r: Region) -> dict:
    return {"ints": [i for i in r.ints], "fracs": list(r.fracs)}


def _parse_region(doc, path: str, nvars: Optional[int]) -> Region:
    _require_keys(doc, path, {"ints", "fracs"})
    ints = doc["ints"]
    fracs = doc["fracs"]
    if not (isinstance(ints, list)
            and all(v is None or isinstance(v, int) for v in ints)):
        raise ParseError(f"bad region at {path}.ints")
    if not (isinstance(fracs, list) and len(fracs) == len(ints)
            and all(isinstance(v, int) for v in fracs)):
        raise ParseError(f"bad region at {path}.fracs")
    if nvars is not None and len(ints) != nvars:
        raise ParseError(f"bad region at {path}.ints")
    return Region(tuple(ints), tuple(fracs))


def emit_strategy(sf: StrategyFile) -> dict:
    entries = []
    for ent in sf.entries:
        note = {"succ": _region_doc(ent.succ)}
        if ent.timed_location is not None:
            note["timed_location"] = ent.timed_location
        entries.append({
            "location": ent.location,
            "region": _region_doc(ent.region),
            "edge": ent.edge,
            "note": note,
        })
    return {"game": sf.game, "kind": sf.kind, "scale": sf.scale,
            "entries": entries}


def parse_strategy(doc: dict, nvars: Optional[int] = None) -> StrategyFile:
    """Parse a strategy document.

    Region widths must agree across the file; nvars, when given, pins
    them to a particular game's variable count."""
    _require_keys(doc, "$", {"game", "kind", "scale", "entries"})
    game = _string(doc["game"], "$.game")
    kind = _string(doc["kind"], "$.kind")
    if not isinstance(doc["scale"], int) or doc["scale"] < 1:
        raise ParseError("expected a positive integer at $.scale")
    if not isinstance(doc["entries"], list):
        raise ParseError("expected an array at $.entries")
    entries = []
    for i, body in enumerate(doc["entries"]):
        path = f"$.entries[{i}]"
        _require_keys(body, path, {"location", "region", "edge", "note"})
        if nvars is None and isinstance(body.get("region"), dict) \
                and isinstance(body["region"].get("ints"), list):
            nvars = len(body["region"]["ints"])
        note = body["note"]
        _require_keys(note, f"{path}.note", {"succ"}, {"timed_location"})
        timed_location = None
        if "timed_location" in note:
            timed_location = _string(note["timed_location"],
                                     f"{path}.note.timed_location")
        entries.append(StrategyEntry(
            _string(body["location"], f"{path}.location"),
            _parse_region(body["region"], f"{path}.region", nvars),
            _string(body["edge"], f"{path}.edge"),
            _parse_region(note["succ"], f"{path}.note.succ", nvars),
            timed_location,
        ))
    return StrategyFile(game, kind, doc["scale"], entries)


def strategy_to_bytes(sf: StrategyFile) -> bytes:
    return (json.dumps(emit_strategy(sf), indent=2, sort_keys=True) + "\n").encode()


def load_strategy(path: str, nvars: Optional[int] = None) -> StrategyFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {path}: {exc}") from None
    return parse_strategy(doc, nvars)


# ---------------------------------------------------------------------------
# Solving helpers shared by subcommands


@dataclass
class Objective:
    kind: str  # "reach" | "safe"
    obs: frozenset

    @property
    def text(self) -> str:
        return f"{self.kind}:{','.join(sorted(self.obs))}"


def parse_objective(text: str) -> Objective:
    kind, sep, rest = text.partition(":")
    if kind not in ("reach", "safe") or not sep or not rest:
        raise ParseError(
            f"objective must look like reach:OBS or safe:OBS,OBS: got {text!r}")
    return Objective(kind, frozenset(rest.split(",")))


def _walk_back_edge(chain: Chain, timed_edge: str) -> str:
    e_t = chain.timed.edges[timed_edge]
    e_u = chain.updatable.edges[e_t.provenance]
    e_a = chain.annotated.edges[e_u.provenance]
    return e_a.provenance


def solve_timed_game(g: Game, objective: Objective) -> tuple[RegionGame, SolveResult]:
    scaled, factor = scale_to_integers(g)
    rg = build_region_graph(scaled, scale=factor)
    if objective.kind == "reach":
        result = solve_reachability(rg, objective.obs)
    else:
        result = solve_safety(rg, objective.obs)
    return rg, result


def strategy_file_for_timed(g: Game, rg: RegionGame,
                            result: SolveResult, objective: Objective) -> StrategyFile:
    sf = StrategyFile(game_hash(g), objective.text, rg.scale)
    for node in rg.nodes:
        mv = result.strategy.get(node)
        if mv is None:
            continue
        sf.entries.append(StrategyEntry(
            node.loc.render(), node.region, mv.edge, mv.region))
    return sf


def strategy_file_for_source(g: Game, chain: Chain, rg: RegionGame,
                             result: SolveResult, objective: Objective) -> StrategyFile:
    sf = StrategyFile(game_hash(g), objective.text, rg.scale)
    for node in rg.nodes:
        mv = result.strategy.get(node)
        if mv is None:
            continue
        sf.entries.append(StrategyEntry(
            node.loc.root().render(), node.region,
            _walk_back_edge(chain, mv.edge), mv.region,
            timed_location=node.loc.render()))
    return sf


def positional_from_file(sf: StrategyFile, rg: RegionGame):
    """Playable strategy for the (unscaled) timed game behind rg."""
    table = {(e.location, e.region): e for e in sf.entries}

    def strat(run: Run) -> Optional[Move]:
        q = run.last()
        node = rg.node_of(q)
        ent = table.get((q.loc.render(), node.region))
        if ent is None:
            return None
        return rg.concretize_move(q, RegionMove(ent.succ, ent.edge))

    return strat


def pullback_from_file(sf: StrategyFile, chain: Chain, rg: RegionGame):
    """Playable strategy for the chain's source game: lift the history, look
    the timed configuration up, and reuse the concretized delay with the
    pulled-back edge (every stage preserves delays exactly)."""
    table = {(e.timed_location, e.region): e for e in sf.entries}

    def strat(run: Run) -> Optional[Move]:
        lifted = lift_run(chain, run)
        q_t = lifted.timed.last()
        node = rg.node_of(q_t)
        ent = table.get((q_t.loc.render(), node.region))
        if ent is None:
            return None
        return rg.concretize_move(q_t, RegionMove(ent.succ, ent.edge))

    return strat


# ---------------------------------------------------------------------------
# Subcommands


def _write_out(data: bytes, out: Optional[str]):
    if out is None:
        sys.stdout.write(data.decode())
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def cmd_validate(args) -> int:
    g = load_game(args.game)
    violations = validate_game(g)
    if violations:
        for v in violations:
            print(v.render())
        return 1
    print("ok")
    return 0


def cmd_classify(args) -> int:
    g = load_game(args.game)
    print(classify_flavor(g).value)
    return 0


_CHAIN_ORDER = [Flavor.ISR, Flavor.STOPWATCH, Flavor.ANNOTATED_STOPWATCH,
                Flavor.UPDATABLE, Flavor.TIMED]


def cmd_transform(args) -> int:
    g = load_game(args.game)
    violations = validate_game(g)
    if violations:
        for v in violations:
            print(v.render(), file=sys.stderr)
        return 1
    try:
        target = Flavor(args.to)
    except ValueError:
        print(f"unknown target flavor: {args.to}", file=sys.stderr)
        return 2
    src_idx = _CHAIN_ORDER.index(g.flavor)
    dst_idx = _CHAIN_ORDER.index(target)
    if dst_idx < src_idx:
        print(f"cannot transform {g.flavor.value} back to {target.value}",
              file=sys.stderr)
        return 2
    cur = g
    for idx in range(src_idx, dst_idx):
        nxt = _CHAIN_ORDER[idx + 1]
        if nxt is Flavor.STOPWATCH:
            cur = to_stopwatch(cur)
        elif nxt is Flavor.ANNOTATED_STOPWATCH:
            cur = annotate_resets(cur)
        elif nxt is Flavor.UPDATABLE:
            cur = to_updatable(cur, rewrite_guards=not args.no_rewrite)
        else:
            cur = to_timed(cur)
    _write_out(game_to_bytes(cur), args.out)
    return 0


def cmd_check_bisim(args) -> int:
    g = load_game(args.game)
    report = verify_chain(g, samples=args.samples, depth=args.depth,
                          seed=args.seed)
    print(report.render())
    return 0 if report.passed else 1


def _prepare_solve(g: Game, objective: Objective):
    """Returns (chain or None, rg, result); non-timed games go through the
    whole chain and are solved on their timed stage."""
    if g.flavor is Flavor.TIMED:
        rg, result = solve_timed_game(g, objective)
        return None, rg, result
    chain = build_chain(g)
    rg, result = solve_timed_game(chain.timed, objective)
    return chain, rg, result


def cmd_solve(args) -> int:
    g = load_game(args.game)
    violations = validate_game(g)
    if violations:
        for v in violations:
            print(v.render(), file=sys.stderr)
        return 1
    objective = parse_objective(args.objective)
    unknown = objective.obs - set(g.obs)
    if unknown:
        print("objective names observations the game does not declare: "
              + ",".join(sorted(unknown)), file=sys.stderr)
        return 1
    chain, rg, result = _prepare_solve(g, objective)
    winning = result.wins_from_init(rg)
    if chain is None:
        sf = strategy_file_for_timed(g, rg, result, objective)
    else:
        sf = strategy_file_for_source(g, chain, rg, result, objective)
    if args.out is not None or winning:
        _write_out(strategy_to_bytes(sf), args.out)
    print(f"{'winning' if winning else 'losing'} for player one: "
          f"{objective.text}", file=sys.stderr)
    return 0 if winning else 1


def cmd_pull_back(args) -> int:
    g = load_game(args.game)
    violations = validate_game(g)
    if violations:
        for v in violations:
            print(v.render(), file=sys.stderr)
        return 1
    if g.flavor is Flavor.TIMED:
        print("pull-back needs a game with something above the timed stage",
              file=sys.stderr)
        return 2
    chain = build_chain(g)
    sf = load_strategy(args.strategy)
    timed_hash = game_hash(chain.timed)
    if sf.game != timed_hash:
        print("strategy file does not match this game's timed stage "
              f"(expected {timed_hash}, file says {sf.game})", file=sys.stderr)
        return 1
    if sf.pulled_back:
        print("strategy file is already pulled back", file=sys.stderr)
        return 1
    out = StrategyFile(game_hash(g), sf.kind, sf.scale)
    for ent in sf.entries:
        out.entries.append(StrategyEntry(
            parse_locid(ent.location).root().render(), ent.region,
            _walk_back_edge(chain, ent.edge), ent.succ,
            timed_location=ent.location))
    _write_out(strategy_to_bytes(out), args.out)
    return 0


def cmd_simulate(args) -> int:
    g = load_game(args.game)
    violations = validate_game(g)
    if violations:
        for v in violations:
            print(v.render(), file=sys.stderr)
        return 1
    sf = load_strategy(args.strategy)
    if sf.game != game_hash(g):
        print("strategy file was produced for a different game", file=sys.stderr)
        return 1
    if g.flavor is Flavor.TIMED and not sf.pulled_back:
        scaled, factor = scale_to_integers(g)
        if factor != sf.scale:
            print("strategy file scale does not match the game", file=sys.stderr)
            return 1
        rg = build_region_graph(scaled, scale=factor)
        sigma = positional_from_file(sf, rg)
    else:
        if not sf.pulled_back and g.flavor is not Flavor.TIMED:
            print("strategy file is not pulled back; solve the source game "
                  "or pull the file back first", file=sys.stderr)
            return 1
        chain = build_chain(g)
        scaled, factor = scale_to_integers(chain.timed)
        if factor != sf.scale:
            print("strategy file scale does not match the game", file=sys.stderr)
            return 1
        rg = build_region_graph(scaled, scale=factor)
        sigma = pullback_from_file(sf, chain, rg)
    opponent = random_strategy(g, args.seed)
    run = play(g, sigma, opponent, args.steps)
    for i, q in enumerate(run.configs()):
        record = {
            "step": i,
            "loc": q.loc.render(),
            "obs": g.locations[q.loc].obs,
            "val": {var: format_rational(q.val[g.var_index(var)])
                    for var in g.vars},
        }
        if i < len(run.steps):
            mv = run.steps[i].move
            record["edge"] = mv.edge
            record["delay"] = format_rational(mv.delay)
        print(json.dumps(record, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridgames",
        description="Turn-based hybrid games: validation, the lowering chain "
                    "to timed games, bisimulation checking, region solving, "
                    "and strategy pull-back.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", help="check a game file's invariants")
    q.add_argument("game")
    q.set_defaults(fn=cmd_validate)

    q = sub.add_parser("classify", help="print the most specific flavor")
    q.add_argument("game")
    q.set_defaults(fn=cmd_classify)

    q = sub.add_parser("transform", help="lower a game along the chain")
    q.add_argument("game")
    q.add_argument("--to", required=True,
                   choices=[f.value for f in _CHAIN_ORDER])
    q.add_argument("--out", default=None)
    q.add_argument("--no-rewrite", action="store_true",
                   help="keep statically decided guard conjuncts instead of "
                        "rewriting them away")
    q.set_defaults(fn=cmd_transform)

    q = sub.add_parser("check-bisim",
                       help="sample plays and check every stage witness")
    q.add_argument("game")
    q.add_argument("--samples", type=int, default=25)
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(fn=cmd_check_bisim)

    q = sub.add_parser("solve", help="solve reach/safe on the timed stage")
    q.add_argument("game")
    q.add_argument("--objective", required=True,
                   help="reach:OBS[,OBS...] or safe:OBS[,OBS...]")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_solve)

    q = sub.add_parser("pull-back",
                       help="rewrite a timed-stage strategy file for the "
                            "source game")
    q.add_argument("game")
    q.add_argument("--strategy", required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_pull_back)

    q = sub.add_parser("simulate",
                       help="play a strategy file against a random opponent")
    q.add_argument("game")
    q.add_argument("--strategy", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--steps", type=int, default=10)
    q.set_defaults(fn=cmd_simulate)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entry()
