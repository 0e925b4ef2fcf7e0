"""Miniature tick-based grid game engine.

Games are defined by a small line-oriented text format (see ``docs/grammar.md``)
and played on rectangular glyph levels. The engine exposes a forward model:
``advance`` mutates a state in place using an injected random stream, and
``GameState.copy`` produces an independent duplicate. The random stream is
never part of a state, so repeated advances of copies of a nondeterministic
state may diverge.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import NamedTuple, Sequence


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    USE = 4
    NIL = 5

    def __str__(self) -> str:
        return self.name.lower()


MOVES = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)
DIRECTIONS = {
    Action.UP: (0, -1),
    Action.DOWN: (0, 1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}
# Index by action value; USE and NIL have no displacement.
_DELTA = ((0, -1), (0, 1), (-1, 0), (1, 0), None, None)
_NEIGHBORS = ((0, -1), (0, 1), (-1, 0), (1, 0))

CATEGORIES = ("avatar", "avatar-spawned", "npc", "movable", "resource", "portal", "wall", "static")
BEHAVIORS = ("inert", "constant-velocity", "random-walk", "chaser", "fleeing")
MOVEMENT_AXES = ("both", "horizontal-only", "vertical-only")

ONGOING = "ongoing"
WIN = "win"
LOSS = "loss"

# Object tuple layout: (oid, type-id, x, y, dx, dy)
OID, TID, X, Y, DX, DY = range(6)


class SpecError(ValueError):
    """Malformed game definition or level document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class EngineError(RuntimeError):
    """Illegal use of the forward model (advancing a finished game, illegal action)."""


@dataclass(frozen=True)
class Effect:
    kind: str  # kill-self | kill-other | kill-both | score | win | lose | block | teleport
    value: float = 0.0
    target: int = -1  # teleport destination type


@dataclass(frozen=True)
class Rule:
    actor: int
    other: int
    effects: tuple[Effect, ...]
    requires: int = -1  # resource type that must be held (and is consumed)
    index: int = 0


@dataclass(frozen=True)
class ObjectClass:
    type_id: int
    name: str
    glyph: str
    category: str
    behavior: str = "inert"
    direction: tuple[int, int] | None = None  # None = random at level load
    period: int = 1
    prob: float = 1.0
    edge: str = "bounce"  # what happens at grid edges / walls: bounce | wrap | die


@dataclass(frozen=True)
class Termination:
    type_id: int
    outcome: str  # win | loss, fired when no object of type_id is alive


@dataclass
class GameSpec:
    name: str
    classes: list[ObjectClass]
    rules: list[Rule] = field(default_factory=list)
    terminations: list[Termination] = field(default_factory=list)
    avatar_speed: Fraction = Fraction(1)
    movement_axes: str = "both"
    tick_cap: int = 2000
    timeout_outcome: str = LOSS
    missile: int = -1
    initial_orientation: Action = Action.DOWN

    def __post_init__(self) -> None:
        self.by_name = {c.name: c for c in self.classes}
        self.by_glyph = {c.glyph: c for c in self.classes}
        avatars = [c for c in self.classes if c.category == "avatar"]
        if len(avatars) != 1:
            raise SpecError(f"expected exactly one avatar class, found {len(avatars)}")
        self.avatar_type = avatars[0].type_id
        self.category = [c.category for c in self.classes]
        self.speed_num = self.avatar_speed.numerator
        self.speed_den = self.avatar_speed.denominator
        self.legal = self._legal_actions()
        self.legal_set = frozenset(self.legal)
        pair_rules: dict[tuple[int, int], list[Rule]] = {}
        for rule in self.rules:
            pair_rules.setdefault((rule.actor, rule.other), []).append(rule)
        self.pair_rules = pair_rules
        blocks: dict[tuple[int, int], int] = {}
        for rule in self.rules:
            if any(e.kind == "block" for e in rule.effects):
                blocks[(rule.actor, rule.other)] = -1
            elif rule.requires >= 0:
                blocks.setdefault((rule.actor, rule.other), rule.requires)
        # (mover, occupant) -> -1 (always blocks) or resource that unlocks it
        self.blocks = blocks
        self.blocking_movers = frozenset(a for a, _ in blocks)
        self.actor_types = frozenset(
            c.type_id for c in self.classes if c.category in ("avatar", "avatar-spawned")
        )

    def _legal_actions(self) -> tuple[Action, ...]:
        acts = []
        if self.movement_axes != "horizontal-only":
            acts += [Action.UP, Action.DOWN]
        if self.movement_axes != "vertical-only":
            acts += [Action.LEFT, Action.RIGHT]
        if self.missile >= 0:
            acts.append(Action.USE)
        acts.append(Action.NIL)
        return tuple(acts)

    def type_id(self, name: str) -> int:
        return self.by_name[name].type_id

    def types_of(self, category: str) -> list[int]:
        return [c.type_id for c in self.classes if c.category == category]


class CollisionEvent(NamedTuple):
    actor_category: str  # avatar | avatar-spawned
    other_type: int
    cell: tuple[int, int]


class StepOutcome(NamedTuple):
    events: tuple[CollisionEvent, ...]
    score_delta: float
    status: str


# ---------------------------------------------------------------------------
# Parsing


def _parse_number(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"expected a number, got {tok!r}", line, col) from None


_DIR_WORDS = {"up": (0, -1), "down": (0, 1), "left": (-1, 0), "right": (1, 0), "random": None}


def _tokens(raw: str) -> list[tuple[str, int]]:
    """Split a line into (token, 1-based column) pairs, dropping comments."""
    out = []
    text = raw.split("#", 1)[0]
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < len(text) and not text[j].isspace():
            j += 1
        out.append((text[i:j], i + 1))
        i = j
    return out


def load_spec(text: str) -> GameSpec:
    """Parse a game-definition document into a validated ``GameSpec``."""
    name = None
    section = None
    class_lines: list[tuple[int, list[tuple[str, int]]]] = []
    rule_lines: list[tuple[int, list[tuple[str, int]]]] = []
    trait_lines: list[tuple[int, list[tuple[str, int]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head = toks[0][0]
        if len(toks) == 1 and head in ("classes:", "rules:", "traits:"):
            section = head[:-1]
            continue
        if head == "game":
            if len(toks) != 2:
                raise SpecError("expected 'game <name>'", lineno, toks[0][1])
            name = toks[1][0]
            continue
        if section is None:
            raise SpecError(f"unexpected {head!r} outside of a section", lineno, toks[0][1])
        {"classes": class_lines, "rules": rule_lines, "traits": trait_lines}[section].append((lineno, toks))

    if name is None:
        raise SpecError("missing 'game <name>' header")

    classes: list[ObjectClass] = []
    seen_glyphs: set[str] = set()
    for lineno, toks in class_lines:
        if len(toks) < 4:
            raise SpecError("expected '<name> <glyph> <category> <behavior> [key=value...]'", lineno, toks[0][1])
        cname, glyph, category, behavior = (t for t, _ in toks[:4])
        if cname in (c.name for c in classes):
            raise SpecError(f"duplicate class {cname!r}", lineno, toks[0][1])
        if len(glyph) != 1 or glyph in ".":
            raise SpecError(f"glyph must be one character other than '.', got {glyph!r}", lineno, toks[1][1])
        if glyph in seen_glyphs:
            raise SpecError(f"duplicate glyph {glyph!r}", lineno, toks[1][1])
        seen_glyphs.add(glyph)
        if category not in CATEGORIES:
            raise SpecError(f"unknown category {category!r}", lineno, toks[2][1])
        if behavior not in BEHAVIORS:
            raise SpecError(f"unknown behavior {behavior!r}", lineno, toks[3][1])
        if category == "wall" and behavior != "inert":
            raise SpecError("walls must be inert", lineno, toks[3][1])
        params = {}
        for tok, col in toks[4:]:
            if "=" not in tok:
                raise SpecError(f"expected key=value, got {tok!r}", lineno, col)
            key, val = tok.split("=", 1)
            if key == "dir":
                if val not in _DIR_WORDS:
                    raise SpecError(f"unknown direction {val!r}", lineno, col)
                params["direction"] = _DIR_WORDS[val]
            elif key == "period":
                period = _parse_number(val, lineno, col)
                if period < 1 or period.denominator != 1:
                    raise SpecError("period must be a positive integer", lineno, col)
                params["period"] = int(period)
            elif key == "prob":
                prob = _parse_number(val, lineno, col)
                if not 0 <= prob <= 1:
                    raise SpecError("prob must lie in [0, 1]", lineno, col)
                params["prob"] = float(prob)
            elif key == "edge":
                if val not in ("bounce", "wrap", "die"):
                    raise SpecError(f"unknown edge mode {val!r}", lineno, col)
                params["edge"] = val
            else:
                raise SpecError(f"unknown class parameter {key!r}", lineno, col)
        if behavior == "constant-velocity" and "direction" not in params:
            params["direction"] = (0, 0)
        classes.append(ObjectClass(len(classes), cname, glyph, category, behavior, **params))

    by_name = {c.name: c for c in classes}

    def resolve(tok: str, lineno: int, col: int) -> int:
        if tok not in by_name:
            raise SpecError(f"undeclared type {tok!r}", lineno, col)
        return by_name[tok].type_id

    rules: list[Rule] = []
    terminations: list[Termination] = []
    for lineno, toks in rule_lines:
        if toks[0][0] == "none":
            if len(toks) != 3 or toks[2][0] not in ("win", "lose"):
                raise SpecError("expected 'none <type> win|lose'", lineno, toks[0][1])
            outcome = WIN if toks[2][0] == "win" else LOSS
            terminations.append(Termination(resolve(toks[1][0], lineno, toks[1][1]), outcome))
            continue
        if len(toks) < 3:
            raise SpecError("expected '<actor> <other> <effect>...'", lineno, toks[0][1])
        actor = resolve(toks[0][0], lineno, toks[0][1])
        other = resolve(toks[1][0], lineno, toks[1][1])
        effects = []
        requires = -1
        rest = toks[2:]
        i = 0
        while i < len(rest):
            tok, col = rest[i]
            if tok == "requires":
                if i + 1 >= len(rest):
                    raise SpecError("'requires' needs a resource type", lineno, col)
                requires = resolve(rest[i + 1][0], lineno, rest[i + 1][1])
                if classes[requires].category != "resource":
                    raise SpecError(f"{rest[i + 1][0]!r} is not a resource", lineno, rest[i + 1][1])
                i += 2
                continue
            if tok in ("kill-self", "kill-other", "kill-both", "win", "lose", "block"):
                effects.append(Effect(tok))
            elif tok.startswith("score(") and tok.endswith(")"):
                effects.append(Effect("score", value=float(_parse_number(tok[6:-1], lineno, col))))
            elif tok.startswith("teleport(") and tok.endswith(")"):
                effects.append(Effect("teleport", target=resolve(tok[9:-1], lineno, col + 9)))
            else:
                raise SpecError(f"unknown effect {tok!r}", lineno, col)
            i += 1
        if not effects:
            raise SpecError("rule has no effects", lineno, toks[0][1])
        rules.append(Rule(actor, other, tuple(effects), requires, len(rules)))

    traits: dict = {}
    for lineno, toks in trait_lines:
        key = toks[0][0]
        if len(toks) != 2:
            raise SpecError(f"expected '{key} <value>'", lineno, toks[0][1])
        val, col = toks[1]
        if key == "avatar-speed":
            speed = _parse_number(val, lineno, col)
            if speed <= 0 or speed > 1:
                raise SpecError("avatar-speed must lie in (0, 1]", lineno, col)
            traits["avatar_speed"] = speed
        elif key == "movement":
            if val not in MOVEMENT_AXES:
                raise SpecError(f"unknown movement axes {val!r}", lineno, col)
            traits["movement_axes"] = val
        elif key == "tick-cap":
            cap = _parse_number(val, lineno, col)
            if cap < 1 or cap.denominator != 1:
                raise SpecError("tick-cap must be a positive integer", lineno, col)
            traits["tick_cap"] = int(cap)
        elif key == "timeout":
            if val not in ("win", "lose", "loss"):
                raise SpecError("timeout must be win or loss", lineno, col)
            traits["timeout_outcome"] = WIN if val == "win" else LOSS
        elif key == "missile":
            tid = resolve(val, lineno, col)
            if classes[tid].category != "avatar-spawned":
                raise SpecError(f"missile class {val!r} must have category avatar-spawned", lineno, col)
            traits["missile"] = tid
        elif key == "orientation":
            if val not in ("up", "down", "left", "right"):
                raise SpecError(f"unknown orientation {val!r}", lineno, col)
            traits["initial_orientation"] = Action[val.upper()]
        else:
            raise SpecError(f"unknown trait {key!r}", lineno, toks[0][1])

    return GameSpec(name, classes, rules, terminations, **traits)


@dataclass(frozen=True)
class Level:
    width: int
    height: int
    rows: tuple[str, ...]


def load_level(text: str, spec: GameSpec) -> Level:
    rows = [r.rstrip("\n") for r in text.splitlines() if r.strip()]
    if not rows:
        raise SpecError("empty level")
    width = len(rows[0])
    for y, row in enumerate(rows, start=1):
        if len(row) != width:
            raise SpecError(f"level is not rectangular (row length {len(row)} != {width})", y)
        for x, ch in enumerate(row, start=1):
            if ch not in ". " and ch not in spec.by_glyph:
                raise SpecError(f"unknown glyph {ch!r}", y, x)
    avatar_glyph = spec.classes[spec.avatar_type].glyph
    count = sum(row.count(avatar_glyph) for row in rows)
    if count != 1:
        raise SpecError("level must contain exactly one avatar" if count else "missing avatar in level")
    return Level(width, len(rows), tuple(rows))


# ---------------------------------------------------------------------------
# State


class GameState:
    """Full observable snapshot of one game at one tick."""

    __slots__ = (
        "spec", "width", "height", "walls", "tick", "score", "status",
        "avatar", "orientation", "speed_acc", "inventory", "objects", "next_oid", "events",
    )

    def copy(self) -> GameState:
        c = GameState.__new__(GameState)
        c.spec = self.spec
        c.width = self.width
        c.height = self.height
        c.walls = self.walls
        c.tick = self.tick
        c.score = self.score
        c.status = self.status
        c.avatar = self.avatar
        c.orientation = self.orientation
        c.speed_acc = self.speed_acc
        c.inventory = dict(self.inventory) if self.inventory else {}
        c.objects = list(self.objects)
        c.next_oid = self.next_oid
        c.events = self.events
        return c

    __copy__ = copy

    @property
    def is_terminal(self) -> bool:
        return self.status != ONGOING

    def objects_of(self, type_id: int) -> list[tuple]:
        return [o for o in self.objects if o[TID] == type_id]

    def serialize(self) -> bytes:
        """Canonical byte encoding; equal bytes iff the states are equivalent."""
        objs = sorted(o[1:] for o in self.objects)
        payload = (
            self.spec.name, self.width, self.height, self.tick, repr(float(self.score)), self.status,
            self.avatar, int(self.orientation), self.speed_acc,
            tuple(sorted(self.inventory.items())), tuple(objs), tuple(sorted(self.walls)),
        )
        return repr(payload).encode()

    def __repr__(self) -> str:
        return (f"GameState({self.spec.name!r}, tick={self.tick}, score={self.score}, "
                f"status={self.status}, avatar={self.avatar}, objects={len(self.objects)})")


def init_state(spec: GameSpec, level: Level, seed: int = 0) -> GameState:
    """Place objects per the level text. ``seed`` fixes randomized initial directions."""
    rng = random.Random(seed)
    s = GameState.__new__(GameState)
    s.spec = spec
    s.width = level.width
    s.height = level.height
    walls = set()
    objects = []
    avatar = None
    for y, row in enumerate(level.rows):
        for x, ch in enumerate(row):
            if ch in ". ":
                continue
            cls = spec.by_glyph[ch]
            if cls.category == "avatar":
                avatar = (x, y)
            elif cls.category == "wall":
                walls.add((x, y))
            else:
                d = cls.direction
                if d is None:
                    d = _NEIGHBORS[rng.randrange(4)]
                objects.append((len(objects), cls.type_id, x, y, d[0], d[1]))
    s.walls = frozenset(walls)
    s.tick = 0
    s.score = 0.0
    s.status = ONGOING
    s.avatar = avatar
    s.orientation = spec.initial_orientation
    s.speed_acc = 0
    s.inventory = {}
    s.objects = objects
    s.next_oid = len(objects)
    s.events = ()
    return s


def legal_actions(state: GameState) -> tuple[Action, ...]:
    if state.status != ONGOING:
        return ()
    return state.spec.legal


def _blocked(state: GameState, mover: int, x: int, y: int) -> bool:
    if x < 0 or y < 0 or x >= state.width or y >= state.height or (x, y) in state.walls:
        return True
    spec = state.spec
    if mover not in spec.blocking_movers:
        return False
    blocks = spec.blocks
    av = state.avatar
    if av is not None and av[0] == x and av[1] == y:
        if blocks.get((mover, spec.avatar_type)) == -1:
            return True
    for o in state.objects:
        if o[X] == x and o[Y] == y:
            need = blocks.get((mover, o[TID]))
            if need is None:
                continue
            if need == -1 or state.inventory.get(need, 0) <= 0:
                return True
    return False


def advance(state: GameState, action: Action, rng: random.Random) -> StepOutcome:
    """Advance ``state`` by one tick in place."""
    if state.status != ONGOING:
        raise EngineError("cannot advance a terminal state")
    spec = state.spec
    if action not in spec.legal_set:
        raise EngineError(f"illegal action {action!r} for game {spec.name!r}")
    state.tick += 1
    tick = state.tick
    score0 = state.score
    width = state.width
    height = state.height
    walls = state.walls
    classes = spec.classes
    blocking_movers = spec.blocking_movers

    # avatar
    av = state.avatar
    delta = _DELTA[action]
    if delta is not None:
        state.orientation = action
        acc = state.speed_acc + spec.speed_num
        if acc >= spec.speed_den:
            acc -= spec.speed_den
            nx = av[0] + delta[0]
            ny = av[1] + delta[1]
            if not _blocked(state, spec.avatar_type, nx, ny):
                av = state.avatar = (nx, ny)
        state.speed_acc = acc
    else:
        state.speed_acc = 0

    # other objects, in creation order
    objs = state.objects
    removed = False
    for i in range(len(objs)):
        o = objs[i]
        cls = classes[o[TID]]
        beh = cls.behavior
        if beh == "inert":
            continue
        x, y = o[X], o[Y]
        if beh == "constant-velocity":
            if tick % cls.period:
                continue
            if cls.prob < 1.0 and rng.random() >= cls.prob:
                continue
            dx, dy = o[DX], o[DY]
            if dx == 0 and dy == 0:
                continue
            nx, ny = x + dx, y + dy
            out = nx < 0 or ny < 0 or nx >= width or ny >= height
            if out and cls.edge == "wrap":
                nx %= width
                ny %= height
                out = False
            if out or (nx, ny) in walls or (
                o[TID] in blocking_movers and _blocked(state, o[TID], nx, ny)
            ):
                if cls.edge == "die":
                    objs[i] = None
                    removed = True
                else:
                    objs[i] = (o[0], o[1], x, y, -dx, -dy)
                continue
            objs[i] = (o[0], o[1], nx, ny, dx, dy)
        elif beh == "random-walk":
            if tick % cls.period:
                continue
            if rng.random() >= cls.prob:
                continue
            dx, dy = _NEIGHBORS[rng.randrange(4)]
            nx, ny = x + dx, y + dy
            if not _blocked(state, o[TID], nx, ny):
                objs[i] = (o[0], o[1], nx, ny, dx, dy)
        else:  # chaser / fleeing
            if av is None or tick % cls.period:
                continue
            if cls.prob < 1.0 and rng.random() >= cls.prob:
                continue
            ax, ay = av
            here = abs(x - ax) + abs(y - ay)
            best = []
            best_d = None
            for dx, dy in _NEIGHBORS:
                nx, ny = x + dx, y + dy
                if _blocked(state, o[TID], nx, ny):
                    continue
                d = abs(nx - ax) + abs(ny - ay)
                if beh == "fleeing":
                    d = -d
                if best_d is None or d < best_d:
                    best_d = d
                    best = [(dx, dy)]
                elif d == best_d:
                    best.append((dx, dy))
            if not best:
                continue
            improves = best_d < here if beh == "chaser" else best_d < -here
            if not improves:
                continue
            dx, dy = best[0] if len(best) == 1 else best[rng.randrange(len(best))]
            objs[i] = (o[0], o[1], x + dx, y + dy, dx, dy)
    if removed:
        objs = state.objects = [o for o in objs if o is not None]

    # missile spawn
    if action == Action.USE and av is not None and spec.missile >= 0:
        mt = spec.missile
        if not any(o[TID] == mt for o in objs):
            dx, dy = _DELTA[state.orientation]
            nx, ny = av[0] + dx, av[1] + dy
            if 0 <= nx < width and 0 <= ny < height and (nx, ny) not in walls:
                objs.append((state.next_oid, mt, nx, ny, dx, dy))
                state.next_oid += 1

    events = _collide(state, rng)

    if state.status == ONGOING:
        for term in spec.terminations:
            tid = term.type_id
            if not any(o[TID] == tid for o in state.objects):
                state.status = term.outcome
                break
    if state.status == ONGOING and tick >= spec.tick_cap:
        state.status = spec.timeout_outcome
    state.events = events
    return StepOutcome(events, state.score - score0, state.status)


_AVATAR = -1  # entity index standing for the avatar in the collision phase


def _collide(state: GameState, rng: random.Random) -> tuple[CollisionEvent, ...]:
    spec = state.spec
    objs = state.objects
    cells: dict[tuple[int, int], list[int]] = {}
    av = state.avatar
    if av is not None:
        cells[av] = [_AVATAR]
    for i, o in enumerate(objs):
        key = (o[X], o[Y])
        lst = cells.get(key)
        if lst is None:
            cells[key] = [i]
        else:
            lst.append(i)
    shared = [c for c, lst in cells.items() if len(lst) > 1]
    if not shared:
        return ()
    shared.sort(key=lambda c: (c[1], c[0]))
    avatar_type = spec.avatar_type
    category = spec.category
    pair_rules = spec.pair_rules
    events = []
    dead: set[int] = set()
    for cell in shared:
        ents = cells[cell]
        fired = []
        for e1 in ents:
            t1 = avatar_type if e1 == _AVATAR else objs[e1][TID]
            is_actor = t1 in spec.actor_types
            for e2 in ents:
                if e1 == e2:
                    continue
                t2 = avatar_type if e2 == _AVATAR else objs[e2][TID]
                if is_actor:
                    events.append(CollisionEvent(category[t1], t2, cell))
                rules = pair_rules.get((t1, t2))
                if rules:
                    for rule in rules:
                        fired.append((rule.index, e1, e2, rule))
        fired.sort(key=lambda f: (f[0], f[1], f[2]))
        for _, e1, e2, rule in fired:
            if e1 in dead or e2 in dead:
                continue
            if rule.requires >= 0:
                held = state.inventory.get(rule.requires, 0)
                if held <= 0:
                    continue
                if held == 1:
                    del state.inventory[rule.requires]
                else:
                    state.inventory[rule.requires] = held - 1
            for eff in rule.effects:
                kind = eff.kind
                if kind == "score":
                    state.score += eff.value
                elif kind == "win" or kind == "lose":
                    if state.status == ONGOING:
                        state.status = WIN if kind == "win" else LOSS
                elif kind == "kill-self":
                    _kill(state, e1, dead)
                elif kind == "kill-other":
                    if e1 == _AVATAR and e2 != _AVATAR and category[objs[e2][TID]] == "resource":
                        tid = objs[e2][TID]
                        state.inventory[tid] = state.inventory.get(tid, 0) + 1
                    _kill(state, e2, dead)
                elif kind == "kill-both":
                    _kill(state, e1, dead)
                    _kill(state, e2, dead)
                elif kind == "teleport":
                    _teleport(state, e1, eff.target, cell, rng)
                if e1 in dead:
                    break
    if dead:
        state.objects = [o for i, o in enumerate(objs) if i not in dead]
    return tuple(events)


def _kill(state: GameState, ent: int, dead: set[int]) -> None:
    dead.add(ent)
    if ent == _AVATAR:
        state.avatar = None
        if state.status == ONGOING:
            state.status = LOSS


def _teleport(state: GameState, ent: int, target: int, cell: tuple[int, int], rng: random.Random) -> None:
    exits = [(o[X], o[Y]) for o in state.objects if o[TID] == target and (o[X], o[Y]) != cell]
    if not exits:
        return
    dest = exits[0] if len(exits) == 1 else exits[rng.randrange(len(exits))]
    if ent == _AVATAR:
        state.avatar = dest
    else:
        o = state.objects[ent]
        state.objects[ent] = (o[0], o[1], dest[0], dest[1], o[4], o[5])


def copy(state: GameState) -> GameState:
    return state.copy()


def serialize(state: GameState) -> bytes:
    return state.serialize()


# ---------------------------------------------------------------------------
# Feature atoms


def feature_atoms(state: GameState) -> frozenset:
    """Boolean predicates true in ``state``.

    Atoms are tuples: ``("at", (x, y), type_id)``, ``("orient", action)`` and
    ``("holding", resource_type, count)``.
    """
    atoms = {("at", (o[X], o[Y]), o[TID]) for o in state.objects}
    spec = state.spec
    if state.walls:
        wall_types = spec.types_of("wall")
        if wall_types:
            wt = wall_types[0]
            atoms.update(("at", c, wt) for c in state.walls)
    if state.avatar is not None:
        atoms.add(("at", state.avatar, spec.avatar_type))
        atoms.add(("orient", int(state.orientation)))
    for tid, k in state.inventory.items():
        atoms.add(("holding", tid, k))
    return frozenset(atoms)


def avatar_cell(state: GameState) -> tuple[int, int] | None:
    return state.avatar


def play(state: GameState, actions: Sequence[Action], rng: random.Random) -> GameState:
    """Advance a copy of ``state`` through ``actions``, stopping early at a terminal state."""
    s = state.copy()
    for a in actions:
        if s.status != ONGOING:
            break
        advance(s, a, rng)
    return s
