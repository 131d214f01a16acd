"""TTP instance data model, text format, validation and random generation."""

from __future__ import annotations

import dataclasses
import enum
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

from .errors import ParseError, ValidationError


class Rounding(enum.Enum):
    NONE = "EUC_2D"
    CEIL = "CEIL_2D"


class KPClass(enum.Enum):
    UNCORRELATED = "uncorrelated"
    WEAKLY_CORRELATED = "weakly-correlated"
    BOUNDED_STRONGLY_CORRELATED = "bounded-strongly-correlated"


@dataclass(frozen=True)
class City:
    index: int
    x: float
    y: float


@dataclass(frozen=True)
class Item:
    index: int
    profit: float
    weight: float
    city: int


@dataclass(frozen=True)
class SpeedModel:
    v_max: float
    v_min: float
    capacity: float
    # Fixes the speed drop per unit weight instead of deriving it from the
    # endpoints.  Only the capacity sweep uses it; files never carry it.
    pinned_slope: float | None = None

    @property
    def slope(self) -> float:
        """Magnitude of the speed drop per unit of carried weight."""
        if self.pinned_slope is not None:
            return self.pinned_slope
        if self.capacity <= 0:
            return 0.0
        return (self.v_max - self.v_min) / self.capacity


@dataclass(frozen=True)
class TtpInstance:
    name: str
    cities: tuple[City, ...]
    items: tuple[Item, ...]
    speed: SpeedModel
    rent: float
    rounding: Rounding = Rounding.NONE

    @property
    def n(self) -> int:
        return len(self.cities)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def capacity(self) -> float:
        return self.speed.capacity

    def replace(self, **changes) -> "TtpInstance":
        """Copy with fields changed; ``capacity``, ``v_min``, ``v_max`` go to the speed model."""
        speed_keys = {"capacity", "v_min", "v_max", "pinned_slope"} & changes.keys()
        if speed_keys:
            speed = dataclasses.replace(
                changes.pop("speed", self.speed), **{k: changes.pop(k) for k in speed_keys}
            )
            changes["speed"] = speed
        return dataclasses.replace(self, **changes)

    # Cached array views used by the kernels (0-based).

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array([(c.x, c.y) for c in self.cities], dtype=float).reshape(-1, 2)

    @cached_property
    def dist(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        d = np.sqrt((diff**2).sum(axis=-1))
        if self.rounding is Rounding.CEIL:
            d = np.ceil(d)
        d.setflags(write=False)
        return d

    @cached_property
    def item_weights(self) -> np.ndarray:
        return np.array([it.weight for it in self.items], dtype=float)

    @cached_property
    def item_profits(self) -> np.ndarray:
        return np.array([it.profit for it in self.items], dtype=float)

    @cached_property
    def item_cities(self) -> np.ndarray:
        return np.array([it.city - 1 for it in self.items], dtype=np.int64)

    @cached_property
    def removal_order(self) -> np.ndarray:
        """Item positions sorted by ascending profit/weight, ties by higher index first."""
        ratio = self.item_profits / self.item_weights
        idx = np.arange(self.m)
        return np.lexsort((-idx, ratio)).astype(np.int64)


def distance(inst: TtpInstance, j: int, k: int) -> float:
    n = inst.n
    if not (1 <= j <= n and 1 <= k <= n):
        raise IndexError(f"city index out of range 1..{n}: ({j}, {k})")
    return float(inst.dist[j - 1, k - 1])


def validate_instance(inst: TtpInstance) -> list[str]:
    """Return one message per broken invariant; empty means the instance is valid."""
    problems: list[str] = []
    n = len(inst.cities)
    if n < 2:
        problems.append(f"cities: need at least 2, got {n}")
    for pos, c in enumerate(inst.cities, start=1):
        if c.index != pos:
            problems.append(f"city {pos}: index {c.index} out of sequence")
        if not (math.isfinite(c.x) and math.isfinite(c.y)):
            problems.append(f"city {pos}: non-finite coordinate")
    for pos, it in enumerate(inst.items, start=1):
        if it.index != pos:
            problems.append(f"item {pos}: index {it.index} out of sequence")
        if not (it.profit >= 0 and math.isfinite(it.profit)):
            problems.append(f"item {pos}: profit must be non-negative")
        if not (it.weight > 0 and math.isfinite(it.weight)):
            problems.append(f"item {pos}: weight must be positive")
        if not 1 <= it.city <= n:
            problems.append(f"item {pos}: city {it.city} out of range")
        elif it.city == 1:
            problems.append(f"item {pos}: assigned to depot")
    sp = inst.speed
    if not sp.v_min > 0:
        problems.append("speed: v_min must be positive")
    if not sp.v_max > 0:
        problems.append("speed: v_max must be positive")
    if sp.v_min > sp.v_max:
        problems.append("speed: v_min exceeds v_max")
    if not sp.capacity > 0:
        problems.append("speed: capacity must be positive")
    if not (inst.rent >= 0 and math.isfinite(inst.rent)):
        problems.append("rent: must be non-negative")
    return problems


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_HEADERS = {
    "PROBLEM NAME": "name",
    "DIMENSION": "n",
    "NUMBER OF ITEMS": "m",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "rent",
    "EDGE_WEIGHT_TYPE": "rounding",
}
# present in the public benchmark files; accepted and ignored
_IGNORED_HEADERS = {"KNAPSACK DATA TYPE"}


def _number(text: str, lineno: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{what}: not a number: {text!r}", lineno) from None


def _integer(text: str, lineno: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what}: not an integer: {text!r}", lineno) from None


def parse_instance(source: str | TextIO) -> TtpInstance:
    """Parse the line-oriented instance format from a string or text stream."""
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    head: dict[str, str] = {}
    pos = 0
    while pos < len(lines):
        raw = lines[pos].strip()
        if raw.upper().startswith(("NODE_COORD_SECTION", "ITEMS SECTION")):
            break
        pos += 1
        if not raw:
            continue
        if ":" not in raw:
            raise ParseError(f"expected 'key: value', got {raw!r}", pos)
        key, value = (s.strip() for s in raw.split(":", 1))
        key = key.upper()
        if key in _IGNORED_HEADERS:
            continue
        if key not in _HEADERS:
            raise ParseError(f"unknown header {key!r}", pos)
        head[_HEADERS[key]] = value
    for key, attr in _HEADERS.items():
        if attr not in head:
            raise ParseError(f"missing header {key!r}", pos + 1)

    n = _integer(head["n"], 0, "DIMENSION")
    m = _integer(head["m"], 0, "NUMBER OF ITEMS")
    try:
        rounding = Rounding(head["rounding"].upper())
    except ValueError:
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {head['rounding']!r}", 0) from None

    def section(title: str, count: int, width: int) -> list[tuple[int, list[str]]]:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines) or not lines[pos].strip().upper().startswith(title):
            raise ParseError(f"expected {title}", pos + 1)
        pos += 1
        rows = []
        while pos < len(lines) and len(rows) < count:
            raw = lines[pos].strip()
            lineno = pos + 1
            if not raw:
                pos += 1
                continue
            if raw.upper().startswith(("NODE_COORD_SECTION", "ITEMS SECTION")):
                break
            parts = raw.split()
            if len(parts) != width:
                raise ParseError(f"{title}: expected {width} fields, got {len(parts)}", lineno)
            if _integer(parts[0], lineno, f"{title} index") != len(rows) + 1:
                raise ParseError(f"{title}: index {parts[0]} out of sequence", lineno)
            rows.append((lineno, parts))
            pos += 1
        if len(rows) != count:
            raise ParseError(f"{title}: header declares {count} rows, found {len(rows)}", pos + 1)
        return rows

    cities = []
    for ln, p in section("NODE_COORD_SECTION", n, 3):
        cities.append(City(len(cities) + 1, _number(p[1], ln, "x"), _number(p[2], ln, "y")))
    items = []
    for ln, p in section("ITEMS SECTION", m, 4):
        items.append(
            Item(
                len(items) + 1,
                _number(p[1], ln, "profit"),
                _number(p[2], ln, "weight"),
                _integer(p[3], ln, "assigned node"),
            )
        )
    for rest in range(pos, len(lines)):
        if lines[rest].strip():
            raise ParseError("unexpected trailing content", rest + 1)

    return TtpInstance(
        name=head["name"],
        cities=tuple(cities),
        items=tuple(items),
        speed=SpeedModel(
            v_max=_number(head["v_max"], 0, "MAX SPEED"),
            v_min=_number(head["v_min"], 0, "MIN SPEED"),
            capacity=_number(head["capacity"], 0, "CAPACITY OF KNAPSACK"),
        ),
        rent=_number(head["rent"], 0, "RENTING RATIO"),
        rounding=rounding,
    )


def _fmt(x: float) -> str:
    # repr round-trips exactly; integral values are written without ".0"
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def serialize_instance(inst: TtpInstance) -> str:
    problems = validate_instance(inst)
    if problems:
        raise ValidationError(problems)
    out = io.StringIO()
    w = out.write
    w(f"PROBLEM NAME: {inst.name}\n")
    w(f"DIMENSION: {inst.n}\n")
    w(f"NUMBER OF ITEMS: {inst.m}\n")
    w(f"CAPACITY OF KNAPSACK: {_fmt(inst.speed.capacity)}\n")
    w(f"MIN SPEED: {repr(float(inst.speed.v_min))}\n")
    w(f"MAX SPEED: {repr(float(inst.speed.v_max))}\n")
    w(f"RENTING RATIO: {repr(float(inst.rent))}\n")
    w(f"EDGE_WEIGHT_TYPE: {inst.rounding.value}\n")
    w("NODE_COORD_SECTION (INDEX, X, Y):\n")
    for c in inst.cities:
        w(f"{c.index} {repr(float(c.x))} {repr(float(c.y))}\n")
    w("ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):\n")
    for it in inst.items:
        w(f"{it.index} {_fmt(it.profit)} {_fmt(it.weight)} {it.city}\n")
    return out.getvalue()


def read_instance(path) -> TtpInstance:
    with open(path, encoding="ascii") as fh:
        return parse_instance(fh)


def write_instance(inst: TtpInstance, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize_instance(inst))


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorConfig:
    n_cities: int
    items_per_city: int = 1
    kp_class: KPClass = KPClass.UNCORRELATED
    capacity_factor: float = 0.5
    coordinate_range: float = 100.0
    rent: float = 1.0
    v_min: float = 0.1
    v_max: float = 1.0
    seed: int = 0
    name: str = field(default="")

    def check(self) -> None:
        bad = []
        if self.n_cities < 2:
            bad.append("n_cities must be >= 2")
        if self.items_per_city < 0:
            bad.append("items_per_city must be >= 0")
        if not 0 < self.capacity_factor <= 1:
            bad.append("capacity_factor must lie in (0, 1]")
        if not self.coordinate_range > 0:
            bad.append("coordinate_range must be positive")
        if not self.rent >= 0:
            bad.append("rent must be non-negative")
        if not (0 < self.v_min <= self.v_max):
            bad.append("need 0 < v_min <= v_max")
        if bad:
            raise ValidationError(bad)


def generate_instance(cfg: GeneratorConfig) -> TtpInstance:
    """Draw a random instance; a pure function of ``cfg``.

    Random stream (numpy PCG64 seeded with ``cfg.seed``), consumed in order:

    1. ``uniform(0, coordinate_range, (n_cities, 2))`` for the coordinates;
    2. ``integers(1, 1001, m)`` for the weights;
    3. uncorrelated: ``integers(1, 1001, m)`` for the profits; weakly
       correlated: ``integers(-100, 101, m)`` for the profit offsets;
       bounded strongly correlated: nothing.

    Items are laid out city by city (cities 2..n), ``items_per_city`` each.
    """
    cfg.check()
    rng = np.random.default_rng(np.uint64(cfg.seed % 2**64))
    n = cfg.n_cities
    xy = rng.uniform(0.0, cfg.coordinate_range, size=(n, 2))
    cities = tuple(City(i + 1, float(xy[i, 0]), float(xy[i, 1])) for i in range(n))

    m = (n - 1) * cfg.items_per_city
    weights = rng.integers(1, 1001, size=m)
    if cfg.kp_class is KPClass.UNCORRELATED:
        profits = rng.integers(1, 1001, size=m)
    elif cfg.kp_class is KPClass.WEAKLY_CORRELATED:
        profits = np.maximum(weights + rng.integers(-100, 101, size=m), 1)
    else:
        profits = weights + 100
    owners = np.repeat(np.arange(2, n + 1), cfg.items_per_city)
    items = tuple(
        Item(i + 1, float(profits[i]), float(weights[i]), int(owners[i])) for i in range(m)
    )
    capacity = max(1, int(round(cfg.capacity_factor * float(weights.sum()))))
    return TtpInstance(
        name=cfg.name or f"gen-{n}-{cfg.items_per_city}-{cfg.kp_class.value}-{cfg.seed}",
        cities=cities,
        items=items,
        speed=SpeedModel(v_max=float(cfg.v_max), v_min=float(cfg.v_min), capacity=float(capacity)),
        rent=float(cfg.rent),
        rounding=Rounding.NONE,
    )


def instance_from_rows(
    coords: Iterable[tuple[float, float]],
    items: Iterable[tuple[float, float, int]],
    capacity: float,
    v_min: float,
    v_max: float,
    rent: float,
    name: str = "adhoc",
    rounding: Rounding = Rounding.NONE,
) -> TtpInstance:
    """Build an instance from plain tuples: coords ``(x, y)``, items ``(profit, weight, city)``."""
    return TtpInstance(
        name=name,
        cities=tuple(City(i + 1, float(x), float(y)) for i, (x, y) in enumerate(coords)),
        items=tuple(
            Item(i + 1, float(p), float(w), int(c)) for i, (p, w, c) in enumerate(items)
        ),
        speed=SpeedModel(v_max=float(v_max), v_min=float(v_min), capacity=float(capacity)),
        rent=float(rent),
        rounding=rounding,
    )
