"""Flat key-value scenario configs.

One ``key = value`` per line, ``#`` starts a comment, keys are dotted::

    # Case 2, positive slope
    system.k1 = 1.0
    system.chi0 = 2.0
    system.a = 10.0
    scenario.variant = case2
    source1.family = linear-edge
    source1.s0 = 0.0
    source1.slope = 1.0
    sweep.axis1.param = system.k1
    sweep.axis1.start = 0.01
    sweep.axis1.stop = 1.0
    sweep.axis1.count = 50
    sweep.axis1.spacing = log

``system.k2`` defaults to ``system.k1`` (and then follows it in sweeps).
``source2.*`` keys describe the region-2 profile; tabulated profiles take
comma-separated ``knots`` (offsets from the interface) and ``values``.
Sweeps may also drive ``system.opacity``, which sets ``a = opacity / chi0``.
Unknown or repeated keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import EmissionScenario, Family, SlabSystem, SourceProfile, Variant


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


SYSTEM_KEYS = ("k1", "k2", "chi0", "a")
SOURCE_NUMERIC = ("s0", "slope", "decay_length")
AXIS_KEYS = ("param", "start", "stop", "count", "spacing")
MAX_AXES = 2


@dataclass(frozen=True)
class SourceConfig:
    family: Family
    s0: float = 0.0
    slope: float = 0.0
    decay_length: float = 1.0
    knots: tuple = ()
    values: tuple = ()

    def profile(self, region: int, edge: float = 0.0) -> SourceProfile:
        return SourceProfile(self.family, region=region, s0=self.s0, slope=self.slope,
                             decay_length=self.decay_length, knots=self.knots,
                             values=self.values, edge=edge)


@dataclass(frozen=True)
class SweepAxis:
    param: str
    start: float
    stop: float
    count: int = 1
    spacing: str = "linear"

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    k1: float
    chi0: float
    a: float
    variant: Variant
    k2: float | None = None
    source1: SourceConfig | None = None
    source2: SourceConfig | None = None
    axes: tuple = ()
    output_path: str | None = None
    window: float = 0.0

    def sweepable(self) -> tuple[str, ...]:
        names = ["system.k1", "system.k2", "system.chi0", "system.a", "system.opacity"]
        for idx, src in ((1, self.source1), (2, self.source2)):
            if src is not None and src.family is not Family.TABULATED:
                names += [f"source{idx}.{key}" for key in SOURCE_NUMERIC]
        return tuple(names)

    def with_values(self, overrides: dict) -> "ScenarioConfig":
        """Copy with dotted-key overrides applied (as used at one sweep point)."""
        cfg = self
        sys_vals = {}
        opacity = None
        for key, value in overrides.items():
            group, _, name = key.partition(".")
            if key == "system.opacity":
                opacity = value
            elif group == "system":
                sys_vals[name] = float(value)
            elif group in ("source1", "source2"):
                src = getattr(cfg, group)
                cfg = replace(cfg, **{group: replace(src, **{name: float(value)})})
            else:
                raise ConfigError(f"cannot override {key!r}")
        if sys_vals:
            cfg = replace(cfg, **sys_vals)
        if opacity is not None:
            cfg = replace(cfg, a=float(opacity) / cfg.chi0)
        return cfg

    def system(self) -> SlabSystem:
        return SlabSystem(self.k1, self.k1 if self.k2 is None else self.k2, self.chi0, self.a)

    def scenario(self) -> EmissionScenario:
        s1 = self.source1.profile(1) if self.source1 is not None else None
        s2 = self.source2.profile(2, edge=self.a) if self.source2 is not None else None
        return EmissionScenario(self.variant, s1, s2)

    def grid(self) -> list[dict]:
        """Sweep points in lexicographic order (last axis fastest)."""
        if not self.axes:
            return [{}]
        values = [ax.points() for ax in self.axes]
        names = [ax.param for ax in self.axes]
        out = []
        for combo in np.stack(np.meshgrid(*values, indexing="ij"), axis=-1).reshape(-1, len(values)):
            out.append(dict(zip(names, (float(v) for v in combo))))
        return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_float(text, key, line):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite", line)
    return value


def _parse_list(text, key, line):
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(_parse_float(t, key, line) for t in items)


def parse_config(text: str) -> ScenarioConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError("empty key or value", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first set on line {raw[key][1]})", lineno)
        raw[key] = (value, lineno)

    used = set()

    def take(key, required=False, default=None):
        if key not in raw:
            if required:
                raise ConfigError(f"missing required key {key!r}")
            return default, None
        used.add(key)
        return raw[key]

    system = {}
    for name in SYSTEM_KEYS:
        value, line = take(f"system.{name}", required=name != "k2")
        system[name] = None if value is None else _parse_float(value, f"system.{name}", line)

    value, line = take("scenario.variant", required=True)
    try:
        variant = Variant.parse(value)
    except ValueError as exc:
        raise ConfigError(str(exc), line) from None

    sources = {}
    for idx in (1, 2):
        prefix = f"source{idx}."
        keys = [k for k in raw if k.startswith(prefix)]
        if not keys:
            sources[idx] = None
            continue
        fam_text, line = take(prefix + "family", required=True)
        try:
            family = Family(fam_text.strip().lower())
        except ValueError:
            raise ConfigError(f"{prefix}family: unknown family {fam_text!r}", line) from None
        kwargs = {}
        for name in SOURCE_NUMERIC:
            value, line = take(prefix + name)
            if value is not None:
                kwargs[name] = _parse_float(value, prefix + name, line)
        for name in ("knots", "values"):
            value, line = take(prefix + name)
            if value is not None:
                kwargs[name] = _parse_list(value, prefix + name, line)
        sources[idx] = SourceConfig(family, **kwargs)

    axes = []
    for n in range(1, MAX_AXES + 2):
        prefix = f"sweep.axis{n}."
        if not any(k.startswith(prefix) for k in raw):
            continue
        if n > MAX_AXES:
            first = min(raw[k][1] for k in raw if k.startswith(prefix))
            raise ConfigError(f"at most {MAX_AXES} sweep axes are supported", first)
        param, pline = take(prefix + "param", required=True)
        start, sline = take(prefix + "start", required=True)
        stop, tline = take(prefix + "stop", default=start)
        count, cline = take(prefix + "count", default="1")
        spacing, spline = take(prefix + "spacing", default="linear")
        start = _parse_float(start, prefix + "start", sline)
        stop = _parse_float(stop, prefix + "stop", tline or sline)
        try:
            count = int(count)
        except ValueError:
            raise ConfigError(f"{prefix}count: expected an integer, got {count!r}", cline) from None
        if count < 1:
            raise ConfigError(f"{prefix}count must be >= 1", cline)
        if count > 1 and not start < stop:
            raise ConfigError(f"{prefix}: start must be < stop when count > 1", sline)
        if spacing not in ("linear", "log"):
            raise ConfigError(f"{prefix}spacing must be 'linear' or 'log'", spline)
        if spacing == "log" and start <= 0:
            raise ConfigError(f"{prefix}: log spacing needs start > 0", sline)
        axes.append((SweepAxis(param, start, stop, count, spacing), pline))
    output, _ = take("output.path")
    window_text, wline = take("measure.window")
    window = 0.0 if window_text is None else _parse_float(window_text, "measure.window", wline)
    if window < 0:
        raise ConfigError("measure.window must be >= 0", wline)

    unknown = [k for k in raw if k not in used]
    if unknown:
        key = min(unknown, key=lambda k: raw[k][1])
        raise ConfigError(f"unknown key {key!r}", raw[key][1])

    cfg = ScenarioConfig(
        k1=system["k1"], k2=system["k2"], chi0=system["chi0"], a=system["a"],
        variant=variant, source1=sources[1], source2=sources[2],
        axes=tuple(ax for ax, _ in axes), output_path=output, window=window,
    )
    allowed = cfg.sweepable()
    seen = set()
    for ax, line in axes:
        if ax.param not in allowed:
            raise ConfigError(f"sweep parameter {ax.param!r} does not exist in this config", line)
        if ax.param in seen:
            raise ConfigError(f"sweep parameter {ax.param!r} used twice", line)
        seen.add(ax.param)
    return validate_config(cfg)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Build the base system and scenario once so bad values fail early."""
    try:
        cfg.system()
        cfg.scenario()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    lines = [
        f"system.k1 = {_fmt(cfg.k1)}",
    ]
    if cfg.k2 is not None:
        lines.append(f"system.k2 = {_fmt(cfg.k2)}")
    lines += [
        f"system.chi0 = {_fmt(cfg.chi0)}",
        f"system.a = {_fmt(cfg.a)}",
        f"scenario.variant = {cfg.variant.value}",
    ]
    for idx, src in ((1, cfg.source1), (2, cfg.source2)):
        if src is None:
            continue
        p = f"source{idx}."
        lines.append(f"{p}family = {src.family.value}")
        for name in SOURCE_NUMERIC:
            lines.append(f"{p}{name} = {_fmt(getattr(src, name))}")
        if src.knots:
            lines.append(f"{p}knots = " + ", ".join(_fmt(v) for v in src.knots))
            lines.append(f"{p}values = " + ", ".join(_fmt(v) for v in src.values))
    for n, ax in enumerate(cfg.axes, start=1):
        p = f"sweep.axis{n}."
        lines += [f"{p}param = {ax.param}", f"{p}start = {_fmt(ax.start)}",
                  f"{p}stop = {_fmt(ax.stop)}", f"{p}count = {ax.count}",
                  f"{p}spacing = {ax.spacing}"]
    if cfg.output_path is not None:
        lines.append(f"output.path = {cfg.output_path}")
    if cfg.window:
        lines.append(f"measure.window = {_fmt(cfg.window)}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
