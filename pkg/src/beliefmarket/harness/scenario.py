"""Scenario configuration: a sectioned plain-text format and its builder.

A scenario wires together a deductive process, reflective rules, a trader
pool, the engine configuration, and the probe sentences the experiments
track. The text format is line oriented and diff friendly::

    [deduction]
    stream = theorems          # theorems | halting | none
    theorem_prefix = thm
    disproof_prefix = dis
    delay = 4n                 # day the k-th stream sentence is confirmed
    # script = facts.txt       # optional scripted additions (unioned in)

    [reflective]
    diagonal = chi_half 1/2            # prefix, threshold, optional lag=1
    price_fact = 1/5 4/5 on "u"        # band on a sentence (or: on stream)
    bins = fut 8 defer n+10 on stream  # bin atoms for a deferred observation

    [market]
    horizon = 200
    resolution = 1/1024
    initial_price = 1/2
    max_iterations = 600
    # epsilon_floor = 1/4096   # default: resolution / 4

    [probes]
    track = u                  # tracked by experiments and the oscillation member
    pair = u                   # complement pair (u, ~u)

    [strategy nudge]           # inline strategy body, referenced from the pool
    "u" : clamp((3/4 - price(u, 0)) * 8, 0, 1)

    [pool]                     # one member per line, in activation order
    member = theorem_buyer weight=1/2 budget=8
    member = oscillation weight=1/4 budget=4 window=10
    member = complement weight=1/8 budget=4
    member = reflection weight=1/16 budget=4
    member = strategy:nudge weight=1/32 budget=2
    # member = file:traders/extra.txt weight=1/64 budget=1

Built-in pool members bind to the rest of the scenario: the theorem buyer
trades the deduction streams' day sentences, oscillation trades the tracked
probes, complement trades the declared pairs, and reflection trades the
reflective rules' atoms.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from ..deduction import (
    CompositeProcess,
    DeductiveProcess,
    DiagonalRule,
    PriceFactRule,
    ReflectiveRule,
    ScriptedProcess,
    SentenceStream,
    StreamProcess,
    bin_rules,
    countdown_program,
    forever_program,
    load_script,
    run_bounded,
)
from ..errors import ConfigError
from ..inductor import (
    InductorConfig,
    MarketTrace,
    PoolMember,
    TraderPool,
    complement_arbitrageur,
    default_epsilon,
    oscillation_arbitrageur,
    reflection_arbitrageur,
    run_inductor,
    theorem_buyer,
)
from ..logic import Atom, Sentence, parse_sentence
from ..trading import load_strategy, parse_strategy
from .variables import affine_day_map


@dataclass(frozen=True)
class BinGroup:
    """A family of bin rules discretizing a deferred price observation."""

    prefix: str
    bins: int
    defer: Callable[[int], int]
    target: Callable[[int], Sentence]
    rules: tuple[PriceFactRule, ...]


@dataclass
class Scenario:
    name: str
    deduction: DeductiveProcess
    reflective_rules: tuple[ReflectiveRule, ...]
    config: InductorConfig
    horizon: int
    probes: tuple[Sentence, ...] = ()
    pairs: tuple[Sentence, ...] = ()
    theorem_family: Optional[Callable[[int], Sentence]] = None
    disproof_family: Optional[Callable[[int], Sentence]] = None
    delay: Optional[Callable[[int], int]] = None
    bin_groups: tuple[BinGroup, ...] = ()

    @property
    def diagonal_rules(self) -> tuple[DiagonalRule, ...]:
        return tuple(r for r in self.reflective_rules if isinstance(r, DiagonalRule))

    def run(self, horizon: Optional[int] = None) -> MarketTrace:
        return run_inductor(
            self.config,
            self.deduction,
            self.reflective_rules,
            horizon if horizon is not None else self.horizon,
        )


def _fraction(text: str, context: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{context}: bad rational {text!r}") from exc


def _split_sections(text: str) -> tuple[dict[str, list[tuple[int, str]]], dict[str, list[str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    strategies: dict[str, list[str]] = {}
    current: Optional[list] = None
    current_is_strategy = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        # Strategy bodies keep their raw lines; everything else is key=value.
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            header = stripped[1:-1].strip()
            if header.startswith("strategy"):
                parts = header.split()
                if len(parts) != 2:
                    raise ConfigError(f"line {lineno}: use [strategy <name>]")
                strategies[parts[1]] = []
                current = strategies[parts[1]]
                current_is_strategy = True
            else:
                sections.setdefault(header, [])
                current = sections[header]
                current_is_strategy = False
            continue
        if current is None:
            raise ConfigError(f"line {lineno}: content before any [section]")
        if current_is_strategy:
            current.append(stripped)
        else:
            current.append((lineno, stripped))
    return sections, strategies


def _key_values(rows: list[tuple[int, str]]) -> list[tuple[int, str, str]]:
    out = []
    for lineno, row in rows:
        if "=" not in row:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = row.partition("=")
        out.append((lineno, key.strip(), value.strip()))
    return out


def _member_params(tokens: list[str], lineno: int) -> dict[str, str]:
    params: dict[str, str] = {}
    for token in tokens:
        if "=" not in token:
            raise ConfigError(f"line {lineno}: member option {token!r} is not key=value")
        key, _, value = token.partition("=")
        params[key] = value
    return params


def _memoized_halting(program, input_of: Callable[[int], int], budget: Callable[[int], int]):
    @functools.lru_cache(maxsize=None)
    def confirmed(index: int) -> bool:
        return run_bounded(program, input_of(index), budget(index))

    return confirmed


def parse_scenario(
    text: str,
    name: str = "scenario",
    base_dir: Union[str, Path, None] = None,
) -> Scenario:
    sections, strategies = _split_sections(text)
    base = Path(base_dir) if base_dir is not None else Path(".")

    # --- deduction ---------------------------------------------------------
    dd: dict[str, str] = {}
    for lineno, key, value in _key_values(sections.get("deduction", [])):
        if key in dd:
            raise ConfigError(f"line {lineno}: duplicate deduction key {key!r}")
        dd[key] = value
    stream_kind = dd.get("stream", "none")
    delay_map = affine_day_map(dd.get("delay", "4n"))
    theorem_family: Optional[Callable[[int], Sentence]] = None
    disproof_family: Optional[Callable[[int], Sentence]] = None
    parts: list[DeductiveProcess] = []
    if stream_kind == "theorems":
        thm_prefix = dd.get("theorem_prefix", "thm")
        dis_prefix = dd.get("disproof_prefix", "dis")
        theorem_family = lambda k, p=thm_prefix: Atom(f"{p}_{k}")
        disproof_family = lambda k, p=dis_prefix: Atom(f"{p}_{k}")
        parts.append(
            StreamProcess(
                (
                    SentenceStream(theorem_family, delay_map),
                    SentenceStream(disproof_family, delay_map, negate=True),
                )
            )
        )
    elif stream_kind == "halting":
        slow_index = int(dd.get("slow_index", "7"))
        slow_input = int(dd.get("slow_input", str(10**7)))
        halt_prefix = dd.get("halt_prefix", "halt")
        step_prefix = dd.get("step_prefix", "stepb")
        theorem_family = lambda k, p=halt_prefix: Atom(f"{p}_{k}")
        disproof_family = lambda k, p=step_prefix: Atom(f"{p}_{k}")

        def halt_input(index: int) -> int:
            return slow_input if index == slow_index else index

        halts = _memoized_halting(
            countdown_program(), halt_input, lambda k: 4 * k + 8
        )
        loops = _memoized_halting(
            forever_program(), lambda k: k, lambda k: 2 * k + 5
        )
        parts.append(
            StreamProcess(
                (
                    SentenceStream(theorem_family, delay_map, include=halts),
                    SentenceStream(
                        disproof_family,
                        delay_map,
                        negate=True,
                        include=lambda k: not loops(k),
                    ),
                )
            )
        )
    elif stream_kind != "none":
        raise ConfigError(f"unknown stream kind {stream_kind!r}")
    if "script" in dd:
        parts.append(load_script(base / dd["script"]))
    if not parts:
        deduction: DeductiveProcess = ScriptedProcess({})
    elif len(parts) == 1:
        deduction = parts[0]
    else:
        deduction = CompositeProcess(parts)

    # --- market ------------------------------------------------------------
    mk: dict[str, str] = {}
    for lineno, key, value in _key_values(sections.get("market", [])):
        mk[key] = value
    if "horizon" not in mk:
        raise ConfigError("[market] must set horizon")
    horizon = int(mk["horizon"])
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    resolution = _fraction(mk.get("resolution", "1/1024"), "[market] resolution")
    initial_price = _fraction(mk.get("initial_price", "1/2"), "[market] initial_price")
    max_iterations = int(mk.get("max_iterations", "600"))
    if "epsilon_floor" in mk:
        floor = _fraction(mk["epsilon_floor"], "[market] epsilon_floor")
        epsilon = lambda day, f=floor: max(Fraction(1, 2**day), f)
    else:
        epsilon = default_epsilon(resolution)

    # --- reflective --------------------------------------------------------
    rules: list[ReflectiveRule] = []
    bin_groups: list[BinGroup] = []

    def family_of(spec: str, lineno: int) -> Callable[[int], Sentence]:
        spec = spec.strip()
        if spec == "stream":
            if theorem_family is None:
                raise ConfigError(f"line {lineno}: no stream configured for 'on stream'")
            return theorem_family
        if spec.startswith('"') and spec.endswith('"'):
            sentence = parse_sentence(spec[1:-1])
            return lambda _day, s=sentence: s
        raise ConfigError(f"line {lineno}: expected 'stream' or a quoted sentence")

    for lineno, key, value in _key_values(sections.get("reflective", [])):
        tokens = value.split()
        lag = 1
        if tokens and tokens[-1].startswith("lag="):
            lag = int(tokens[-1][4:])
            tokens = tokens[:-1]
        if key == "diagonal":
            if len(tokens) != 2:
                raise ConfigError(f"line {lineno}: diagonal = <prefix> <threshold>")
            rules.append(
                DiagonalRule(tokens[0], _fraction(tokens[1], "diagonal threshold"), lag)
            )
        elif key == "price_fact":
            if len(tokens) < 4 or tokens[2] != "on":
                raise ConfigError(f"line {lineno}: price_fact = <lo> <hi> on <target>")
            target = family_of(" ".join(tokens[3:]), lineno)
            rules.append(
                PriceFactRule(
                    target=target,
                    low=_fraction(tokens[0], "price_fact low"),
                    high=_fraction(tokens[1], "price_fact high"),
                    lag=lag,
                )
            )
        elif key == "bins":
            if len(tokens) < 6 or tokens[2] != "defer" or tokens[4] != "on":
                raise ConfigError(
                    f"line {lineno}: bins = <prefix> <count> defer <daymap> on <target>"
                )
            prefix, count = tokens[0], int(tokens[1])
            defer = affine_day_map(tokens[3])
            target = family_of(" ".join(tokens[5:]), lineno)
            group_rules = bin_rules(prefix, count, target, defer, lag)
            rules.extend(group_rules)
            bin_groups.append(BinGroup(prefix, count, defer, target, group_rules))
        else:
            raise ConfigError(f"line {lineno}: unknown reflective rule kind {key!r}")

    # --- probes ------------------------------------------------------------
    probes: list[Sentence] = []
    pairs: list[Sentence] = []
    for lineno, key, value in _key_values(sections.get("probes", [])):
        if key == "track":
            probes.append(parse_sentence(value))
        elif key == "pair":
            pairs.append(parse_sentence(value))
        else:
            raise ConfigError(f"line {lineno}: unknown probes key {key!r}")

    # --- pool --------------------------------------------------------------
    members: list[PoolMember] = []
    for lineno, key, value in _key_values(sections.get("pool", [])):
        if key != "member":
            raise ConfigError(f"line {lineno}: unknown pool key {key!r}")
        tokens = value.split()
        if not tokens:
            raise ConfigError(f"line {lineno}: empty member line")
        kind = tokens[0]
        params = _member_params(tokens[1:], lineno)
        weight = _fraction(params.pop("weight", "1"), "member weight")
        budget = _fraction(params.pop("budget", "1"), "member budget")

        def frac(key: str, default: str) -> Fraction:
            return _fraction(params.pop(key, default), f"member option {key}")

        if kind == "theorem_buyer":
            if theorem_family is None:
                raise ConfigError(f"line {lineno}: theorem_buyer needs a stream")
            trader = theorem_buyer(
                theorem_family,
                disproof_family,
                buy_below=frac("buy_below", "15/16"),
                sell_above=frac("sell_above", "1/16"),
                slope=frac("slope", "64"),
                cap=frac("cap", "1/16"),
            )
        elif kind == "oscillation":
            trader = oscillation_arbitrageur(
                probes,
                window=int(params.pop("window", "10")),
                slope=frac("slope", "64"),
                cap=frac("cap", "1/8"),
            )
        elif kind == "complement":
            trader = complement_arbitrageur(
                pairs,
                slope=frac("slope", "64"),
                cap=frac("cap", "1/8"),
            )
        elif kind == "reflection":
            trader = reflection_arbitrageur(
                rules,
                slope=frac("slope", "64"),
                cap=frac("cap", "1/8"),
                indicator_slope=frac("indicator_slope", "16"),
                stabilizer_cap=frac("stabilizer_cap", "1/16"),
            )
        elif kind.startswith("file:"):
            trader = load_strategy(base / kind[5:])
        elif kind.startswith("strategy:"):
            strategy_name = kind[9:]
            if strategy_name not in strategies:
                raise ConfigError(
                    f"line {lineno}: no [strategy {strategy_name}] section"
                )
            body = "\n".join([f"trader {strategy_name}"] + strategies[strategy_name])
            trader = parse_strategy(body, source=f"[strategy {strategy_name}]")
        else:
            raise ConfigError(f"line {lineno}: unknown member kind {kind!r}")
        if params:
            raise ConfigError(
                f"line {lineno}: unknown member option(s) {sorted(params)} for {kind}"
            )
        members.append(PoolMember(trader, weight, budget))

    config = InductorConfig(
        pool=TraderPool.of(members),
        epsilon=epsilon,
        resolution=resolution,
        max_iterations=max_iterations,
        initial_price=initial_price,
    )
    config.validate()
    return Scenario(
        name=name,
        deduction=deduction,
        reflective_rules=tuple(rules),
        config=config,
        horizon=horizon,
        probes=tuple(probes),
        pairs=tuple(pairs),
        theorem_family=theorem_family,
        disproof_family=disproof_family,
        delay=delay_map,
        bin_groups=tuple(bin_groups),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), name=path.stem, base_dir=path.parent)
