"""Preset scenarios used by the experiments, the CLI, and the test suite.

Every preset is a scenario-format text template, so the presets exercise the
same parser as user-supplied files. Thresholds and targets are dyadic where a
price must land on them exactly: the price grid is dyadic, and demands with
dyadic zero sets let the search settle with a zero residual trade.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ConfigError
from .scenario import Scenario, parse_scenario

STANDARD_TEXT = """\
# Standard scenario: a theorem stream proved with delay 4n, a disprovable
# stream, one undecided atom (u), and two diagonal (liar-style) families.
[deduction]
stream = theorems
theorem_prefix = thm
disproof_prefix = dis
delay = 4n

[reflective]
diagonal = chi_half 1/2
diagonal = chi_quarter 1/4

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = u
track = ~u
track = thm_1
track = ~thm_1
track = thm_2
track = dis_1
track = ~dis_1
track = thm_3
track = dis_2
track = chi_half_50
pair = u
pair = thm_1
pair = dis_1

[strategy nudge]
# Buys the undecided atom toward 3/4 for the first 20 days, then goes quiet.
"u" : clamp((3/4 - price(u, 0)) * 8, 0, 1) * min(1, max(0, 21 - n))

[pool]
member = theorem_buyer weight=1/2 budget=8
member = oscillation weight=1/4 budget=4 window=10
member = complement weight=1/8 budget=4
member = reflection weight=1/16 budget=4
member = strategy:nudge weight=1/32 budget=2
"""

PARADOX_TEXT = """\
# Paradox scenario: one diagonal family at threshold {p}, a reflection
# arbitrageur to trade it, and an oscillation member on the probe.
[deduction]
stream = none

[reflective]
diagonal = chi {p}

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = chi_1

[pool]
member = reflection weight=1/2 budget=4
member = oscillation weight=1/4 budget=4 window=10
"""

PARADOX_CONTROL_TEXT = """\
# Paradox control: the diagonal family exists but no reflection arbitrageur
# trades it, so nothing pushes the price toward the threshold.
[deduction]
stream = none

[reflective]
diagonal = chi {p}

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = chi_1

[pool]
member = oscillation weight=1/2 budget=4 window=10
"""

HALTING_TEXT = """\
# Halting scenario: a stream of machines confirmed halting by the bounded
# interpreter, a stream of step-bounded non-halting facts, and one machine
# too slow for the interpreter's per-day budget (index {slow_index}).
[deduction]
stream = halting
delay = 4n
slow_index = {slow_index}

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = halt_{slow_index}

[pool]
member = theorem_buyer weight=1/2 budget=8
member = oscillation weight=1/4 budget=4 window=10
"""

SELF_KNOWLEDGE_TEXT = """\
# Self-knowledge scenario: a nudger pins the watched atom at {target}, and a
# price-fact band ({low}, {high}) on it is traded by the reflection member.
[deduction]
stream = none

[reflective]
price_fact = {low} {high} on "w"

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = w

[strategy pin]
"w" : clamp(({target} - price(w, 0)) * 16, -1/4, 1/4)

[pool]
member = strategy:pin weight=1/2 budget=8
member = reflection weight=1/4 budget=4
member = oscillation weight=1/8 budget=4 window=10
"""

NET_UPDATE_TEXT = """\
# No-expected-net-update scenario: the day-n price of each streamed theorem
# is compared to the market expectation of its binned future price, observed
# after the deferral {defer}.
[deduction]
stream = theorems
theorem_prefix = thm
disproof_prefix = dis
delay = 4n

[reflective]
bins = fut {bins} defer {defer} on stream

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = thm_1

[pool]
member = theorem_buyer weight=1/2 budget=8
member = reflection weight=1/4 budget=8
"""

EMPTY_POOL_TEXT = """\
# Control: no traders at all; every supported sentence stays at 1/2.
[deduction]
stream = theorems
theorem_prefix = thm
disproof_prefix = dis
delay = 4n

[market]
horizon = {horizon}
resolution = 1/1024
initial_price = 1/2
max_iterations = 600

[probes]
track = thm_1

[pool]
"""


def standard(horizon: int = 200) -> Scenario:
    return parse_scenario(STANDARD_TEXT.format(horizon=horizon), name="standard")


def paradox(p: Fraction, horizon: int = 200, control: bool = False) -> Scenario:
    if not (0 < p < 1):
        raise ConfigError(f"paradox threshold must lie in (0, 1), got {p}")
    text = PARADOX_CONTROL_TEXT if control else PARADOX_TEXT
    return parse_scenario(
        text.format(p=p, horizon=horizon),
        name="paradox-control" if control else "paradox",
    )


def halting(horizon: int = 200, slow_index: int = 7) -> Scenario:
    return parse_scenario(
        HALTING_TEXT.format(horizon=horizon, slow_index=slow_index), name="halting"
    )


def self_knowledge(
    horizon: int = 120,
    target: Fraction = Fraction(3, 4),
    low: Fraction = Fraction(1, 4),
    high: Fraction = Fraction(7, 8),
) -> Scenario:
    return parse_scenario(
        SELF_KNOWLEDGE_TEXT.format(horizon=horizon, target=target, low=low, high=high),
        name="self-knowledge",
    )


def net_update(horizon: int = 200, bins: int = 8, defer: str = "n+10") -> Scenario:
    return parse_scenario(
        NET_UPDATE_TEXT.format(horizon=horizon, bins=bins, defer=defer),
        name="net-update",
    )


def empty_pool(horizon: int = 20) -> Scenario:
    return parse_scenario(EMPTY_POOL_TEXT.format(horizon=horizon), name="empty-pool")
