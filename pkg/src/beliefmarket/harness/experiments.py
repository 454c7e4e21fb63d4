"""Theorem-flavored experiments over engine runs.

Every experiment runs a scenario, extracts day-indexed price series, and
scores them against a configured tolerance over a late window. The limits
the experiments probe are asymptotic, so all finite-horizon targets here are
engine-derived defaults, reported as such; a verdict is always a pure
function of the stored series, the window, and the tolerance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..deduction import PriceFactRule
from ..errors import ConfigError
from ..inductor import MarketTrace
from ..logic import And, Not, Or, Sentence, render
from .scenario import Scenario
from .variables import Variable, expectation

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class ExperimentReport:
    """Day-indexed series plus a reproducible verdict.

    ``passed`` is None for control runs (nothing is asserted); otherwise it
    is recomputable offline from the stored series, window, and tolerance.
    """

    name: str
    series: dict[str, tuple[Fraction, ...]]
    target: str
    tolerance: Optional[Fraction]
    window: Optional[tuple[int, int]]
    passed: Optional[bool]
    control: bool = False
    runtime_seconds: float = 0.0
    details: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "tolerance": str(self.tolerance) if self.tolerance is not None else None,
            "window": list(self.window) if self.window else None,
            "passed": self.passed,
            "control": self.control,
            "runtime_seconds": round(self.runtime_seconds, 3),
            "details": dict(self.details),
            "series": {
                label: [str(v) for v in values] for label, values in self.series.items()
            },
        }

    def verdict_line(self) -> str:
        if self.control:
            status = "CONTROL"
        elif self.passed is None:
            status = "N/A"
        else:
            status = "PASS" if self.passed else "FAIL"
        return f"experiment {self.name}: {status} ({self.target})"


def _late_window(horizon: int, fraction_start: Fraction = Fraction(3, 4)) -> tuple[int, int]:
    start = max(1, int(horizon * fraction_start))
    return start, horizon


def _diag_series(trace: MarketTrace, family, horizon: int) -> tuple[Fraction, ...]:
    return tuple(trace.price(day, family(day)) for day in range(1, horizon + 1))


def _probe_series(trace: MarketTrace, sentence: Sentence, horizon: int) -> tuple[Fraction, ...]:
    return tuple(trace.price(day, sentence) for day in range(1, horizon + 1))


def _member_names(scenario: Scenario) -> set[str]:
    return {member.trader.name for member in scenario.config.pool.members}


def convergence_report(
    trace: MarketTrace,
    probes: Sequence[Sentence],
    window: tuple[int, int],
    tolerance: Fraction = Fraction(5, 100),
) -> ExperimentReport:
    """Max deviation of each probe from its final value over the window."""
    start, end = window
    if not (1 <= start <= end <= trace.horizon):
        raise ConfigError(f"window {window} outside trace horizon {trace.horizon}")
    series: dict[str, tuple[Fraction, ...]] = {}
    worst = ZERO
    for probe in probes:
        values = _probe_series(trace, probe, trace.horizon)
        series[render(probe)] = values
        final = values[end - 1]
        for day in range(start, end + 1):
            worst = max(worst, abs(values[day - 1] - final))
    return ExperimentReport(
        name="convergence",
        series=series,
        target=f"max deviation from the day-{end} price over days {start}..{end} "
        f"<= {tolerance}",
        tolerance=tolerance,
        window=window,
        passed=worst <= tolerance,
        details={"max_deviation": str(worst)},
    )


def coherence_probe(
    pricing,
    pairs: Sequence[Sentence] = (),
    triples: Sequence[tuple[Sentence, Sentence]] = (),
    implications: Sequence[tuple[Sentence, Sentence]] = (),
) -> list[Fraction]:
    """Coherence residuals of one pricing.

    For each pair base s: |p(s) + p(~s) - 1|. For each (s, t) triple entry:
    |p(s) + p(t) - p(s | t) - p(s & t)|. For each implication (s, t) with
    s entailing t: max(0, p(s) - p(t)).
    """
    residuals: list[Fraction] = []
    for sentence in pairs:
        total = pricing.get(sentence, ZERO) + pricing.get(Not(sentence), ZERO)
        residuals.append(abs(total - 1))
    for left, right in triples:
        value = (
            pricing.get(left, ZERO)
            + pricing.get(right, ZERO)
            - pricing.get(Or(left, right), ZERO)
            - pricing.get(And(left, right), ZERO)
        )
        residuals.append(abs(value))
    for narrow, wide in implications:
        residuals.append(max(ZERO, pricing.get(narrow, ZERO) - pricing.get(wide, ZERO)))
    return residuals


def coherence_report(
    trace: MarketTrace,
    pairs: Sequence[Sentence],
    day: Optional[int] = None,
    tolerance: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Complement-pair residuals of the day's pricing (default: final day)."""
    at = day if day is not None else trace.horizon
    pricing = trace.pricings[at - 1]
    residuals = coherence_probe(pricing, pairs=pairs)
    series = {
        f"residual {render(s)}": (r,) for s, r in zip(pairs, residuals)
    }
    worst = max(residuals) if residuals else ZERO
    return ExperimentReport(
        name="coherence",
        series=series,
        target=f"|p(s) + p(~s) - 1| <= {tolerance} at day {at} for every tracked pair",
        tolerance=tolerance,
        window=(at, at),
        passed=worst <= tolerance,
        details={"max_residual": str(worst)},
    )


def experiment_provability(
    scenario: Scenario,
    window: Optional[tuple[int, int]] = None,
    high_target: Fraction = Fraction(9, 10),
    low_target: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Day-n prices of the day-n streamed theorem and disprovable sentence.

    The theorem series should sit above ``high_target`` over the window and
    the disprovable series below ``low_target``, well before the deduction
    delay confirms either. Without a theorem buyer in the pool the run is a
    control: no trader exerts the relevant pressure.
    """
    if scenario.theorem_family is None:
        raise ConfigError("provability experiment needs a stream scenario")
    started = time.perf_counter()
    trace = scenario.run()
    horizon = trace.horizon
    window = window or _late_window(horizon)
    series = {"theorem_diag": _diag_series(trace, scenario.theorem_family, horizon)}
    if scenario.disproof_family is not None:
        series["disproof_diag"] = _diag_series(trace, scenario.disproof_family, horizon)
    control = "theorem_buyer" not in _member_names(scenario)
    passed: Optional[bool] = None
    if not control:
        start, end = window
        ok = all(series["theorem_diag"][d - 1] >= high_target for d in range(start, end + 1))
        if "disproof_diag" in series:
            ok = ok and all(
                series["disproof_diag"][d - 1] <= low_target for d in range(start, end + 1)
            )
        passed = ok
    return ExperimentReport(
        name="provability",
        series=series,
        target=f"theorem diag >= {high_target} and disproof diag <= {low_target} "
        f"on days {window[0]}..{window[1]}",
        tolerance=min(1 - high_target, low_target),
        window=window,
        passed=passed,
        control=control,
        runtime_seconds=time.perf_counter() - started,
    )


def experiment_halting(
    scenario: Scenario,
    window: Optional[tuple[int, int]] = None,
    high_target: Fraction = Fraction(9, 10),
    low_target: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Prices of interpreter-confirmed halting facts versus step-bounded
    non-halting facts, plus the one machine the bounded interpreter cannot
    decide, whose price must stay strictly inside (0, 1)."""
    if scenario.theorem_family is None or scenario.disproof_family is None:
        raise ConfigError("halting experiment needs the halting stream scenario")
    started = time.perf_counter()
    trace = scenario.run()
    horizon = trace.horizon
    window = window or _late_window(horizon)
    series = {
        "halting_diag": _diag_series(trace, scenario.theorem_family, horizon),
        "bounded_diag": _diag_series(trace, scenario.disproof_family, horizon),
    }
    undecided_price: Optional[Fraction] = None
    if scenario.probes:
        undecided = scenario.probes[0]
        series["undecided"] = _probe_series(trace, undecided, horizon)
        undecided_price = series["undecided"][-1]
    start, end = window
    ok = all(series["halting_diag"][d - 1] >= high_target for d in range(start, end + 1))
    ok = ok and all(
        series["bounded_diag"][d - 1] <= low_target for d in range(start, end + 1)
    )
    details = {}
    if undecided_price is not None:
        ok = ok and (ZERO < undecided_price < ONE)
        details["undecided_final_price"] = str(undecided_price)
    return ExperimentReport(
        name="halting",
        series=series,
        target=f"halting diag >= {high_target}, bounded diag <= {low_target} on days "
        f"{window[0]}..{window[1]}; undecided price strictly inside (0, 1) at the end",
        tolerance=min(1 - high_target, low_target),
        window=window,
        passed=ok,
        runtime_seconds=time.perf_counter() - started,
        details=details,
    )


def experiment_paradox(
    scenario: Scenario,
    p: Fraction,
    window: Optional[tuple[int, int]] = None,
    tolerance: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Price of the day-n diagonal sentence with threshold p.

    A reflection arbitrageur profits from any price away from p, so the
    series should hug p. Without one in the pool the run is a control.
    """
    rule = next(
        (r for r in scenario.diagonal_rules if r.threshold == p),
        None,
    )
    if rule is None:
        raise ConfigError(f"scenario has no diagonal rule with threshold {p}")
    started = time.perf_counter()
    trace = scenario.run()
    horizon = trace.horizon
    window = window or _late_window(horizon, Fraction(1, 2))
    series = {"diagonal": _diag_series(trace, rule.sentence, horizon)}
    control = "reflection" not in _member_names(scenario)
    passed: Optional[bool] = None
    worst = max(abs(v - p) for v in series["diagonal"][window[0] - 1 : window[1]])
    if not control:
        passed = worst <= tolerance
    return ExperimentReport(
        name="paradox",
        series=series,
        target=f"|price - {p}| <= {tolerance} on days {window[0]}..{window[1]}",
        tolerance=tolerance,
        window=window,
        passed=passed,
        control=control,
        runtime_seconds=time.perf_counter() - started,
        details={"max_gap": str(worst)},
    )


def experiment_self_knowledge(
    scenario: Scenario,
    window: Optional[tuple[int, int]] = None,
    margin: Fraction = Fraction(1, 16),
    high_target: Fraction = Fraction(9, 10),
    low_target: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Prices of the band atoms recording whether the watched sentence's own
    price fell inside the configured band.

    Days where the watched price sits inside the band by at least ``margin``
    should price the band atom near 1; days at least ``margin`` outside, near
    0. Days within the margin of a band edge are excluded, and the empirical
    per-day error is reported rather than any asserted rate.
    """
    rule = next(
        (
            r
            for r in scenario.reflective_rules
            if isinstance(r, PriceFactRule) and r.observe is None
        ),
        None,
    )
    if rule is None:
        raise ConfigError("scenario has no same-day price-fact rule")
    started = time.perf_counter()
    trace = scenario.run()
    horizon = trace.horizon
    window = window or _late_window(horizon, Fraction(1, 2))
    watched = tuple(
        trace.price(day, rule.target(day)) for day in range(1, horizon + 1)
    )
    reflective = tuple(
        trace.price(day, rule.sentence(day)) for day in range(1, horizon + 1)
    )
    series = {"watched": watched, "reflective": reflective}
    scored = 0
    ok = True
    worst_high, worst_low = ONE, ZERO
    for day in range(window[0], window[1] + 1):
        price = watched[day - 1]
        mirror = reflective[day - 1]
        if rule.low + margin < price < rule.high - margin:
            scored += 1
            worst_high = min(worst_high, mirror)
            ok = ok and mirror >= high_target
        elif price <= rule.low - margin or price >= rule.high + margin:
            scored += 1
            worst_low = max(worst_low, mirror)
            ok = ok and mirror <= low_target
    details = {
        "scored_days": str(scored),
        "lowest_inside_price": str(worst_high),
        "highest_outside_price": str(worst_low),
    }
    return ExperimentReport(
        name="self-knowledge",
        series=series,
        target=f"band atoms >= {high_target} when the watched price is inside the band "
        f"by {margin}, <= {low_target} when outside by {margin}, days "
        f"{window[0]}..{window[1]}",
        tolerance=min(1 - high_target, low_target),
        window=window,
        passed=ok if scored else None,
        runtime_seconds=time.perf_counter() - started,
        details=details,
    )


def experiment_net_update(
    scenario: Scenario,
    window: Optional[tuple[int, int]] = None,
    slack: Fraction = Fraction(1, 10),
) -> ExperimentReport:
    """Gap between today's price of the streamed sentence and the market
    expectation of its binned future price.

    The bin variable takes each bin's midpoint, so even a perfectly
    concentrated expectation carries half a bin width of quantization; the
    target is bin width plus the configured slack.
    """
    if not scenario.bin_groups:
        raise ConfigError("net-update experiment needs a bins reflective rule")
    group = scenario.bin_groups[0]
    if scenario.theorem_family is None:
        raise ConfigError("net-update experiment needs a stream scenario")
    started = time.perf_counter()
    trace = scenario.run()
    horizon = trace.horizon
    window = window or _late_window(horizon)
    width = Fraction(1, group.bins)
    tolerance = width + slack
    diag = _diag_series(trace, scenario.theorem_family, horizon)
    expectations = []
    gaps = []
    for day in range(1, horizon + 1):
        variable = Variable.of(
            (rule.sentence(day), Fraction(2 * j + 1, 2 * group.bins))
            for j, rule in enumerate(group.rules)
        )
        value = expectation(trace.pricings[day - 1], variable)
        expectations.append(value)
        gaps.append(abs(diag[day - 1] - value))
    series = {
        "watched_diag": diag,
        "binned_expectation": tuple(expectations),
        "gap": tuple(gaps),
    }
    worst = max(gaps[window[0] - 1 : window[1]])
    return ExperimentReport(
        name="net-update",
        series=series,
        target=f"|price - binned expectation| <= {tolerance} (bin width {width} "
        f"plus slack {slack}) on days {window[0]}..{window[1]}",
        tolerance=tolerance,
        window=window,
        passed=worst <= tolerance,
        runtime_seconds=time.perf_counter() - started,
        details={"max_gap": str(worst)},
    )
