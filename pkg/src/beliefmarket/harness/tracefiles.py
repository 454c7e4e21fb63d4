"""On-disk formats: trace CSV, certificate CSV, and exploitation reports.

Trace CSV schema: ``day,sentence,price_num,price_den`` with the sentence in
canonical rendering, always quoted. Certificates: one row per day with the
epsilon, the certified max plausible value, and one budget scale per pool
member, all as num/den rationals. Rationals round-trip exactly; rewriting a
parsed file reproduces it byte for byte.
"""

from __future__ import annotations

import io
from fractions import Fraction
from pathlib import Path
from typing import Sequence, TextIO, Union

from ..errors import ConfigError
from ..inductor import DayCertificate, MarketTrace, Pricing
from ..logic import Sentence, parse_sentence, render, sort_key
from ..trading import ExploitationReport

TRACE_HEADER = "day,sentence,price_num,price_den"


def _rational(text: str, context: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{context}: bad rational {text!r}") from exc


def _ratio(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def write_trace_csv(pricings: Sequence[Pricing], stream: TextIO) -> None:
    stream.write(TRACE_HEADER + "\n")
    for day, pricing in enumerate(pricings, 1):
        for sentence in sorted(pricing, key=sort_key):
            price = pricing[sentence]
            stream.write(
                f'{day},"{render(sentence)}",{price.numerator},{price.denominator}\n'
            )


def save_trace_csv(pricings: Sequence[Pricing], path: Union[str, Path]) -> None:
    buffer = io.StringIO()
    write_trace_csv(pricings, buffer)
    Path(path).write_text(buffer.getvalue())


def read_trace_csv(source: Union[str, Path, TextIO]) -> list[Pricing]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise ConfigError(f"trace CSV must start with header {TRACE_HEADER!r}")
    pricings: list[Pricing] = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        try:
            day_text, rest = line.split(",", 1)
            if not rest.startswith('"'):
                raise ValueError("sentence must be quoted")
            closing = rest.index('"', 1)
            sentence_text = rest[1:closing]
            num_text, den_text = rest[closing + 2 :].split(",")
            day = int(day_text)
            sentence = parse_sentence(sentence_text)
            price = Fraction(int(num_text), int(den_text))
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"trace CSV line {lineno}: {exc}") from exc
        if not (0 <= price <= 1):
            raise ConfigError(f"trace CSV line {lineno}: price {price} outside [0, 1]")
        while len(pricings) < day:
            pricings.append({})
        pricings[day - 1][sentence] = price
    return pricings


def certificate_header(member_count: int) -> str:
    scales = ",".join(f"scale_{i + 1}" for i in range(member_count))
    head = "day,epsilon,max_value"
    return f"{head},{scales}" if scales else head


def write_certificates(certificates: Sequence[DayCertificate], stream: TextIO) -> None:
    members = len(certificates[0].scales) if certificates else 0
    stream.write(certificate_header(members) + "\n")
    for cert in certificates:
        row = [str(cert.day), _ratio(cert.epsilon), _ratio(cert.max_value)]
        row.extend(_ratio(scale) for scale in cert.scales)
        stream.write(",".join(row) + "\n")


def save_certificates(
    certificates: Sequence[DayCertificate], path: Union[str, Path]
) -> None:
    buffer = io.StringIO()
    write_certificates(certificates, buffer)
    Path(path).write_text(buffer.getvalue())


def read_certificates(
    source: Union[str, Path, TextIO],
) -> list[tuple[int, Fraction, Fraction, tuple[Fraction, ...]]]:
    """Rows of (day, epsilon, max_value, scales) from a certificate file."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = [line for line in text.splitlines() if line]
    if not lines or not lines[0].startswith("day,epsilon,max_value"):
        raise ConfigError("certificate file must start with day,epsilon,max_value")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        cells = line.split(",")
        if len(cells) < 3:
            raise ConfigError(f"certificate line {lineno}: too few columns")
        day = int(cells[0])
        epsilon = _rational(cells[1], f"certificate line {lineno}")
        value = _rational(cells[2], f"certificate line {lineno}")
        scales = tuple(
            _rational(cell, f"certificate line {lineno}") for cell in cells[3:]
        )
        rows.append((day, epsilon, value, scales))
    return rows


def write_exploitation_report(report: ExploitationReport, stream: TextIO) -> None:
    stream.write("day,min_value,max_value\n")
    for valuation in report.daily:
        stream.write(
            f"{valuation.day},{_ratio(valuation.low)},{_ratio(valuation.high)}\n"
        )
    stream.write(f"# trader: {report.trader_name}\n")
    stream.write(f"# horizon: {report.horizon}\n")
    stream.write(f"# running_min: {_ratio(report.overall_min)}\n")
    stream.write(f"# running_max: {_ratio(report.final_max)}\n")
    stream.write(f"# bounded_below: {report.bounded_below}\n")
    stream.write(f"# rising_max: {report.rising_max}\n")
    stream.write(f"# exploitation_trend: {report.exploitation_trend}\n")


def save_exploitation_report(
    report: ExploitationReport, path: Union[str, Path]
) -> None:
    buffer = io.StringIO()
    write_exploitation_report(report, buffer)
    Path(path).write_text(buffer.getvalue())


def trace_csv_text(trace: MarketTrace) -> str:
    buffer = io.StringIO()
    write_trace_csv(trace.pricings, buffer)
    return buffer.getvalue()


def certificates_text(trace: MarketTrace) -> str:
    buffer = io.StringIO()
    write_certificates(trace.certificates, buffer)
    return buffer.getvalue()
