"""Trace input and verdict output.

Traces are positional: tick k is row k, and the sampling period is implicit.
CSV files carry the signal names in the header row; JSONL files carry them as
object keys. Column names that look like timestamps are rejected so nobody
mistakes a value column for a time axis.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .errors import MissingSignalError, TraceFormatError
from .monitor import VerdictRecord
from .trace import Trace
from .trilean import FlagPair, from_flags

logger = logging.getLogger(__name__)

TIMESTAMP_NAMES = frozenset({"time", "timestamp", "tick"})
VERDICT_FORMATS = ("text", "csv", "jsonl")
TRACE_FORMATS = ("csv", "jsonl")


@contextmanager
def _opened(source: str | Path | IO[str]) -> Iterator[IO[str]]:
    if isinstance(source, (str, Path)):
        handle = open(source, encoding="utf-8", newline="")
        try:
            yield handle
        finally:
            handle.close()
    else:
        yield source


def _check_header(names: Sequence[str]) -> tuple[str, ...]:
    cleaned = tuple(name.strip() for name in names)
    if not cleaned or any(not name for name in cleaned):
        raise TraceFormatError("line 1: header has an empty column name")
    for column, name in enumerate(cleaned, start=1):
        if name.lower() in TIMESTAMP_NAMES:
            raise TraceFormatError(
                f"line 1, column {column}: {name!r} looks like a time axis; "
                "traces are positional (row k is tick k), so every column "
                "must be a signal"
            )
    if len(set(cleaned)) != len(cleaned):
        raise TraceFormatError("line 1: duplicate signal name in header")
    return cleaned


def _parse_value(text: str, lineno: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TraceFormatError(
            f"line {lineno}, column {column}: not a number: {text.strip()!r}"
        ) from None
    if not math.isfinite(value):
        raise TraceFormatError(
            f"line {lineno}, column {column}: non-finite value {text.strip()!r}"
        )
    return value


def stream_csv(
    stream: Iterable[str],
) -> tuple[tuple[str, ...], Iterator[dict[str, float]]]:
    """Read the CSV header eagerly, then yield one sample dict per row."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise TraceFormatError("empty trace: missing header row") from None
    signals = _check_header(header)

    def rows() -> Iterator[dict[str, float]]:
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                logger.warning("skipping blank line %d", lineno)
                continue
            if len(raw) != len(signals):
                raise TraceFormatError(
                    f"line {lineno}: expected {len(signals)} values, got {len(raw)}"
                )
            yield {
                name: _parse_value(text, lineno, column)
                for column, (name, text) in enumerate(zip(signals, raw), start=1)
            }

    return signals, rows()


def read_csv(source: str | Path | IO[str]) -> Trace:
    """Load a CSV trace. The header row names the signals; each following
    row is one tick, in order."""
    with _opened(source) as stream:
        signals, samples = stream_csv(stream)
        rows = tuple(tuple(sample[name] for name in signals) for sample in samples)
    return Trace(signals, rows)


def read_jsonl_stream(
    lines: Iterable[str], signals: Sequence[str] | None = None
) -> Iterator[dict[str, float]]:
    """Yield one sample per JSONL line, validating as it goes.

    When `signals` is None the declared set is taken from the first object's
    keys (sorted); later objects may carry extra keys but must include every
    declared signal. Blank lines are skipped with a warning so a trailing
    newline does not kill a live stream.
    """
    declared = tuple(signals) if signals is not None else None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            logger.warning("skipping blank line %d", lineno)
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise TraceFormatError(f"line {lineno}: expected a JSON object")
        if declared is None:
            declared = tuple(sorted(obj))
            if not declared:
                raise TraceFormatError(f"line {lineno}: object declares no signals")
        missing = [name for name in declared if name not in obj]
        if missing:
            raise MissingSignalError(missing, f"line {lineno}")
        sample: dict[str, float] = {}
        for name in declared:
            value = obj[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TraceFormatError(
                    f"line {lineno}: signal {name!r} is not a number"
                )
            value = float(value)
            if not math.isfinite(value):
                raise TraceFormatError(
                    f"line {lineno}: signal {name!r} is non-finite"
                )
            sample[name] = value
        yield sample


def read_jsonl(source: str | Path | IO[str], signals: Sequence[str] | None = None) -> Trace:
    with _opened(source) as stream:
        samples = list(read_jsonl_stream(stream, signals))
    if not samples:
        raise TraceFormatError("empty trace: no samples")
    names = tuple(sorted(samples[0])) if signals is None else tuple(signals)
    return Trace(names, tuple(tuple(s[n] for n in names) for s in samples))


def sniff_format(path: str | Path) -> str:
    """Guess csv or jsonl from the file extension, falling back to the first
    non-blank character."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    with open(path, encoding="utf-8") as stream:
        for line in stream:
            stripped = line.strip()
            if stripped:
                return "jsonl" if stripped[0] == "{" else "csv"
    return "csv"


def read_trace(
    path: str | Path,
    trace_format: str = "auto",
    signals: Sequence[str] | None = None,
) -> Trace:
    fmt = sniff_format(path) if trace_format == "auto" else trace_format
    if fmt == "csv":
        return read_csv(path)
    if fmt == "jsonl":
        return read_jsonl(path, signals)
    raise TraceFormatError(f"unknown trace format {fmt!r}")


def write_csv(trace: Trace, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(trace.signals)
    for row in trace.samples:
        writer.writerow([repr(value) for value in row])


class VerdictWriter:
    """Writes verdict records one at a time, flushing after each so a
    downstream consumer sees every verdict before the next sample is read."""

    def __init__(self, stream: IO[str], fmt: str = "text"):
        if fmt not in VERDICT_FORMATS:
            raise ValueError(f"unknown verdict format {fmt!r}")
        self._stream = stream
        self._fmt = fmt
        if fmt == "csv":
            self._stream.write("tick,verdict,pos,neg\n")
            self._stream.flush()

    def write(self, record: VerdictRecord) -> None:
        pos = int(record.flags.positive)
        neg = int(record.flags.negative)
        if self._fmt == "text":
            line = f"tick={record.tick} verdict={record.verdict} pos={pos} neg={neg}"
        elif self._fmt == "csv":
            line = f"{record.tick},{record.verdict},{pos},{neg}"
        else:
            line = json.dumps(
                {
                    "tick": record.tick,
                    "verdict": str(record.verdict),
                    "pos": record.flags.positive,
                    "neg": record.flags.negative,
                }
            )
        self._stream.write(line + "\n")
        self._stream.flush()


def write_verdicts(
    records: Iterable[VerdictRecord], stream: IO[str], fmt: str = "text"
) -> None:
    writer = VerdictWriter(stream, fmt)
    for record in records:
        writer.write(record)


_TEXT_LINE = re.compile(r"tick=(\d+) verdict=([TFU]) pos=([01]) neg=([01])$")


def read_verdicts(lines: Iterable[str], fmt: str = "text") -> list[VerdictRecord]:
    """Parse verdict output back into records (for round-trips and tools)."""
    if fmt not in VERDICT_FORMATS:
        raise ValueError(f"unknown verdict format {fmt!r}")
    records: list[VerdictRecord] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if fmt == "text":
            match = _TEXT_LINE.match(line)
            if not match:
                raise TraceFormatError(f"line {lineno}: malformed verdict line")
            tick, _, pos, neg = match.groups()
        elif fmt == "csv":
            if lineno == 1 and line == "tick,verdict,pos,neg":
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise TraceFormatError(f"line {lineno}: malformed verdict row")
            tick, _, pos, neg = parts
        else:
            obj = json.loads(line)
            tick, pos, neg = obj["tick"], obj["pos"], obj["neg"]
        flags = FlagPair(bool(int(pos)), bool(int(neg)))
        records.append(VerdictRecord(int(tick), flags, from_flags(flags)))
    return records
