"""Self-checking machinery: differential sweeps, induction checks, and a
randomized property suite.

Every check compares the streaming monitor against the quantifier oracle (or
against explicitly unrolled forms) and reports divergences as replayable
(formula, trace, tick) failures.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .errors import EnumerationCapError, FlagConflictError
from .formula import (
    And,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    Always,
    Eventually,
    Until,
    TEMPORAL_NODES,
    horizon,
    render,
    signal_atom,
    signals_of,
)
from .kernel import PointSample
from .monitor import Monitor, compile_formula, make_cell
from .oracle import OPERATOR_KINDS, POLARITIES, offline_eval, three_valued_eval
from .trace import Trace
from .trilean import FALSE, TRUE, UNKNOWN

CompileFn = Callable[[Formula], Monitor]

DEFAULT_ENUMERATION_CAP = 2**20


@dataclass(frozen=True)
class Failure:
    """One divergence, carrying everything needed to replay it."""

    check: str
    formula: str
    trace: tuple[tuple[float, ...], ...]
    tick: int
    monitor_verdict: str
    oracle_verdict: str

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "formula": self.formula,
            "trace": [list(row) for row in self.trace],
            "tick": self.tick,
            "monitor_verdict": self.monitor_verdict,
            "oracle_verdict": self.oracle_verdict,
        }


@dataclass
class ConformanceReport:
    cases: int
    failures: list[Failure] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "cases": self.cases,
            "failures": [f.to_dict() for f in self.failures],
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self, max_failures: int = 5) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"{status}: {self.cases} cases, {len(self.failures)} failures, "
            f"{self.wall_time_s:.2f}s"
        ]
        for failure in self.failures[:max_failures]:
            lines.append(
                f"  [{failure.check}] {failure.formula} @ tick {failure.tick}: "
                f"monitor={failure.monitor_verdict} oracle={failure.oracle_verdict} "
                f"trace={list(map(list, failure.trace))}"
            )
        if len(self.failures) > max_failures:
            lines.append(f"  ... and {len(self.failures) - max_failures} more")
        return "\n".join(lines)


def enumerate_traces(
    num_atoms: int, length: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[tuple[tuple[bool, ...], ...]]:
    """All boolean assignments for `num_atoms` atoms over `length` ticks.

    Deterministic order. Refuses (before yielding anything) when the count
    (2**num_atoms)**length would exceed `cap`.
    """
    total = (2**num_atoms) ** length
    if total > cap:
        raise EnumerationCapError(
            f"{total} traces for {num_atoms} atoms x {length} ticks exceeds cap {cap}"
        )
    ticks = list(itertools.product((False, True), repeat=num_atoms))
    return itertools.product(ticks, repeat=length)


_SIGNALS = ("p", "q")


def operator_formula(kind: str, lower: int, upper: int) -> Formula:
    """The canonical single-operator formula used by the sweeps."""
    window = Interval(lower, upper)
    if kind == "eventually":
        return Eventually(window, signal_atom("p", ">"))
    if kind == "always":
        return Always(window, signal_atom("p", ">"))
    if kind == "until":
        return Until(window, signal_atom("p", ">"), signal_atom("q", ">"))
    raise ValueError(f"unknown operator kind {kind!r}")


def bool_trace(rows: Sequence[Sequence[bool]], num_atoms: int) -> Trace:
    """Encode boolean operand rows as a real trace over p (and q)."""
    return Trace(
        _SIGNALS[:num_atoms],
        tuple(tuple(1.0 if v else 0.0 for v in row) for row in rows),
    )


def first_divergence(
    f: Formula, trace: Trace, compile_fn: CompileFn = compile_formula
) -> tuple[int, str, str] | None:
    """First tick where the monitor and the three-valued oracle disagree.

    Returns (tick, monitor verdict, oracle verdict), or None. Deterministic:
    replaying the same formula and trace reproduces the same answer.
    """
    monitor = compile_fn(f)
    for k in range(len(trace)):
        try:
            record = monitor.step(trace.sample(k))
            got = record.verdict
        except FlagConflictError:
            return (k, "conflict", str(three_valued_eval(f, trace, k)))
        want = three_valued_eval(f, trace, k)
        if got is not want:
            return (k, str(got), str(want))
    return None


def differential_sweep(
    kinds: Sequence[str] = OPERATOR_KINDS,
    max_upper: int = 4,
    compile_fn: CompileFn = compile_formula,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ConformanceReport:
    """Exhaustive monitor-vs-oracle comparison on boolean operand traces.

    For every operator kind, every window 0 <= lower < upper <= max_upper and
    every boolean operand trace of length upper + 3, the monitor verdict must
    match the three-valued oracle at every tick; at the horizon tick the
    decided verdict must additionally match the two-valued offline semantics.
    """
    start = time.perf_counter()
    failures: list[Failure] = []
    cases = 0
    for kind in kinds:
        num_atoms = 2 if kind == "until" else 1
        for lower in range(0, max_upper):
            for upper in range(lower + 1, max_upper + 1):
                f = operator_formula(kind, lower, upper)
                rendered = render(f)
                length = upper + 3
                for rows in enumerate_traces(num_atoms, length, cap=cap):
                    trace = bool_trace(rows, num_atoms)
                    cases += 1
                    monitor = compile_fn(f)
                    for k in range(length):
                        try:
                            got = monitor.step(trace.sample(k)).verdict
                        except FlagConflictError:
                            got = None
                        want = three_valued_eval(f, trace, k)
                        if got is not want:
                            failures.append(
                                Failure(
                                    "verdict-mismatch",
                                    rendered,
                                    trace.samples,
                                    k,
                                    "conflict" if got is None else str(got),
                                    str(want),
                                )
                            )
                            break
                        if k == upper:
                            decided = offline_eval(f, trace, 0)
                            if (got is TRUE) != decided:
                                failures.append(
                                    Failure(
                                        "horizon-offline",
                                        rendered,
                                        trace.samples,
                                        k,
                                        str(got),
                                        "T" if decided else "F",
                                    )
                                )
                                break
    return ConformanceReport(cases, failures, time.perf_counter() - start)


# Induction checks: the streaming cells must agree with explicitly unrolled
# forms built from point samples, both for the smallest window and when the
# window is extended by one tick.


class _PointBank:
    """Point samples of one operand at each tick in [0, last]."""

    def __init__(self, last: int):
        self._cells = [PointSample(i) for i in range(last + 1)]

    def step(self, value: bool) -> list[bool]:
        return [cell.step(value) for cell in self._cells]


def _base_network(kind: str, polarity: str, lower: int):
    """Two-term unrolled form for the window [lower, lower + 1]."""
    if kind in ("eventually", "always"):
        at_lo = PointSample(lower)
        at_hi = PointSample(lower + 1)
        positive_op = any if kind == "eventually" else all

        def step(phi: bool) -> bool:
            if polarity == "negative":
                phi = not phi
            values = (at_lo.step(phi), at_hi.step(phi))
            return positive_op(values) if polarity == "positive" else (
                any(values) if kind == "always" else all(values)
            )

        return step

    left_bank = _PointBank(lower + 1)
    right_lo = PointSample(lower)
    right_hi = PointSample(lower + 1)
    failed_bank = _PointBank(lower)

    def step_until(phi1: bool, phi2: bool) -> bool:
        lefts = left_bank.step(phi1)
        early_fails = failed_bank.step(not phi1)
        term_lo = right_lo.step(phi2) and all(lefts[: lower + 1])
        term_hi = right_hi.step(phi2) and all(lefts)
        witness = term_lo or term_hi
        if polarity == "positive":
            return witness
        return any(early_fails) or not witness

    return step_until


def _step_combination(kind: str, polarity: str, lower: int, upper: int):
    """Monitor cell over [lower, upper] combined with a point sample at
    upper + 1 to reproduce the cell over [lower, upper + 1]."""
    cell = make_cell(kind, polarity, lower, upper)
    if kind in ("eventually", "always"):
        extra = PointSample(upper + 1)
        widens = (kind, polarity) in (("eventually", "positive"), ("always", "negative"))

        def step(phi: bool) -> bool:
            # Step both parts unconditionally; short-circuiting would let the
            # point sample's clock fall behind the global tick.
            sampled = extra.step(phi if polarity == "positive" else not phi)
            base = cell.step(phi)
            return (base or sampled) if widens else (base and sampled)

        return step

    left_bank = _PointBank(upper + 1)
    right_extra = PointSample(upper + 1)
    failed_bank = _PointBank(lower)

    def step_until(phi1: bool, phi2: bool) -> bool:
        base = cell.step(phi1, phi2)
        lefts = left_bank.step(phi1)
        early_fails = failed_bank.step(not phi1)
        new_term = right_extra.step(phi2) and all(lefts)
        if polarity == "positive":
            return base or new_term
        return base and (any(early_fails) or not new_term)

    return step_until


def check_induction_base(kind: str, lower: int, polarity: str) -> bool:
    """The cell over [lower, lower+1] equals the two-term unrolled form at
    every tick from lower + 1 on, over all boolean operand traces."""
    num_atoms = 2 if kind == "until" else 1
    length = lower + 3
    for rows in enumerate_traces(num_atoms, length):
        cell = make_cell(kind, polarity, lower, lower + 1)
        network = _base_network(kind, polarity, lower)
        for k, row in enumerate(rows):
            got = cell.step(*row)
            want = network(*row)
            if k >= lower + 1 and got != want:
                return False
    return True


def check_induction_step(kind: str, lower: int, upper: int, polarity: str) -> bool:
    """The cell over [lower, upper+1] equals the cell over [lower, upper]
    combined with a point sample at upper + 1, from tick upper + 1 on.

    For Until the combination is derived rather than read off, so it is also
    cross-checked against the three-valued oracle at the horizon tick.
    """
    num_atoms = 2 if kind == "until" else 1
    length = upper + 3
    wide_formula = operator_formula(kind, lower, upper + 1)
    for rows in enumerate_traces(num_atoms, length):
        wide_cell = make_cell(kind, polarity, lower, upper + 1)
        combination = _step_combination(kind, polarity, lower, upper)
        trace = bool_trace(rows, num_atoms) if kind == "until" else None
        for k, row in enumerate(rows):
            got = wide_cell.step(*row)
            want = combination(*row)
            if k >= upper + 1 and got != want:
                return False
            if kind == "until" and k == upper + 1:
                verdict = three_valued_eval(wide_formula, trace, k)
                expected = verdict is TRUE if polarity == "positive" else verdict is FALSE
                if got != expected:
                    return False
    return True


def induction_suite(
    kinds: Sequence[str] = OPERATOR_KINDS, max_lower: int = 4, max_upper: int = 4
) -> ConformanceReport:
    """Base cases for lower in [0, max_lower] and step cases for all
    0 <= lower < upper <= max_upper, over all kinds and polarities."""
    start = time.perf_counter()
    failures: list[Failure] = []
    cases = 0
    for kind in kinds:
        for polarity in POLARITIES:
            for lower in range(0, max_lower + 1):
                cases += 1
                if not check_induction_base(kind, lower, polarity):
                    failures.append(
                        Failure(
                            "induction-base",
                            f"{kind}/{polarity} window [{lower},{lower + 1}]",
                            (),
                            lower + 1,
                            "cell",
                            "unrolled form",
                        )
                    )
            for lower in range(0, max_upper):
                for upper in range(lower + 1, max_upper + 1):
                    cases += 1
                    if not check_induction_step(kind, lower, upper, polarity):
                        failures.append(
                            Failure(
                                "induction-step",
                                f"{kind}/{polarity} window [{lower},{upper}] -> "
                                f"[{lower},{upper + 1}]",
                                (),
                                upper + 1,
                                "cell",
                                "combination",
                            )
                        )
    return ConformanceReport(cases, failures, time.perf_counter() - start)


# Randomized property suite.

_PROP_SIGNALS = ("x", "y")


def random_formula(rng: random.Random, max_upper: int = 20) -> Formula:
    """A random well-formed formula: one temporal leaf, or a shallow boolean
    combination of temporal and propositional leaves."""

    def leaf() -> Formula:
        roll = rng.random()
        if roll < 0.15:
            return _random_prop(rng, depth=2)
        kind = rng.choice(OPERATOR_KINDS)
        lower = rng.randrange(0, max_upper)
        upper = rng.randrange(lower + 1, max_upper + 1)
        window = Interval(lower, upper)
        if kind == "eventually":
            return Eventually(window, _random_prop(rng, depth=2))
        if kind == "always":
            return Always(window, _random_prop(rng, depth=2))
        return Until(window, _random_prop(rng, depth=1), _random_prop(rng, depth=1))

    roll = rng.random()
    if roll < 0.5:
        return leaf()
    if roll < 0.65:
        return Not(leaf())
    combiner = rng.choice((And, Or, Implies))
    return combiner(leaf(), leaf())


def _random_prop(rng: random.Random, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.6:
        name = rng.choice(_PROP_SIGNALS)
        comparator = rng.choice((">", ">=", "<", "<="))
        threshold = Fraction(rng.randrange(-20, 21), 10)
        return signal_atom(name, comparator, threshold)
    roll = rng.random()
    if roll < 0.4:
        return Not(_random_prop(rng, depth - 1))
    combiner = And if roll < 0.7 else Or
    return combiner(_random_prop(rng, depth - 1), _random_prop(rng, depth - 1))


def _random_trace(rng: random.Random, signals: Sequence[str], length: int) -> Trace:
    return Trace(
        tuple(signals),
        tuple(
            tuple(rng.uniform(-2.5, 2.5) for _ in signals) for _ in range(length)
        ),
    )


def _with_window_width(f: Formula, width: int) -> Formula:
    """Rebuild `f` with every temporal window ending at `width`."""
    if isinstance(f, TEMPORAL_NODES):
        window = Interval(min(f.window.lower, width - 1), width)
        if isinstance(f, Eventually):
            return Eventually(window, f.child)
        if isinstance(f, Always):
            return Always(window, f.child)
        return Until(window, f.left, f.right)
    if isinstance(f, Not):
        return Not(_with_window_width(f.child, width))
    if isinstance(f, (And, Or, Implies)):
        rebuilt = type(f)(
            _with_window_width(f.left, width), _with_window_width(f.right, width)
        )
        return rebuilt
    return f


def property_suite(
    seed: int, cases: int, compile_fn: CompileFn = compile_formula
) -> ConformanceReport:
    """Randomized invariant checks on real-valued traces.

    Per case: verdict flags never conflict and decode to the verdict; flags
    only ever latch (immutability); the verdict is decided at the horizon and
    beyond; the verdict stream has shape U*(T+ | F+); and the state scalar
    count is identical when every window is widened to 2, 50, and 1000.
    """
    start = time.perf_counter()
    rng = random.Random(seed)
    failures: list[Failure] = []
    for _ in range(cases):
        f = random_formula(rng)
        rendered = render(f)
        signals = signals_of(f)
        length = rng.randrange(0, 51)
        trace = _random_trace(rng, signals, length)
        failure = _check_invariants(f, rendered, trace, compile_fn)
        if failure is not None:
            failures.append(failure)
    return ConformanceReport(cases, failures, time.perf_counter() - start)


def _check_invariants(
    f: Formula, rendered: str, trace: Trace, compile_fn: CompileFn
) -> Failure | None:
    def fail(check: str, tick: int, got: str, want: str) -> Failure:
        return Failure(check, rendered, trace.samples, tick, got, want)

    monitor = compile_fn(f)
    bound = horizon(f)
    prev_pos = prev_neg = False
    decided = None
    for k in range(len(trace)):
        try:
            record = monitor.step(trace.sample(k))
        except FlagConflictError:
            return fail("flag-conflict", k, "conflict", "at most one flag")
        flags, verdict = record.flags, record.verdict
        if verdict not in (TRUE, FALSE, UNKNOWN):
            return fail("completeness", k, repr(verdict), "T, F, or U")
        if (flags.positive and prev_neg) or (flags.negative and prev_pos):
            return fail("immutability", k, str(verdict), "previous decided verdict")
        if prev_pos and not flags.positive or prev_neg and not flags.negative:
            return fail("immutability", k, str(verdict), "flags must stay latched")
        if k >= bound and verdict is UNKNOWN:
            return fail("determination", k, "U", f"decided by tick {bound}")
        if decided is not None and verdict is not decided:
            return fail("verdict-shape", k, str(verdict), str(decided))
        if decided is None and verdict is not UNKNOWN:
            decided = verdict
        prev_pos, prev_neg = flags.positive, flags.negative
    counts = {
        width: compile_fn(_with_window_width(f, width)).state_scalar_count()
        for width in (2, 50, 1000)
    }
    if len(set(counts.values())) != 1:
        return fail(
            "state-size",
            -1,
            str(counts),
            "identical scalar count for widths 2, 50, 1000",
        )
    return None
