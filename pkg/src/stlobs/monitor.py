"""Online monitor: compiled observer network over a formula.

Each temporal operator becomes one true-cell and one false-cell built from
the kernel cells; the boolean structure above temporal operators is evaluated
per tick with the Kleene connectives. Both flags latch, the unknown verdict
is always the absence of both flags, and per-operator state does not grow
with the window width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import InvalidFormulaError, MissingSignalError
from .formula import (
    And,
    Atom,
    Eventually,
    Always,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    Until,
    horizon,
    signals_of,
    validate,
)
from .kernel import IntervalGate, LatchingExists, LatchingForall, PointSample, SaturatingClock
from .trace import Trace
from .trilean import (
    FlagPair,
    Trilean,
    and3,
    from_flags,
    implies3,
    not3,
    or3,
    to_flags,
    verdict_from_bools,
)

Predicate = Callable[[Mapping[str, float]], bool]


@dataclass(frozen=True)
class VerdictRecord:
    """Monitor output for one tick."""

    tick: int
    flags: FlagPair
    verdict: Trilean

    def __post_init__(self) -> None:
        if self.verdict is not from_flags(self.flags):
            raise ValueError("verdict does not match its flags")


# Operator cells. Every cell owns its own clocks and gates, mirroring the
# structure of the emitted observer nodes; the two polarities of an operator
# never share state.


class EventuallyTrueCell:
    """Latches once the operand holds somewhere in the window seen so far."""

    KIND, POLARITY = "eventually", "positive"
    __slots__ = ("lower", "upper", "_gate", "_witness")

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._witness = LatchingExists()

    def step(self, phi: bool) -> bool:
        return self._witness.step(self._gate.step(), phi)

    def state_scalars(self) -> tuple:
        return self._gate.state_scalars() + self._witness.state_scalars()


class EventuallyFalseCell:
    """Latches once the window has closed with the operand never true."""

    KIND, POLARITY = "eventually", "negative"
    __slots__ = ("lower", "upper", "_gate", "_clock", "_witness", "_latched")

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._clock = SaturatingClock(upper)
        self._witness = LatchingExists()
        self._latched = False

    def step(self, phi: bool) -> bool:
        gate = self._gate.step()
        clk = self._clock.step()
        seen = self._witness.step(gate, phi)
        if clk == self.upper and not seen:
            self._latched = True
        return self._latched

    def state_scalars(self) -> tuple:
        return (
            self._gate.state_scalars()
            + self._clock.state_scalars()
            + self._witness.state_scalars()
            + (self._latched,)
        )


class AlwaysTrueCell:
    """Latches once the window has closed with the operand always true."""

    KIND, POLARITY = "always", "positive"
    __slots__ = ("lower", "upper", "_gate", "_clock", "_held", "_latched")

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._clock = SaturatingClock(upper)
        self._held = LatchingForall()
        self._latched = False

    def step(self, phi: bool) -> bool:
        gate = self._gate.step()
        clk = self._clock.step()
        held = self._held.step(gate, phi)
        if clk == self.upper and held:
            self._latched = True
        return self._latched

    def state_scalars(self) -> tuple:
        return (
            self._gate.state_scalars()
            + self._clock.state_scalars()
            + self._held.state_scalars()
            + (self._latched,)
        )


class AlwaysFalseCell:
    """Latches once the operand fails somewhere in the window seen so far."""

    KIND, POLARITY = "always", "negative"
    __slots__ = ("lower", "upper", "_gate", "_violation")

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._violation = LatchingExists()

    def step(self, phi: bool) -> bool:
        return self._violation.step(self._gate.step(), not phi)

    def state_scalars(self) -> tuple:
        return self._gate.state_scalars() + self._violation.state_scalars()


class UntilTrueCell:
    """Latches once some gated tick satisfies the right operand with the left
    operand having held at every tick up to and including it."""

    KIND, POLARITY = "until", "positive"
    __slots__ = ("lower", "upper", "_gate", "_prefix_gate", "_prefix", "_witness")

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._prefix_gate = IntervalGate(0, upper)
        self._prefix = LatchingForall()
        self._witness = LatchingExists()

    def step(self, phi1: bool, phi2: bool) -> bool:
        gate = self._gate.step()
        prefix_ok = self._prefix.step(self._prefix_gate.step(), phi1)
        return self._witness.step(gate, phi2 and prefix_ok)

    def state_scalars(self) -> tuple:
        return (
            self._gate.state_scalars()
            + self._prefix_gate.state_scalars()
            + self._prefix.state_scalars()
            + self._witness.state_scalars()
        )


class UntilFalseCell:
    """Latches when the property can no longer be satisfied.

    Three ways to conclude that: the left operand fails at or before the
    window opens; it fails inside the window with no satisfying tick seen yet
    (no later tick can be satisfying either, since the left operand must hold
    all the way up to it); or the window closes without a satisfying tick.
    """

    KIND, POLARITY = "until", "negative"
    __slots__ = (
        "lower",
        "upper",
        "_gate",
        "_prefix_gate",
        "_clock",
        "_prefix",
        "_witness",
        "_failed_inside",
        "_latched",
    )

    def __init__(self, lower: int, upper: int):
        self.lower, self.upper = lower, upper
        self._gate = IntervalGate(lower, upper)
        self._prefix_gate = IntervalGate(0, upper)
        self._clock = SaturatingClock(upper)
        self._prefix = LatchingForall()
        self._witness = LatchingExists()
        self._failed_inside = LatchingExists()
        self._latched = False

    def step(self, phi1: bool, phi2: bool) -> bool:
        gate = self._gate.step()
        clk = self._clock.step()
        prefix_ok = self._prefix.step(self._prefix_gate.step(), phi1)
        witnessed = self._witness.step(gate, phi2 and prefix_ok)
        failed_inside = self._failed_inside.step(gate, not phi1)
        if (
            (clk <= self.lower and not phi1)
            or (clk > self.lower and failed_inside and not witnessed)
            or (clk == self.upper and not witnessed)
        ):
            self._latched = True
        return self._latched

    def state_scalars(self) -> tuple:
        return (
            self._gate.state_scalars()
            + self._prefix_gate.state_scalars()
            + self._clock.state_scalars()
            + self._prefix.state_scalars()
            + self._witness.state_scalars()
            + self._failed_inside.state_scalars()
            + (self._latched,)
        )


TEMPORAL_CELLS = {
    ("eventually", "positive"): EventuallyTrueCell,
    ("eventually", "negative"): EventuallyFalseCell,
    ("always", "positive"): AlwaysTrueCell,
    ("always", "negative"): AlwaysFalseCell,
    ("until", "positive"): UntilTrueCell,
    ("until", "negative"): UntilFalseCell,
}


def make_cell(kind: str, polarity: str, lower: int, upper: int):
    """Instantiate a single operator cell by kind and polarity."""
    return TEMPORAL_CELLS[(kind, polarity)](lower, upper)


def compile_predicate(f: Formula) -> Predicate:
    """Compile a propositional formula to a sample -> bool closure."""
    if isinstance(f, Atom):
        pred = f.predicate
        return pred.evaluate
    if isinstance(f, Not):
        child = compile_predicate(f.child)
        return lambda s: not child(s)
    if isinstance(f, And):
        left, right = compile_predicate(f.left), compile_predicate(f.right)
        return lambda s: left(s) and right(s)
    if isinstance(f, Or):
        left, right = compile_predicate(f.left), compile_predicate(f.right)
        return lambda s: left(s) or right(s)
    if isinstance(f, Implies):
        left, right = compile_predicate(f.left), compile_predicate(f.right)
        return lambda s: (not left(s)) or right(s)
    raise TypeError(f"operand is not propositional: {f!r}")


# Verdict network nodes.


class _AtomNode:
    """Anchored atom: the verdict is fixed by the sample at tick 0."""

    __slots__ = ("_pred", "_pos", "_neg")

    def __init__(self, pred: Predicate):
        self._pred = pred
        self._pos = PointSample(0)
        self._neg = PointSample(0)

    def step(self, sample: Mapping[str, float]) -> Trilean:
        value = self._pred(sample)
        return verdict_from_bools(self._pos.step(value), self._neg.step(not value))

    def state_scalars(self) -> tuple:
        return self._pos.state_scalars() + self._neg.state_scalars()


class _NotNode:
    __slots__ = ("_child",)

    def __init__(self, child):
        self._child = child

    def step(self, sample: Mapping[str, float]) -> Trilean:
        return not3(self._child.step(sample))

    def state_scalars(self) -> tuple:
        return self._child.state_scalars()


class _BinNode:
    __slots__ = ("_op", "_left", "_right")

    def __init__(self, op, left, right):
        self._op = op
        self._left = left
        self._right = right

    def step(self, sample: Mapping[str, float]) -> Trilean:
        return self._op(self._left.step(sample), self._right.step(sample))

    def state_scalars(self) -> tuple:
        return self._left.state_scalars() + self._right.state_scalars()


class _TemporalNode:
    __slots__ = ("_true_cell", "_false_cell", "_operands")

    def __init__(self, true_cell, false_cell, operands: tuple[Predicate, ...]):
        self._true_cell = true_cell
        self._false_cell = false_cell
        self._operands = operands

    def step(self, sample: Mapping[str, float]) -> Trilean:
        values = [op(sample) for op in self._operands]
        pos = self._true_cell.step(*values)
        neg = self._false_cell.step(*values)
        return verdict_from_bools(pos, neg)

    def state_scalars(self) -> tuple:
        return self._true_cell.state_scalars() + self._false_cell.state_scalars()


_BIN_OPS = {And: and3, Or: or3, Implies: implies3}


class Monitor:
    """Stepwise evaluator for one formula, anchored at tick 0."""

    def __init__(self, formula: Formula, root, cells: tuple):
        self.formula = formula
        self.signals = signals_of(formula)
        self.horizon = horizon(formula)
        self._root = root
        self._cells = cells
        self._tick = 0

    @property
    def tick(self) -> int:
        """Index of the next sample to be consumed."""
        return self._tick

    @property
    def temporal_cells(self) -> tuple:
        """All operator cells, both polarities, in formula order."""
        return self._cells

    def step(self, sample: Mapping[str, float]) -> VerdictRecord:
        missing = [name for name in self.signals if name not in sample]
        if missing:
            raise MissingSignalError(missing, f"at tick {self._tick}")
        verdict = self._root.step(sample)
        record = VerdictRecord(self._tick, to_flags(verdict), verdict)
        self._tick += 1
        return record

    def run(self, trace: Trace, early_stop: bool = False) -> list[VerdictRecord]:
        """Feed every sample of `trace` in order.

        With `early_stop` the run halts right after the first decisive
        verdict; by default the full trace is consumed.
        """
        records: list[VerdictRecord] = []
        for k in range(len(trace)):
            record = self.step(trace.sample(k))
            records.append(record)
            if early_stop and record.verdict is not Trilean.UNKNOWN:
                break
        return records

    def state_scalar_count(self) -> int:
        """Number of scalars stored across all cells; constant over time and
        independent of window widths."""
        return len(self._root.state_scalars())


def compile_formula(f: Formula) -> Monitor:
    """Validate `f` and build its observer network."""
    violations = validate(f)
    if violations:
        raise InvalidFormulaError(violations)
    cells: list = []
    root = _build(f, cells)
    return Monitor(f, root, tuple(cells))


def _build(f: Formula, cells: list):
    if isinstance(f, Atom):
        return _AtomNode(compile_predicate(f))
    if isinstance(f, Not):
        return _NotNode(_build(f.child, cells))
    if isinstance(f, (And, Or, Implies)):
        return _BinNode(_BIN_OPS[type(f)], _build(f.left, cells), _build(f.right, cells))
    window: Interval = f.window
    if isinstance(f, Eventually):
        true_cell = EventuallyTrueCell(window.lower, window.upper)
        false_cell = EventuallyFalseCell(window.lower, window.upper)
        operands = (compile_predicate(f.child),)
    elif isinstance(f, Always):
        true_cell = AlwaysTrueCell(window.lower, window.upper)
        false_cell = AlwaysFalseCell(window.lower, window.upper)
        operands = (compile_predicate(f.child),)
    elif isinstance(f, Until):
        true_cell = UntilTrueCell(window.lower, window.upper)
        false_cell = UntilFalseCell(window.lower, window.upper)
        operands = (compile_predicate(f.left), compile_predicate(f.right))
    else:
        raise TypeError(f"not a formula node: {f!r}")
    cells.extend((true_cell, false_cell))
    return _TemporalNode(true_cell, false_cell, operands)
