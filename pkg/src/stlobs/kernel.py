"""Synchronous observer cells with constant-size state.

Each cell advances by exactly one tick per `step` call and stores a fixed
number of scalars (booleans plus bounded counters), independent of how wide
the time window it observes is. `state_scalars()` exposes the stored scalars
so callers can verify that the footprint never grows.
"""

from __future__ import annotations


class DelayCell:
    """Unit delay: emits `init` on the first step, then the previous input."""

    __slots__ = ("_prev",)

    def __init__(self, init: bool):
        self._prev = init

    def step(self, value: bool) -> bool:
        out = self._prev
        self._prev = value
        return out

    def state_scalars(self) -> tuple:
        return (self._prev,)


class SaturatingClock:
    """Tick counter that sticks at `bound`: emits min(tick, bound)."""

    __slots__ = ("bound", "_clk")

    def __init__(self, bound: int):
        if bound < 1:
            raise ValueError(f"clock bound must be >= 1, got {bound}")
        self.bound = bound
        self._clk = -1

    def step(self) -> int:
        if self._clk < self.bound:
            self._clk += 1
        return self._clk

    def state_scalars(self) -> tuple:
        return (self._clk,)


class IntervalGate:
    """True exactly while the tick lies in [lower, upper].

    The clock saturates at `upper`, so ticks past the window would still read
    `upper`; the end of the window is detected by the clock's previous value
    already being at the bound.
    """

    __slots__ = ("lower", "upper", "_clock", "_was_at_bound")

    def __init__(self, lower: int, upper: int):
        if not 0 <= lower < upper:
            raise ValueError(f"gate window [{lower},{upper}] must satisfy 0 <= lower < upper")
        self.lower = lower
        self.upper = upper
        self._clock = SaturatingClock(upper)
        self._was_at_bound = DelayCell(False)

    def step(self) -> bool:
        clk = self._clock.step()
        past_end = self._was_at_bound.step(clk == self.upper)
        return self.lower <= clk <= self.upper and not past_end

    def state_scalars(self) -> tuple:
        return self._clock.state_scalars() + self._was_at_bound.state_scalars()


class LatchingExists:
    """Latches true once `prop` holds at a tick where `gate` holds."""

    __slots__ = ("_seen",)

    def __init__(self):
        self._seen = False

    def step(self, gate: bool, prop: bool) -> bool:
        if gate and prop:
            self._seen = True
        return self._seen

    def state_scalars(self) -> tuple:
        return (self._seen,)


class LatchingForall:
    """True while `prop` has held at every gated tick so far.

    Vacuously true as long as the gate has never opened.
    """

    __slots__ = ("_ok",)

    def __init__(self):
        self._ok = True

    def step(self, gate: bool, prop: bool) -> bool:
        if gate and not prop:
            self._ok = False
        return self._ok

    def state_scalars(self) -> tuple:
        return (self._ok,)


class PointSample:
    """False before tick `at`, then latches the value `prop` had at tick `at`.

    The internal clock saturates one past `at`, so "currently at tick `at`"
    remains distinguishable from "already past it" with bounded state.
    """

    __slots__ = ("at", "_clock", "_value")

    def __init__(self, at: int):
        if at < 0:
            raise ValueError(f"sample tick must be >= 0, got {at}")
        self.at = at
        self._clock = SaturatingClock(at + 1)
        self._value = False

    def step(self, prop: bool) -> bool:
        if self._clock.step() == self.at:
            self._value = prop
        return self._value

    def state_scalars(self) -> tuple:
        return self._clock.state_scalars() + (self._value,)
