"""Discrete-event simulation of single levels and whole promotion ladders.

The simulator is the empirical cross-check for the closed-form analysis:
exponential interarrival and service times, one server per level, FCFS
discipline, arrivals into a full level lost.  Promotions that find the next
level full are lost too (the employee leaves), and completing service at the
top level means leaving the organization.

Determinism contract: the generator is Python's ``random.Random``, i.e. the
Mersenne Twister MT19937 (624 x 32-bit words of state), whose integer-seeded
stream is identical on every platform and CPython version.  Exponential
variates are drawn by inverse CDF from that stream (see
:func:`exponential_sample`), and every draw happens at a fixed point in event
processing, so identical (model, config) pairs give bit-identical results and
event logs.  This algorithm choice is part of the package contract and must
not be changed silently: recorded simulation outputs depend on it.

A single run owns all of its state; distinct runs may execute concurrently.
Results are immutable values.
"""

from __future__ import annotations

import csv
import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ValidationError
from .pipeline import PipelineModel

_INF = math.inf


@dataclass(frozen=True)
class SimulationConfig:
    """Run parameters: seed and the measurement window, counted in arrivals.

    ``warmup_arrivals`` arrivals are simulated and discarded before
    measurement starts (defaults to 10% of ``measured_arrivals``, removing
    the empty-start transient); the next ``measured_arrivals`` arrivals are
    measured.  Identical configs produce bit-identical results.
    """

    seed: int
    measured_arrivals: int
    warmup_arrivals: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.measured_arrivals, int) or self.measured_arrivals < 1:
            raise ValidationError(
                f"measured_arrivals must be an integer >= 1, got {self.measured_arrivals!r}"
            )
        if self.warmup_arrivals is None:
            object.__setattr__(self, "warmup_arrivals", self.measured_arrivals // 10)
        elif not isinstance(self.warmup_arrivals, int) or self.warmup_arrivals < 0:
            raise ValidationError(
                f"warmup_arrivals must be an integer >= 0, got {self.warmup_arrivals!r}"
            )


@dataclass(frozen=True)
class SimulationResult:
    """Empirical statistics gathered over the measurement window of one level.

    ``empirical_distribution`` is the time-weighted fraction of window time
    spent with exactly ``i`` customers present.  ``empirical_W`` averages the
    sojourn times of window-admitted customers that also departed within the
    window (``None`` if none did); the ``residual_count`` others were still
    in the system when measurement ended, so for every level
    ``admitted_count == completed_count + residual_count`` exactly.
    ``arrival_seen_distribution`` is the state distribution seen by arriving
    customers, used for the arrivals-see-time-averages cross-check.
    """

    empirical_distribution: tuple[float, ...]
    empirical_L: float
    empirical_W: Optional[float]
    admitted_count: int
    blocked_count: int
    completed_count: int
    residual_count: int
    total_simulated_time: float
    arrival_seen_distribution: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class PromotionEvent:
    """One movement of an employee between adjacent levels.

    ``from_level`` 0 is an arrival from outside; ``to_level`` one past the
    top level is a departure from the organization.  ``blocked`` marks a
    movement that failed because the destination was full, in which case the
    employee left instead of joining.
    """

    employee_id: int
    from_level: int
    to_level: int
    timestamp: float
    blocked: bool = False

    def __post_init__(self):
        if self.to_level != self.from_level + 1:
            raise ValidationError(
                f"promotion must move exactly one level up, got {self.from_level} -> {self.to_level}"
            )
        if self.from_level < 0:
            raise ValidationError(f"from_level must be >= 0, got {self.from_level}")
        if not self.timestamp >= 0.0:
            raise ValidationError(f"timestamp must be >= 0, got {self.timestamp}")


def exponential_sample(rng: random.Random, rate: float) -> float:
    """Draw an exponential variate with the given rate, advancing ``rng``.

    Inverse-CDF sampling: ``-log(u) / rate`` for ``u`` uniform on (0, 1],
    obtained as ``1 - rng.random()``.  Any object with a compatible
    ``random()`` method works in place of ``random.Random``.
    """
    if not rate > 0.0:
        raise ValidationError(f"rate must be > 0, got {rate}")
    return -math.log(1.0 - rng.random()) / rate


def _validate_level_params(arrival_rate: float, service_rate: float, capacity: int) -> None:
    if not (arrival_rate > 0.0 and math.isfinite(arrival_rate)):
        raise ValidationError(f"arrival rate must be finite and > 0, got {arrival_rate}")
    if not (service_rate > 0.0 and math.isfinite(service_rate)):
        raise ValidationError(f"service rate must be finite and > 0, got {service_rate}")
    if not isinstance(capacity, int) or capacity < 1:
        raise ValidationError(f"capacity must be an integer >= 1, got {capacity!r}")


def simulate_level(
    arrival_rate: float,
    service_rate: float,
    capacity: int,
    config: SimulationConfig,
) -> SimulationResult:
    """Simulate one finite-capacity FCFS level and return window statistics.

    Draw order is fixed: on an arrival, the service time (if the server was
    idle) is drawn before the next interarrival time; on a completion, the
    next service time is drawn if anyone is waiting.  Changing this order
    would silently change every seeded output.
    """
    _validate_level_params(arrival_rate, service_rate, capacity)
    rng = random.Random(config.seed)
    rand = rng.random
    log = math.log
    inv_lam = 1.0 / arrival_rate
    inv_mu = 1.0 / service_rate
    cap = capacity
    warmup = config.warmup_arrivals
    total_arrivals = warmup + config.measured_arrivals

    now = 0.0
    n = 0
    in_system: deque[tuple[float, bool]] = deque()  # (arrival time, measured), FCFS
    next_arrival = -log(1.0 - rand()) * inv_lam
    next_completion = _INF

    measuring = warmup == 0
    window_start = 0.0
    last_t = 0.0
    occupancy = [0.0] * (cap + 1)
    seen = [0] * (cap + 1)
    admitted = blocked = completed = 0
    sojourn_total = 0.0
    arrivals = 0

    while arrivals < total_arrivals:
        if next_arrival <= next_completion:
            now = next_arrival
            if measuring:
                occupancy[n] += now - last_t
            last_t = now
            arrivals += 1
            is_measured = arrivals > warmup
            if is_measured:
                seen[n] += 1
            if n < cap:
                if is_measured:
                    admitted += 1
                in_system.append((now, is_measured))
                n += 1
                if n == 1:
                    next_completion = now - log(1.0 - rand()) * inv_mu
            elif is_measured:
                blocked += 1
            if arrivals == warmup:
                measuring = True
                window_start = now
                last_t = now
            next_arrival = now - log(1.0 - rand()) * inv_lam
        else:
            now = next_completion
            if measuring:
                occupancy[n] += now - last_t
            last_t = now
            joined_at, was_measured = in_system.popleft()
            n -= 1
            if was_measured:
                completed += 1
                sojourn_total += now - joined_at
            next_completion = (now - log(1.0 - rand()) * inv_mu) if n else _INF

    return _window_result(
        occupancy, seen, admitted, blocked, completed, sojourn_total,
        window_duration=now - window_start,
    )


def _window_result(
    occupancy: list[float],
    seen: list[int],
    admitted: int,
    blocked: int,
    completed: int,
    sojourn_total: float,
    window_duration: float,
) -> SimulationResult:
    total_time = math.fsum(occupancy)
    if not total_time > 0.0:
        raise ValidationError("measurement window has zero length; increase measured_arrivals")
    distribution = tuple(x / total_time for x in occupancy)
    empirical_l = math.fsum(i * x for i, x in enumerate(occupancy)) / total_time
    attempts = admitted + blocked
    if attempts > 0:
        seen_distribution = tuple(s / attempts for s in seen)
    else:
        seen_distribution = tuple(0.0 for _ in seen)
    return SimulationResult(
        empirical_distribution=distribution,
        empirical_L=empirical_l,
        empirical_W=(sojourn_total / completed) if completed else None,
        admitted_count=admitted,
        blocked_count=blocked,
        completed_count=completed,
        residual_count=admitted - completed,
        total_simulated_time=window_duration,
        arrival_seen_distribution=seen_distribution,
    )


def simulate_pipeline(
    model: PipelineModel, config: SimulationConfig
) -> tuple[tuple[SimulationResult, ...], tuple[PromotionEvent, ...]]:
    """Simulate the whole ladder, returning per-level statistics and events.

    External arrivals enter level 1 at its configured rate.  A service
    completion at level ``i`` emits a promotion event ``i -> i + 1`` and the
    employee joins level ``i + 1`` if there is room (a blocked event and a
    lost employee otherwise); completing the top level emits a departure
    event.  The event log covers the entire run from time zero, ordered by
    timestamp with ties kept in emission order; per-level statistics cover
    only the measurement window (window membership of a customer is decided
    at the instant it joins the level).

    The measurement window is counted in external arrivals, so at levels
    above the first ``admitted_count + blocked_count`` equals the number of
    in-window promotion attempts into that level, not ``measured_arrivals``.
    """
    n_levels = len(model.levels)
    rng = random.Random(config.seed)
    rand = rng.random
    log = math.log
    inv_lam = 1.0 / model.levels[0].arrival_rate
    inv_mu = [1.0 / level.service_rate for level in model.levels]
    caps = [level.capacity for level in model.levels]

    counts = [0] * n_levels
    next_completion = [_INF] * n_levels
    in_system: list[deque[tuple[int, float, bool]]] = [deque() for _ in range(n_levels)]
    occupancy = [[0.0] * (caps[i] + 1) for i in range(n_levels)]
    seen = [[0] * (caps[i] + 1) for i in range(n_levels)]
    admitted = [0] * n_levels
    blocked = [0] * n_levels
    completed = [0] * n_levels
    sojourn_total = [0.0] * n_levels

    events: list[PromotionEvent] = []
    warmup = config.warmup_arrivals
    total_arrivals = warmup + config.measured_arrivals
    measuring = warmup == 0
    window_start = 0.0
    last_t = 0.0
    now = 0.0
    arrivals = 0
    next_employee_id = 1
    next_arrival = -log(1.0 - rand()) * inv_lam

    while arrivals < total_arrivals:
        # Next event: the external arrival or the earliest completion.
        # Ties go to the arrival, then to the lowest level.
        now = next_arrival
        completing = -1
        for i in range(n_levels):
            if next_completion[i] < now:
                now = next_completion[i]
                completing = i
        if measuring:
            dt = now - last_t
            for i in range(n_levels):
                occupancy[i][counts[i]] += dt
        last_t = now

        if completing < 0:
            arrivals += 1
            employee_id = next_employee_id
            next_employee_id += 1
            is_measured = arrivals > warmup
            n = counts[0]
            if is_measured:
                seen[0][n] += 1
            if n < caps[0]:
                if is_measured:
                    admitted[0] += 1
                in_system[0].append((employee_id, now, is_measured))
                counts[0] = n + 1
                if n == 0:
                    next_completion[0] = now - log(1.0 - rand()) * inv_mu[0]
                events.append(PromotionEvent(employee_id, 0, 1, now))
            else:
                if is_measured:
                    blocked[0] += 1
                events.append(PromotionEvent(employee_id, 0, 1, now, blocked=True))
            if arrivals == warmup:
                measuring = True
                window_start = now
                last_t = now
            next_arrival = now - log(1.0 - rand()) * inv_lam
        else:
            i = completing
            employee_id, joined_at, was_measured = in_system[i].popleft()
            counts[i] -= 1
            if was_measured:
                completed[i] += 1
                sojourn_total[i] += now - joined_at
            next_completion[i] = (now - log(1.0 - rand()) * inv_mu[i]) if counts[i] else _INF
            j = i + 1
            if j < n_levels:
                n = counts[j]
                if measuring:
                    seen[j][n] += 1
                if n < caps[j]:
                    if measuring:
                        admitted[j] += 1
                    in_system[j].append((employee_id, now, measuring))
                    counts[j] = n + 1
                    if n == 0:
                        next_completion[j] = now - log(1.0 - rand()) * inv_mu[j]
                    events.append(PromotionEvent(employee_id, i + 1, j + 1, now))
                else:
                    if measuring:
                        blocked[j] += 1
                    events.append(PromotionEvent(employee_id, i + 1, j + 1, now, blocked=True))
            else:
                events.append(PromotionEvent(employee_id, n_levels, n_levels + 1, now))

    window_duration = now - window_start
    results = tuple(
        _window_result(
            occupancy[i], seen[i], admitted[i], blocked[i], completed[i],
            sojourn_total[i], window_duration=window_duration,
        )
        for i in range(n_levels)
    )
    return results, tuple(events)


_FLAGS = {"admitted": False, "blocked": True}
_FLAG_NAMES = {False: "admitted", True: "blocked"}


def write_event_log(events: Iterable[PromotionEvent], path) -> None:
    """Write events as comma-separated lines.

    One event per line: timestamp, employee id, from level, to level, flag
    (``admitted`` or ``blocked``).  Timestamps use the shortest round-trip
    float representation, so a written log reads back exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        for event in events:
            writer.writerow(
                (
                    repr(event.timestamp),
                    event.employee_id,
                    event.from_level,
                    event.to_level,
                    _FLAG_NAMES[event.blocked],
                )
            )


def read_event_log(path) -> tuple[PromotionEvent, ...]:
    """Read an event log written by :func:`write_event_log`."""
    events = []
    with open(path, "r", newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if len(row) != 5:
                raise ValidationError(f"line {line_no}: expected 5 fields, got {len(row)}")
            timestamp, employee_id, from_level, to_level, flag = row
            if flag not in _FLAGS:
                raise ValidationError(f"line {line_no}: unknown flag {flag!r}")
            try:
                event = PromotionEvent(
                    employee_id=int(employee_id),
                    from_level=int(from_level),
                    to_level=int(to_level),
                    timestamp=float(timestamp),
                    blocked=_FLAGS[flag],
                )
            except (ValueError, ValidationError) as exc:
                raise ValidationError(f"line {line_no}: {exc}") from exc
            events.append(event)
    return tuple(events)
