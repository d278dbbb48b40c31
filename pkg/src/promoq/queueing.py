"""Exact steady-state analysis of finite-capacity birth-death queues.

A birth-death queue with capacity ``K`` holds between 0 and ``K`` customers;
arrivals in state ``n`` occur at rate ``arrival_rates[n]`` and move the system
to ``n + 1``, service completions in state ``n`` occur at rate
``service_rates[n - 1]`` and move it to ``n - 1``.  Arrivals that find the
system full are lost.  The stationary distribution has the product form

    P(n) = P(0) * prod(arrival_rates[i] / service_rates[i] for i in range(n))

with ``P(0)`` fixed by normalization.  The constant-rate special case is the
classic single-server loss queue whose distribution is geometric in the
traffic intensity ``rho = arrival_rate / service_rate``.

All types are immutable values and all operations are pure functions, so
everything here is safe to use from concurrent callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ValidationError

# Running product weights are renormalized whenever they exceed this bound so
# that heavily overloaded queues (rho > 1, large K) never overflow a double.
_RESCALE_BOUND = 1e250


@dataclass(frozen=True)
class BirthDeathSpec:
    """State-dependent rates and capacity for one finite queue.

    Attributes:
        capacity: maximum number of customers in the system, ``K >= 1``.
        arrival_rates: ``K`` rates, entry ``n`` applying when ``n`` customers
            are present; each ``>= 0`` per unit time.
        service_rates: ``K`` rates, entry ``n`` applying when ``n + 1``
            customers are present; each ``> 0`` per unit time.
    """

    capacity: int
    arrival_rates: tuple[float, ...]
    service_rates: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.capacity, int) or self.capacity < 1:
            raise ValidationError(f"capacity must be an integer >= 1, got {self.capacity!r}")
        object.__setattr__(self, "arrival_rates", tuple(float(r) for r in self.arrival_rates))
        object.__setattr__(self, "service_rates", tuple(float(r) for r in self.service_rates))
        if len(self.arrival_rates) != self.capacity:
            raise ValidationError(
                f"expected {self.capacity} arrival rates, got {len(self.arrival_rates)}"
            )
        if len(self.service_rates) != self.capacity:
            raise ValidationError(
                f"expected {self.capacity} service rates, got {len(self.service_rates)}"
            )
        for n, rate in enumerate(self.arrival_rates):
            if not (rate >= 0.0 and math.isfinite(rate)):
                raise ValidationError(f"arrival rate for state {n} must be finite and >= 0, got {rate}")
        for n, rate in enumerate(self.service_rates):
            if not (rate > 0.0 and math.isfinite(rate)):
                raise ValidationError(f"service rate for state {n + 1} must be finite and > 0, got {rate}")

    @classmethod
    def constant(cls, arrival_rate: float, service_rate: float, capacity: int) -> "BirthDeathSpec":
        """Build a spec whose rates do not depend on the state."""
        if not (arrival_rate > 0.0 and math.isfinite(arrival_rate)):
            raise ValidationError(f"arrival rate must be finite and > 0, got {arrival_rate}")
        if not (service_rate > 0.0 and math.isfinite(service_rate)):
            raise ValidationError(f"service rate must be finite and > 0, got {service_rate}")
        if not isinstance(capacity, int) or capacity < 1:
            raise ValidationError(f"capacity must be an integer >= 1, got {capacity!r}")
        return cls(
            capacity=capacity,
            arrival_rates=(float(arrival_rate),) * capacity,
            service_rates=(float(service_rate),) * capacity,
        )

    @property
    def is_constant_rate(self) -> bool:
        return (
            len(set(self.arrival_rates)) == 1
            and len(set(self.service_rates)) == 1
        )


@dataclass(frozen=True)
class StationaryDistribution:
    """Steady-state probabilities ``P(0) .. P(K)``; sums to 1."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.probabilities) < 2:
            raise ValidationError("a distribution needs at least states 0 and 1")
        for n, p in enumerate(self.probabilities):
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"P({n}) = {p} is outside [0, 1]")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")

    @property
    def capacity(self) -> int:
        return len(self.probabilities) - 1

    @property
    def blocking_probability(self) -> float:
        """Probability an arriving customer finds the system full."""
        return self.probabilities[-1]

    def __len__(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, n: int) -> float:
        return self.probabilities[n]

    def __iter__(self):
        return iter(self.probabilities)


@dataclass(frozen=True)
class PerformanceMetrics:
    """Steady-state performance summary of one queue.

    ``mean_time_in_system`` and ``mean_time_in_queue`` follow Little's law
    (``W = L / effective_arrival_rate``) and are ``None`` when no customer is
    ever admitted.  ``traffic_intensity`` is only defined for constant-rate
    specs and is ``None`` otherwise.
    """

    expected_in_system: float
    expected_in_queue: float
    effective_arrival_rate: float
    blocking_probability: float
    mean_time_in_system: Optional[float]
    mean_time_in_queue: Optional[float]
    traffic_intensity: Optional[float]


def stationary_distribution(spec: BirthDeathSpec) -> StationaryDistribution:
    """Compute the stationary distribution of a birth-death queue.

    Uses the product form with on-the-fly rescaling, so overloaded systems
    (weights growing geometrically) stay inside double range; the result
    satisfies detailed balance and sums to 1 to within accumulated rounding.
    """
    weights = [1.0]
    w = 1.0
    for lam, mu in zip(spec.arrival_rates, spec.service_rates):
        w *= lam / mu
        if w > _RESCALE_BOUND:
            inv = 1.0 / w
            weights = [x * inv for x in weights]
            w = 1.0
        weights.append(w)
    total = math.fsum(weights)
    return StationaryDistribution(tuple(x / total for x in weights))


def mm1k_distribution(
    arrival_rate: float, service_rate: float, capacity: int
) -> StationaryDistribution:
    """Stationary distribution of the constant-rate single-server loss queue.

    Equivalent to the geometric closed form ``P(i) ∝ rho**i`` (uniform when
    ``rho == 1``); implemented by building a constant-rate spec and running
    the general product-form solver.
    """
    return stationary_distribution(
        BirthDeathSpec.constant(arrival_rate, service_rate, capacity)
    )


def geometric_normalization_constant(
    arrival_rate: float, service_rate: float, capacity: int
) -> Fraction:
    """Exact value of ``sum(rho**i for i in range(capacity + 1))``.

    Computed in rational arithmetic so integer ratios come out exact
    (for example 88573 at ``rho == 3``, ``capacity == 10``).
    """
    if not arrival_rate > 0.0:
        raise ValidationError(f"arrival rate must be > 0, got {arrival_rate}")
    if not service_rate > 0.0:
        raise ValidationError(f"service rate must be > 0, got {service_rate}")
    if not isinstance(capacity, int) or capacity < 1:
        raise ValidationError(f"capacity must be an integer >= 1, got {capacity!r}")
    rho = Fraction(arrival_rate) / Fraction(service_rate)
    total = Fraction(0)
    term = Fraction(1)
    for _ in range(capacity + 1):
        total += term
        term *= rho
    return total


def expected_in_system(dist: StationaryDistribution) -> float:
    """Expected number of customers in the system, ``sum(i * P(i))``."""
    return math.fsum(n * p for n, p in enumerate(dist.probabilities))


def performance_metrics(
    spec: BirthDeathSpec, dist: StationaryDistribution
) -> PerformanceMetrics:
    """Derive the performance summary of ``spec`` under its distribution.

    The effective arrival rate counts only admitted customers,
    ``sum(arrival_rates[n] * P(n))``; for constant rates this equals
    ``arrival_rate * (1 - P(K))``.  The queue-length figure assumes a single
    server, so the expected number in service is ``1 - P(0)``.
    """
    if len(dist) != spec.capacity + 1:
        raise ValidationError(
            f"distribution has {len(dist)} states but the spec has {spec.capacity + 1}"
        )
    probabilities = dist.probabilities
    mean_in_system = expected_in_system(dist)
    mean_in_queue = mean_in_system - (1.0 - probabilities[0])
    if mean_in_queue < 0.0:  # rounding dust only; the identity holds to 1e-12
        mean_in_queue = 0.0
    effective_rate = math.fsum(
        lam * p for lam, p in zip(spec.arrival_rates, probabilities)
    )
    if effective_rate > 0.0:
        time_in_system = mean_in_system / effective_rate
        time_in_queue = mean_in_queue / effective_rate
    else:
        time_in_system = None
        time_in_queue = None
    rho = None
    if spec.is_constant_rate:
        rho = spec.arrival_rates[0] / spec.service_rates[0]
    return PerformanceMetrics(
        expected_in_system=mean_in_system,
        expected_in_queue=mean_in_queue,
        effective_arrival_rate=effective_rate,
        blocking_probability=probabilities[-1],
        mean_time_in_system=time_in_system,
        mean_time_in_queue=time_in_queue,
        traffic_intensity=rho,
    )
