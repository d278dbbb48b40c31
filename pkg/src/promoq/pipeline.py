"""Multi-level promotion hierarchies built from per-level queue analyses.

A pipeline is an ordered ladder of levels, each one a constant-rate
finite-capacity queue that also carries the authority grant (designation and
signing limit) employees receive on reaching it.  Levels can be analyzed
independently, or in tandem where each level is fed by the effective
throughput of the level below it.

Tandem analysis treats every downstream level as a loss queue fed at the
upstream effective rate.  Departures from a finite queue are not Poisson, so
this is an approximation; the discrete-event simulator provides the exact
cross-check.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import NotFoundError, ValidationError
from .queueing import (
    BirthDeathSpec,
    PerformanceMetrics,
    StationaryDistribution,
    performance_metrics,
    stationary_distribution,
)


class Coupling(enum.Enum):
    """How consecutive levels feed each other."""

    INDEPENDENT = "independent"
    TANDEM = "tandem"


@dataclass(frozen=True)
class LevelConfig:
    """One rung of the ladder: queue rates plus the authority it grants."""

    level_id: int
    label: str
    arrival_rate: float
    service_rate: float
    capacity: int
    designation: str
    signing_limit: int

    def __post_init__(self):
        where = f"level {self.level_id}"
        if not isinstance(self.level_id, int) or self.level_id < 1:
            raise ValidationError(f"level id must be an integer >= 1, got {self.level_id!r}")
        if not self.arrival_rate > 0.0:
            raise ValidationError(f"{where}: arrival rate must be > 0, got {self.arrival_rate}")
        if not self.service_rate > 0.0:
            raise ValidationError(f"{where}: service rate must be > 0, got {self.service_rate}")
        if not isinstance(self.capacity, int) or self.capacity < 1:
            raise ValidationError(f"{where}: capacity must be an integer >= 1, got {self.capacity!r}")
        if not isinstance(self.signing_limit, int) or self.signing_limit < 0:
            raise ValidationError(
                f"{where}: signing limit must be an integer >= 0, got {self.signing_limit!r}"
            )


@dataclass(frozen=True)
class PipelineModel:
    """An ordered ladder of levels plus the coupling mode between them."""

    levels: tuple[LevelConfig, ...]
    coupling: Coupling = Coupling.INDEPENDENT

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if isinstance(self.coupling, str):
            try:
                object.__setattr__(self, "coupling", Coupling(self.coupling))
            except ValueError:
                raise ValidationError(
                    f"coupling must be one of {[c.value for c in Coupling]}, got {self.coupling!r}"
                ) from None
        if not self.levels:
            raise ValidationError("a pipeline needs at least one level")
        for position, level in enumerate(self.levels, start=1):
            if level.level_id != position:
                raise ValidationError(
                    f"level {level.level_id}: level ids must be consecutive from 1 "
                    f"(expected {position} at this position)"
                )
        for lower, upper in zip(self.levels, self.levels[1:]):
            if upper.signing_limit < lower.signing_limit:
                raise ValidationError(
                    f"level {upper.level_id}: signing limit {upper.signing_limit} is below "
                    f"level {lower.level_id}'s {lower.signing_limit}"
                )

    def level(self, level_id: int) -> LevelConfig:
        for config in self.levels:
            if config.level_id == level_id:
                return config
        raise NotFoundError(f"no level {level_id} in a {len(self.levels)}-level pipeline")


@dataclass(frozen=True)
class LevelAnalysis:
    """Analysis of one level under the arrival rate that was actually used."""

    level_id: int
    label: str
    arrival_rate: float
    distribution: StationaryDistribution
    metrics: PerformanceMetrics

    @property
    def throughput(self) -> float:
        """Rate at which customers pass through (admitted arrivals)."""
        return self.metrics.effective_arrival_rate


@dataclass(frozen=True)
class PipelineReport:
    """Per-level analyses, in the same order as the model's levels."""

    levels: tuple[LevelAnalysis, ...]

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, index: int) -> LevelAnalysis:
        return self.levels[index]


def analyze_pipeline(model: PipelineModel) -> PipelineReport:
    """Analyze every level of the ladder.

    Independent coupling analyzes each level with its configured arrival
    rate.  Tandem coupling feeds level ``i + 1`` at level ``i``'s effective
    throughput, computed left to right; each report entry records whichever
    rate it was analyzed with.
    """
    analyses = []
    upstream_throughput = None
    for config in model.levels:
        arrival_rate = config.arrival_rate
        if model.coupling is Coupling.TANDEM and upstream_throughput is not None:
            arrival_rate = upstream_throughput
        spec = BirthDeathSpec.constant(arrival_rate, config.service_rate, config.capacity)
        dist = stationary_distribution(spec)
        metrics = performance_metrics(spec, dist)
        analyses.append(
            LevelAnalysis(
                level_id=config.level_id,
                label=config.label,
                arrival_rate=arrival_rate,
                distribution=dist,
                metrics=metrics,
            )
        )
        upstream_throughput = metrics.effective_arrival_rate
    return PipelineReport(levels=tuple(analyses))


def authority_grant(model: PipelineModel, level_id: int) -> tuple[str, int]:
    """Return the (designation, signing limit) granted at ``level_id``."""
    config = model.level(level_id)
    return (config.designation, config.signing_limit)
