"""Promotion-queue analytics with an XML authority-policy engine.

The package models an organization's promotion ladder as a chain of
finite-capacity single-server queues: exact steady-state analysis, a
deterministic discrete-event simulator to validate it, and an XML policy
database that tracks each employee's current authority as they move up.
"""

from .errors import (
    ConfigError,
    NotFoundError,
    PolicyError,
    PolicyParseError,
    PolicySchemaError,
    PolicyValueError,
    ValidationError,
)
from .queueing import (
    BirthDeathSpec,
    PerformanceMetrics,
    StationaryDistribution,
    expected_in_system,
    geometric_normalization_constant,
    mm1k_distribution,
    performance_metrics,
    stationary_distribution,
)
from .pipeline import (
    Coupling,
    LevelAnalysis,
    LevelConfig,
    PipelineModel,
    PipelineReport,
    analyze_pipeline,
    authority_grant,
)
from .simulate import (
    PromotionEvent,
    SimulationConfig,
    SimulationResult,
    exponential_sample,
    read_event_log,
    simulate_level,
    simulate_pipeline,
    write_event_log,
)
from .policy import (
    REASON_ALLOWED,
    AuthorityDatabase,
    AuthorizationRequest,
    Decision,
    PolicyDocument,
    apply_event_log,
    apply_promotion,
    evaluate,
    load_database,
    parse_policy,
    save_database,
    serialize_policy,
)
from .configfile import load_pipeline_config, parse_pipeline_config

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConfigError",
    "NotFoundError",
    "PolicyError",
    "PolicyParseError",
    "PolicySchemaError",
    "PolicyValueError",
    "ValidationError",
    # queueing
    "BirthDeathSpec",
    "PerformanceMetrics",
    "StationaryDistribution",
    "expected_in_system",
    "geometric_normalization_constant",
    "mm1k_distribution",
    "performance_metrics",
    "stationary_distribution",
    # pipeline
    "Coupling",
    "LevelAnalysis",
    "LevelConfig",
    "PipelineModel",
    "PipelineReport",
    "analyze_pipeline",
    "authority_grant",
    # simulation
    "PromotionEvent",
    "SimulationConfig",
    "SimulationResult",
    "exponential_sample",
    "read_event_log",
    "simulate_level",
    "simulate_pipeline",
    "write_event_log",
    # policy
    "REASON_ALLOWED",
    "AuthorityDatabase",
    "AuthorizationRequest",
    "Decision",
    "PolicyDocument",
    "apply_event_log",
    "apply_promotion",
    "evaluate",
    "load_database",
    "parse_policy",
    "save_database",
    "serialize_policy",
    # config
    "load_pipeline_config",
    "parse_pipeline_config",
]
