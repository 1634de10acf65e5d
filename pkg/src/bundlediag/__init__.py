"""Sheaf-theoretic empirical models, contextuality certificates and bundle diagrams."""

from bundlediag.scenario import (
    Context,
    GlobalAssignment,
    Incompatibility,
    Observable,
    Scenario,
    ScenarioError,
    Section,
    Violation,
    faces,
    glue,
    restrict,
    sections_over,
    validate_scenario,
)
from bundlediag.model import (
    EmpiricalModel,
    ModelError,
    ProbabilityTable,
    SupportModel,
    check_marginal_compatibility,
    load_model,
    support_of,
    supported_sections,
)
from bundlediag.solver import (
    Classification,
    ParityContradiction,
    ParitySolution,
    ParitySystem,
    SearchTrace,
    build_parity_system,
    classify,
    enumerate_global_sections,
    extend_section,
    is_global_section,
    parity_obstruction,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "Context",
    "EmpiricalModel",
    "GlobalAssignment",
    "Incompatibility",
    "ModelError",
    "Observable",
    "ParityContradiction",
    "ParitySolution",
    "ParitySystem",
    "ProbabilityTable",
    "Scenario",
    "ScenarioError",
    "SearchTrace",
    "Section",
    "SupportModel",
    "Violation",
    "build_parity_system",
    "check_marginal_compatibility",
    "classify",
    "enumerate_global_sections",
    "extend_section",
    "faces",
    "glue",
    "is_global_section",
    "load_model",
    "parity_obstruction",
    "restrict",
    "sections_over",
    "support_of",
    "supported_sections",
    "validate_scenario",
]
