"""Scenario configuration, experiments, file formats, and the CLI."""

from .experiments import (
    ExperimentReport,
    coherence_probe,
    coherence_report,
    convergence_report,
    experiment_halting,
    experiment_net_update,
    experiment_paradox,
    experiment_provability,
    experiment_self_knowledge,
)
from .scenario import BinGroup, Scenario, load_scenario, parse_scenario
from .tracefiles import (
    certificates_text,
    read_certificates,
    read_trace_csv,
    save_certificates,
    save_exploitation_report,
    save_trace_csv,
    trace_csv_text,
    write_certificates,
    write_exploitation_report,
    write_trace_csv,
)
from .variables import (
    DeferralFunction,
    Variable,
    affine_day_map,
    expectation,
    indicator,
)
from .verify import (
    VerificationError,
    brute_force_value_range,
    day_fragment,
    verify_budget_safety,
    verify_certificates,
    verify_firm_value_bound,
)

__all__ = [
    "ExperimentReport",
    "coherence_probe",
    "coherence_report",
    "convergence_report",
    "experiment_halting",
    "experiment_net_update",
    "experiment_paradox",
    "experiment_provability",
    "experiment_self_knowledge",
    "BinGroup",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "certificates_text",
    "read_certificates",
    "read_trace_csv",
    "save_certificates",
    "save_exploitation_report",
    "save_trace_csv",
    "trace_csv_text",
    "write_certificates",
    "write_exploitation_report",
    "write_trace_csv",
    "DeferralFunction",
    "Variable",
    "affine_day_map",
    "expectation",
    "indicator",
    "VerificationError",
    "brute_force_value_range",
    "day_fragment",
    "verify_budget_safety",
    "verify_certificates",
    "verify_firm_value_bound",
]
