"""Classical testbed for quantum-query stochastic optimization.

Thin re-export of the compiled extension; see the project README for the
C++ API these wrap.
"""

from ._core import (
    CSV_HEADER,
    AcsaResult,
    Backend,
    CapabilityError,
    CheckResult,
    ConfigError,
    ContractViolation,
    GradientEstimate,
    Problem,
    QscpResult,
    QsgdResult,
    QspiderResult,
    QueryLedger,
    Rng,
    SgdResult,
    VerifyReport,
    approx_gradient,
    backend,
    charge_cost,
    estimate_mean,
    format_report,
    make_fixture,
    mlmc_gradient,
    predicted_exponent,
    run_acsa,
    run_qscp,
    run_qsgd,
    run_qspider,
    run_sgd_baseline,
    run_sweep_config,
    run_verify_suite,
    verify_suite_names,
)

__all__ = [
    "CSV_HEADER",
    "AcsaResult",
    "Backend",
    "CapabilityError",
    "CheckResult",
    "ConfigError",
    "ContractViolation",
    "GradientEstimate",
    "Problem",
    "QscpResult",
    "QsgdResult",
    "QspiderResult",
    "QueryLedger",
    "Rng",
    "SgdResult",
    "VerifyReport",
    "approx_gradient",
    "backend",
    "charge_cost",
    "estimate_mean",
    "format_report",
    "make_fixture",
    "mlmc_gradient",
    "predicted_exponent",
    "run_acsa",
    "run_qscp",
    "run_qsgd",
    "run_qspider",
    "run_sgd_baseline",
    "run_sweep_config",
    "run_verify_suite",
    "verify_suite_names",
]
