"""Huber SGD for linear regression under oblivious contamination."""

from ._robreg import (
    Algorithm,
    ContractError,
    DomainError,
    HuberParams,
    ProblemSpec,
    StreamExhausted,
    demo_example_2_1,
    demo_indistinguishable,
    estimation_error,
    excess_risk_mc,
    huber_clip,
    huber_gradient,
    huber_loss,
    project_ball,
    radius_bounded,
    radius_subgaussian,
    rate_fit,
    run,
    sample_stream,
    scenarios,
    theoretical_bound,
)

__all__ = [
    "Algorithm",
    "ContractError",
    "DomainError",
    "HuberParams",
    "ProblemSpec",
    "StreamExhausted",
    "demo_example_2_1",
    "demo_indistinguishable",
    "estimation_error",
    "excess_risk_mc",
    "huber_clip",
    "huber_gradient",
    "huber_loss",
    "project_ball",
    "radius_bounded",
    "radius_subgaussian",
    "rate_fit",
    "run",
    "sample_stream",
    "scenarios",
    "theoretical_bound",
]
