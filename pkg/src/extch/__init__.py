"""Audit, quantum prediction and Monte Carlo tools for an extended CH-type Bell inequality."""

from .core import (
    Angle,
    AngleConfig,
    Ensemble,
    Outcome,
    OutcomeSelector,
    Setting,
    SettingPair,
    SinglesAssignment,
)
from .lhv_audit import AuditMode, LpCertificate, Sense, run_audit, verify_certificate
from .montecarlo import SimConfig, run_experiment
from .quantum import DetectorParams, find_max_violation, find_violation_interval, sprime_closed_form, sprime_exp_qm

__version__ = "0.1.0"
