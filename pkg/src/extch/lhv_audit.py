"""Exact extremes of the extended functional over local hidden-variable ensembles.

Per hidden-variable state the functional is multilinear in the slot
probabilities, and averaging over rho is linear, so the set of reachable
(objective, M-moments) vectors is the convex hull of the values at the
deterministic vertex strategies. Extremizing over ensembles under the
assumption that M is setting-independent is therefore a linear program in the
vertex weights::

    extremize   sum_v w_v S'(v)
    subject to  sum_v w_v = 1
                sum_v w_v alpha_1(v) alpha_2(v) - m = 0   for each of the six pairs
                w >= 0, 0 <= m <= 1

Certificates carry the optimal weights and are re-checked with the plain
:mod:`extch.core` functionals, never with the tableau.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from . import core
from .core import AUDITED_PAIRS, SETTINGS, OutcomeSelector, SinglesAssignment
from .simplex import solve_bounded

DEFAULT_TOL = 1e-9


class AuditMode(Enum):
    UNCONSTRAINED = "unconstrained"
    SYMMETRIC = "symmetric"


class Sense(Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


class Trit(IntEnum):
    NODETECT = 0
    PLUS = 1
    MINUS = 2


_TRIT_PROBS = {Trit.NODETECT: (0.0, 0.0), Trit.PLUS: (1.0, 0.0), Trit.MINUS: (0.0, 1.0)}

# Slots set freely under the symmetric-source reading; the other two copy them.
_SYMMETRIC_FREE = (0, 1, 2, 4)  # S1:A, S1:A', S1:B, S2:B'
_SYMMETRIC_TIES = {3: 2, 5: 1}  # S2:B <- S1:B, S2:A' <- S1:A'


@dataclass(frozen=True)
class VertexStrategy:
    """Deterministic response of every slot: fire +, fire -, or stay dark."""

    trits: tuple[Trit, ...]

    def __post_init__(self) -> None:
        if len(self.trits) != len(SETTINGS):
            raise ValueError(f"expected {len(SETTINGS)} trits")
        object.__setattr__(self, "trits", tuple(Trit(t) for t in self.trits))

    def as_assignment(self) -> SinglesAssignment:
        return SinglesAssignment(tuple(_TRIT_PROBS[t] for t in self.trits))

    def describe(self) -> str:
        sym = {Trit.NODETECT: "0", Trit.PLUS: "+", Trit.MINUS: "-"}
        return " ".join(f"{s}={sym[t]}" for s, t in zip(SETTINGS, self.trits))


class MismatchedProblem(ValueError):
    pass


def enumerate_vertex_strategies(mode: AuditMode) -> list[VertexStrategy]:
    """All vertex strategies in lexicographic trit order (all-dark first)."""
    order = (Trit.NODETECT, Trit.PLUS, Trit.MINUS)
    if mode is AuditMode.UNCONSTRAINED:
        return [VertexStrategy(t) for t in itertools.product(order, repeat=len(SETTINGS))]
    out = []
    for free in itertools.product(order, repeat=len(_SYMMETRIC_FREE)):
        trits = [Trit.NODETECT] * len(SETTINGS)
        for slot, t in zip(_SYMMETRIC_FREE, free):
            trits[slot] = t
        for slot, src in _SYMMETRIC_TIES.items():
            trits[slot] = trits[src]
        out.append(VertexStrategy(tuple(trits)))
    return out


def audit_ch_pointwise(sel: OutcomeSelector = OutcomeSelector()) -> tuple[float, float]:
    """Exact min and max of the CH combination over the 16 corners of its four inputs."""
    r, q = core.outcome_for_sign(sel.r), core.outcome_for_sign(sel.q)
    values = []
    for x, xp, y, yp in itertools.product((0.0, 1.0), repeat=4):
        probs = {
            core.S1_A: _on(r, x),
            core.S1_AP: _on(r, xp),
            core.S2_B: _on(q, y),
            core.S2_BP: _on(q, yp),
        }
        values.append(core.eval_s_hv(SinglesAssignment.from_mapping(probs), sel))
    return min(values), max(values)


def _on(o: core.Outcome, p: float) -> tuple[float, float]:
    return (p, 0.0) if o is core.Outcome.PLUS else (0.0, p)


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    upper: np.ndarray
    sense: Sense
    mode: AuditMode
    selector: OutcomeSelector
    vertices: tuple[VertexStrategy, ...]
    row_names: tuple[str, ...]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a_eq.shape


def build_audit_lp(
    mode: AuditMode,
    sense: Sense = Sense.MAXIMIZE,
    sel: OutcomeSelector = OutcomeSelector(),
    assumption_a: bool = True,
) -> LpProblem:
    """Columns: one weight per vertex strategy, then the shared level ``m``.

    With ``assumption_a=False`` the six M rows are dropped (relaxed problem).
    """
    vertices = tuple(enumerate_vertex_strategies(mode))
    states = [v.as_assignment() for v in vertices]
    n = len(vertices)

    objective = np.zeros(n + 1)
    objective[:n] = [core.eval_sprime_hv(s, sel) for s in states]

    rows = [np.concatenate([np.ones(n), [0.0]])]
    names = ["normalization"]
    if assumption_a:
        for pair in AUDITED_PAIRS:
            coeff = [core.alpha(s, pair.s1) * core.alpha(s, pair.s2) for s in states]
            rows.append(np.concatenate([coeff, [-1.0]]))
            names.append(f"M({pair.name})-m")
    a_eq = np.vstack(rows)
    b_eq = np.zeros(len(rows))
    b_eq[0] = 1.0
    upper = np.full(n + 1, np.inf)
    upper[n] = 1.0
    return LpProblem(objective, a_eq, b_eq, upper, sense, mode, sel, vertices, tuple(names))


@dataclass(frozen=True)
class LpCertificate:
    weights: dict[int, float]
    m_value: float
    objective_value: float
    constraint_residuals: tuple[float, ...]
    mode: AuditMode
    selector: OutcomeSelector
    tolerance: float = DEFAULT_TOL
    sense: Sense | None = None

    def ensemble(self, problem: LpProblem) -> core.Ensemble:
        return core.Ensemble.normalized(
            list(self.weights.values()),
            [problem.vertices[i].as_assignment() for i in self.weights],
        )

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode.value,
            "selector": {"r": self.selector.r, "q": self.selector.q},
            "objective": self.objective_value,
            "m": self.m_value,
            "weights": [[i, w] for i, w in sorted(self.weights.items())],
            "residuals": list(self.constraint_residuals),
            "tolerance": self.tolerance,
        }
        if self.sense is not None:
            d["sense"] = self.sense.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> LpCertificate:
        required = {"mode", "selector", "objective", "m", "weights", "residuals", "tolerance"}
        missing = required - set(d)
        if missing:
            raise ValueError(f"certificate missing fields: {sorted(missing)}")
        weights = {}
        for item in d["weights"]:
            idx, w = item
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise ValueError(f"vertex index must be an integer, got {idx!r}")
            weights[idx] = float(w)
        return cls(
            weights=weights,
            m_value=float(d["m"]),
            objective_value=float(d["objective"]),
            constraint_residuals=tuple(float(x) for x in d["residuals"]),
            mode=AuditMode(d["mode"]),
            selector=OutcomeSelector(int(d["selector"]["r"]), int(d["selector"]["q"])),
            tolerance=float(d["tolerance"]),
            sense=Sense(d["sense"]) if "sense" in d else None,
        )


def solve_simplex(p: LpProblem, tol: float = DEFAULT_TOL) -> LpCertificate:
    sol = solve_bounded(
        p.objective, p.a_eq, p.b_eq, p.upper, maximize=p.sense is Sense.MAXIMIZE, tol=tol
    )
    x = sol.x
    n = p.n_vertices
    residuals = p.a_eq @ x - p.b_eq
    weights = {int(i): float(x[i]) for i in np.flatnonzero(x[:n] > 0.0)}
    return LpCertificate(
        weights=weights,
        m_value=float(x[n]),
        objective_value=float(p.objective @ x),
        constraint_residuals=tuple(float(r) for r in residuals),
        mode=p.mode,
        selector=p.selector,
        tolerance=tol,
        sense=p.sense,
    )


@dataclass(frozen=True)
class Check:
    name: str
    stored: float
    recomputed: float
    ok: bool


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        if self.passed:
            return f"certificate OK ({len(self.checks)} checks)"
        return "certificate FAILED: " + ", ".join(
            f"{c.name} (stored {c.stored:.12g}, recomputed {c.recomputed:.12g})" for c in self.failures
        )


def verify_certificate(cert: LpCertificate, p: LpProblem, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Recompute objective and constraint residuals from the weights alone.

    Uses the :mod:`core` functionals on the listed vertex strategies. A check
    fails when a stored value disagrees with its recomputation by more than
    ``tol``, or when a recomputed constraint is itself violated by more than
    ``tol``.
    """
    if cert.mode is not p.mode or cert.selector != p.selector:
        raise MismatchedProblem(
            f"certificate is for {cert.mode.value}/{cert.selector}, problem is {p.mode.value}/{p.selector}"
        )
    if len(cert.constraint_residuals) != len(p.row_names):
        raise MismatchedProblem(
            f"certificate has {len(cert.constraint_residuals)} residuals, problem has {len(p.row_names)} rows"
        )
    bad = [i for i in cert.weights if not 0 <= i < p.n_vertices]
    if bad:
        raise MismatchedProblem(f"vertex indices out of range: {bad}")

    members = [(w, p.vertices[i].as_assignment()) for i, w in sorted(cert.weights.items())]
    report = VerificationReport()

    for i, w in sorted(cert.weights.items()):
        if w < -tol:
            report.checks.append(Check(f"weight[{i}]>=0", w, w, False))
    m = cert.m_value
    report.checks.append(Check("m in [0,1]", m, m, -tol <= m <= 1.0 + tol))

    recomputed = [math.fsum(w for w, _ in members) - 1.0]
    if len(p.row_names) > 1:
        recomputed += [core.mixture_m(members, pair) - m for pair in AUDITED_PAIRS]
    for name, stored, value in zip(p.row_names, cert.constraint_residuals, recomputed):
        ok = abs(stored - value) <= tol and abs(value) <= tol
        report.checks.append(Check(name, stored, value, ok))

    obj = core.mixture_sprime(members, p.selector)
    report.checks.append(Check("objective", cert.objective_value, obj, abs(obj - cert.objective_value) <= tol))
    return report


def unconstrained_witness() -> core.Ensemble:
    """Point mass reaching S' = 2 with every slot detecting (so M = 1 on all pairs)."""
    probs = {
        core.S1_A: (1.0, 0.0),
        core.S1_AP: (1.0, 0.0),
        core.S1_B: (0.0, 1.0),
        core.S2_B: (1.0, 0.0),
        core.S2_BP: (0.0, 1.0),
        core.S2_AP: (0.0, 1.0),
    }
    return core.Ensemble.point_mass(SinglesAssignment.from_mapping(probs))


@dataclass(frozen=True)
class AuditResult:
    mode: AuditMode
    selector: OutcomeSelector
    maximum: LpCertificate
    minimum: LpCertificate
    problem: LpProblem

    def within_bounds(self, lo: float = -1.0, hi: float = 0.0, tol: float = DEFAULT_TOL) -> bool:
        return self.minimum.objective_value >= lo - tol and self.maximum.objective_value <= hi + tol


def run_audit(mode: AuditMode, sel: OutcomeSelector = OutcomeSelector(), tol: float = DEFAULT_TOL) -> AuditResult:
    p_max = build_audit_lp(mode, Sense.MAXIMIZE, sel)
    p_min = build_audit_lp(mode, Sense.MINIMIZE, sel)
    return AuditResult(mode, sel, solve_simplex(p_max, tol), solve_simplex(p_min, tol), p_max)
