"""Domain types and hidden-variable / experimental functionals.

A hidden-variable state lambda is represented by a :class:`SinglesAssignment`:
for each of the six detector slots it gives the probability of a ``+`` click
and a ``-`` click, with the non-detection probability implicit. A source
distribution rho(lambda) is a finite :class:`Ensemble` of such assignments.
Everything here is linear in the ensemble weights and multilinear in the
single-photon probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

NORMALIZATION_TOL = 1e-12


class Side(Enum):
    SIDE1 = 1
    SIDE2 = 2


class Label(Enum):
    A = "A"
    APRIME = "Aprime"
    B = "B"
    BPRIME = "Bprime"


_ALLOWED_LABELS = {
    Side.SIDE1: (Label.A, Label.APRIME, Label.B),
    Side.SIDE2: (Label.B, Label.BPRIME, Label.APRIME),
}


@dataclass(frozen=True)
class Setting:
    """One detector slot: a side together with the polarizer direction used there."""

    side: Side
    label: Label

    def __post_init__(self) -> None:
        if self.label not in _ALLOWED_LABELS[self.side]:
            raise ValueError(f"{self.label.value} is not a valid direction on {self.side.name}")

    def __str__(self) -> str:
        return f"{self.side.value}:{self.label.value}"


# Canonical slot order. Vertex enumeration and serialization depend on it.
SETTINGS: tuple[Setting, ...] = (
    Setting(Side.SIDE1, Label.A),
    Setting(Side.SIDE1, Label.APRIME),
    Setting(Side.SIDE1, Label.B),
    Setting(Side.SIDE2, Label.B),
    Setting(Side.SIDE2, Label.BPRIME),
    Setting(Side.SIDE2, Label.APRIME),
)
_SLOT = {s: i for i, s in enumerate(SETTINGS)}

S1_A, S1_AP, S1_B, S2_B, S2_BP, S2_AP = SETTINGS


class Outcome(Enum):
    PLUS = 1
    MINUS = -1
    NODETECT = 0

    @property
    def symbol(self) -> str:
        return {1: "+", -1: "-", 0: "0"}[self.value]


# Row/column order of every 3x3 outcome table in the package.
OUTCOMES: tuple[Outcome, ...] = (Outcome.PLUS, Outcome.MINUS, Outcome.NODETECT)


def outcome_for_sign(sign: int) -> Outcome:
    return Outcome.PLUS if sign == 1 else Outcome.MINUS


@dataclass(frozen=True)
class Angle:
    """A polarizer direction in radians, reduced modulo pi."""

    radians: float

    def __post_init__(self) -> None:
        x = float(self.radians)
        if not math.isfinite(x):
            raise ValueError(f"angle must be finite, got {self.radians!r}")
        x = math.fmod(x, math.pi)
        if x < 0.0:
            x += math.pi
        if x >= math.pi:
            x = 0.0
        object.__setattr__(self, "radians", x)

    @classmethod
    def from_degrees(cls, degrees: float) -> Angle:
        return cls(math.radians(degrees))

    def __sub__(self, other: Angle) -> Angle:
        return Angle(self.radians - other.radians)


@dataclass(frozen=True)
class AngleConfig:
    a: Angle
    b: Angle
    a_prime: Angle
    b_prime: Angle

    @classmethod
    def from_phi(cls, phi: float) -> AngleConfig:
        """Directions a, b, a', b' spaced by phi/2 along a line.

        Gives |a-b| = |a'-b| = |a'-b'| = phi/2 and |a-b'| = 3 phi/2 (mod pi).
        """
        half = 0.5 * phi
        return cls(Angle(0.0), Angle(half), Angle(2 * half), Angle(3 * half))

    def direction(self, label: Label) -> Angle:
        return {
            Label.A: self.a,
            Label.B: self.b,
            Label.APRIME: self.a_prime,
            Label.BPRIME: self.b_prime,
        }[label]


@dataclass(frozen=True)
class OutcomeSelector:
    r: int = 1
    q: int = 1

    def __post_init__(self) -> None:
        if self.r not in (1, -1) or self.q not in (1, -1):
            raise ValueError(f"selector entries must be +1 or -1, got r={self.r}, q={self.q}")


ALL_SELECTORS: tuple[OutcomeSelector, ...] = tuple(
    OutcomeSelector(r, q) for r in (1, -1) for q in (1, -1)
)


@dataclass(frozen=True)
class SettingPair:
    s1: Setting
    s2: Setting

    def __post_init__(self) -> None:
        if self.s1.side is not Side.SIDE1 or self.s2.side is not Side.SIDE2:
            raise ValueError("a setting pair needs a Side1 setting first and a Side2 setting second")

    @property
    def name(self) -> str:
        return f"{self.s1.label.value}-{self.s2.label.value}"

    def delta(self, cfg: AngleConfig) -> Angle:
        return cfg.direction(self.s1.label) - cfg.direction(self.s2.label)


# The six joint terms of the extended functional, in order, with their signs.
AUDITED_PAIRS: tuple[SettingPair, ...] = (
    SettingPair(S1_A, S2_B),
    SettingPair(S1_A, S2_BP),
    SettingPair(S1_AP, S2_B),
    SettingPair(S1_AP, S2_BP),
    SettingPair(S1_AP, S2_AP),
    SettingPair(S1_B, S2_B),
)
SPRIME_SIGNS: tuple[int, ...] = (1, -1, 1, 1, -1, -1)


def selected_outcomes(sel: OutcomeSelector) -> tuple[tuple[Outcome, Outcome], ...]:
    """Outcome pair read from each of the six tables: (r,q) four times, then (r,r), (q,q)."""
    r, q = outcome_for_sign(sel.r), outcome_for_sign(sel.q)
    return ((r, q),) * 4 + ((r, r), (q, q))


@dataclass(frozen=True)
class SinglesAssignment:
    """Per-slot click probabilities ``(p_plus, p_minus)`` for one hidden-variable state."""

    probs: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.probs) != len(SETTINGS):
            raise ValueError(f"expected {len(SETTINGS)} slots, got {len(self.probs)}")
        clean = []
        for s, (pp, pm) in zip(SETTINGS, self.probs):
            pp, pm = float(pp), float(pm)
            if not (pp >= 0.0 and pm >= 0.0 and pp + pm <= 1.0 + NORMALIZATION_TOL):
                raise ValueError(f"invalid probabilities at {s}: ({pp}, {pm})")
            clean.append((pp, pm))
        object.__setattr__(self, "probs", tuple(clean))

    @classmethod
    def from_mapping(cls, m: Mapping[Setting, tuple[float, float]], default=(0.0, 0.0)) -> SinglesAssignment:
        unknown = set(m) - set(SETTINGS)
        if unknown:
            raise ValueError(f"unknown settings: {unknown}")
        return cls(tuple(tuple(m.get(s, default)) for s in SETTINGS))

    def pair(self, s: Setting) -> tuple[float, float]:
        return self.probs[_SLOT[s]]

    def prob(self, s: Setting, o: Outcome) -> float:
        pp, pm = self.probs[_SLOT[s]]
        if o is Outcome.PLUS:
            return pp
        if o is Outcome.MINUS:
            return pm
        return 1.0 - pp - pm


@dataclass(frozen=True)
class Ensemble:
    """Finite mixture of hidden-variable states; weights sum to one."""

    members: tuple[tuple[float, SinglesAssignment], ...]

    def __post_init__(self) -> None:
        members = tuple((float(w), a) for w, a in self.members)
        if not members:
            raise ValueError("ensemble needs at least one member")
        if any(w < 0.0 for w, _ in members):
            raise ValueError("ensemble weights must be nonnegative")
        total = math.fsum(w for w, _ in members)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"ensemble weights sum to {total!r}, not 1")
        object.__setattr__(self, "members", members)

    @classmethod
    def normalized(cls, weights: Sequence[float], states: Sequence[SinglesAssignment]) -> Ensemble:
        total = math.fsum(weights)
        if total <= 0.0:
            raise ValueError("weights must have positive sum")
        return cls(tuple((w / total, s) for w, s in zip(weights, states)))

    @classmethod
    def point_mass(cls, state: SinglesAssignment) -> Ensemble:
        return cls(((1.0, state),))


def alpha(assign: SinglesAssignment, s: Setting) -> float:
    """Detection probability p_plus + p_minus of one slot (one minus non-detection)."""
    pp, pm = assign.pair(s)
    return pp + pm


def _ch_inputs(assign: SinglesAssignment, sel: OutcomeSelector):
    r, q = outcome_for_sign(sel.r), outcome_for_sign(sel.q)
    x = assign.prob(S1_A, r)
    xp = assign.prob(S1_AP, r)
    y = assign.prob(S2_B, q)
    yp = assign.prob(S2_BP, q)
    return x, xp, y, yp


def eval_s_hv(assign: SinglesAssignment, sel: OutcomeSelector = OutcomeSelector()) -> float:
    """The Clauser-Horne combination x(y - y') + x'(y + y') - x' - y."""
    x, xp, y, yp = _ch_inputs(assign, sel)
    return x * (y - yp) + xp * (y + yp) - xp - y


def eval_sprime_hv(assign: SinglesAssignment, sel: OutcomeSelector = OutcomeSelector()) -> float:
    """Extended combination where the subtracted singles become same-direction products.

    x(y - y') + x'(y + y') - x' u - v y, with u = p_r at side 2 along a' and
    v = p_q at side 1 along b. Not bounded above by zero in general.
    """
    x, xp, y, yp = _ch_inputs(assign, sel)
    u = assign.prob(S2_AP, outcome_for_sign(sel.r))
    v = assign.prob(S1_B, outcome_for_sign(sel.q))
    return x * (y - yp) + xp * (y + yp) - xp * u - v * y


def joint_prob_factorized(assign: SinglesAssignment, pair: SettingPair, o1: Outcome, o2: Outcome) -> float:
    return assign.prob(pair.s1, o1) * assign.prob(pair.s2, o2)


Members = Iterable[tuple[float, SinglesAssignment]]


def mixture_joint(members: Members, pair: SettingPair, o1: Outcome, o2: Outcome) -> float:
    """Weighted sum of factorized joint probabilities. Weights are used as given."""
    return math.fsum(w * joint_prob_factorized(a, pair, o1, o2) for w, a in members)


def mixture_m(members: Members, pair: SettingPair) -> float:
    return math.fsum(w * alpha(a, pair.s1) * alpha(a, pair.s2) for w, a in members)


def mixture_sprime(members: Members, sel: OutcomeSelector = OutcomeSelector()) -> float:
    members = tuple(members)
    terms = [
        sign * mixture_joint(members, pair, o1, o2)
        for sign, pair, (o1, o2) in zip(SPRIME_SIGNS, AUDITED_PAIRS, selected_outcomes(sel))
    ]
    return math.fsum(terms)


def ensemble_joint(ens: Ensemble, pair: SettingPair, o1: Outcome, o2: Outcome) -> float:
    return mixture_joint(ens.members, pair, o1, o2)


def ensemble_m(ens: Ensemble, pair: SettingPair) -> float:
    """Total double-detection probability for a setting pair."""
    return mixture_m(ens.members, pair)


def ensemble_sprime_exp(ens: Ensemble, sel: OutcomeSelector = OutcomeSelector()) -> float:
    """Six-term combination of ensemble-averaged joint probabilities."""
    return mixture_sprime(ens.members, sel)


def ensemble_s_exp(ens: Ensemble, sel: OutcomeSelector = OutcomeSelector()) -> float:
    """Averaged CH combination: P(a,b) - P(a,b') + P(a',b) + P(a',b') - P1(a') - P2(b)."""
    r, q = outcome_for_sign(sel.r), outcome_for_sign(sel.q)
    joint = [ensemble_joint(ens, pair, r, q) for pair in AUDITED_PAIRS[:4]]
    single1 = math.fsum(w * a.prob(S1_AP, r) for w, a in ens.members)
    single2 = math.fsum(w * a.prob(S2_B, q) for w, a in ens.members)
    return math.fsum([joint[0], -joint[1], joint[2], joint[3], -single1, -single2])

