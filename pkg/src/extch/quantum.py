"""Quantum predictions for the parallel-polarization source with lossy detection.

Outcome model per setting pair, angle difference ``delta``:

* the pair passes collimation jointly with probability ``f``;
* photon k is then detected independently with probability ``eta_k``;
* given a double detection, results ``(r, q)`` occur with probability
  ``(1 + r q F cos 2 delta) / 4``;
* a lone detection gives ``+`` or ``-`` with probability 1/2 each.

Only the double-detection entries depend on ``delta``, and their sum is
``eta1 * eta2 * f`` for every ``delta``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    AUDITED_PAIRS,
    OUTCOMES,
    SPRIME_SIGNS,
    Angle,
    AngleConfig,
    Outcome,
    OutcomeSelector,
    selected_outcomes,
)

DEFAULT_TOL = 1e-10
SCAN_CSV_HEADER = ("phi", "margin_g", "sprime", "eta1", "eta2", "f", "F")

_IDX = {o: i for i, o in enumerate(OUTCOMES)}


@dataclass(frozen=True)
class DetectorParams:
    eta1: float = 1.0
    eta2: float = 1.0
    f: float = 1.0
    F: float = 1.0

    def __post_init__(self) -> None:
        for name in ("eta1", "eta2", "f", "F"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def detection(self) -> float:
        """Double-detection probability eta1 * eta2 * f."""
        return self.eta1 * self.eta2 * self.f

    @property
    def scale(self) -> float:
        return self.eta1 * self.eta2 * self.f * self.F


@dataclass(frozen=True)
class OutcomeTable:
    probs: np.ndarray  # 3x3, rows side 1, columns side 2, order (+, -, 0)
    setting_difference: Angle

    def entry(self, o1: Outcome, o2: Outcome) -> float:
        return float(self.probs[_IDX[o1], _IDX[o2]])

    @property
    def m(self) -> float:
        return float(self.probs[:2, :2].sum())

    def flat(self) -> np.ndarray:
        """Entries in sampling order ++, +-, +0, -+, --, -0, 0+, 0-, 00."""
        return self.probs.reshape(-1)


def outcome_table(dp: DetectorParams, delta: Angle | float) -> OutcomeTable:
    if not isinstance(delta, Angle):
        delta = Angle(delta)
    c = dp.F * math.cos(2.0 * delta.radians)
    both = 0.25 * dp.eta1 * dp.eta2 * dp.f
    only1 = 0.5 * dp.f * dp.eta1 * (1.0 - dp.eta2)
    only2 = 0.5 * dp.f * dp.eta2 * (1.0 - dp.eta1)
    none = (1.0 - dp.f) + dp.f * (1.0 - dp.eta1) * (1.0 - dp.eta2)
    probs = np.array(
        [
            [both * (1.0 + c), both * (1.0 - c), only1],
            [both * (1.0 - c), both * (1.0 + c), only1],
            [only2, only2, none],
        ]
    )
    probs.setflags(write=False)
    return OutcomeTable(probs, delta)


def pair_tables(dp: DetectorParams, cfg: AngleConfig) -> list[OutcomeTable]:
    """Tables for the six audited setting pairs, in canonical order."""
    return [outcome_table(dp, pair.delta(cfg)) for pair in AUDITED_PAIRS]


def sprime_exp_qm(dp: DetectorParams, cfg: AngleConfig, sel: OutcomeSelector = OutcomeSelector()) -> float:
    terms = [
        sign * table.entry(o1, o2)
        for sign, table, (o1, o2) in zip(SPRIME_SIGNS, pair_tables(dp, cfg), selected_outcomes(sel))
    ]
    return math.fsum(terms)


def sprime_closed_form(dp: DetectorParams, phi: float) -> float:
    return 0.25 * dp.scale * violation_margin(phi)


def violation_margin(phi):
    """g(phi) = 3 cos phi - cos 3 phi - 2; positive means the upper bound is broken."""
    return 3.0 * np.cos(phi) - np.cos(3.0 * phi) - 2.0


def margin_slope(phi):
    return 3.0 * np.sin(3.0 * phi) - 3.0 * np.sin(phi)


def _bisect(func, lo: float, hi: float, tol: float) -> float:
    """Sign-change root of ``func`` in [lo, hi]; exact zeros at an end are returned as is."""
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_violation_interval(
    tol: float = DEFAULT_TOL, domain: tuple[float, float] = (0.0, math.pi), grid: int = 1001
) -> tuple[float, float]:
    """Maximal interval around the strongest violation where g > 0.

    A coarse grid brackets the boundary; bisection refines each end.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = domain
    phis = np.linspace(a, b, grid)
    g = violation_margin(phis)
    k = int(np.argmax(g))
    if g[k] <= 0:
        raise ValueError("g has no positive values on the domain")
    i = k
    while i > 0 and g[i - 1] > 0:
        i -= 1
    j = k
    while j < grid - 1 and g[j + 1] > 0:
        j += 1
    lo = a if i == 0 else _bisect(violation_margin, float(phis[i - 1]), float(phis[i]), tol)
    hi = b if j == grid - 1 else _bisect(violation_margin, float(phis[j]), float(phis[j + 1]), tol)
    return lo, hi


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_POLISH_WIDTH = 1e-6


def golden_section_max(func, lo: float, hi: float, tol: float) -> tuple[float, float, float]:
    """Golden-section search for a unimodal maximum; returns the final bracket and best point."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = func(x1), func(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = func(x2)
    return lo, hi, x1 if f1 >= f2 else x2


def find_max_violation(
    tol: float = DEFAULT_TOL, bracket: tuple[float, float] | None = None, grid: int = 1001
) -> tuple[float, float]:
    """Location and value of the largest g on the violation interval.

    Golden-section search on a grid-refined bracket. Near the peak g is flat
    to within rounding over ~1e-8 in phi, so the golden-section point is
    polished by bisection on the analytic slope when it changes sign nearby.
    """
    lo, hi = bracket if bracket is not None else find_violation_interval(tol)
    phis = np.linspace(lo, hi, grid)
    k = int(np.argmax(violation_margin(phis)))
    a = float(phis[max(k - 1, 0)])
    b = float(phis[min(k + 1, grid - 1)])
    _, _, best = golden_section_max(violation_margin, a, b, tol)
    # Rounding noise can steer the last golden steps off the peak; re-bracket
    # a little wider than that noise before polishing.
    pa, pb = max(a, best - _POLISH_WIDTH), min(b, best + _POLISH_WIDTH)
    if margin_slope(pa) > 0 > margin_slope(pb):
        best = _bisect(margin_slope, pa, pb, min(tol, 1e-15))
    return best, float(violation_margin(best))


@dataclass(frozen=True)
class ViolationScan:
    phis: tuple[float, ...]
    margins: tuple[float, ...]
    sprimes: tuple[float, ...]
    params: DetectorParams
    phi_star: float | None = None
    margin_max: float | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_CSV_HEADER)
        dp = self.params
        for phi, g, s in zip(self.phis, self.margins, self.sprimes):
            w.writerow([_fmt(x) for x in (phi, g, s, dp.eta1, dp.eta2, dp.f, dp.F)])
        return buf.getvalue()


class EmptyGridError(ValueError):
    pass


def scan(dp: DetectorParams, phi_grid: Sequence[float], sel: OutcomeSelector = OutcomeSelector()) -> ViolationScan:
    """Tabulate g and the assembled S' along a grid of phi values."""
    phis = [float(p) for p in phi_grid]
    if not phis:
        raise EmptyGridError("phi grid is empty")
    if any(b <= a for a, b in zip(phis, phis[1:])):
        raise ValueError("phi grid must be strictly increasing")
    margins = [float(violation_margin(p)) for p in phis]
    sprimes = [sprime_exp_qm(dp, AngleConfig.from_phi(p), sel) for p in phis]
    k = int(np.argmax(margins))
    return ViolationScan(tuple(phis), tuple(margins), tuple(sprimes), dp, phis[k], margins[k])


def _fmt(x: float) -> str:
    return format(x, ".12g")
