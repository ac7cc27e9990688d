"""Non-resonance checks: simple spectrum with pairwise-distinct spectral gaps.

Only gap distinctness is certified here. Full rational independence of the
eigenvalues is not decidable from floating-point spectra, and distinct gaps
are exactly what the coupling-graph criterion consumes; the report metadata
records this weakening.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .operators import ControlHamiltonian
from .spectrum import decompose

RES_TOL_SCALE = 1e-6
SIMPLE_TOL_SCALE = 1e-8

CERTIFIED_PROPERTY = "all pairwise spectral gaps distinct (rational independence not tested)"


@dataclass(frozen=True)
class ResonanceReport:
    """Gap-distinctness evidence at one control point."""

    u_bar: np.ndarray
    min_gap_separation: float
    simple: bool
    tau_res: float

    @property
    def passed(self) -> bool:
        return self.simple and self.min_gap_separation >= self.tau_res

    def to_json_dict(self) -> dict:
        return {
            "u_bar": [float(x) for x in self.u_bar],
            "min_gap_separation": self.min_gap_separation,
            "simple": self.simple,
            "tau_res": self.tau_res,
            "passed": self.passed,
            "certified_property": CERTIFIED_PROPERTY,
        }


def check_nonresonant(
    H: ControlHamiltonian, u, tau_res: float | None = None
) -> ResonanceReport:
    """Enumerate all unordered spectral gaps at u and measure their separation.

    The point passes when the spectrum is simple and the smallest difference
    between two distinct unordered gaps is at least tau_res (default
    1e-6 times the local spectral diameter). Frame-independent and
    deterministic.
    """
    sp = decompose(H, u)
    lam = sp.eigenvalues
    n = lam.shape[0]
    diameter = float(lam[-1] - lam[0])
    if tau_res is None:
        tau_res = RES_TOL_SCALE * diameter
    simple = all(sp.gap(j) >= SIMPLE_TOL_SCALE * max(1.0, diameter) for j in range(1, n))
    gaps = np.array([lam[k] - lam[j] for j in range(n) for k in range(j + 1, n)])
    if gaps.shape[0] < 2:
        min_sep = np.inf
    else:
        diffs = np.abs(gaps[:, None] - gaps[None, :])
        iu = np.triu_indices(gaps.shape[0], k=1)
        min_sep = float(np.min(diffs[iu]))
    return ResonanceReport(
        u_bar=np.asarray(u, dtype=float),
        min_gap_separation=min_sep,
        simple=simple,
        tau_res=float(tau_res),
    )


@dataclass(frozen=True)
class NonresonantSample:
    """Result of a randomized search for a non-resonant control point."""

    report: ResonanceReport | None
    tried: int
    acceptance_rate: float

    @property
    def found(self) -> bool:
        return self.report is not None

    def to_json_dict(self) -> dict:
        return {
            "found": self.found,
            "report": None if self.report is None else self.report.to_json_dict(),
            "tried": self.tried,
            "acceptance_rate": self.acceptance_rate,
        }


def sample_nonresonant(
    H: ControlHamiltonian,
    budget: int,
    rng_seed: int,
    tau_res: float | None = None,
) -> NonresonantSample:
    """Draw up to ``budget`` uniform points from the box; return the first pass.

    Non-resonant points are generically dense, so random search succeeds on
    well-behaved families; exhausting the budget signals a resonant family
    (e.g. a spectrum frozen by zero-acting controls). The acceptance rate over
    all evaluated candidates is recorded either way.
    """
    if budget < 1:
        raise PreconditionError("budget must be at least 1")
    rng = np.random.default_rng(rng_seed)
    lo, hi = H.box[:, 0], H.box[:, 1]
    # all candidates are drawn up front so the result is the first pass by
    # index even if the evaluation order ever changes
    candidates = lo + rng.random((budget, H.m)) * (hi - lo)
    first_pass: ResonanceReport | None = None
    passes = 0
    for u in candidates:
        report = check_nonresonant(H, u, tau_res=tau_res)
        if report.passed:
            passes += 1
            if first_pass is None:
                first_pass = report
    return NonresonantSample(report=first_pass, tried=budget, acceptance_rate=passes / budget)
