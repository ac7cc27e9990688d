"""End-to-end controllability certification and genericity ensemble experiments.

The verdict's ground truth is the computed Lie closure; the spectral pipeline
(conical connectedness, non-resonance, coupling graph) is recorded as
evidence and cross-checked against the closure: certified connectedness plus
a connected graph at a non-resonant point predicts a full closure.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .conical import (
    ConnectednessReport,
    certify_connectedness,
    degeneracy_tol,
    locate_intersection,
    test_conicality,
)
from .coupling import CouplingGraph, build_graph, is_connected
from .errors import SpeccertError
from .lie_closure import (
    LieClosureResult,
    TransitivityVerdict,
    classify_transitive,
    closure,
    generators_from,
)
from .operators import ControlHamiltonian, HermitianOperator
from .resonance import NonresonantSample, sample_nonresonant
from .sampling import box_sequence, random_hermitian, random_symmetric
from .spectrum import decompose

SCHEMA_VERSION = "speccert-certificate/1"

VERDICT_NOT_CERTIFIED = "not-certified"


@dataclass(frozen=True)
class CertifyConfig:
    """Tunable budgets, seeds, and tolerance overrides for the full pipeline."""

    rng_seed: int = 0
    seed_budget: int = 8
    resonance_budget: int = 200
    tol_deg: float | None = None
    tol_res: float | None = None
    include_basis: bool = False


@dataclass(frozen=True)
class ControllabilityCertificate:
    """Machine-readable record of one certification run."""

    n: int
    m: int
    connectedness: ConnectednessReport | None
    resonance: NonresonantSample | None
    graph: CouplingGraph | None
    graph_connected: bool | None
    closure_result: LieClosureResult | None
    transitivity: TransitivityVerdict | None
    verdict: str
    agreement: dict
    provenance: dict
    errors: tuple

    @property
    def controllable(self) -> bool:
        return self.verdict != VERDICT_NOT_CERTIFIED

    def to_json_dict(self, include_basis: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "m": self.m,
            "connectedness": None
            if self.connectedness is None
            else self.connectedness.to_json_dict(),
            "resonance": None if self.resonance is None else self.resonance.to_json_dict(),
            "graph": None if self.graph is None else self.graph.to_json_dict(),
            "graph_connected": self.graph_connected,
            "closure": None
            if self.closure_result is None
            else self.closure_result.to_json_dict(include_basis=include_basis),
            "transitivity": None
            if self.transitivity is None
            else self.transitivity.to_json_dict(),
            "verdict": self.verdict,
            "agreement": self.agreement,
            "provenance": self.provenance,
            "errors": list(self.errors),
        }

    def to_json(self, include_basis: bool = False) -> str:
        return json.dumps(self.to_json_dict(include_basis=include_basis), sort_keys=True)

    def save(self, path, include_basis: bool = False) -> None:
        with open(path, "w") as fh:
            json.dump(
                self.to_json_dict(include_basis=include_basis), fh, sort_keys=True, indent=2
            )


def _verdict_from_closure(result: LieClosureResult, n: int) -> str:
    if result.dimension == n * n:
        return f"exactly-controllable-U({n})"
    if result.dimension == n * n - 1 and result.traceless_generators:
        return f"exactly-controllable-SU({n})"
    return VERDICT_NOT_CERTIFIED


def certify(H: ControlHamiltonian, config: CertifyConfig | None = None) -> ControllabilityCertificate:
    """Run the full certification pipeline on one control-affine family.

    Stages: conical-connectedness search, non-resonant point sampling,
    coupling graph at that point, Lie closure with transitivity
    classification. Failed stages are recorded and the remaining stages still
    run; the verdict comes from the closure alone.
    """
    cfg = config or CertifyConfig()
    errors: list = []
    connectedness = None
    resonance = None
    graph = None
    graph_connected = None
    closure_result = None
    transitivity = None
    try:
        connectedness = certify_connectedness(
            H, cfg.seed_budget, rng_seed=cfg.rng_seed, tau_deg=cfg.tol_deg
        )
    except SpeccertError as exc:
        errors.append(f"connectedness: {exc}")
    try:
        resonance = sample_nonresonant(
            H, cfg.resonance_budget, rng_seed=cfg.rng_seed, tau_res=cfg.tol_res
        )
        if resonance.found:
            sp = decompose(H, resonance.report.u_bar)
            graph = build_graph(H, sp)
            graph_connected, _ = is_connected(graph)
    except SpeccertError as exc:
        errors.append(f"resonance/graph: {exc}")
    try:
        closure_result = closure(generators_from(H))
        transitivity = classify_transitive(closure_result, H.dim)
    except SpeccertError as exc:
        errors.append(f"closure: {exc}")
    verdict = (
        _verdict_from_closure(closure_result, H.dim)
        if closure_result is not None
        else VERDICT_NOT_CERTIFIED
    )
    spectral_predicts = bool(
        connectedness is not None
        and connectedness.certified
        and resonance is not None
        and resonance.found
        and graph_connected
    )
    closure_controllable = verdict != VERDICT_NOT_CERTIFIED
    agreement = {
        "spectral_pipeline_predicts_controllable": spectral_predicts,
        "closure_controllable": closure_controllable,
        # sufficiency runs one way: a certified spectral pipeline must imply a
        # full closure, while a full closure needs no spectral certificate
        "consistent": (not spectral_predicts) or closure_controllable,
    }
    provenance = {
        "rng_seed": cfg.rng_seed,
        "seed_budget": cfg.seed_budget,
        "resonance_budget": cfg.resonance_budget,
        "tau_deg": cfg.tol_deg if cfg.tol_deg is not None else degeneracy_tol(H),
        "tau_res_override": cfg.tol_res,
        "box": H.box.tolist(),
    }
    return ControllabilityCertificate(
        n=H.dim,
        m=H.m,
        connectedness=connectedness,
        resonance=resonance,
        graph=graph,
        graph_connected=graph_connected,
        closure_result=closure_result,
        transitivity=transitivity,
        verdict=verdict,
        agreement=agreement,
        provenance=provenance,
        errors=tuple(errors),
    )


@dataclass(frozen=True)
class EnsembleTrial:
    """One random instance: located intersections, conicality, persistence."""

    trial: int
    located: int
    conical: int
    persistence_attempts: int
    persistence_successes: int


@dataclass(frozen=True)
class EnsembleSummary:
    """Aggregate genericity statistics over random Hamiltonian ensembles."""

    n: int
    m: int
    trials: int
    rng_seed: int
    located_total: int
    conical_total: int
    conical_fraction: float | None
    persistence_attempts: int
    persistence_successes: int
    persistence_fraction: float | None
    per_trial: tuple

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "rng_seed": self.rng_seed,
            "located_total": self.located_total,
            "conical_total": self.conical_total,
            "conical_fraction": self.conical_fraction,
            "persistence_attempts": self.persistence_attempts,
            "persistence_successes": self.persistence_successes,
            "persistence_fraction": self.persistence_fraction,
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=2)

    def save_trials_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["trial", "located", "conical", "persistence_attempts", "persistence_successes"]
            )
            for row in self.per_trial:
                writer.writerow(
                    [
                        row.trial,
                        row.located,
                        row.conical,
                        row.persistence_attempts,
                        row.persistence_successes,
                    ]
                )


def _random_family(rng, n: int, m: int, box_halfwidth: float) -> ControlHamiltonian:
    draw = random_symmetric if m == 2 else random_hermitian
    ops = [HermitianOperator(draw(rng, n)) for _ in range(m + 1)]
    box = np.array([[-box_halfwidth, box_halfwidth]] * m)
    return ControlHamiltonian(drift=ops[0], controlled=tuple(ops[1:]), box=box)


def _perturbed(H: ControlHamiltonian, rng, rel_size: float) -> ControlHamiltonian:
    draw = random_symmetric if all(
        np.allclose(h.matrix.imag, 0) for h in (H.drift, *H.controlled)
    ) else random_hermitian

    def bump(op: HermitianOperator) -> HermitianOperator:
        scale = rel_size * max(op.operator_norm(), 1e-300)
        return HermitianOperator(op.matrix + scale * draw(rng, H.dim))

    return ControlHamiltonian(
        drift=bump(H.drift),
        controlled=tuple(bump(h) for h in H.controlled),
        box=H.box,
    )


def ensemble_genericity(
    n: int,
    m: int,
    trials: int,
    rng_seed: int,
    box_halfwidth: float = 3.0,
    seeds_per_level: int = 6,
    perturbation: float = 1e-3,
) -> EnsembleSummary:
    """Measure how often located eigenvalue intersections are conical and stable.

    Per trial, draws a random family (real symmetric operators for m=2,
    complex Hermitian for m=3, unit spectral norm), locates adjacent-level
    intersections inside a fixed box, runs the conicality test on each located
    point, and probes structural stability: after a relative perturbation of
    the operators, a certified intersection must be re-locatable nearby
    (within 10x the perturbation size).

    Fractions are None when no intersection was located (vacuous statistics).
    """
    if m not in (2, 3):
        raise SpeccertError("ensemble experiments are defined for m in {2, 3}")
    if trials < 1:
        raise SpeccertError("trials must be at least 1")
    rng = np.random.default_rng(rng_seed)
    per_trial = []
    located_total = conical_total = 0
    pa_total = ps_total = 0
    for t in range(trials):
        H = _random_family(rng, n, m, box_halfwidth)
        tau = degeneracy_tol(H)
        seeds = box_sequence(H.box, seeds_per_level, rng_seed + 1000 + t)
        located = conical = 0
        p_attempts = p_success = 0
        for j in range(1, n):
            u_star = locate_intersection(H, j, seeds, tau_deg=tau)
            if u_star is None:
                continue
            located += 1
            try:
                result = test_conicality(H, u_star, j, tau_deg=tau, rng_seed=rng_seed)
            except SpeccertError:
                continue
            if not result.conical:
                continue
            conical += 1
            Hp = _perturbed(H, rng, perturbation)
            p_attempts += 1
            tau_p = degeneracy_tol(Hp)
            u_new = locate_intersection(Hp, j, [u_star], tau_deg=tau_p)
            if u_new is not None and float(np.linalg.norm(u_new - u_star)) <= 10 * perturbation:
                p_success += 1
        per_trial.append(
            EnsembleTrial(
                trial=t,
                located=located,
                conical=conical,
                persistence_attempts=p_attempts,
                persistence_successes=p_success,
            )
        )
        located_total += located
        conical_total += conical
        pa_total += p_attempts
        ps_total += p_success
    return EnsembleSummary(
        n=n,
        m=m,
        trials=trials,
        rng_seed=rng_seed,
        located_total=located_total,
        conical_total=conical_total,
        conical_fraction=None if located_total == 0 else conical_total / located_total,
        persistence_attempts=pa_total,
        persistence_successes=ps_total,
        persistence_fraction=None if pa_total == 0 else ps_total / pa_total,
        per_trial=tuple(per_trial),
    )
