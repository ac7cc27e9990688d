"""Slow control paths through conical intersections and Schrodinger propagation.

A passage is a straight, constant-speed traversal of a certified intersection:
the path runs through the degeneracy point collinearly, entering and leaving
at radius rho. Passing the cone exchanges the two crossing sorted levels, so
chaining passages through the intersections of levels (1,2), (2,3), ...
climbs an initial ground state toward the top level. Populations are measured
against instantaneous eigenframes; relative phases are not controlled.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conical import ConicalCertificate, ConnectednessReport
from .errors import (
    BudgetError,
    GeometryError,
    PreconditionError,
    StructuralError,
)
from .operators import ControlHamiltonian
from .resonance import check_nonresonant
from .spectrum import _BranchContinuer, decompose

UNIT_NORM_TOL = 1e-9
DEFAULT_STEP_LIMIT = 0.1
MAX_TOTAL_STEPS = 10**8
DEFAULT_MAX_RECORDS = 1200


@dataclass(frozen=True)
class ControlPath:
    """Piecewise-linear control schedule with a slowness parameter.

    ``durations[i]`` is the time spent on the segment from waypoint i to
    waypoint i+1. A single waypoint with one duration holds the control
    constant for that time. Total time scales as 1/epsilon when built by the
    planners here.
    """

    waypoints: tuple
    durations: np.ndarray
    epsilon: float

    def __post_init__(self):
        wps = tuple(np.asarray(w, dtype=float) for w in self.waypoints)
        if not wps:
            raise StructuralError("a path needs at least one waypoint")
        dur = np.asarray(self.durations, dtype=float)
        expected = 1 if len(wps) == 1 else len(wps) - 1
        if dur.shape != (expected,):
            raise StructuralError(
                f"expected {expected} durations for {len(wps)} waypoints, got {dur.shape}"
            )
        if not np.all(dur > 0):
            raise StructuralError("all segment durations must be positive")
        if self.epsilon <= 0:
            raise StructuralError("epsilon must be positive")
        for w in wps:
            w.setflags(write=False)
        dur.setflags(write=False)
        object.__setattr__(self, "waypoints", wps)
        object.__setattr__(self, "durations", dur)

    @property
    def total_time(self) -> float:
        return float(np.sum(self.durations))

    def segments(self):
        """Yield (start, end, duration) triples; a held point yields one."""
        if len(self.waypoints) == 1:
            yield self.waypoints[0], self.waypoints[0], float(self.durations[0])
            return
        for i in range(len(self.waypoints) - 1):
            yield self.waypoints[i], self.waypoints[i + 1], float(self.durations[i])

    def to_json_dict(self) -> dict:
        return {
            "waypoints": [[float(x) for x in w] for w in self.waypoints],
            "durations": [float(d) for d in self.durations],
            "epsilon": self.epsilon,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True, indent=2))


def load_path(path) -> ControlPath:
    d = json.loads(Path(path).read_text())
    try:
        return ControlPath(
            waypoints=tuple(np.asarray(w, dtype=float) for w in d["waypoints"]),
            durations=np.asarray(d["durations"], dtype=float),
            epsilon=float(d["epsilon"]),
        )
    except KeyError as exc:
        raise StructuralError(f"malformed path document: missing {exc}") from exc


@dataclass(frozen=True)
class StateTrajectory:
    """Simulated states on a recorded time grid with branch populations.

    ``populations[k, b-1]`` is |<phi_b(u(t_k)), psi(t_k)>|^2 for the branch
    carrying label b; labels start as the sorted levels at t=0 and follow the
    eigenframes by maximal overlap, exchanging sorted positions at crossings.
    """

    times: np.ndarray
    controls: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    labels: np.ndarray
    norm_defect: np.ndarray

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def final_population_sorted(self, level: int) -> float:
        """Population of the sorted level (1-based) at the final control point."""
        branch = int(self.labels[-1, level - 1])
        return float(self.populations[-1, branch - 1])

    def save_csv(self, path) -> None:
        m = self.controls.shape[1]
        n = self.populations.shape[1]
        header = (
            ["t"]
            + [f"u_{l + 1}" for l in range(m)]
            + [f"pop_{b + 1}" for b in range(n)]
            + ["norm_defect"]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(self.times.shape[0]):
                row = [repr(float(self.times[k]))]
                row += [repr(float(x)) for x in self.controls[k]]
                row += [repr(float(x)) for x in self.populations[k]]
                row.append(repr(float(self.norm_defect[k])))
                writer.writerow(row)


def _step_unitary(mat: np.ndarray, h: float) -> np.ndarray:
    """exp(-i h H) for Hermitian H via eigendecomposition (unitary to roundoff)."""
    lam, vecs = np.linalg.eigh(mat)
    phases = np.exp(-1j * h * lam)
    return (vecs * phases[None, :]) @ vecs.conj().T


def branch_populations(frame: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """|<phi_j, psi>|^2 per frame column; invariant under column phases."""
    amps = frame.conj().T @ psi
    return np.abs(amps) ** 2


def propagate(
    H: ControlHamiltonian,
    path: ControlPath,
    psi0,
    step_limit: float = DEFAULT_STEP_LIMIT,
    max_records: int = DEFAULT_MAX_RECORDS,
) -> StateTrajectory:
    """Integrate i d/dt psi = H(u(t)) psi along a piecewise-linear control path.

    Each step applies the exact exponential of the Hamiltonian frozen at the
    segment midpoint of the step (second-order accurate, exactly unitary per
    step). Step sizes are chosen so that ||H|| * h <= step_limit on every
    segment.

    Raises
    ------
    BudgetError
        If the required number of steps exceeds 1e8; slower paths should use
        a larger epsilon.
    """
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(float(np.linalg.norm(psi)) - 1.0) > UNIT_NORM_TOL:
        raise PreconditionError("initial state must have unit norm")
    for w in path.waypoints:
        if not H.contains(w):
            raise GeometryError(f"waypoint {w.tolist()} lies outside the control box")
    segs = list(path.segments())
    steps_per_seg = []
    for a, b, dur in segs:
        nb = max(H.norm_bound(a), H.norm_bound(b))
        nsteps = max(1, math.ceil(dur * nb / step_limit))
        steps_per_seg.append(nsteps)
    total_steps = int(np.sum(steps_per_seg))
    if total_steps > MAX_TOTAL_STEPS:
        raise BudgetError(
            f"path requires {total_steps} steps (> {MAX_TOTAL_STEPS}); increase epsilon"
        )
    stride = max(1, total_steps // max_records)
    times = [0.0]
    controls = [np.array(segs[0][0])]
    states = [psi.copy()]
    t = 0.0
    step_count = 0
    for (a, b, dur), nsteps in zip(segs, steps_per_seg):
        h = dur / nsteps
        delta = b - a
        for i in range(nsteps):
            frac = (i + 0.5) / nsteps
            u_mid = a + frac * delta
            psi = _step_unitary(H.matrix_at(u_mid), h) @ psi
            t += h
            step_count += 1
            if step_count % stride == 0 or i == nsteps - 1:
                times.append(t)
                controls.append(a + ((i + 1) / nsteps) * delta)
                states.append(psi.copy())
    times_arr = np.asarray(times)
    controls_arr = np.vstack(controls)
    states_arr = np.vstack(states)
    norm_defect = np.abs(np.linalg.norm(states_arr, axis=1) - 1.0)
    n = H.dim
    populations = np.empty((times_arr.shape[0], n))
    labels = np.empty((times_arr.shape[0], n), dtype=int)
    first = decompose(H, controls_arr[0])
    continuer = _BranchContinuer(first)
    labels[0] = continuer.labels
    # branch_populations returns values by sorted position; store by label
    populations[0, labels[0] - 1] = branch_populations(first.frame, states_arr[0])
    for k in range(1, times_arr.shape[0]):
        sp = decompose(H, controls_arr[k])
        labels[k] = continuer.step(sp)
        populations[k, labels[k] - 1] = branch_populations(sp.frame, states_arr[k])
    return StateTrajectory(
        times=times_arr,
        controls=controls_arr,
        states=states_arr,
        populations=populations,
        labels=labels,
        norm_defect=norm_defect,
    )


def plan_passage(
    H: ControlHamiltonian,
    cert: ConicalCertificate,
    rho: float,
    epsilon: float,
    direction=None,
) -> ControlPath:
    """Plan a straight constant-speed passage through a certified intersection.

    The path enters at u* + rho*d, crosses u*, and exits at u* - rho*d along
    the same line; collinear crossing keeps the traversal on the analytic
    eigenvalue branches, which is what exchanges the two sorted levels. Each
    leg takes rho/epsilon time units.

    Raises
    ------
    GeometryError
        If the ball of radius rho around the intersection leaves the box.
    """
    if rho <= 0:
        raise GeometryError("rho must be positive")
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    u_star = np.asarray(cert.u_star, dtype=float)
    if not H.contains(u_star, margin=rho):
        raise GeometryError(
            f"ball of radius {rho:.3g} around {u_star.tolist()} does not fit in the box"
        )
    if direction is None:
        d = np.zeros(H.m)
        d[0] = 1.0
    else:
        d = np.asarray(direction, dtype=float)
        nd = float(np.linalg.norm(d))
        if nd == 0:
            raise GeometryError("passage direction must be nonzero")
        d = d / nd
    waypoints = (u_star + rho * d, u_star, u_star - rho * d)
    durations = np.array([rho / epsilon, rho / epsilon])
    return ControlPath(waypoints=waypoints, durations=durations, epsilon=epsilon)


def _segment_clearance(a: np.ndarray, b: np.ndarray, p: np.ndarray):
    """Distance from p to segment [a, b] and the closest-approach parameter."""
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p - a)), 0.0
    s = float(np.clip((p - a) @ d / dd, 0.0, 1.0))
    q = a + s * d
    return float(np.linalg.norm(p - q)), s


def _perpendicular(d: np.ndarray) -> np.ndarray:
    """A unit vector orthogonal to d (m >= 2)."""
    m = d.shape[0]
    base = np.zeros(m)
    base[int(np.argmin(np.abs(d)))] = 1.0
    nd = float(d @ d)
    perp = base - (base @ d / nd) * d if nd > 0 else base
    return perp / float(np.linalg.norm(perp))


def _route(a, b, obstacles, delta, box, depth: int = 8) -> list:
    """Intermediate waypoints steering segment [a, b] at least delta away from obstacles."""
    if depth <= 0:
        return []
    worst = None
    for p in obstacles:
        dist, s = _segment_clearance(a, b, p)
        if dist < delta and 1e-9 < s < 1 - 1e-9:
            if worst is None or dist < worst[0]:
                worst = (dist, s, p)
    if worst is None:
        return []
    dist, s, p = worst
    q = a + s * (b - a)
    away = q - p
    if float(np.linalg.norm(away)) > 1e-12:
        away = away / float(np.linalg.norm(away))
    else:
        away = _perpendicular(b - a)
    detour = np.clip(q + delta * away, box[:, 0], box[:, 1])
    return (
        _route(a, detour, obstacles, delta, box, depth - 1)
        + [detour]
        + _route(detour, b, obstacles, delta, box, depth - 1)
    )


@dataclass(frozen=True)
class ClimbResult:
    """A chained-passage plan, its simulated trajectory, and the achieved transfer."""

    path: ControlPath
    trajectory: StateTrajectory
    p_target: float
    target_level: int


def climb(
    H: ControlHamiltonian,
    report: ConnectednessReport,
    u_anchor,
    epsilon: float,
    rho: float | None = None,
    delta: float | None = None,
) -> ClimbResult:
    """Steer the ground state toward the top level through chained passages.

    Starting from the first eigenstate at a non-resonant anchor point, the
    path traverses the certified intersections of levels (1,2), ..., (n-1,n)
    in order. Each passage is straight through its intersection, aimed at the
    next one; connectors between passages detour by a perpendicular offset
    whenever they would come within ``delta`` of another located intersection.
    Returns the plan, the trajectory, and the final population of the top
    sorted level at the end point.

    Raises
    ------
    PreconditionError
        If the report is not certified or the anchor is resonant.
    """
    if not report.certified:
        raise PreconditionError("climb requires a certified connectedness report")
    u_anchor = np.asarray(u_anchor, dtype=float)
    if not check_nonresonant(H, u_anchor).passed:
        raise PreconditionError("anchor point must be non-resonant")
    n = H.dim
    points = [np.asarray(report.certificates[j].u_star, dtype=float) for j in range(1, n)]
    box = H.box
    if rho is None:
        clearances = [
            min(float(np.min(p - box[:, 0])), float(np.min(box[:, 1] - p))) for p in points
        ]
        rho = 0.8 * min(clearances)
        rho = min(rho, 0.25 * H.box_diameter())
    if rho <= 0:
        raise GeometryError("no positive passage radius fits inside the box")
    if delta is None:
        delta = 0.5 * rho
    directions = []
    for i, p in enumerate(points):
        if i + 1 < len(points):
            w = points[i + 1] - p
        elif i > 0:
            w = p - points[i - 1]
        else:
            w = p - u_anchor
        nw = float(np.linalg.norm(w))
        if nw <= 1e-12:
            w = np.zeros(H.m)
            w[0] = 1.0
            nw = 1.0
        directions.append(w / nw)
    waypoints = [u_anchor]
    for i, (p, w) in enumerate(zip(points, directions)):
        entry = p - rho * w
        exitp = p + rho * w
        if not (H.contains(entry) and H.contains(exitp) and H.contains(p, margin=rho * 0.0)):
            raise GeometryError(
                f"passage of radius {rho:.3g} at {p.tolist()} leaves the control box"
            )
        obstacles = [q for q in points if q is not p]
        waypoints += _route(waypoints[-1], entry, obstacles, delta, box)
        waypoints += [entry, p, exitp]
    deduped = [waypoints[0]]
    scale = max(H.box_diameter(), 1.0)
    for w in waypoints[1:]:
        if float(np.linalg.norm(w - deduped[-1])) > 1e-12 * scale:
            deduped.append(w)
    if len(deduped) < 2:
        raise GeometryError("climb path degenerated to a single point")
    durations = np.array(
        [
            float(np.linalg.norm(deduped[i + 1] - deduped[i])) / epsilon
            for i in range(len(deduped) - 1)
        ]
    )
    path = ControlPath(waypoints=tuple(deduped), durations=durations, epsilon=epsilon)
    psi0 = decompose(H, u_anchor).frame[:, 0]
    trajectory = propagate(H, path, psi0)
    end_frame = decompose(H, deduped[-1]).frame
    p_target = float(np.abs(end_frame[:, n - 1].conj() @ trajectory.final_state) ** 2)
    return ClimbResult(path=path, trajectory=trajectory, p_target=p_target, target_level=n)
