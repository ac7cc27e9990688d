"""Ordered spectra with eigenvector frames, and branch tracking along paths."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NumericalError, PreconditionError, RefinementNeededError, StructuralError
from .operators import ControlHamiltonian

RESIDUAL_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralPoint:
    """Eigenvalues (ascending, repeated by multiplicity) and an orthonormal frame.

    ``frame[:, j]`` is the eigenvector of ``eigenvalues[j]``; levels are 1-based
    in the public API, so level j corresponds to column j-1.
    """

    u: np.ndarray
    eigenvalues: np.ndarray
    frame: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def gap(self, j: int) -> float:
        """Adjacent gap lambda_{j+1} - lambda_j for 1 <= j <= n-1."""
        if not 1 <= j <= self.dim - 1:
            raise PreconditionError(f"level index must be in 1..{self.dim - 1}, got {j}")
        return float(self.eigenvalues[j] - self.eigenvalues[j - 1])

    def diameter(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


@dataclass(frozen=True)
class GapTable:
    """All ordered-pair spectral gaps gaps[j-1, k-1] = lambda_j - lambda_k."""

    gaps: np.ndarray

    @classmethod
    def from_point(cls, sp: SpectralPoint) -> "GapTable":
        lam = sp.eigenvalues
        return cls(gaps=lam[:, None] - lam[None, :])

    def __call__(self, j: int, k: int) -> float:
        return float(self.gaps[j - 1, k - 1])


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = np.array(vecs)
    idx = np.argmax(np.abs(out), axis=0)
    for j, i in enumerate(idx):
        z = out[i, j]
        a = abs(z)
        if a > 0:
            out[:, j] *= np.conj(z) / a
    return out


def decompose(H: ControlHamiltonian, u, check: bool = True) -> SpectralPoint:
    """Eigendecompose H(u) with ascending eigenvalues and a phase-fixed frame.

    Deterministic for a fixed input: eigenvalue order is ascending and each
    eigenvector's largest-magnitude component is made real positive.

    Raises
    ------
    NumericalError
        If the eigensolver fails to converge or the residual / orthonormality /
        trace invariants exceed their tolerances (carries the residual).
    """
    u = np.asarray(u, dtype=float)
    mat = H.matrix_at(u)
    try:
        lam, vecs = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge at u={u.tolist()}") from exc
    vecs = _fix_phases(vecs)
    if check:
        hnorm = float(np.max(np.abs(lam))) if lam.size else 0.0
        resid = float(np.max(np.linalg.norm(mat @ vecs - vecs * lam[None, :], axis=0)))
        if resid > RESIDUAL_TOL * (1.0 + hnorm):
            raise NumericalError("eigenpair residual above tolerance", residual=resid)
        ortho = float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(H.dim))))
        if ortho > ORTHONORMALITY_TOL:
            raise NumericalError("frame not orthonormal to tolerance", residual=ortho)
        tr = float(np.trace(mat).real)
        if abs(float(np.sum(lam)) - tr) > RESIDUAL_TOL * (1.0 + abs(tr)):
            raise NumericalError("eigenvalue sum does not match trace", residual=abs(np.sum(lam) - tr))
    lam.setflags(write=False)
    vecs.setflags(write=False)
    u = np.array(u)
    u.setflags(write=False)
    return SpectralPoint(u=u, eigenvalues=lam, frame=vecs)


def gap(sp: SpectralPoint, j: int) -> float:
    """Adjacent spectral gap at a decomposed point (1-based level index)."""
    return sp.gap(j)


def _greedy_match(frame_old: np.ndarray, frame_new: np.ndarray) -> np.ndarray:
    """Assign new columns to old columns by descending overlap.

    Returns ``match`` with match[new_col] = old_col. Greedy over descending
    |<phi_old, phi_new>|; ties broken by (old, new) index order.
    """
    n = frame_old.shape[1]
    overlap = np.abs(frame_old.conj().T @ frame_new)
    match = np.full(n, -1)
    used_old = np.zeros(n, dtype=bool)
    used_new = np.zeros(n, dtype=bool)
    flat = [(-overlap[i, j], i, j) for i in range(n) for j in range(n)]
    flat.sort()
    assigned = 0
    for _, i, j in flat:
        if used_old[i] or used_new[j]:
            continue
        match[j] = i
        used_old[i] = True
        used_new[j] = True
        assigned += 1
        if assigned == n:
            break
    return match


class _BranchContinuer:
    """Carries branch labels along a frame sequence by maximal overlap.

    Labels are matched against the last frame seen at a point with a
    non-degenerate spectrum; frames at (numerically) degenerate points are
    ambiguous within the crossing pair and are skipped as references, which
    is what makes the two crossing labels exchange sorted positions across
    an exact crossing.
    """

    def __init__(self, first: SpectralPoint):
        self.labels = np.arange(1, first.dim + 1)
        self.ref_frame = first.frame
        self.ref_labels = self.labels.copy()

    @staticmethod
    def _nondegenerate(sp: SpectralPoint) -> bool:
        tol = 1e-8 * max(1.0, sp.diameter())
        return all(sp.gap(j) > tol for j in range(1, sp.dim))

    def step(self, sp: SpectralPoint) -> np.ndarray:
        match = _greedy_match(self.ref_frame, sp.frame)
        self.labels = self.ref_labels[match]
        if self._nondegenerate(sp):
            self.ref_frame = sp.frame
            self.ref_labels = self.labels.copy()
        return self.labels.copy()


@dataclass(frozen=True)
class TrackedSpectrum:
    """Spectra along a path with branch labels continued by frame overlap.

    ``labels[k, p]`` is the branch label occupying sorted position p (0-based
    here) at step k; labels start as 1..n at the first point and two labels
    exchange sorted positions when their branches cross.
    """

    points: tuple
    labels: np.ndarray
    lipschitz_bound: float

    def branch_values(self, label: int) -> np.ndarray:
        """Eigenvalue series of one labeled branch."""
        out = np.empty(len(self.points))
        for k, sp in enumerate(self.points):
            pos = int(np.nonzero(self.labels[k] == label)[0][0])
            out[k] = sp.eigenvalues[pos]
        return out


def track(
    H: ControlHamiltonian,
    path,
    step_bound: float | None = None,
) -> TrackedSpectrum:
    """Track eigenvalue branches continuously along a control-space path.

    Parameters
    ----------
    H : ControlHamiltonian
    path : sequence of control points
    step_bound : float, optional
        Maximum allowed Euclidean distance between consecutive points;
        defaults to 5% of the box diameter.

    Raises
    ------
    RefinementNeededError
        If two consecutive path points are farther apart than ``step_bound``.
    """
    pts = [np.asarray(p, dtype=float) for p in path]
    if not pts:
        raise StructuralError("path must contain at least one point")
    if step_bound is None:
        step_bound = 0.05 * H.box_diameter()
    for k in range(len(pts) - 1):
        d = float(np.linalg.norm(pts[k + 1] - pts[k]))
        if d > step_bound:
            raise RefinementNeededError(
                f"path step {k}->{k + 1} has length {d:.3g} > step bound {step_bound:.3g}; refine the path"
            )
    n = H.dim
    lip = float(np.sum(H.control_norms()))
    margin = 1e-7 * (1.0 + lip)
    points = []
    labels = np.empty((len(pts), n), dtype=int)
    first = decompose(H, pts[0])
    points.append(first)
    continuer = _BranchContinuer(first)
    labels[0] = continuer.labels
    prev = first
    for k in range(1, len(pts)):
        sp = decompose(H, pts[k])
        labels[k] = continuer.step(sp)
        # Lipschitz sanity per labeled branch; a gross violation means the
        # matching lost a branch, which refinement would have prevented.
        step = float(np.linalg.norm(pts[k] - pts[k - 1]))
        for b in range(1, n + 1):
            pos_new = int(np.nonzero(labels[k] == b)[0][0])
            pos_old = int(np.nonzero(labels[k - 1] == b)[0][0])
            dv = abs(sp.eigenvalues[pos_new] - prev.eigenvalues[pos_old])
            if dv > 2.0 * (lip * step + margin):
                raise NumericalError(
                    f"branch continuation jumped by {dv:.3g} over a step of {step:.3g}",
                    residual=dv,
                )
        points.append(sp)
        prev = sp
    return TrackedSpectrum(points=tuple(points), labels=labels, lipschitz_bound=lip + margin)


def save_track_csv(tracked: TrackedSpectrum, path) -> None:
    """Write tracked spectra as CSV: step, u_1..u_m, lambda_1..lambda_n, branch labels."""
    m = tracked.points[0].u.shape[0]
    n = tracked.points[0].dim
    header = (
        ["step"]
        + [f"u_{l + 1}" for l in range(m)]
        + [f"lambda_{j + 1}" for j in range(n)]
        + [f"branch_{j + 1}" for j in range(n)]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, sp in enumerate(tracked.points):
            row = [k]
            row += [repr(float(x)) for x in sp.u]
            row += [repr(float(x)) for x in sp.eigenvalues]
            row += [int(x) for x in tracked.labels[k]]
            writer.writerow(row)
