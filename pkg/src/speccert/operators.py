"""Control-affine Hermitian operator families H(u) = H0 + sum_l u_l H_l.

Control points are plain real ndarrays of length m; the control domain is an
axis-aligned box given per axis as a closed interval [lo_l, hi_l].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import StructuralError

# Absolute per-entry tolerance for accepting a matrix as Hermitian.
HERMITICITY_TOL = 1e-12


def hermiticity_defect(matrix) -> float:
    """Largest entrywise |A - A^dagger|."""
    a = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)))


@dataclass(frozen=True)
class ValidityReport:
    dim: int
    defect: float
    accepted: bool


def validate(matrix) -> ValidityReport:
    """Check a square matrix for Hermiticity.

    Accepts a raw array or a HermitianOperator. The report accepts the
    matrix iff its Hermiticity defect is at most ``HERMITICITY_TOL``.

    Raises
    ------
    StructuralError
        If the input is not a square matrix.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {a.shape}")
    defect = hermiticity_defect(a)
    return ValidityReport(dim=a.shape[0], defect=defect, accepted=defect <= HERMITICITY_TOL)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HermitianOperator:
    """An n x n Hermitian matrix, n >= 2, immutable after construction."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise StructuralError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 2:
            raise StructuralError("operator dimension must be at least 2")
        defect = hermiticity_defect(a)
        if defect > HERMITICITY_TOL:
            raise StructuralError(
                f"matrix is not Hermitian (defect {defect:.3e} > {HERMITICITY_TOL:.0e}); "
                "use HermitianOperator.from_array(..., symmetrize=True) to fold it explicitly"
            )
        object.__setattr__(self, "matrix", _freeze(a))

    @classmethod
    def from_array(cls, matrix, symmetrize: bool = False) -> "HermitianOperator":
        """Build from an array; with symmetrize=True replace A by (A + A^dagger)/2."""
        a = np.asarray(matrix, dtype=complex)
        if symmetrize:
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise StructuralError(f"expected a square matrix, got shape {a.shape}")
            a = (a + a.conj().T) / 2
        return cls(a)

    @classmethod
    def from_real_imag(cls, re, im) -> "HermitianOperator":
        return cls(np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m.astype(dtype) if dtype is not None else np.array(m, copy=True)

    def operator_norm(self) -> float:
        """Spectral norm (largest absolute eigenvalue)."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def to_json_dict(self) -> dict:
        return {"re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "HermitianOperator":
        return cls.from_real_imag(d["re"], d["im"])


@dataclass(frozen=True)
class ControlHamiltonian:
    """Affine family H(u) = drift + sum_l u_l * controlled[l] over a box.

    Parameters
    ----------
    drift : HermitianOperator
        The control-independent part.
    controlled : tuple of HermitianOperator
        The m >= 2 controlled operators.
    box : (m, 2) array
        Closed control intervals [lo_l, hi_l] per axis, lo_l < hi_l.
    """

    drift: HermitianOperator
    controlled: tuple
    box: np.ndarray

    def __post_init__(self):
        controlled = tuple(self.controlled)
        if len(controlled) < 2:
            raise StructuralError("at least two controlled operators are required (m >= 2)")
        dims = {self.drift.dim} | {h.dim for h in controlled}
        if len(dims) != 1:
            raise StructuralError(f"all operators must share one dimension, got {sorted(dims)}")
        box = np.array(self.box, dtype=float)
        if box.shape != (len(controlled), 2):
            raise StructuralError(
                f"box must have shape ({len(controlled)}, 2), got {box.shape}"
            )
        if not np.all(box[:, 0] < box[:, 1]):
            raise StructuralError("each control interval needs lo < hi")
        object.__setattr__(self, "controlled", controlled)
        object.__setattr__(self, "box", _freeze(box))

    @property
    def dim(self) -> int:
        return self.drift.dim

    @property
    def m(self) -> int:
        return len(self.controlled)

    def box_diameter(self) -> float:
        """Euclidean length of the box diagonal."""
        return float(np.linalg.norm(self.box[:, 1] - self.box[:, 0]))

    def box_center(self) -> np.ndarray:
        return (self.box[:, 0] + self.box[:, 1]) / 2

    def contains(self, u, margin: float = 0.0) -> bool:
        """True if u is inside the box, shrunk on every side by ``margin``."""
        u = np.asarray(u, dtype=float)
        return bool(
            np.all(u >= self.box[:, 0] + margin) and np.all(u <= self.box[:, 1] - margin)
        )

    def control_norms(self) -> np.ndarray:
        """Spectral norms of the controlled operators."""
        return np.array([h.operator_norm() for h in self.controlled])

    def matrix_at(self, u) -> np.ndarray:
        """Raw matrix of H(u); fast path used by inner loops."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.m,):
            raise StructuralError(f"control point must have length {self.m}, got shape {u.shape}")
        out = np.array(self.drift.matrix)
        for ul, h in zip(u, self.controlled):
            out += ul * h.matrix
        return out

    def norm_bound(self, u) -> float:
        """Upper bound on the spectral norm of H(u) via the triangle inequality."""
        u = np.asarray(u, dtype=float)
        return float(self.drift.operator_norm() + np.abs(u) @ self.control_norms())

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "drift": self.drift.to_json_dict(),
            "controlled": [h.to_json_dict() for h in self.controlled],
            "box": self.box.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ControlHamiltonian":
        try:
            dim = int(d["dim"])
            drift = HermitianOperator.from_json_dict(d["drift"])
            controlled = tuple(HermitianOperator.from_json_dict(c) for c in d["controlled"])
            box = d["box"]
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed Hamiltonian document: {exc}") from exc
        if drift.dim != dim:
            raise StructuralError(f"declared dim {dim} does not match drift dim {drift.dim}")
        return cls(drift=drift, controlled=controlled, box=box)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True))


def load_hamiltonian(path) -> ControlHamiltonian:
    """Load a ControlHamiltonian from its JSON file representation."""
    text = Path(path).read_text()
    return ControlHamiltonian.from_json_dict(json.loads(text))


def evaluate(H: ControlHamiltonian, u) -> HermitianOperator:
    """Evaluate the affine family at a control point.

    The result is the exact affine combination drift + sum_l u_l * controlled[l];
    no tolerance is involved and the output is Hermitian entry-exactly.
    """
    return HermitianOperator(H.matrix_at(u))
