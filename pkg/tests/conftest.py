import numpy as np
import pytest

from speccert import ControlHamiltonian, HermitianOperator

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def make_family(drift, controlled, box) -> ControlHamiltonian:
    return ControlHamiltonian(
        drift=HermitianOperator(np.asarray(drift, dtype=complex)),
        controlled=tuple(HermitianOperator(np.asarray(c, dtype=complex)) for c in controlled),
        box=np.asarray(box, dtype=float),
    )


@pytest.fixture
def two_level_cone() -> ControlHamiltonian:
    """H(u) = u1*sigma_x + u2*sigma_z: single conical intersection at the origin."""
    return make_family(np.zeros((2, 2)), [SIGMA_X, SIGMA_Z], [[-1, 1], [-1, 1]])


@pytest.fixture
def shifted_cone() -> ControlHamiltonian:
    """H(u) = sigma_z + u1*sigma_x + u2*sigma_z: intersection at (0, -1)."""
    return make_family(SIGMA_Z, [SIGMA_X, SIGMA_Z], [[-2, 2], [-2, 2]])


@pytest.fixture
def diag_family() -> ControlHamiltonian:
    """Diagonal-only family: eigenvalues u1, u1+1, 2; never generates the full algebra."""
    return make_family(
        np.diag([0.0, 1.0, 2.0]),
        [np.diag([1.0, 1.0, 0.0]), np.zeros((3, 3))],
        [[-0.5, 0.5], [-0.5, 0.5]],
    )


@pytest.fixture
def three_level_chain() -> ControlHamiltonian:
    """Real symmetric 3-level family with conical intersections for both level pairs."""
    drift = np.diag([0.0, 0.0, 1.5])
    slope = np.diag([1.0, 0.0, -1.0])
    coupling = np.array([[0.0, 1.0, 0.5], [1.0, 0.0, 1.0], [0.5, 1.0, 0.0]])
    return make_family(drift, [slope, coupling], [[-0.6, 1.35], [-0.75, 0.75]])
