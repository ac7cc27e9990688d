"""Randomized invariant checks shared with the acceptance suite.

Each checker runs ``cases`` independent random instances from a fixed seed
and returns the number of failures; the tests assert zero.
"""

import numpy as np

from speccert import (
    ControlPath,
    branch_populations,
    closure,
    decompose,
    evaluate,
    propagate,
    validate,
)
from conftest import make_family


def random_family(rng, n, m=2, halfwidth=1.0):
    mats = []
    for _ in range(m + 1):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mats.append((a + a.conj().T) / 2)
    return make_family(mats[0], mats[1:], [[-halfwidth, halfwidth]] * m)


def random_skew(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a - a.conj().T) / 2


def check_hermiticity(cases=100, seed=1001) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 5))
        H = random_family(rng, n)
        u = rng.uniform(-1, 1, 2)
        report = validate(evaluate(H, u))
        if not report.accepted or report.defect > 1e-12:
            failures += 1
    return failures


def check_unitarity(cases=100, seed=1002) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 4))
        H = random_family(rng, n)
        a, b = rng.uniform(-0.9, 0.9, 2), rng.uniform(-0.9, 0.9, 2)
        path = ControlPath(
            waypoints=(a, b), durations=np.array([float(rng.uniform(0.5, 3.0))]), epsilon=1.0
        )
        psi0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        psi0 /= np.linalg.norm(psi0)
        traj = propagate(H, path, psi0)
        if float(np.max(traj.norm_defect)) > 1e-9:
            failures += 1
    return failures


def check_gauge(cases=100, seed=1003) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 5))
        H = random_family(rng, n)
        sp = decompose(H, rng.uniform(-1, 1, 2))
        psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        psi /= np.linalg.norm(psi)
        base = branch_populations(sp.frame, psi)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        rephased = branch_populations(sp.frame * phases[None, :], psi)
        if float(np.max(np.abs(rephased - base))) > 1e-12:
            failures += 1
    return failures


def check_conjugation_invariance(cases=100, seed=1004) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 4))
        gens = [random_skew(rng, n) for _ in range(2)]
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, _ = np.linalg.qr(z)
        rotated = [(m - m.conj().T) / 2 for m in (q @ g @ q.conj().T for g in gens)]
        if closure(rotated).dimension != closure(gens).dimension:
            failures += 1
    return failures


def check_jacobi(cases=100, seed=1005) -> int:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        n = int(rng.integers(2, 6))
        a, b, c = (random_skew(rng, n) for _ in range(3))

        def comm(x, y):
            return x @ y - y @ x

        jac = comm(comm(a, b), c) + comm(comm(b, c), a) + comm(comm(c, a), b)
        bound = 1e-10 * np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c)
        if float(np.linalg.norm(jac)) > bound:
            failures += 1
    return failures


def test_hermiticity_invariant():
    assert check_hermiticity() == 0


def test_unitarity_invariant():
    assert check_unitarity() == 0


def test_gauge_invariant():
    assert check_gauge() == 0


def test_conjugation_invariance():
    assert check_conjugation_invariance() == 0


def test_jacobi_identity():
    assert check_jacobi() == 0
