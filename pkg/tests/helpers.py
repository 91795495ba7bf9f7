"""Shared generators for the test-suite."""

import numpy as np

from qlnc.circuit import execute, random_circuit
from qlnc.tableau import OutcomeSource, ParityTableau


def random_tableau(seed: int, d: int, n: int | None = None, n_ops: int = 25) -> ParityTableau:
    """Reachable tableau: the final state of a random circuit on one sampled branch."""
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 7))
    c = random_circuit(rng, n, n_ops, d, weights={"Reset": 0})
    return execute(c, OutcomeSource.seeded(seed)).tableau


def random_change_of_variables(t: ParityTableau, seed: int) -> ParityTableau:
    """Apply an invertible affine substitution of the indeterminates (Q e0 = e0)."""
    rng = np.random.default_rng(seed)
    d, N = t.d, t.N
    while True:
        M = rng.integers(0, d, size=(N, N))
        if N == 0 or int(round(float(np.linalg.det(M)))) % d:
            break
    Q = np.eye(N + 1, dtype=np.int64)
    Q[1:, 1:] = M
    Q[0, 1:] = rng.integers(0, d, size=N)
    T = np.hstack([t.C, t.p[:, None]])
    T = (Q @ T) % d
    return ParityTableau(d, T[:, :-1], T[:, -1].copy(), list(t.labels))
