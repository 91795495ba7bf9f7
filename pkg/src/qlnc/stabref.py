"""Reference qubit stabilizer simulator with destabilizers (CHP-style).

Used as a second, independent oracle for d = 2 and as the baseline in the
scaling benchmark. Rows ``0..n-1`` are destabilizers, rows ``n..2n-1`` are
stabilizers; each row is a signed Pauli string ``(-1)^r X^x Z^z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import CONTROLLED, MEASUREMENTS, PREPS, QlncCircuit, control_exponent
from .field import rref, solve
from .tableau import OutcomeSource, ParityTableau

__all__ = [
    "StabilizerTableau",
    "StabResult",
    "stab_execute",
    "StabRun",
    "parity_generators",
    "matches_parity_tableau",
]


def _g(x1, z1, x2, z2):
    """Exponent of i when multiplying single-qubit Paulis (x1,z1)*(x2,z2)."""
    x1, z1, x2, z2 = (np.asarray(a, dtype=np.int64) for a in (x1, z1, x2, z2))
    return np.where(
        (x1 == 0) & (z1 == 0),
        0,
        np.where(
            (x1 == 1) & (z1 == 1),
            z2 - x2,
            np.where(x1 == 1, z2 * (2 * x2 - 1), x2 * (1 - 2 * z2)),
        ),
    )


class StabilizerTableau:
    def __init__(self, labels: Sequence):
        self.labels = list(labels)
        n = len(self.labels)
        self._index = {q: i for i, q in enumerate(self.labels)}
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[n + np.arange(n), np.arange(n)] = 1

    def copy(self) -> "StabilizerTableau":
        out = StabilizerTableau.__new__(StabilizerTableau)
        out.labels, out._index = list(self.labels), self._index
        out.x, out.z, out.r = self.x.copy(), self.z.copy(), self.r.copy()
        return out

    @property
    def n(self) -> int:
        return len(self.labels)

    def col(self, q) -> int:
        return self._index[q]

    # -- gates ---------------------------------------------------------------
    def h(self, q):
        a = self.col(q)
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def cnot(self, c, t):
        a, b = self.col(c), self.col(t)
        self.r ^= self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1)
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def pauli_x(self, q):
        self.r ^= self.z[:, self.col(q)]

    def pauli_z(self, q):
        self.r ^= self.x[:, self.col(q)]

    # -- row algebra -----------------------------------------------------------
    def _rowsum(self, hs: np.ndarray, i: int):
        """Rows ``hs`` <- rows ``hs`` * row ``i`` (vectorised over ``hs``)."""
        if hs.size == 0:
            return
        e = _g(self.x[i], self.z[i], self.x[hs], self.z[hs]).sum(axis=1)
        e = (2 * self.r[hs].astype(np.int64) + 2 * int(self.r[i]) + e) % 4
        self.r[hs] = (e == 2).astype(np.uint8)
        self.x[hs] ^= self.x[i]
        self.z[hs] ^= self.z[i]

    def _product(self, rows: Iterable[int]):
        """Signed product of the given rows as ``(r, x, z)``."""
        x = np.zeros(self.n, dtype=np.uint8)
        z = np.zeros(self.n, dtype=np.uint8)
        e = 0
        for i in rows:
            e += 2 * int(self.r[i]) + int(_g(self.x[i], self.z[i], x, z).sum())
            x ^= self.x[i]
            z ^= self.z[i]
        return (e % 4) // 2, x, z

    # -- measurement -----------------------------------------------------------
    def measure_z(self, q, src: OutcomeSource | None, record=None, default: int | None = None) -> int:
        n, a = self.n, self.col(q)
        stab = np.flatnonzero(self.x[n:, a]) + n
        if stab.size:
            p = int(stab[0])
            others = np.flatnonzero(self.x[:, a])
            others = others[others != p]
            self._rowsum(others, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            outcome = default if src is None else src.draw(2, record)
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            self.r[p] = outcome
            return int(outcome)
        r, _, _ = self._product(np.flatnonzero(self.x[:n, a]) + n)
        return int(r)

    def measure_x(self, q, src, record=None) -> int:
        self.h(q)
        s = self.measure_z(q, src, record)
        self.h(q)
        return s

    def reset(self, q, plus: bool):
        if self.measure_z(q, None, default=0):
            self.pauli_x(q)
        if plus:
            self.h(q)

    def z_partner(self, q) -> dict:
        """Qubits ``v`` such that ``+-Z_q prod Z_v`` is a stabilizer (empty if none)."""
        n, a = self.n, self.col(q)
        sx, sz = self.x[n:].astype(np.int64), self.z[n:].astype(np.int64)
        A = np.vstack([sx.T, sz[:, a][None, :]])
        b = np.zeros(n + 1, dtype=np.int64)
        b[-1] = 1
        lam = solve(A, b, 2)
        if lam is None:
            return {}
        zs = (lam @ sz) % 2
        return {self.labels[j]: 1 for j in np.flatnonzero(zs) if j != a}

    def terminate(self, q, src, record=None) -> tuple[int, dict]:
        v = self.z_partner(q)
        s = self.measure_x(q, src, record)
        corr = {}
        if s:
            corr = dict(v)
            corr[q] = 1
            for p in corr:
                self.pauli_z(p)
        return s, corr

    # -- observables -----------------------------------------------------------
    def expectation(self, xs: np.ndarray, zs: np.ndarray, sign: int = 0) -> int:
        """<(-1)^sign X^xs Z^zs> in {+1, -1, 0}."""
        n = self.n
        xs = np.asarray(xs, dtype=np.uint8)
        zs = np.asarray(zs, dtype=np.uint8)
        sym = (self.x @ zs + self.z @ xs) % 2  # anticommutation with every row
        if sym[n:].any():
            return 0
        rows = np.flatnonzero(sym[:n]) + n
        r, x, z = self._product(rows)
        if not (np.array_equal(x, xs) and np.array_equal(z, zs)):
            raise AssertionError("Pauli decomposition failed")
        return 1 if (r ^ sign) == 0 else -1

    def stabilizers(self) -> list[str]:
        out = []
        for i in range(self.n, 2 * self.n):
            s = "-" if self.r[i] else "+"
            for xb, zb in zip(self.x[i], self.z[i]):
                s += "IXZY"[xb + 2 * zb]
            out.append(s)
        return out


@dataclass
class StabResult:
    tableau: StabilizerTableau
    outcomes: dict
    live: list
    corrections: list = field(default_factory=list)


class StabRun:
    """Applies operations one at a time to a stabilizer tableau."""

    def __init__(self, qubits: Sequence, src: OutcomeSource):
        self.tableau = StabilizerTableau(qubits)
        self.src = src
        self.live: dict = {}
        self.result = StabResult(self.tableau, {}, [])

    def copy(self) -> "StabRun":
        out = StabRun.__new__(StabRun)
        out.tableau = self.tableau.copy()
        out.src, out.live = self.src, dict(self.live)
        r = self.result
        out.result = StabResult(out.tableau, dict(r.outcomes), list(r.live), list(r.corrections))
        return out

    def apply(self, o):
        st, src, live = self.tableau, self.src, self.live
        outcomes = self.result.outcomes
        q = o.target
        if o.kind in PREPS:
            if live.get(q) is not None:
                st.reset(q, o.kind == "PrepPlus")
            elif o.kind == "PrepPlus":
                st.h(q)
            live[q] = True
        elif o.kind == "Cnot":
            if o.power % 2:
                st.cnot(o.qubits[0], q)
        elif o.kind == "X":
            if o.power % 2:
                st.pauli_x(q)
        elif o.kind == "Z":
            if o.power % 2:
                st.pauli_z(q)
        elif o.kind in CONTROLLED:
            if o.x_terms and control_exponent(o.x_terms, outcomes, 2):
                st.pauli_x(q)
            if o.z_terms and control_exponent(o.z_terms, outcomes, 2):
                st.pauli_z(q)
        elif o.kind == "MeasureX":
            outcomes[o.record] = st.measure_x(q, src, o.record)
        elif o.kind == "MeasureZ":
            outcomes[o.record] = st.measure_z(q, src, o.record)
        elif o.kind == "Terminate":
            s, corr = st.terminate(q, src, o.record)
            outcomes[o.record] = s
            self.result.corrections.append((o.record, corr))
        if o.kind in MEASUREMENTS and o.remove:
            live[q] = False

    def finish(self) -> "StabResult":
        self.result.live = [q for q in self.tableau.labels if self.live.get(q)]
        return self.result


MAX_QUBITS = 8192


def stab_execute(c: QlncCircuit, src: OutcomeSource) -> StabResult:
    if c.d != 2:
        raise ValueError("stabilizer reference supports d = 2 only")
    if c.n > MAX_QUBITS:
        raise ValueError(f"stabilizer tableau for {c.n} qubits exceeds the memory guard ({MAX_QUBITS})")
    run = StabRun(c.qubits, src)
    for o in c.ops:
        run.apply(o)
    return run.finish()


def parity_generators(t: ParityTableau) -> list[tuple[int, dict, dict]]:
    """``n`` independent stabilizer generators ``(sign, X support, Z support)`` of a d = 2 parity state."""
    if t.d != 2:
        raise ValueError("generators are only produced for d = 2")
    M = t.C[1:, 1:] % 2
    c0 = t.C[0, 1:] % 2
    gens = []
    for h in range(t.N):
        gens.append((int(t.p[h + 1] % 2), {t.labels[j]: 1 for j in np.flatnonzero(M[h])}, {}))
    # null space of M: vectors u with M u = 0 give Z^u with eigenvalue (-1)^{u.c0}
    R, piv = rref(M, 2) if t.N else (np.zeros((0, t.n), dtype=np.int64), [])
    free = [j for j in range(t.n) if j not in piv]
    for f in free:
        u = np.zeros(t.n, dtype=np.int64)
        u[f] = 1
        for i, pc in enumerate(piv):
            u[pc] = R[i, f] % 2
        gens.append((int(u @ c0 % 2), {}, {t.labels[j]: 1 for j in np.flatnonzero(u)}))
    return gens


def matches_parity_tableau(st: StabilizerTableau, t: ParityTableau) -> bool:
    """True iff every generator of the parity state stabilizes the stabilizer-engine state."""
    for sign, xs, zs in parity_generators(t):
        xv = np.zeros(st.n, dtype=np.uint8)
        zv = np.zeros(st.n, dtype=np.uint8)
        for q in xs:
            xv[st.col(q)] = 1
        for q in zs:
            zv[st.col(q)] = 1
        if st.expectation(xv, zv, sign) != 1:
            return False
    return True
