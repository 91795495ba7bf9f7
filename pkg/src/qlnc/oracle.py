"""Brute-force dense state-vector simulation of QLNC circuits over Z_d.

Amplitudes live in a flat array indexed by base-d digit strings; the first
label is the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import CONTROLLED, MEASUREMENTS, PREPS, QlncCircuit, control_exponent
from .field import solve
from .tableau import OutcomeSource

__all__ = [
    "DenseState",
    "DenseResult",
    "ZeroProbabilityBranch",
    "StateTooLarge",
    "dense_execute",
    "equal_up_to_global_phase",
    "group_fidelity",
    "target_state",
]

MAX_AMPLITUDES = 2**22
TOL = 1e-12


class ZeroProbabilityBranch(ValueError):
    pass


class StateTooLarge(ValueError):
    pass


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@dataclass
class DenseState:
    d: int
    labels: list
    amps: np.ndarray

    def __post_init__(self):
        self.labels = list(self.labels)
        self.amps = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if self.amps.size != self.d ** len(self.labels):
            raise ValueError("amplitude vector size must be d**n")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def empty(cls, d: int) -> "DenseState":
        return cls(d, [], np.ones(1, dtype=np.complex128))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.d,) * self.n)

    def axis(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def reordered(self, order: Sequence) -> "DenseState":
        order = list(order)
        if set(order) != set(self.labels) or len(order) != self.n:
            raise ValueError("order must be a permutation of the labels")
        perm = [self.axis(q) for q in order]
        amps = np.transpose(self.tensor(), perm).reshape(-1) if self.n else self.amps
        return DenseState(self.d, order, amps.copy())

    # -- structural changes ------------------------------------------------
    def add_qubit(self, label, plus: bool):
        if label in self.labels:
            raise ValueError(f"qubit {label!r} already present")
        local = np.full(self.d, 1 / np.sqrt(self.d)) if plus else np.eye(self.d)[0]
        self.amps = np.kron(self.amps, local.astype(np.complex128))
        self.labels.append(label)

    def remove_qubit(self, label, tol: float = 1e-9):
        """Drop a qubit that is in a product state with the rest."""
        ax = self.axis(label)
        m = np.moveaxis(self.tensor(), ax, 0).reshape(self.d, -1)
        row = int(np.argmax(np.linalg.norm(m, axis=1)))
        rest = m[row] / np.linalg.norm(m[row])
        local = m @ rest.conj()
        if not np.allclose(m, np.outer(local, rest), atol=tol):
            raise ValueError(f"qubit {label!r} is entangled and cannot be removed")
        self.amps = rest
        del self.labels[ax]

    # -- gates ---------------------------------------------------------------
    def apply_x(self, label, e: int = 1):
        e %= self.d
        if e:
            self.amps = np.roll(self.tensor(), e, axis=self.axis(label)).reshape(-1)

    def apply_z(self, label, e: int = 1):
        e %= self.d
        if e:
            phases = omega(self.d) ** (e * np.arange(self.d))
            shape = [1] * self.n
            shape[self.axis(label)] = self.d
            self.amps = (self.tensor() * phases.reshape(shape)).reshape(-1)

    def apply_add(self, control, target, power: int = 1):
        """|x>|y> -> |x>|y + power*x>."""
        a, b = self.axis(control), self.axis(target)
        psi = self.tensor()
        out = np.empty_like(psi)
        for x in range(self.d):
            idx = [slice(None)] * self.n
            idx[a] = x
            sub = psi[tuple(idx)]
            b_sub = b - (1 if b > a else 0)
            out[tuple(idx)] = np.roll(sub, (power * x) % self.d, axis=b_sub)
        self.amps = out.reshape(-1)

    # -- measurements ----------------------------------------------------------
    def _branch(self, probs: np.ndarray, src: OutcomeSource, record) -> int:
        live = np.flatnonzero(probs > TOL)
        if live.size == 1 and probs[live[0]] > 1 - 1e-9:
            return int(live[0])
        s = src.draw(self.d, record)
        if probs[s] <= TOL:
            raise ZeroProbabilityBranch(f"forced outcome {s} for {record!r} has probability 0")
        return s

    def measure_z(self, label, src: OutcomeSource, record=None) -> int:
        ax = self.axis(label)
        m = np.moveaxis(self.tensor(), ax, 0).reshape(self.d, -1)
        probs = np.sum(np.abs(m) ** 2, axis=1)
        b = self._branch(probs, src, record)
        proj = np.zeros_like(m)
        proj[b] = m[b] / np.sqrt(probs[b])
        self._set_from_moved(proj, ax)
        return b

    def measure_x(self, label, src: OutcomeSource, record=None) -> int:
        """Outcome s projects onto sum_j w^{-s j}|j>/sqrt(d), the X eigenvector of eigenvalue w^s."""
        d = self.d
        ax = self.axis(label)
        m = np.moveaxis(self.tensor(), ax, 0).reshape(d, -1)
        dft = omega(d) ** np.outer(np.arange(d), np.arange(d)) / np.sqrt(d)
        comps = dft @ m  # row s: <x_s|psi>
        probs = np.sum(np.abs(comps) ** 2, axis=1)
        s = self._branch(probs, src, record)
        eig = omega(d) ** (-s * np.arange(d)) / np.sqrt(d)
        post = np.outer(eig, comps[s] / np.sqrt(probs[s]))
        self._set_from_moved(post, ax)
        return s

    def _set_from_moved(self, m: np.ndarray, ax: int):
        shape = (self.d,) * self.n
        t = m.reshape((self.d,) + shape[1:])
        self.amps = np.moveaxis(t, 0, ax).reshape(-1)

    def termination_exponents(self, label) -> dict:
        """Z exponents ``v`` on the others with the qubit's value ``= v.y + c`` on the support.

        Empty when the value is not such a function of the others (then the
        qubit already factors out).
        """
        d = self.d
        ax = self.axis(label)
        idx = np.flatnonzero(np.abs(self.amps) > 1e-9)
        digits = np.stack(np.unravel_index(idx, (d,) * self.n), axis=1) if self.n else idx[:, None]
        others = [i for i in range(self.n) if i != ax]
        A = np.hstack([digits[:, others], np.ones((len(idx), 1), dtype=np.int64)])
        z = digits[:, ax]
        rng = np.random.default_rng(0)
        sample = list(rng.choice(len(idx), size=min(len(idx), 4 * (self.n + 2)), replace=False))
        while True:
            w = solve(A[sample], z[sample], d)
            if w is None:
                return {}
            bad = np.flatnonzero((A @ w - z) % d)
            if bad.size == 0:
                break
            sample.append(int(bad[0]))
        return {self.labels[others[i]]: int(v) for i, v in enumerate(w[:-1]) if v % d}

    def terminate(self, label, src: OutcomeSource, record=None) -> tuple[int, dict]:
        v = self.termination_exponents(label)
        s = self.measure_x(label, src, record)
        corrections = {}
        if s:
            corrections = {q: (-s * e) % self.d for q, e in v.items()}
            corrections[label] = s
            for q, e in corrections.items():
                self.apply_z(q, e)
        return s, corrections


@dataclass
class DenseResult:
    state: DenseState
    outcomes: dict
    corrections: list = field(default_factory=list)


def dense_execute(c: QlncCircuit, src: OutcomeSource) -> DenseResult:
    """Apply every operation as its literal unitary or projector."""
    d = c.d
    if d ** len(c.qubits) > MAX_AMPLITUDES:
        raise StateTooLarge(f"state too large: {d}^{len(c.qubits)} amplitudes")
    st = DenseState.empty(d)
    outcomes: dict = {}
    res = DenseResult(st, outcomes)
    for o in c.ops:
        q = o.target
        if o.kind in PREPS:
            if q in st.labels:
                st.remove_qubit(q)
            st.add_qubit(q, plus=o.kind == "PrepPlus")
        elif o.kind == "Cnot":
            st.apply_add(o.qubits[0], q, o.power)
        elif o.kind == "X":
            st.apply_x(q, o.power)
        elif o.kind == "Z":
            st.apply_z(q, o.power)
        elif o.kind in CONTROLLED:
            if o.x_terms:
                st.apply_x(q, control_exponent(o.x_terms, outcomes, d))
            if o.z_terms:
                st.apply_z(q, control_exponent(o.z_terms, outcomes, d))
        elif o.kind == "MeasureX":
            outcomes[o.record] = st.measure_x(q, src, o.record)
        elif o.kind == "MeasureZ":
            outcomes[o.record] = st.measure_z(q, src, o.record)
        elif o.kind == "Terminate":
            s, corr = st.terminate(q, src, o.record)
            outcomes[o.record] = s
            res.corrections.append((o.record, corr))
        if o.kind in MEASUREMENTS and o.remove:
            st.remove_qubit(q)
        if abs(st.norm() - 1) > 1e-9:
            raise AssertionError(f"norm drifted to {st.norm()} at t={o.t}")
    return res


def equal_up_to_global_phase(s1: DenseState, s2: DenseState, tol: float = 1e-9) -> bool:
    """True iff ``s2 = e^{i theta} s1`` component-wise within ``tol``."""
    if s1.d != s2.d or s1.n != s2.n:
        return False
    try:
        s2 = s2.reordered(s1.labels)
    except (ValueError, KeyError):
        return False
    big = np.flatnonzero(np.abs(s1.amps) > tol)
    if big.size == 0:
        return bool(np.all(np.abs(s2.amps) <= tol))
    i = big[0]
    if abs(s2.amps[i]) <= tol:
        return False
    phase = s2.amps[i] / s1.amps[i]
    phase /= abs(phase)
    return bool(np.allclose(s2.amps, phase * s1.amps, atol=tol, rtol=0))


def target_state(d: int, groups: Sequence[Sequence]) -> DenseState:
    """Product of GHZ states (|Phi+> for pairs) over the groups."""
    amps = np.ones(1, dtype=np.complex128)
    labels: list = []
    for g in groups:
        k = len(g)
        ghz = np.zeros(d**k, dtype=np.complex128)
        step = sum(d**i for i in range(k))
        ghz[np.arange(d) * step] = 1 / np.sqrt(d)
        amps = np.kron(amps, ghz)
        labels.extend(g)
    return DenseState(d, labels, amps)


def group_fidelity(s: DenseState, groups: Sequence[Sequence]) -> float:
    """Fidelity of the groups' reduced state with the GHZ/Bell product target."""
    flat = [q for g in groups for q in g]
    if len(set(map(repr, flat))) != len(flat):
        raise ValueError("groups overlap")
    missing = [q for q in flat if q not in s.labels]
    if missing:
        raise KeyError(f"unknown qubits in groups: {missing}")
    rest = [q for q in s.labels if q not in flat]
    st = s.reordered(flat + rest)
    t = target_state(s.d, groups).amps
    m = st.amps.reshape(t.size, -1)
    overlap = t.conj() @ m
    return float(np.sum(np.abs(overlap) ** 2))
