"""Parity-function (linear-function) tableau simulation of QLNC circuits.

A state on ``n`` qudits is stored as a matrix ``C`` of shape ``(N+1, n+1)``
over Z_d together with a phase vector ``p`` of length ``N+1``. Column ``j >= 1``
of ``C`` holds the coefficients of the linear formula carried by qubit ``j``
in terms of a constant and ``N`` indeterminates; ``p`` holds the coefficients
of the phase formula. The represented state is

    d^{-N/2} sum_{x in Z_d^N} w^{phi(x)} |f_1(x), ..., f_n(x)>,   w = exp(2 pi i / d).

Row 0 is the constant row: column 0 is always ``e0`` and row 0 is never used as
a pivot row, so every change of variables fixes ``e0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .field import Modulus, rank, rref, solve

__all__ = [
    "PLUS",
    "ZERO",
    "ExpansionTooLarge",
    "OutcomeSource",
    "OutcomesExhausted",
    "ParityTableau",
    "TerminationRecord",
    "UnknownQubit",
    "new_tableau",
]

ZERO = "zero"
PLUS = "plus"


class UnknownQubit(KeyError):
    pass


class OutcomesExhausted(RuntimeError):
    """A forced outcome source ran out while a random outcome was needed."""

    def __init__(self, record=None, consumed=0):
        super().__init__(f"forced outcomes exhausted at measurement {record!r} (after {consumed})")
        self.record = record
        self.consumed = consumed


class ExpansionTooLarge(ValueError):
    pass


class OutcomeSource:
    """Supplies outcomes for measurements whose result is not determined.

    ``seeded`` draws uniformly with a numpy generator. ``forced`` replays an
    explicit branch: either a sequence consumed in order, or a mapping from
    measurement record id to outcome.
    """

    def __init__(self, mode: str, seed=None, outcomes=None):
        if mode not in ("seeded", "forced", "constant"):
            raise ValueError(f"unknown outcome mode {mode!r}")
        self.mode = mode
        self.seed = seed
        self._rng = np.random.default_rng(seed) if mode == "seeded" else None
        if mode == "constant":
            self._value = int(outcomes or 0)
        if mode == "forced":
            if isinstance(outcomes, Mapping):
                self._mapping = dict(outcomes)
                self._sequence = None
            else:
                self._mapping = None
                self._sequence = list(outcomes or [])
        self.drawn: list[tuple[Hashable, int]] = []

    @classmethod
    def seeded(cls, seed=None) -> "OutcomeSource":
        return cls("seeded", seed=seed)

    @classmethod
    def forced(cls, outcomes) -> "OutcomeSource":
        return cls("forced", outcomes=outcomes)

    @classmethod
    def constant(cls, value: int = 0) -> "OutcomeSource":
        """Every random outcome equals ``value`` (used for symbolic dry runs)."""
        return cls("constant", outcomes=value)

    def draw(self, d: int, record=None) -> int:
        if self.mode == "seeded":
            value = int(self._rng.integers(d))
        elif self.mode == "constant":
            value = int(self._value) % d
        elif self._mapping is not None:
            if record not in self._mapping:
                raise OutcomesExhausted(record, len(self.drawn))
            value = int(self._mapping[record]) % d
        else:
            if len(self.drawn) >= len(self._sequence):
                raise OutcomesExhausted(record, len(self.drawn))
            value = int(self._sequence[len(self.drawn)]) % d
        self.drawn.append((record, value))
        return value


@dataclass
class TerminationRecord:
    outcome: int
    corrections: dict = field(default_factory=dict)
    deterministic: bool = False


class ParityTableau:
    """Mutable parity-function tableau ``[C | p]`` over Z_d."""

    def __init__(self, d, C: np.ndarray, p: np.ndarray, labels: Sequence[Hashable]):
        self.d = int(Modulus(int(d)))
        self.C = np.array(C, dtype=np.int64) % self.d
        self.p = np.array(p, dtype=np.int64).reshape(-1) % self.d
        self.labels = list(labels)
        if self.C.ndim != 2 or self.C.shape[1] != len(self.labels) + 1:
            raise ValueError("C must have one column per label plus the constant column")
        if self.p.shape[0] != self.C.shape[0]:
            raise ValueError("phase vector length must equal the number of rows of C")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("qubit labels must be unique")
        self._index = {lab: j + 1 for j, lab in enumerate(self.labels)}

    # -- basic accessors -------------------------------------------------
    @property
    def N(self) -> int:
        return self.C.shape[0] - 1

    @property
    def n(self) -> int:
        return len(self.labels)

    def copy(self) -> "ParityTableau":
        return ParityTableau(self.d, self.C.copy(), self.p.copy(), list(self.labels))

    def column(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownQubit(label) from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def formula(self, label) -> np.ndarray:
        """Coefficients ``(c_0, c_1, ..., c_N)`` of the qubit's formula."""
        return self.C[:, self.column(label)].copy()

    def _reindex(self):
        self._index = {lab: j + 1 for j, lab in enumerate(self.labels)}

    def __repr__(self):
        return f"ParityTableau(d={self.d}, N={self.N}, n={self.n}, labels={self.labels})"

    def __str__(self):
        head = "      e0 " + " ".join(f"{str(l):>3}" for l in self.labels) + " |   p"
        rows = [head]
        for i in range(self.C.shape[0]):
            rows.append(f"{i:>4}: " + " ".join(f"{v:>3}" for v in self.C[i]) + f" | {self.p[i]:>3}")
        return "\n".join(rows)

    # -- preparation -----------------------------------------------------
    def add_qubit(self, label, prep: str = ZERO, position: int | None = None, phase: int = 0):
        """Insert a fresh qubit in |0> or |+> (|+> optionally with phase ``w^{phase*a}``)."""
        if label in self._index:
            raise ValueError(f"qubit {label!r} already present")
        if position is None:
            position = self.n
        col = np.zeros((self.C.shape[0], 1), dtype=np.int64)
        if prep == PLUS:
            self.C = np.vstack([self.C, np.zeros((1, self.C.shape[1]), dtype=np.int64)])
            self.p = np.append(self.p, phase % self.d)
            col = np.zeros((self.C.shape[0], 1), dtype=np.int64)
            col[-1, 0] = 1
        elif prep != ZERO:
            raise ValueError(f"unknown preparation {prep!r}")
        self.C = np.hstack([self.C[:, : position + 1], col, self.C[:, position + 1 :]])
        self.labels.insert(position, label)
        self._reindex()

    def add_qubits(self, labels: Sequence, preps: Sequence[str]):
        """Append several fresh qubits at once (one matrix allocation)."""
        labels, preps = list(labels), list(preps)
        if len(labels) != len(preps):
            raise ValueError("need one preparation per label")
        if len(set(labels)) != len(labels) or any(q in self._index for q in labels):
            raise ValueError("qubits must be new and distinct")
        if any(p not in (ZERO, PLUS) for p in preps):
            raise ValueError(f"unknown preparation in {preps!r}")
        plus = [i for i, p in enumerate(preps) if p == PLUS]
        rows, cols = self.C.shape
        C = np.zeros((rows + len(plus), cols + len(labels)), dtype=np.int64)
        C[:rows, :cols] = self.C
        C[rows + np.arange(len(plus)), cols + np.array(plus, dtype=np.int64)] = 1
        self.C = C
        self.p = np.concatenate([self.p, np.zeros(len(plus), dtype=np.int64)])
        self.labels.extend(labels)
        self._reindex()

    def remove_qubit(self, label):
        """Drop a qubit's column, then any indeterminate row left empty in ``C``."""
        k = self.column(label)
        self.C = np.delete(self.C, k, axis=1)
        del self.labels[k - 1]
        self._reindex()
        empty = [i for i in range(1, self.C.shape[0]) if not self.C[i].any()]
        if empty:
            self.C = np.delete(self.C, empty, axis=0)
            self.p = np.delete(self.p, empty)

    def is_disentangled(self, label) -> bool:
        """True when the qubit factors out of the state (constant or a private indeterminate)."""
        k = self.column(label)
        g = self._pivot_on(k)
        return g is None or np.count_nonzero(self.C[g, 1:]) == 1

    def reset(self, label, prep: str = ZERO):
        if not self.is_disentangled(label):
            raise ValueError(f"cannot re-prepare qubit {label!r}: it is entangled")
        pos = self.column(label) - 1
        self.remove_qubit(label)
        self.add_qubit(label, prep, position=pos)

    # -- unitary gates ---------------------------------------------------
    def apply_x(self, label, exponent: int = 1):
        k = self.column(label)
        self.C[0, k] = (self.C[0, k] + exponent) % self.d

    def apply_z(self, label, exponent: int = 1):
        k = self.column(label)
        self.p = (self.p + exponent * self.C[:, k]) % self.d

    def apply_cnot(self, control, target, power: int = 1):
        """CNOT, or Add_d**power for d > 2: |x>|y> -> |x>|y + power*x>."""
        if control == target:
            raise ValueError("control and target must differ")
        j, k = self.column(control), self.column(target)
        self.C[:, k] = (self.C[:, k] + power * self.C[:, j]) % self.d

    # -- row reduction ---------------------------------------------------
    def _pivot_on(self, k: int) -> int | None:
        """Row-reduce in place, pivoting column ``k`` first; return its pivot row."""
        if not self.C[1:, k].any():
            self._reduce()
            return None
        order = [k] + [j for j in range(1, self.n + 1) if j != k]
        self._reduce(order)
        return 1

    def _reduce(self, order: Iterable[int] | None = None) -> list[int]:
        if order is None:
            order = range(1, self.n + 1)
        T = np.hstack([self.C, self.p[:, None]])
        T, pivots = rref(T, self.d, column_order=list(order), skip_rows=1)
        self.C, self.p = T[:, :-1], T[:, -1].copy()
        return pivots

    # -- measurements ----------------------------------------------------
    def measure_x(self, label, src: OutcomeSource, record=None) -> int:
        """Measure the generalised X observable; the outcome s labels eigenvalue w^s."""
        k = self.column(label)
        g = self._pivot_on(k)
        return self._measure_x_reduced(k, g, src, record)[0]

    def _measure_x_reduced(self, k, g, src, record):
        if g is not None and np.count_nonzero(self.C[g, 1:]) == 1:
            return int(-self.p[g] % self.d), True
        s = src.draw(self.d, record)
        self.C = np.vstack([self.C, np.zeros((1, self.C.shape[1]), dtype=np.int64)])
        self.p = np.append(self.p, 0)
        delta = np.zeros(self.C.shape[0], dtype=np.int64)
        delta[-1] = 1
        if g is not None:
            delta[g] = -1
        self.C[:, k] = (self.C[:, k] + delta) % self.d
        self.p = (self.p - s * delta) % self.d
        return s, False

    def measure_z(self, label, src: OutcomeSource, record=None) -> int:
        """Measure the generalised Z observable; the outcome is the basis value."""
        k = self.column(label)
        g = self._pivot_on(k)
        if g is None:
            return int(self.C[0, k])
        b = src.draw(self.d, record)
        T = np.hstack([self.C, self.p[:, None]])
        delta = -T[:, k]
        delta[0] = (delta[0] + b) % self.d
        T = (T + np.outer(delta, T[g])) % self.d
        T = np.delete(T, g, axis=0)
        self.C, self.p = T[:, :-1], T[:, -1].copy()
        return b

    def measure_z_destructive(self, label, src: OutcomeSource, record=None) -> int:
        b = self.measure_z(label, src, record)
        self.remove_qubit(label)
        return b

    # -- termination -----------------------------------------------------
    def correction_exponents(self, label, exclude: Iterable = ()) -> dict:
        """Z exponents ``v`` on other qubits with ``sum v_i f_i`` equal to the qubit's indeterminate.

        Only the non-constant part is matched, since the constant only changes
        the global phase. Returns an empty dict when the qubit is constant or
        carries a private indeterminate (nothing to correct on other qubits).
        Raises ``ValueError`` when the allowed qubits cannot express it.
        """
        k = self.column(label)
        g = self._pivot_on(k)
        if g is None or np.count_nonzero(self.C[g, 1:]) == 1:
            return {}
        excluded = {k} | {self.column(e) for e in exclude if e in self._index}
        cols = [j for j in range(1, self.n + 1) if j not in excluded]
        target = np.zeros(self.N, dtype=np.int64)
        target[g - 1] = 1
        v = solve(self.C[1:, cols], target, self.d)
        if v is None:
            raise ValueError(f"qubit {label!r} cannot be expressed by the allowed qubits")
        return {self.labels[cols[i] - 1]: int(x) for i, x in enumerate(v) if x % self.d}

    def terminate(self, label, src: OutcomeSource, record=None, remove: bool = False) -> TerminationRecord:
        """X-measure a qubit and cancel the phase this induces on the rest.

        The qubit is restored to |+> (or removed when ``remove``), and the rest
        of the state is left as it would be after outcome 0.
        """
        v = self.correction_exponents(label)
        k = self.column(label)
        g = self._pivot_on(k)
        s, deterministic = self._measure_x_reduced(k, g, src, record)
        corrections = {}
        if s:
            for lab, e in v.items():
                corrections[lab] = (-s * e) % self.d
            corrections[label] = s % self.d
            for lab, e in corrections.items():
                self.apply_z(lab, e)
        if remove:
            self.remove_qubit(label)
        return TerminationRecord(s, corrections, deterministic)

    def find_phase_correction(self) -> dict:
        """Z exponents per qubit that zero the phase vector (up to global phase)."""
        work = self.copy()
        pivots = work._reduce()
        out = {}
        for i, col in enumerate(pivots, start=1):
            if work.p[i] % self.d:
                out[work.labels[col - 1]] = int(-work.p[i] % self.d)
        return out

    # -- canonical form --------------------------------------------------
    def canonicalize(self) -> "ParityTableau":
        """Representative of the change-of-variables class, up to global phase.

        Columns are sorted by label, rows ``>= 1`` are put in reduced
        row-echelon form with leftmost pivots, row 0 is reduced against the
        pivots and the global phase entry ``p_0`` is dropped.
        """
        order = sorted(range(self.n), key=lambda j: _sort_key(self.labels[j]))
        C = self.C[:, [0] + [j + 1 for j in order]]
        t = ParityTableau(self.d, C, self.p.copy(), [self.labels[j] for j in order])
        t._reduce()
        t.p[0] = 0
        return t

    def canonical_key(self) -> tuple:
        c = self.canonicalize()
        return (c.d, tuple(c.labels), c.C.tobytes(), c.C.shape, c.p.tobytes())

    def same_state(self, other: "ParityTableau") -> bool:
        """Equality of represented states up to a global phase."""
        return self.canonical_key() == other.canonical_key()

    # -- restriction -----------------------------------------------------
    def restricted(self, keep: Iterable) -> "ParityTableau":
        """Copy with every other qubit removed; those must be disentangled.

        One reduction with the dropped columns first: the state factors iff
        no row pivoting on a dropped column reaches a kept one, and the rows
        pivoting on kept columns then describe the kept qubits alone.
        """
        keep = set(keep)
        missing = keep - set(self.labels)
        if missing:
            raise UnknownQubit(sorted(missing, key=_sort_key))
        kept = [j + 1 for j, lab in enumerate(self.labels) if lab in keep]
        dropped = [j + 1 for j, lab in enumerate(self.labels) if lab not in keep]
        T = np.hstack([self.C, self.p[:, None]])
        T, pivots = rref(T, self.d, column_order=dropped + kept, skip_rows=1)
        rows = [0]
        for i, col in enumerate(pivots, start=1):
            if col in kept:
                rows.append(i)
            elif T[i, kept].any():
                lab = self.labels[col - 1]
                raise ValueError(f"qubit {lab!r} is still entangled with the kept qubits")
        return ParityTableau(self.d, T[np.ix_(rows, [0] + kept)], T[rows, -1].copy(), [self.labels[j - 1] for j in kept])

    # -- invariants ------------------------------------------------------
    def check_invariants(self):
        d = self.d
        e0 = np.zeros(self.C.shape[0], dtype=np.int64)
        e0[0] = 1
        if not np.array_equal(self.C[:, 0] % d, e0):
            raise AssertionError("column 0 is not e0")
        if rank(self.C, d) != self.C.shape[0]:
            raise AssertionError(f"rank(C) != rows(C) = {self.C.shape[0]}")
        for i in range(1, self.C.shape[0]):
            if not self.C[i].any():
                raise AssertionError(f"indeterminate row {i} occurs in no formula")

    # -- dense expansion -------------------------------------------------
    def expand_amplitudes(self, cap: int = 2**20, order: Sequence | None = None):
        """Exact amplitude vector (first qubit of ``order`` is the most significant digit)."""
        from .oracle import DenseState

        d, N = self.d, self.N
        if d**N > cap:
            raise ExpansionTooLarge(f"expansion too large: {d}^{N} terms exceeds cap {cap}")
        order = list(self.labels) if order is None else list(order)
        cols = [self.column(lab) for lab in order]
        if set(order) != set(self.labels):
            raise ValueError("order must be a permutation of the tableau labels")
        n = len(order)
        if d**n > 2**24:
            raise ExpansionTooLarge(f"dense vector of {d}^{n} amplitudes is too large")
        X = np.indices((d,) * N).reshape(N, -1).T if N else np.zeros((1, 0), dtype=np.int64)
        values = (self.C[0, cols] + X @ self.C[1:, cols]) % d
        weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
        index = values @ weights
        phase = (self.p[0] + X @ self.p[1:]) % d
        amps = np.zeros(d**n, dtype=np.complex128)
        amps[index] = np.exp(2j * np.pi * phase / d) / np.sqrt(float(d) ** N)
        return DenseState(d, order, amps)

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "d": self.d,
            "labels": list(self.labels),
            "C": self.C.tolist(),
            "p": self.p.tolist(),
        }

    @classmethod
    def from_json(cls, obj) -> "ParityTableau":
        if isinstance(obj, str):
            obj = json.loads(obj)
        labels = obj["labels"]
        C = np.array(obj["C"], dtype=np.int64).reshape(-1, len(labels) + 1)
        return cls(obj["d"], C, np.array(obj["p"], dtype=np.int64), labels)

    def __eq__(self, other):
        if not isinstance(other, ParityTableau):
            return NotImplemented
        return (
            self.d == other.d
            and self.labels == other.labels
            and np.array_equal(self.C, other.C)
            and np.array_equal(self.p, other.p)
        )


def _sort_key(label):
    return (0, label, "") if isinstance(label, (int, np.integer)) else (1, 0, str(label))


def new_tableau(d, preps: Sequence[str], labels: Sequence | None = None) -> ParityTableau:
    """Tableau for a product of |0> and |+> states; each |+> gets its own indeterminate."""
    if not preps:
        raise ValueError("at least one qubit is required")
    if labels is None:
        labels = list(range(1, len(preps) + 1))
    t = ParityTableau(d, np.ones((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64), [])
    for lab, prep in zip(labels, preps):
        t.add_qubit(lab, prep)
    return t
