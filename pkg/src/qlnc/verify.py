"""Branch enumeration and end-to-end verification of QLNC circuits.

A circuit passes when every measurement branch leaves the declared groups
in the product of Bell/GHZ states, with all other qubits factored out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import MEASUREMENTS, Op, QlncCircuit, TableauRun, execute
from .compiler import check_independence
from .tableau import OutcomeSource, OutcomesExhausted, ParityTableau

__all__ = [
    "BranchExplosion",
    "BranchResult",
    "Verdict",
    "MAX_BRANCHES",
    "enumerate_branches",
    "walk_branches",
    "sample_branches",
    "ghz_tableau",
    "verify_circuit",
    "random_distribution_circuit",
]

MAX_BRANCHES = 2**16


class BranchExplosion(ValueError):
    pass


def _branch_key(m: dict) -> list:
    return [(str(k), v) for k, v in sorted(m.items(), key=lambda kv: str(kv[0]))]


def walk_branches(c: QlncCircuit, engine: str = "tableau", limit: int = MAX_BRANCHES):
    """Yield ``(outcomes, result)`` for every branch, sharing work between branches.

    The run is copied before each measurement; when the measurement turns
    out to be random the copy is resumed once per outcome. ``engine`` is
    ``tableau`` (results are ExecutionResult) or ``stab`` (StabResult).
    """
    if engine == "tableau":
        fresh, done = (lambda src: TableauRun(c.d, src)), (lambda run: run.result)
    elif engine == "stab":
        from .stabref import StabRun

        fresh, done = (lambda src: StabRun(c.qubits, src)), (lambda run: run.finish())
    else:
        raise ValueError(f"unknown engine {engine!r}")
    ops = list(c.ops)
    cuts = [i for i, o in enumerate(ops) if o.kind in MEASUREMENTS]
    stack = [(0, fresh(OutcomeSource.forced({})), {})]
    leaves = 1
    while stack:
        i, run, forced = stack.pop()
        while i < len(ops):
            if ops[i].kind not in MEASUREMENTS:
                j = next((k for k in cuts if k > i), len(ops))
                if hasattr(run, "apply_all"):
                    run.apply_all(ops[i:j])
                else:
                    for o in ops[i:j]:
                        run.apply(o)
                i = j
                continue
            snap = run.copy()
            try:
                run.apply(ops[i])
            except OutcomesExhausted as exc:
                leaves += c.d - 1
                if leaves > limit:
                    raise BranchExplosion(f"more than {limit} outcome branches") from None
                for s in range(c.d - 1, 0, -1):
                    branch = snap.copy()
                    branch.src = OutcomeSource.forced({**forced, exc.record: s})
                    stack.append((i, branch, {**forced, exc.record: s}))
                forced = {**forced, exc.record: 0}
                run = snap
                run.src = OutcomeSource.forced(forced)
                continue
            i += 1
        yield forced, done(run)


def enumerate_branches(c: QlncCircuit, limit: int = MAX_BRANCHES) -> list[dict]:
    """Every assignment of outcomes to the random measurements, as record mappings."""
    return sorted((forced for forced, _ in walk_branches(c, limit=limit)), key=_branch_key)


def sample_branches(c: QlncCircuit, count: int, seed=None) -> list[dict]:
    """``count`` branches drawn with a seeded source (duplicates possible)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        src = OutcomeSource.seeded(int(rng.integers(2**31)))
        execute(c, src)
        out.append(dict(src.drawn))
    return out


def ghz_tableau(d: int, groups: Sequence[Sequence]) -> ParityTableau:
    """Parity tableau of the product of GHZ states (Bell pairs for groups of two)."""
    k = len(groups)
    labels = [q for g in groups for q in g]
    C = np.zeros((k + 1, len(labels) + 1), dtype=np.int64)
    C[0, 0] = 1
    col = 1
    for i, g in enumerate(groups, start=1):
        for _ in g:
            C[i, col] = 1
            col += 1
    return ParityTableau(d, C, np.zeros(k + 1, dtype=np.int64), labels)


@dataclass
class BranchResult:
    outcomes: dict
    passed: bool
    fidelity: float | None = None
    canonical: bool | None = None
    message: str = ""

    def to_json(self) -> dict:
        return {
            "outcomes": {str(k): v for k, v in self.outcomes.items()},
            "passed": self.passed,
            "fidelity": self.fidelity,
            "canonical": self.canonical,
            "message": self.message,
        }


@dataclass
class Verdict:
    passed: bool
    oracle: str
    branches: list = field(default_factory=list)
    independence: object = None

    @property
    def first_failure(self) -> BranchResult | None:
        return next((b for b in self.branches if not b.passed), None)

    def to_json(self) -> dict:
        fail = self.first_failure
        return {
            "passed": self.passed,
            "oracle": self.oracle,
            "branch_count": len(self.branches),
            "first_failure": fail.to_json() if fail else None,
            "branches": [b.to_json() for b in self.branches],
            "independence": self.independence.to_json() if self.independence is not None else None,
        }


def _tableau_verdict(tab, groups, forced) -> BranchResult:
    members = [q for g in groups for q in g]
    try:
        kept = tab.restricted(members)
    except (ValueError, KeyError) as exc:
        return BranchResult(forced, False, canonical=False, message=str(exc))
    ok = kept.same_state(ghz_tableau(tab.d, groups))
    return BranchResult(forced, ok, canonical=ok, message="" if ok else "canonical tableau differs from target")


def _stab_verdict(st, groups, forced) -> BranchResult:
    from .stabref import matches_parity_tableau

    # the target is pure, so holding all its generators fixes the groups' reduced state
    ok = matches_parity_tableau(st, ghz_tableau(2, groups))
    return BranchResult(forced, ok, canonical=ok, message="" if ok else "a target stabilizer is violated")


def _check_tableau(c, groups, forced) -> BranchResult:
    return _tableau_verdict(execute(c, OutcomeSource.forced(forced)).tableau, groups, forced)


def _check_dense(c, groups, forced, tol) -> BranchResult:
    from .oracle import dense_execute, group_fidelity

    res = dense_execute(c, OutcomeSource.forced(forced))
    f = group_fidelity(res.state, groups)
    ok = abs(f - 1) <= tol
    return BranchResult(forced, ok, fidelity=f, message="" if ok else f"fidelity {f:.12f}")


def _check_stab(c, groups, forced) -> BranchResult:
    from .stabref import stab_execute

    return _stab_verdict(stab_execute(c, OutcomeSource.forced(forced)).tableau, groups, forced)


def _pick_oracle(c: QlncCircuit, oracle: str) -> str:
    if oracle != "auto":
        return oracle
    from .oracle import MAX_AMPLITUDES

    return "dense" if c.d ** len(c.qubits) <= MAX_AMPLITUDES else "tableau"


def verify_circuit(
    c: QlncCircuit,
    groups: Sequence[Sequence] | None = None,
    oracle: str = "auto",
    branches: str | list = "exhaustive",
    samples: int = 16,
    seed=None,
    tol: float = 1e-9,
    limit: int = MAX_BRANCHES,
) -> Verdict:
    """Check the target state on each branch with the chosen engine.

    ``branches`` is ``"exhaustive"``, ``"sample"`` or an explicit list of
    outcome mappings; exhaustive runs refuse more than ``limit`` branches.
    ``oracle`` is ``auto`` (dense when small enough), ``dense``, ``stab``
    (d = 2 only) or ``tableau``.
    """
    if groups is None:
        groups = c.meta.get("groups")
    if not groups:
        raise ValueError("no multicast grouping given or declared on the circuit")
    groups = [list(g) for g in groups]
    unknown = [q for g in groups for q in g if q not in c.qubits]
    if unknown:
        raise KeyError(f"groups reference unknown qubits {unknown}")
    kind = _pick_oracle(c, oracle)
    if kind not in ("dense", "stab", "tableau"):
        raise ValueError(f"unknown oracle {oracle!r}")
    if kind == "stab" and c.d != 2:
        raise ValueError("the stabilizer oracle supports d = 2 only")
    results = []
    if branches == "exhaustive" and kind != "dense":
        # walk the branch tree once instead of replaying each branch
        engine = "stab" if kind == "stab" else "tableau"
        check = _stab_verdict if kind == "stab" else _tableau_verdict
        for forced, res in walk_branches(c, engine, limit):
            results.append(check(res.tableau, groups, forced))
        results.sort(key=lambda r: _branch_key(r.outcomes))
        todo = []
    elif branches == "exhaustive":
        todo = enumerate_branches(c, limit)
    elif branches == "sample":
        todo = sample_branches(c, samples, seed)
    else:
        todo = list(branches)
    for forced in todo:
        if kind == "dense":
            results.append(_check_dense(c, groups, forced, tol))
        elif kind == "stab":
            results.append(_check_stab(c, groups, forced))
        else:
            results.append(_check_tableau(c, groups, forced))
    try:
        witness = check_independence(c, groups)
    except (ValueError, KeyError):
        witness = None
    return Verdict(all(r.passed for r in results), kind, results, witness)


def random_distribution_circuit(rng: np.random.Generator, d: int = 2, max_qubits: int = 10) -> QlncCircuit:
    """Random GHZ distribution circuit with ancilla traffic, some of it harmful.

    Groups are built by fan-out from a |+> root. Ancillas then pick up
    combinations of group values and are measured, or mask a group member
    with a fresh value that is later read out and X-corrected. Measuring a
    combination of group values alone, skipping a correction, or measuring a
    group member collapses the target; everything else leaves it intact.
    """
    ops: list[Op] = []
    qubits: list = []
    t = 0
    nrec = 0

    def step() -> int:
        nonlocal t
        t += 1
        return t

    def new(plus: bool):
        q = len(qubits) + 1
        qubits.append(q)
        ops.append(Op("PrepPlus" if plus else "PrepZero", 0, (q,)))
        return q

    def rec() -> str:
        nonlocal nrec
        nrec += 1
        return f"r{nrec}"

    groups = []
    for _ in range(int(rng.integers(1, 3))):
        size = int(rng.integers(2, 4))
        g = [new(True)] + [new(False) for _ in range(size - 1)]
        for i in range(1, size):
            ops.append(Op("Cnot", step(), (g[int(rng.integers(i))], g[i])))
        groups.append(g)
    members = [q for g in groups for q in g]
    measured: set = set()
    for _ in range(int(rng.integers(1, 4))):
        kind = rng.choice(["zero", "plus", "mask", "collapse"], p=[0.4, 0.25, 0.25, 0.1])
        room = max_qubits - len(qubits)
        alive = [q for q in members if q not in measured]
        if kind == "collapse" or room < 1:
            if kind == "collapse" and alive:
                q = alive[int(rng.integers(len(alive)))]
                ops.append(Op("MeasureZ", step(), (q,), record=rec()))
                measured.add(q)
            continue
        if kind in ("zero", "plus"):
            a = new(kind == "plus")
            for _ in range(int(rng.integers(1, 4))):
                src = alive[int(rng.integers(len(alive)))] if alive else None
                if src is not None:
                    ops.append(Op("Cnot", step(), (src, a), power=int(rng.integers(1, d))))
            roll = rng.random()
            remove = bool(rng.random() < 0.5)
            if kind == "zero":
                k = "MeasureZ" if roll < 0.5 else "Terminate"
            else:
                k = "MeasureZ" if roll < 0.4 else ("MeasureX" if roll < 0.7 else None)
            if k:
                ops.append(Op(k, step(), (a,), record=rec(), remove=remove))
        elif room >= 2:
            targets = [q for g in groups for q in g[1:] if q not in measured]
            if not targets:
                continue
            m = targets[int(rng.integers(len(targets)))]
            b, u = new(True), new(False)
            e = int(rng.integers(1, d))
            ops.append(Op("Cnot", step(), (b, m), power=e))
            ops.append(Op("Cnot", step(), (b, u)))
            r = rec()
            ops.append(Op("MeasureZ", step(), (u,), record=r))
            if rng.random() < 0.8:
                ops.append(Op("CtrlX", step(), (m,), x_terms=((r, -e % d),)))
    return QlncCircuit(d, tuple(qubits), tuple(ops), meta={"mode": "random", "groups": groups})
