"""Scheduled QLNC circuits: operations, validation, depth, JSON/DOT and execution."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, Sequence

import numpy as np

from .field import Modulus
from .tableau import PLUS, ZERO, OutcomeSource, ParityTableau

__all__ = [
    "KINDS",
    "Op",
    "QlncCircuit",
    "ExecutionResult",
    "TableauRun",
    "execute",
    "validate",
    "quantum_depth",
    "expanded_depth",
    "defer_measurements",
    "random_circuit",
    "prep_zero",
    "prep_plus",
    "cnot",
    "pauli_x",
    "pauli_z",
    "ctrl_x",
    "ctrl_z",
    "measure_x",
    "measure_z",
    "terminate",
]

KINDS = (
    "PrepZero",
    "PrepPlus",
    "Cnot",
    "X",
    "Z",
    "CtrlX",
    "CtrlZ",
    "CtrlY",
    "MeasureX",
    "MeasureZ",
    "Terminate",
)
PREPS = ("PrepZero", "PrepPlus")
MEASUREMENTS = ("MeasureX", "MeasureZ", "Terminate")
CONTROLLED = ("CtrlX", "CtrlZ", "CtrlY")


@dataclass(frozen=True)
class Op:
    """One scheduled operation.

    ``x_terms``/``z_terms`` are ``((record, multiplier), ...)``: a classically
    controlled Pauli applies ``X**sum(mult * outcome[record])`` (likewise Z).
    ``CtrlY`` carries both and applies the X part then the Z part. ``power``
    is the exponent of an unconditional ``X``/``Z`` or of a ``Cnot`` (Add gate).
    """

    kind: str
    t: int
    qubits: tuple
    record: Hashable = None
    power: int = 1
    x_terms: tuple = ()
    z_terms: tuple = ()
    remove: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operation kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "x_terms", tuple((r, int(m)) for r, m in self.x_terms))
        object.__setattr__(self, "z_terms", tuple((r, int(m)) for r, m in self.z_terms))
        want = 2 if self.kind == "Cnot" else 1
        if len(self.qubits) != want:
            raise ValueError(f"{self.kind} takes {want} qubit(s), got {self.qubits}")

    @property
    def target(self):
        return self.qubits[-1]

    def records_used(self) -> list:
        return [r for r, _ in self.x_terms] + [r for r, _ in self.z_terms]

    def to_json(self) -> dict:
        args: dict = {"qubits": list(self.qubits)}
        if self.record is not None:
            args["record"] = self.record
        if self.power != 1:
            args["power"] = self.power
        if self.x_terms:
            args["x_terms"] = [list(t) for t in self.x_terms]
        if self.z_terms:
            args["z_terms"] = [list(t) for t in self.z_terms]
        if self.remove:
            args["remove"] = True
        return {"kind": self.kind, "args": args, "t": self.t}

    @classmethod
    def from_json(cls, obj) -> "Op":
        a = obj.get("args", {})
        return cls(
            kind=obj["kind"],
            t=int(obj["t"]),
            qubits=tuple(a["qubits"]),
            record=a.get("record"),
            power=int(a.get("power", 1)),
            x_terms=tuple(tuple(x) for x in a.get("x_terms", ())),
            z_terms=tuple(tuple(z) for z in a.get("z_terms", ())),
            remove=bool(a.get("remove", False)),
        )


def _terms(source, multiplier=1) -> tuple:
    if isinstance(source, (list, tuple)):
        return tuple((r, m) for r, m in source)
    return ((source, multiplier),)


def prep_zero(q, t=0) -> Op:
    return Op("PrepZero", t, (q,))


def prep_plus(q, t=0) -> Op:
    return Op("PrepPlus", t, (q,))


def cnot(control, target, t, power=1) -> Op:
    return Op("Cnot", t, (control, target), power=power)


def pauli_x(q, t, power=1) -> Op:
    return Op("X", t, (q,), power=power)


def pauli_z(q, t, power=1) -> Op:
    return Op("Z", t, (q,), power=power)


def ctrl_x(q, source, t, multiplier=1) -> Op:
    """X on ``q`` controlled by one record, or by a list of ``(record, mult)`` terms."""
    return Op("CtrlX", t, (q,), x_terms=_terms(source, multiplier))


def ctrl_z(q, source, t, multiplier=1) -> Op:
    return Op("CtrlZ", t, (q,), z_terms=_terms(source, multiplier))


def measure_x(q, record, t, remove=False) -> Op:
    return Op("MeasureX", t, (q,), record=record, remove=remove)


def measure_z(q, record, t, remove=False) -> Op:
    return Op("MeasureZ", t, (q,), record=record, remove=remove)


def terminate(q, record, t, remove=False) -> Op:
    return Op("Terminate", t, (q,), record=record, remove=remove)


@dataclass(frozen=True)
class QlncCircuit:
    """Immutable scheduled circuit over qudits of prime dimension ``d``.

    ``edges`` is the undirected interaction graph (``None`` means unrestricted);
    ``graph_ref`` names the network the circuit was compiled for.
    """

    d: int
    qubits: tuple
    ops: tuple
    edges: frozenset | None = None
    graph_ref: str | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "d", int(Modulus(int(self.d))))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "ops", tuple(sorted(self.ops, key=lambda o: o.t)))
        if self.edges is not None:
            object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))

    @property
    def n(self) -> int:
        return len(self.qubits)

    def steps(self) -> list[int]:
        return sorted({o.t for o in self.ops})

    def ops_at(self, t) -> list[Op]:
        return [o for o in self.ops if o.t == t]

    def records(self) -> dict:
        return {o.record: o for o in self.ops if o.kind in MEASUREMENTS}

    def with_ops(self, ops: Iterable[Op]) -> "QlncCircuit":
        return replace(self, ops=tuple(ops))

    def to_json(self) -> dict:
        graph = {"ref": self.graph_ref}
        if self.edges is not None:
            graph["edges"] = sorted(sorted(e, key=str) if len(e) == 2 else list(e) * 2 for e in self.edges)
        return {
            "d": self.d,
            "graph": graph,
            "qubits": list(self.qubits),
            "ops": [o.to_json() for o in self.ops],
            "meta": _json_safe(self.meta),
        }

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    @classmethod
    def from_json(cls, obj) -> "QlncCircuit":
        if isinstance(obj, str):
            obj = json.loads(obj)
        graph = obj.get("graph") or {}
        edges = graph.get("edges")
        return cls(
            d=obj["d"],
            qubits=tuple(obj["qubits"]),
            ops=tuple(Op.from_json(o) for o in obj["ops"]),
            edges=None if edges is None else frozenset(frozenset(e) for e in edges),
            graph_ref=graph.get("ref"),
            meta=dict(obj.get("meta") or {}),
        )

    def to_dot(self) -> str:
        """Interaction graph with each edge labelled by the steps its CNOTs use."""
        uses = defaultdict(list)
        for o in self.ops:
            if o.kind == "Cnot":
                uses[o.qubits].append(o.t)
        lines = [f'digraph "{self.graph_ref or "circuit"}" {{']
        for q in self.qubits:
            lines.append(f'  "{q}";')
        drawn = set()
        for (a, b), ts in sorted(uses.items(), key=lambda kv: min(kv[1])):
            label = ",".join(str(t) for t in sorted(ts))
            lines.append(f'  "{a}" -> "{b}" [label="{label}"];')
            drawn.add(frozenset((a, b)))
        for e in sorted(self.edges or (), key=lambda e: sorted(map(str, e))):
            if e not in drawn and len(e) == 2:
                a, b = sorted(e, key=str)
                lines.append(f'  "{a}" -> "{b}" [dir=none, style=dashed];')
        lines.append("}")
        return "\n".join(lines)


def _json_safe(meta: dict) -> dict:
    """Entries of ``meta`` that survive a JSON round trip unchanged in meaning."""
    out = {}
    for k, v in meta.items():
        try:
            json.dumps(v)
        except TypeError:
            continue
        out[k] = v
    return out


# -- validation ---------------------------------------------------------------
def validate(c: QlncCircuit) -> list[str]:
    """Scheduling and locality violations; an empty list means the circuit is valid."""
    problems: list[str] = []
    qubits = set(c.qubits)
    record_step: dict = {}
    for o in c.ops:
        if o.t < 0:
            problems.append(f"t={o.t}: negative time step")
        for q in o.qubits:
            if q not in qubits:
                problems.append(f"t={o.t}: {o.kind} on unknown qubit {q!r}")
        if o.kind in MEASUREMENTS:
            if o.record is None:
                problems.append(f"t={o.t}: {o.kind} on {o.target!r} has no record id")
            elif o.record in record_step:
                problems.append(f"t={o.t}: duplicate record id {o.record!r}")
            else:
                record_step[o.record] = o.t
        if o.kind == "Cnot":
            a, b = o.qubits
            if a == b:
                problems.append(f"t={o.t}: Cnot control equals target {a!r}")
            elif c.edges is not None and frozenset((a, b)) not in c.edges:
                problems.append(f"t={o.t}: Cnot {a!r}->{b!r} is not an edge of the graph")
        if o.kind in CONTROLLED and not (o.x_terms or o.z_terms):
            problems.append(f"t={o.t}: {o.kind} on {o.target!r} has no controlling record")
    for o in c.ops:
        for r in o.records_used():
            if r not in record_step:
                problems.append(f"t={o.t}: {o.kind} on {o.target!r} references unknown record {r!r}")
            elif record_step[r] >= o.t:
                problems.append(
                    f"t={o.t}: {o.kind} on {o.target!r} uses record {r!r} from step {record_step[r]}"
                )
    by_step: dict = defaultdict(lambda: defaultdict(list))
    for o in c.ops:
        for q in o.qubits:
            by_step[o.t][q].append(o)
    for t in sorted(by_step):
        for q, ops in by_step[t].items():
            if len(ops) > 1 and not all(o.kind == "CtrlX" for o in ops):
                kinds = ", ".join(o.kind for o in ops)
                problems.append(f"t={t}: qubit {q!r} is used by several operations ({kinds})")
    live: dict = {}
    for o in c.ops:
        for q in o.qubits:
            if o.kind in PREPS:
                live[q] = True
            elif not live.get(q):
                problems.append(f"t={o.t}: {o.kind} uses qubit {q!r} before it is prepared")
        if o.kind in MEASUREMENTS and o.remove:
            live[o.target] = False
    return problems


def quantum_depth(c: QlncCircuit) -> int:
    """Number of distinct time steps that contain at least one operation."""
    return len({o.t for o in c.ops})


def expanded_depth(c: QlncCircuit) -> int:
    """Depth when an Add gate of power ``m`` is realised as ``m`` elementary Add layers."""
    layers = defaultdict(lambda: 1)
    for o in c.ops:
        if o.kind == "Cnot":
            layers[o.t] = max(layers[o.t], o.power % c.d or c.d)
        else:
            layers[o.t] = max(layers[o.t], 1)
    return sum(layers.values())


# -- execution ----------------------------------------------------------------
@dataclass
class ExecutionResult:
    tableau: ParityTableau
    outcomes: dict
    corrections: list = field(default_factory=list)
    n_deltas: list = field(default_factory=list)


def control_exponent(terms, outcomes: dict, d: int) -> int:
    return sum(m * outcomes[r] for r, m in terms) % d


class TableauRun:
    """Applies operations one at a time to a parity tableau."""

    def __init__(self, d: int, src: OutcomeSource, check_invariants: bool = False):
        self.d = d
        self.src = src
        self.check = check_invariants
        self.tableau = ParityTableau(d, np.ones((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64), [])
        self.result = ExecutionResult(self.tableau, {})

    def copy(self) -> "TableauRun":
        out = TableauRun(self.d, self.src, self.check)
        out.tableau = self.tableau.copy()
        r = self.result
        out.result = ExecutionResult(out.tableau, dict(r.outcomes), list(r.corrections), list(r.n_deltas))
        return out

    def apply(self, o: Op):
        tab, src, d = self.tableau, self.src, self.d
        outcomes = self.result.outcomes
        q = o.target
        before, drawn = tab.N, len(src.drawn)
        if o.kind in PREPS:
            prep = ZERO if o.kind == "PrepZero" else PLUS
            if q in tab:
                tab.reset(q, prep)
            else:
                tab.add_qubit(q, prep)
        elif o.kind == "Cnot":
            tab.apply_cnot(o.qubits[0], q, o.power)
        elif o.kind == "X":
            tab.apply_x(q, o.power)
        elif o.kind == "Z":
            tab.apply_z(q, o.power)
        elif o.kind in CONTROLLED:
            if o.x_terms:
                tab.apply_x(q, control_exponent(o.x_terms, outcomes, d))
            if o.z_terms:
                tab.apply_z(q, control_exponent(o.z_terms, outcomes, d))
        elif o.kind == "MeasureX":
            outcomes[o.record] = tab.measure_x(q, src, o.record)
        elif o.kind == "MeasureZ":
            outcomes[o.record] = tab.measure_z(q, src, o.record)
        elif o.kind == "Terminate":
            rec = tab.terminate(q, src, o.record)
            outcomes[o.record] = rec.outcome
            self.result.corrections.append((o.record, rec.corrections))
        if o.kind in MEASUREMENTS:
            random = len(src.drawn) > drawn
            self.result.n_deltas.append((o.record, o.kind, tab.N - before, random))
            if o.remove:
                tab.remove_qubit(q)
        if self.check:
            tab.check_invariants()


    def apply_all(self, ops: Sequence[Op]):
        """Apply ``ops`` in order, adding runs of fresh preparations in bulk."""
        i = 0
        while i < len(ops):
            j = i
            fresh: list = []
            while j < len(ops) and ops[j].kind in PREPS and ops[j].target not in self.tableau and ops[j].target not in fresh:
                fresh.append(ops[j].target)
                j += 1
            if len(fresh) > 1:
                self.tableau.add_qubits(fresh, [ZERO if o.kind == "PrepZero" else PLUS for o in ops[i:j]])
                if self.check:
                    self.tableau.check_invariants()
                i = j
            else:
                self.apply(ops[i])
                i += 1


def execute(c: QlncCircuit, src: OutcomeSource, check_invariants: bool = False) -> ExecutionResult:
    """Run the circuit on the parity tableau engine, op by op in time order.

    ``n_deltas`` records ``(record, kind, change in N, outcome was random)``
    for every measurement, taken before a destructively measured qubit is
    removed; ``corrections`` records ``(record, {qubit: exponent})`` for
    terminations.
    """
    run = TableauRun(c.d, src, check_invariants)
    run.apply_all(c.ops)
    return run.result


# -- deferred measurement -----------------------------------------------------
def defer_measurements(c: QlncCircuit) -> QlncCircuit:
    """Replace X corrections controlled by Z outcomes with Add gates from the measured qubit.

    The Z-measurements themselves move to the end. Each operation gets its own
    step and the graph restriction is dropped, since the new gates need not
    follow graph edges.
    """
    zrec = {o.record: o.target for o in c.ops if o.kind == "MeasureZ"}
    measured_at = {o.target: i for i, o in enumerate(c.ops) if o.kind == "MeasureZ"}
    for i, o in enumerate(c.ops):
        for r in [r for r, _ in o.z_terms]:
            if r in zrec:
                raise ValueError(f"cannot defer record {r!r}: it controls a Z correction")
        for q in o.qubits:
            if q in measured_at and i > measured_at[q]:
                if not (o.kind == "Cnot" and o.qubits[0] == q):
                    raise ValueError(f"cannot defer: qubit {q!r} is used after its Z-measurement")
    ops: list[Op] = []
    tail: list[Op] = []
    t = 0
    for o in c.ops:
        if o.kind == "MeasureZ":
            tail.append(o)
            continue
        deferred = [(r, m) for r, m in o.x_terms if r in zrec]
        kept = tuple((r, m) for r, m in o.x_terms if r not in zrec)
        for r, m in deferred:
            ops.append(Op("Cnot", t, (zrec[r], o.target), power=m % c.d))
            t += 1
        if deferred and not kept and not o.z_terms:
            continue
        if deferred:
            kind = "CtrlX" if not o.z_terms else ("CtrlY" if kept else "CtrlZ")
            o = replace(o, kind=kind, x_terms=kept)
        ops.append(replace(o, t=t))
        t += 1
    for o in tail:
        ops.append(replace(o, t=t))
        t += 1
    return replace(c, ops=tuple(ops), edges=None)


# -- random circuits ------------------------------------------------------------
def random_circuit(
    rng: np.random.Generator,
    n: int,
    n_ops: int,
    d: int,
    *,
    weights: dict | None = None,
) -> QlncCircuit:
    """Random valid circuit on ``n`` qubits, one operation per step.

    Any measurement may discard its qubit. Qubits are re-prepared only
    after a Z-measurement or a removal, when they are certainly
    disentangled.
    """
    w = {
        "Cnot": 5,
        "X": 1,
        "Z": 1,
        "MeasureX": 1.2,
        "MeasureZ": 1.2,
        "Terminate": 1.2,
        "CtrlX": 1,
        "CtrlZ": 1,
        "CtrlY": 0.5,
        "Reset": 0.6,
    }
    if weights:
        w.update(weights)
    kinds = list(w)
    probs = np.array([w[k] for k in kinds], dtype=float)
    probs /= probs.sum()
    qubits = list(range(1, n + 1))
    ops: list[Op] = []
    for q in qubits:
        ops.append(Op("PrepPlus" if rng.random() < 0.5 else "PrepZero", 0, (q,)))
    live = set(qubits)
    resettable: set = set()
    records: list = []
    t = 1
    while len(ops) < n_ops:
        kind = kinds[rng.choice(len(kinds), p=probs)]
        pool = sorted(live)
        if not pool:
            kind = "Reset"
        if kind == "Reset":
            cand = sorted(resettable | (set(qubits) - live))
            if not cand:
                continue
            q = cand[rng.integers(len(cand))]
            ops.append(Op("PrepPlus" if rng.random() < 0.5 else "PrepZero", t, (q,)))
            live.add(q)
            resettable.discard(q)
        elif not pool:
            continue
        elif kind == "Cnot":
            if len(pool) < 2:
                continue
            a, b = rng.choice(pool, size=2, replace=False)
            ops.append(Op("Cnot", t, (int(a), int(b)), power=int(rng.integers(1, d))))
            resettable -= {int(a), int(b)}
        elif kind in ("X", "Z"):
            q = pool[rng.integers(len(pool))]
            ops.append(Op(kind, t, (q,), power=int(rng.integers(1, d))))
            resettable.discard(q)
        elif kind in CONTROLLED:
            if not records:
                continue
            q = pool[rng.integers(len(pool))]
            k = int(rng.integers(1, min(3, len(records)) + 1))
            picks = rng.choice(len(records), size=k, replace=False)
            terms = tuple((records[i], int(rng.integers(1, d))) for i in sorted(picks))
            xs = terms if kind in ("CtrlX", "CtrlY") else ()
            zs = terms if kind in ("CtrlZ", "CtrlY") else ()
            ops.append(Op(kind, t, (q,), x_terms=xs, z_terms=zs))
            resettable.discard(q)
        else:
            q = pool[rng.integers(len(pool))]
            rec = f"m{len(records)}"
            remove = bool(rng.random() < 0.3)
            ops.append(Op(kind, t, (q,), record=rec, remove=remove))
            records.append(rec)
            if remove:
                live.discard(q)
            elif kind == "MeasureZ":
                resettable.add(q)
            else:
                resettable.discard(q)
        t += 1
    return QlncCircuit(d, tuple(qubits), tuple(ops))
