"""Compilation of classical linear network codes into QLNC circuits.

Every compiler drives a dry-run parity tableau alongside the ops it emits.
The dry run takes outcome 0 for every random measurement; since the rows
of the tableau evolve independently of the outcomes, the Z-correction
exponents it yields are valid on every branch and the emitted circuit only
depends on outcomes through its classical controls.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import CONTROLLED, MEASUREMENTS, Op, QlncCircuit, quantum_depth, expanded_depth, validate
from .coloring import (
    directed_edge_coloring,
    greedy_vertex_coloring,
    is_proper_directed_edge_coloring,
    is_proper_vertex_coloring,
)
from .field import rref
from .network import RECEIVER, RELAY, TRANSMITTER, LinearCode, Network, separation_example, validate_code
from .tableau import OutcomeSource, ParityTableau

__all__ = [
    "CompileError",
    "CompilerReport",
    "DelayedCorrectionPlan",
    "IndependenceWitness",
    "depth_bound",
    "compile_inorder",
    "compile_constant_depth",
    "compile_chain_sequential",
    "check_independence",
    "butterfly_out_of_order",
    "separation_circuit",
    "composite_swap_circuit",
    "report",
]


class CompileError(ValueError):
    pass


def depth_bound(A: int, B: int) -> int:
    """Depth guaranteed by the colour-round schedule: ``2(A-1)(B+1)+1``."""
    if A < 1 or B < 1:
        raise ValueError("A and B must be at least 1")
    return 2 * (A - 1) * (B + 1) + 1


class _Builder:
    """Emits scheduled ops while tracking a dry-run tableau."""

    def __init__(self, d: int, prefix: str = "m"):
        self.d = d
        self.ops: list[Op] = []
        self.t = 0
        self.tab = ParityTableau(d, np.ones((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64), [])
        self.src = OutcomeSource.constant(0)
        self.prefix = prefix
        self.count = 0

    def new_step(self) -> int:
        self.t += 1
        return self.t

    def prep(self, q, plus: bool, t: int | None = None):
        t = self.t if t is None else t
        kind = "PrepPlus" if plus else "PrepZero"
        self.ops.append(Op(kind, t, (q,)))
        if q in self.tab:
            self.tab.reset(q, "plus" if plus else "zero")
        else:
            self.tab.add_qubit(q, "plus" if plus else "zero")

    def cnot(self, a, b, power: int = 1, t: int | None = None):
        power %= self.d
        if not power:
            return
        self.ops.append(Op("Cnot", self.t if t is None else t, (a, b), power=power))
        self.tab.apply_cnot(a, b, power)

    def record(self) -> str:
        self.count += 1
        return f"{self.prefix}{self.count}"

    def measure_z(self, q, remove: bool = False) -> str:
        rec = self.record()
        self.ops.append(Op("MeasureZ", self.t, (q,), record=rec, remove=remove))
        self.tab.measure_z(q, self.src, rec)
        if remove:
            self.tab.remove_qubit(q)
        return rec

    def terminate_many(self, qubits: Sequence, avoid: Iterable = (), remove: bool = False) -> tuple[dict, dict]:
        """X-measure ``qubits`` in the current step; return records and Z corrections.

        Corrections are ``{target: [(record, exponent), ...]}`` and must be
        applied at a later step. Each terminated qubit's own restoring Z is
        included unless it is removed.
        """
        qubits = list(qubits)
        avoid = set(avoid) | set(qubits)
        corrections: dict = defaultdict(list)
        records = {}
        vs = {}
        for q in qubits:
            try:
                vs[q] = self.tab.correction_exponents(q, exclude=avoid)
            except ValueError:
                vs[q] = self.tab.correction_exponents(q, exclude=set(qubits))
        for q in qubits:
            rec = self.record()
            records[q] = rec
            self.ops.append(Op("MeasureX", self.t, (q,), record=rec, remove=remove))
            for target, e in vs[q].items():
                corrections[target].append((rec, (-e) % self.d))
            if not remove:
                corrections[q].append((rec, 1))
        for q in qubits:
            self.tab.measure_x(q, self.src, records[q])
            if remove:
                self.tab.remove_qubit(q)
        return records, dict(corrections)

    def controlled(self, x_terms: Mapping, z_terms: Mapping, t: int | None = None):
        """One merged classically controlled Pauli per target (CtrlY when both parts exist)."""
        t = self.t if t is None else t
        for q in sorted(set(x_terms) | set(z_terms), key=str):
            xs = _merge_terms(x_terms.get(q, ()), self.d)
            zs = _merge_terms(z_terms.get(q, ()), self.d)
            if not xs and not zs:
                continue
            kind = "CtrlY" if xs and zs else ("CtrlX" if xs else "CtrlZ")
            self.ops.append(Op(kind, t, (q,), x_terms=xs, z_terms=zs))

    def circuit(self, qubits, edges, name, meta=None) -> QlncCircuit:
        c = QlncCircuit(self.d, tuple(qubits), tuple(self.ops), edges=edges, graph_ref=name, meta=dict(meta or {}))
        problems = validate(c)
        if problems:
            raise CompileError("emitted circuit is invalid: " + "; ".join(problems[:5]))
        return c


def _merge_terms(terms: Iterable, d: int) -> tuple:
    acc: dict = {}
    for r, m in terms:
        acc[r] = (acc.get(r, 0) + m) % d
    return tuple((r, m) for r, m in acc.items() if m)


def _code_edges(net: Network, code: LinearCode) -> list[tuple]:
    return [e for e in net.edges if code.beta(e, net.d)]


def _check_code(net: Network, code: LinearCode):
    net.topological_order()
    if not validate_code(net, code):
        raise CompileError(f"the code does not deliver every multicast stream on {net.name}")


def _active_nodes(net: Network, edges) -> list:
    used = {v for e in edges for v in e}
    return [v for v in net.nodes if v in used]


# -- in-order compilation ---------------------------------------------------------------
def compile_inorder(net: Network, code: LinearCode, destructive: bool = False) -> QlncCircuit:
    """Simulate the code in its natural order, then terminate every relay at once.

    Transmitters start in |+>, everything else in |0>. CNOTs are layered as
    soon as their tail has received all its inputs. With ``destructive`` the
    relays are discarded after their X-measurement.
    """
    _check_code(net, code)
    d = net.d
    edges = _code_edges(net, code)
    nodes = _active_nodes(net, edges)
    b = _Builder(d)
    for v in nodes:
        b.prep(v, net.roles[v] == TRANSMITTER, t=0)
    topo = {v: i for i, v in enumerate(net.topological_order())}
    ready: dict = defaultdict(int)  # last step at which v was a target
    busy: dict = defaultdict(set)
    for a, c in sorted(edges, key=lambda e: (topo[e[0]], topo[e[1]])):
        s = ready[a] + 1
        while a in busy[s] or c in busy[s]:
            s += 1
        busy[s] |= {a, c}
        ready[c] = max(ready[c], s)
        b.ops.append(Op("Cnot", s, (a, c), power=code.beta((a, c), d)))
        b.tab.apply_cnot(a, c, code.beta((a, c), d))
    b.t = max(busy, default=0)
    relays = [v for v in nodes if net.roles[v] == RELAY]
    if relays:
        b.new_step()
        _, corr = b.terminate_many(relays, remove=destructive)
        if corr:
            b.new_step()
            b.controlled({}, corr)
    meta = {"mode": "inorder", "groups": net.groups()}
    return b.circuit(nodes, net.graph_edges, net.name, meta)


# -- constant-depth compilation ----------------------------------------------------------
@dataclass
class DelayedCorrectionPlan:
    """Outcome dependence of every node's forwarded value.

    ``error[v]`` maps Z-measurement records to coefficients: the value node
    ``v`` forwards equals its classical value plus ``sum coef * outcome``.
    ``forwarded_own`` lists relays that sent their own fresh indeterminate.
    """

    error: dict
    forwarded_own: set
    order: list
    receiver_terms: dict = field(default_factory=dict)


def _delayed_corrections(net, code, edges, y_records: dict, forwarded_own: set) -> DelayedCorrectionPlan:
    d = net.d
    err: dict = {}
    order = [v for v in net.topological_order() if any(v in e for e in edges)]
    receiver_terms = {}
    for v in order:
        acc: dict = defaultdict(int)
        for e in edges:
            if e[1] == v:
                for r, m in err.get(e[0], {}).items():
                    acc[r] = (acc[r] + code.beta(e, d) * m) % d
        if net.roles[v] == RELAY and v in forwarded_own:
            acc[y_records[v]] = (acc[y_records[v]] - 1) % d
        err[v] = {r: m for r, m in acc.items() if m}
        if net.roles[v] == RECEIVER:
            receiver_terms[v] = [(r, (-m) % d) for r, m in err[v].items()]
            err[v] = {}
    return DelayedCorrectionPlan(err, set(forwarded_own), order, receiver_terms)


def compile_constant_depth(
    net: Network,
    code: LinearCode,
    vc: Mapping | None = None,
    ec: Mapping | None = None,
) -> QlncCircuit:
    """Colour-round schedule whose depth does not grow with the network size.

    ``vc`` is a proper vertex colouring (greedy on the interaction graph by
    default) and ``ec`` a proper directed-edge colouring of the code edges
    (``delta`` colours by default). Relays that receive inputs after their
    own round forward a fresh indeterminate instead (sent with coefficient
    ``-beta``) and are Z-measured at the end; the outcomes are folded into X
    corrections on the receivers.
    """
    problems = net.precondition_violations()
    if problems:
        raise CompileError("; ".join(problems))
    _check_code(net, code)
    d = net.d
    edges = _code_edges(net, code)
    nodes = _active_nodes(net, edges)
    if vc is None:
        vc = greedy_vertex_coloring(net.nodes, net.graph_edges)
    if ec is None:
        ec = directed_edge_coloring(edges)
    missing = [v for v in nodes if v not in vc]
    if missing:
        raise CompileError(f"vertex colouring misses nodes {missing}")
    if not is_proper_vertex_coloring(vc, edges):
        raise CompileError("vertex colouring is not proper on the code edges")
    if any(e not in ec for e in edges) or not is_proper_directed_edge_coloring(ec, edges):
        raise CompileError("directed-edge colouring is missing edges or is not proper")
    colour = {v: vc[v] for v in nodes}
    A = max(colour.values(), default=1)
    B = max((ec[e] for e in edges), default=1)
    out_edges = {v: [e for e in edges if e[0] == v] for v in nodes}
    in_nbrs = {v: [e[0] for e in edges if e[1] == v] for v in nodes}
    role = net.roles

    b = _Builder(d)
    zero_prepped = set()
    for v in nodes:
        earlier = any(colour[p] < colour[v] for p in in_nbrs[v])
        plus = bool(out_edges[v]) and not earlier
        if not plus:
            zero_prepped.add(v)
        b.prep(v, plus, t=0)

    def sweep(senders: Iterable, sign: Mapping):
        by_colour = defaultdict(list)
        for v in senders:
            for e in out_edges[v]:
                by_colour[ec[e]].append(e)
        for j in sorted(by_colour):
            b.new_step()
            for a, c in by_colour[j]:
                b.cnot(a, c, sign[a] * code.beta((a, c), d))

    forwarded_own: set = set()

    def first_sign(v) -> int:
        # a relay that starts in |+> forwards its own indeterminate
        if role[v] == RELAY and v not in zero_prepped:
            forwarded_own.add(v)
            return -1
        return 1

    rounds = sorted({colour[v] for v in nodes})
    for h in rounds:
        senders = [v for v in nodes if colour[v] == h and role[v] != RECEIVER and out_edges[v]]
        sweep(senders, {v: first_sign(v) for v in senders})
        if h == A:
            break
        terminating = [v for v in senders if role[v] == RELAY and v in zero_prepped]
        if not terminating:
            continue
        b.new_step()
        _, corr = b.terminate_many(terminating)
        b.new_step()
        b.controlled({}, corr)
        late = [v for v in terminating if any(colour[p] > h for p in in_nbrs[v])]
        forwarded_own.update(late)
        sweep(late, {v: -1 for v in late})

    relays = [v for v in nodes if role[v] == RELAY]
    early = [v for v in relays if colour[v] < A]
    final = [v for v in relays if colour[v] == A]
    y_records: dict = {}
    z_corr: dict = {}
    if relays:
        b.new_step()
        # solve the colour-A terminations before the Z-measurements collapse anything
        pending = {}
        for v in final:
            try:
                pending[v] = b.tab.correction_exponents(v, exclude=set(final) | set(early))
            except ValueError:
                pending[v] = b.tab.correction_exponents(v, exclude=set(final))
        for v in early:
            y_records[v] = b.measure_z(v)
        records = {}
        for v in final:
            rec = b.record()
            records[v] = rec
            b.ops.append(Op("MeasureX", b.t, (v,), record=rec))
        for v in final:
            b.tab.measure_x(v, b.src, records[v])
            for target, e in pending[v].items():
                z_corr.setdefault(target, []).append((records[v], (-e) % d))
            z_corr.setdefault(v, []).append((records[v], 1))
    plan = _delayed_corrections(net, code, edges, y_records, forwarded_own)
    x_corr = {q: terms for q, terms in plan.receiver_terms.items() if terms}
    if x_corr or z_corr:
        b.new_step()
        b.controlled(x_corr, z_corr)
    meta = {
        "mode": "constdepth",
        "A": A,
        "B": B,
        "bound": depth_bound(A, B),
        "groups": net.groups(),
        "plan": plan,
    }
    return b.circuit(nodes, net.graph_edges, net.name, meta)


# -- sequential chains --------------------------------------------------------------------
def _shortest_path(adj: Mapping, a, z, blocked: set) -> list | None:
    prev = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == z:
            path = [v]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for u in sorted(adj[v], key=str):
            if u not in prev and (u not in blocked or u == z):
                prev[u] = v
                queue.append(u)
    return None


def compile_chain_sequential(pairs: Sequence[tuple], net: Network) -> QlncCircuit:
    """Bell pairs along shortest paths, one batch of vertex-disjoint chains at a time.

    Each batch takes four steps (preparation, two CNOT layers, measurements);
    all endpoint corrections share one final step, so ``k`` batches need at
    most ``4k + 1`` steps. Odd-position qubits record the difference of their
    neighbours, the X-measured even ones kick a phase that is undone on the
    first endpoint.
    """
    d = net.d
    adj: dict = defaultdict(set)
    for e in net.graph_edges:
        a, c = tuple(e)
        adj[a].add(c)
        adj[c].add(a)
    endpoints = {v for p in pairs for v in p}
    if len(endpoints) != 2 * len(pairs):
        raise CompileError("pairs must use distinct endpoints")
    chains = []
    for a, z in pairs:
        if a not in adj or z not in adj:
            raise CompileError(f"pair ({a!r}, {z!r}) is not connected")
        path = _shortest_path(adj, a, z, endpoints - {a, z})
        if path is None:
            raise CompileError(f"pair ({a!r}, {z!r}) is not connected")
        chains.append(path)
    batches: list[list] = []
    for path in chains:
        for batch in batches:
            if not any(set(path) & set(other) for other in batch):
                batch.append(path)
                break
        else:
            batches.append([path])

    b = _Builder(d)
    x_corr: dict = defaultdict(list)
    z_corr: dict = defaultdict(list)
    for k, batch in enumerate(batches):
        t0 = 4 * k
        b.t = t0
        for path in batch:
            for j, q in enumerate(path):
                b.prep(q, j % 2 == 0)
        b.t = t0 + 1
        for path in batch:
            for j in range(2, len(path), 2):
                b.cnot(path[j], path[j - 1], 1)
        b.t = t0 + 2
        for path in batch:
            last = len(path) - 1
            for j in range(0, last, 2):
                # interior odd qubits hold a_{j+1} - a_{j-1}; the far endpoint holds a_{last-1}
                b.cnot(path[j], path[j + 1], 1 if j + 1 == last else -1)
        b.t = t0 + 3
        for path in batch:
            last = len(path) - 1
            for j in range(1, last):
                q = path[j]
                if j % 2:
                    rec = b.measure_z(q)
                    x_corr[path[-1]].append((rec, -1))
                else:
                    rec = b.record()
                    b.ops.append(Op("MeasureX", b.t, (q,), record=rec))
                    b.tab.measure_x(q, b.src, rec)
                    z_corr[path[0]].append((rec, -1))
    b.t = 4 * len(batches)
    b.controlled(dict(x_corr), dict(z_corr))
    qubits = sorted({q for path in chains for q in path}, key=str)
    meta = {"mode": "chain", "batches": len(batches), "chains": chains, "groups": [list(p) for p in pairs]}
    return b.circuit(qubits, net.graph_edges, net.name, meta)


# -- measurement independence ------------------------------------------------------------
@dataclass
class IndependenceWitness:
    """Row-reduced Z-measurement formulas with non-final symbols first.

    ``verdict`` holds iff every nonzero row of ``matrix`` has a nonzero entry
    among the first ``n_r`` columns, i.e. no measurement fixes a combination
    of final-state symbols alone.
    """

    verdict: bool
    matrix: np.ndarray
    n_r: int
    n_m: int
    symbols: list
    offending_row: int | None = None
    offending_record: object = None
    formulas_ok: bool = True

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "n_r": self.n_r,
            "n_M": self.n_m,
            "offending_row": self.offending_row,
            "offending_record": self.offending_record,
            "formulas_ok": self.formulas_ok,
        }


def _deferred_formulas(c: QlncCircuit):
    """Symbolic run of the deferred-measurement version of ``c``.

    Returns final formulas per live qubit and the Z-measurement rows, all as
    dicts ``symbol -> coefficient`` (constants dropped).
    """
    d = c.d
    f: dict = {}
    live: set = set()
    at_measure: dict = {}
    rows: list = []
    nsym = 0

    def fresh():
        nonlocal nsym
        nsym += 1
        return {nsym: 1}

    def add(into, other, m):
        out = dict(into)
        for s, v in other.items():
            out[s] = (out.get(s, 0) + m * v) % d
        return {s: v for s, v in out.items() if v}

    zrecords = {o.record for o in c.ops if o.kind == "MeasureZ"}
    for o in c.ops:
        q = o.target
        if o.kind == "PrepPlus":
            f[q] = fresh()
            live.add(q)
        elif o.kind == "PrepZero":
            f[q] = {}
            live.add(q)
        elif o.kind == "Cnot":
            f[q] = add(f[q], f[o.qubits[0]], o.power)
        elif o.kind in CONTROLLED:
            for r, m in o.x_terms:
                if r in zrecords:
                    f[q] = add(f[q], at_measure[r], m)
        elif o.kind in ("MeasureX", "Terminate"):
            f[q] = fresh()
        elif o.kind == "MeasureZ":
            at_measure[o.record] = dict(f[q])
            rows.append((o.record, dict(f[q])))
            f[q] = {}
        if o.kind in MEASUREMENTS and o.remove:
            live.discard(q)
    return {q: f[q] for q in live}, rows, nsym


def check_independence(c: QlncCircuit, groups: Sequence[Sequence] | None = None) -> IndependenceWitness:
    """Decide whether the Z-measurements leave the target entangled state intact.

    Final symbols are those appearing in the final formulas of the declared
    group qubits (``c.meta['groups']`` by default).
    """
    if groups is None:
        groups = c.meta.get("groups")
    if groups is None:
        raise ValueError("no multicast grouping declared for this circuit")
    d = c.d
    final, rows, nsym = _deferred_formulas(c)
    members = [q for g in groups for q in g]
    unknown = [q for q in members if q not in c.qubits]
    if unknown:
        raise KeyError(f"groups reference unknown qubits {unknown}")
    gone = [q for q in members if q not in final]
    final_syms = sorted({s for q in members if q in final for s in final[q]})
    other = [s for s in range(1, nsym + 1) if s not in set(final_syms)]
    order = other + final_syms
    col = {s: i for i, s in enumerate(order)}
    M = np.zeros((len(rows), len(order)), dtype=np.int64)
    for i, (_, row) in enumerate(rows):
        for s, v in row.items():
            M[i, col[s]] = v
    R, _ = rref(M, d) if len(rows) else (M, [])
    n_r = len(other)
    verdict, bad = True, None
    for i in range(R.shape[0]):
        if R[i].any() and not R[i, :n_r].any():
            verdict, bad = False, i
            break
    bad_record = None
    if bad is not None:
        # name the first measurement whose row is not covered by non-final symbols
        for rec, row in rows:
            if row and all(s in set(final_syms) for s in row):
                bad_record = rec
                break
    formulas_ok = not gone
    vecs = []
    for g in groups:
        fs = [tuple(sorted(final.get(q, {}).items())) for q in g]
        if any(x != fs[0] for x in fs) or not fs[0]:
            formulas_ok = False
        vecs.append(dict(fs[0]) if fs else {})
    if formulas_ok and vecs:
        V = np.zeros((len(vecs), len(order)), dtype=np.int64)
        for i, v in enumerate(vecs):
            for s, x in v.items():
                V[i, col[s]] = x
        if len(rref(V, d)[1]) < len(vecs):
            formulas_ok = False
    return IndependenceWitness(verdict, R, n_r, len(rows), order, bad, bad_record, formulas_ok)


# -- hand-built circuits -------------------------------------------------------------------
def butterfly_out_of_order(d: int = 2) -> QlncCircuit:
    """Butterfly with the encoder's parity fixed by a Z-measurement instead of computed.

    Qubits 1, 3 and 5 start in |+>; node 2 collects the parity of all three
    and is Z-measured, receivers 4 and 6 are X-corrected by its outcome and
    node 5 is terminated.
    """
    from .network import butterfly

    net, _ = butterfly(d)
    m = -1 % d
    ops = [
        Op("PrepPlus", 0, (1,)),
        Op("PrepZero", 0, (2,)),
        Op("PrepPlus", 0, (3,)),
        Op("PrepZero", 0, (4,)),
        Op("PrepPlus", 0, (5,)),
        Op("PrepZero", 0, (6,)),
        Op("Cnot", 1, (1, 2)),
        Op("Cnot", 1, (5, 4)),
        Op("Cnot", 1, (3, 6), power=m),
        Op("Cnot", 2, (3, 2)),
        Op("Cnot", 2, (1, 4), power=m),
        Op("Cnot", 2, (5, 6)),
        Op("Cnot", 3, (5, 2), power=m),
        Op("MeasureZ", 4, (2,), record="y2"),
        Op("Terminate", 4, (5,), record="s5"),
        Op("CtrlX", 5, (4,), x_terms=(("y2", 1),)),
        Op("CtrlX", 5, (6,), x_terms=(("y2", 1),)),
    ]
    c = QlncCircuit(d, (1, 2, 3, 4, 5, 6), tuple(ops), edges=net.graph_edges, graph_ref="butterfly_ooo",
                    meta={"mode": "out_of_order", "groups": [[1, 6], [3, 4]]})
    problems = validate(c)
    if problems:
        raise CompileError("; ".join(problems))
    return c


def separation_circuit() -> QlncCircuit:
    """GHZ on the four degree-1 nodes of the H-shaped graph.

    1 and 3 start in |+>; 2 relays 1's value to 5 and into 3, 3 feeds 4 and 6.
    Terminating 2 and Z-measuring 3 (outcome fixes ``a1 + a3``) then an X
    correction on 4 and 6 leaves GHZ on {1, 4, 5, 6}.
    """
    net = separation_example()
    ops = [
        Op("PrepPlus", 0, (1,)),
        Op("PrepZero", 0, (2,)),
        Op("PrepPlus", 0, (3,)),
        Op("PrepZero", 0, (4,)),
        Op("PrepZero", 0, (5,)),
        Op("PrepZero", 0, (6,)),
        Op("Cnot", 1, (1, 2)),
        Op("Cnot", 1, (3, 4)),
        Op("Cnot", 2, (2, 5)),
        Op("Cnot", 2, (3, 6)),
        Op("Cnot", 3, (2, 3)),
        Op("Terminate", 4, (2,), record="s2"),
        Op("MeasureZ", 4, (3,), record="y3"),
        Op("CtrlX", 5, (4,), x_terms=(("y3", 1),)),
        Op("CtrlX", 5, (6,), x_terms=(("y3", 1),)),
    ]
    c = QlncCircuit(2, tuple(range(1, 7)), tuple(ops), edges=net.graph_edges, graph_ref="separation",
                    meta={"mode": "separation", "groups": [[1, 4, 5, 6]]})
    problems = validate(c)
    if problems:
        raise CompileError("; ".join(problems))
    return c


def composite_swap_circuit() -> QlncCircuit:
    """In-order circuit on the composite network plus the entanglement swap at its top node."""
    from .network import composite_swap

    net, code, info = composite_swap()
    base = compile_inorder(net, code)
    x = info["swap_node"]
    b1, b2 = info["swap_pair"]
    t = max(o.t for o in base.ops) + 1
    ops = list(base.ops) + [
        Op("MeasureZ", t, (x,), record="swap"),
        Op("CtrlX", t + 1, (b2,), x_terms=(("swap", -1 % net.d),)),
    ]
    # the two b streams end at the swap node: b1 + b2 there is measured, then b2 is shifted onto b1
    groups = [list(p) for p in info["pairs"]]
    c = QlncCircuit(net.d, base.qubits, tuple(ops), edges=net.graph_edges, graph_ref="composite_swap",
                    meta={"mode": "composite_swap", "groups": groups, "names": net.names})
    problems = validate(c)
    if problems:
        raise CompileError("; ".join(problems))
    return c


@dataclass
class CompilerReport:
    depth: int
    bound: int | None
    A: int | None
    B: int | None
    branches_verified: int | None
    independence: bool
    expanded_depth: int

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "bound": self.bound,
            "A": self.A,
            "B": self.B,
            "branch_count_verified": self.branches_verified,
            "independence": self.independence,
            "expanded_depth": self.expanded_depth,
        }


def report(c: QlncCircuit, branches_verified: int | None = None) -> CompilerReport:
    A, B = c.meta.get("A"), c.meta.get("B")
    bound = c.meta.get("bound")
    if c.meta.get("mode") == "chain":
        bound = 4 * c.meta["batches"] + 1
    return CompilerReport(
        depth=quantum_depth(c),
        bound=bound,
        A=A,
        B=B,
        branches_verified=branches_verified,
        independence=check_independence(c).verdict,
        expanded_depth=expanded_depth(c),
    )
