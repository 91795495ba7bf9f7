"""Interaction graphs, node roles, linear network codes and the example networks.

A code is stored per directed edge as a coefficient ``beta_e`` in Z_d. Every
non-receiver node broadcasts one value on all its outgoing edges: a
transmitter sends its own symbol, any other node sends
``sum_e beta_e * value(tail(e))`` over its incoming edges. A receiver
decodes the same sum.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Mapping, Sequence

import numpy as np

from .field import Modulus

__all__ = [
    "TRANSMITTER",
    "RELAY",
    "RECEIVER",
    "Network",
    "LinearCode",
    "classical_simulate",
    "validate_code",
    "transfer_matrix",
    "search_code",
    "butterfly",
    "chain",
    "directed_speedup",
    "grid",
    "star_multicast",
    "plus_graph",
    "spoke_graph",
    "separation_example",
    "composite_swap",
]

TRANSMITTER = "transmitter"
RELAY = "relay"
RECEIVER = "receiver"
ROLES = (TRANSMITTER, RELAY, RECEIVER)


@dataclass
class Network:
    """Directed code edges over an undirected capability graph.

    ``graph_edges`` holds the undirected edges along which two-qubit gates
    are allowed; it always contains the undirected version of ``edges``.
    ``multicast`` maps each transmitter to its receiver set.
    """

    d: int
    roles: dict
    edges: list
    multicast: dict
    graph_edges: set = field(default_factory=set)
    name: str = "network"
    names: dict = field(default_factory=dict)
    complete_classical: bool = True

    def __post_init__(self):
        self.d = int(Modulus(int(self.d)))
        self.edges = [tuple(e) for e in self.edges]
        self.graph_edges = {frozenset(e) for e in self.graph_edges} | {frozenset(e) for e in self.edges}
        for v, r in self.roles.items():
            if r not in ROLES:
                raise ValueError(f"node {v!r} has unknown role {r!r}")
        for a, b in self.edges:
            if a not in self.roles or b not in self.roles:
                raise ValueError(f"edge {a!r}->{b!r} uses an unknown node")
            if a == b:
                raise ValueError(f"self-loop at {a!r}")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate directed edge")
        self.multicast = {t: list(rs) for t, rs in self.multicast.items()}

    @property
    def nodes(self) -> list:
        return sorted(self.roles)

    def with_role(self, role) -> list:
        return [v for v in self.nodes if self.roles[v] == role]

    @property
    def transmitters(self) -> list:
        return self.with_role(TRANSMITTER)

    @property
    def relays(self) -> list:
        return self.with_role(RELAY)

    @property
    def receivers(self) -> list:
        return self.with_role(RECEIVER)

    def in_edges(self, v) -> list:
        return [e for e in self.edges if e[1] == v]

    def out_edges(self, v) -> list:
        return [e for e in self.edges if e[0] == v]

    def groups(self) -> list[list]:
        """Multicast groups as ``[transmitter, *receivers]``."""
        return [[t, *rs] for t, rs in sorted(self.multicast.items())]

    def topological_order(self) -> list:
        ts = TopologicalSorter({v: [] for v in self.nodes})
        for a, b in self.edges:
            ts.add(b, a)
        try:
            return list(ts.static_order())
        except CycleError as exc:
            raise ValueError(f"directed edges contain a cycle: {exc.args[1]}") from None

    def precondition_violations(self) -> list[str]:
        """Role and degree conditions required by the constant-depth compiler."""
        out = []
        for v in self.nodes:
            ins, outs = len(self.in_edges(v)), len(self.out_edges(v))
            role = self.roles[v]
            if role == TRANSMITTER and ins:
                out.append(f"transmitter {v!r} has in-degree {ins}")
            if role == RECEIVER and outs:
                out.append(f"receiver {v!r} has out-degree {outs}")
            if role == RELAY and (ins == 0 or outs == 0):
                out.append(f"relay {v!r} needs in- and out-edges (in={ins}, out={outs})")
        seen = set()
        for t, rs in self.multicast.items():
            if self.roles.get(t) != TRANSMITTER:
                out.append(f"multicast source {t!r} is not a transmitter")
            for r in rs:
                if self.roles.get(r) != RECEIVER:
                    out.append(f"multicast target {r!r} is not a receiver")
                if r in seen:
                    out.append(f"receiver {r!r} belongs to several groups")
                seen.add(r)
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "nodes": [{"id": v, "role": self.roles[v], **({"name": self.names[v]} if v in self.names else {})} for v in self.nodes],
            "edges": [{"from": a, "to": b, "directed": True} for a, b in self.edges]
            + [
                {"from": a, "to": b, "directed": False}
                for a, b in sorted(tuple(sorted(e)) for e in self.graph_edges)
                if (a, b) not in self.edges and (b, a) not in self.edges
            ],
            "multicast": [{"tx": t, "rx": list(rs)} for t, rs in sorted(self.multicast.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "Network":
        if isinstance(obj, str):
            obj = json.loads(obj)
        roles = {n["id"]: n["role"] for n in obj["nodes"]}
        names = {n["id"]: n["name"] for n in obj["nodes"] if "name" in n}
        directed = [(e["from"], e["to"]) for e in obj["edges"] if e.get("directed", True)]
        undirected = {frozenset((e["from"], e["to"])) for e in obj["edges"]}
        multicast = {m["tx"]: list(m["rx"]) for m in obj.get("multicast", [])}
        return cls(obj.get("d", 2), roles, directed, multicast, undirected, obj.get("name", "network"), names)

    def to_dot(self) -> str:
        shape = {TRANSMITTER: "box", RELAY: "circle", RECEIVER: "doublecircle"}
        lines = [f'digraph "{self.name}" {{']
        for v in self.nodes:
            label = self.names.get(v, v)
            lines.append(f'  "{v}" [label="{label}", shape={shape[self.roles[v]]}];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -> "{b}";')
        for e in sorted(self.graph_edges, key=lambda e: sorted(e)):
            a, b = sorted(e)
            if (a, b) not in self.edges and (b, a) not in self.edges:
                lines.append(f'  "{a}" -> "{b}" [dir=none, style=dashed];')
        lines.append("}")
        return "\n".join(lines)


@dataclass
class LinearCode:
    """Broadcast code: coefficient ``beta_e`` for every directed edge (default 1)."""

    coefficients: dict = field(default_factory=dict)

    def beta(self, edge, d: int) -> int:
        return int(self.coefficients.get(tuple(edge), 1)) % d

    def to_json(self) -> dict:
        return {"coefficients": [{"from": a, "to": b, "beta": int(c)} for (a, b), c in sorted(self.coefficients.items())]}

    @classmethod
    def from_json(cls, obj) -> "LinearCode":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls({(c["from"], c["to"]): int(c["beta"]) for c in obj.get("coefficients", [])})


def transfer_matrix(net: Network, code: LinearCode) -> dict:
    """Each node's broadcast value as a coefficient vector over the transmitters."""
    d = net.d
    tx = net.transmitters
    pos = {t: i for i, t in enumerate(tx)}
    value: dict = {}
    for v in net.topological_order():
        if net.roles[v] == TRANSMITTER:
            vec = np.zeros(len(tx), dtype=np.int64)
            vec[pos[v]] = 1
        else:
            vec = np.zeros(len(tx), dtype=np.int64)
            for e in net.in_edges(v):
                vec = (vec + code.beta(e, d) * value[e[0]]) % d
        value[v] = vec
    return value


def classical_simulate(net: Network, code: LinearCode, inputs: Mapping) -> dict:
    """Propagate transmitter symbols; return each receiver's decoded value."""
    d = net.d
    tx = net.transmitters
    x = np.array([int(inputs.get(t, 0)) % d for t in tx], dtype=np.int64)
    T = transfer_matrix(net, code)
    return {r: int(T[r] @ x % d) for r in net.receivers}


def validate_code(net: Network, code: LinearCode) -> bool:
    """True iff every multicast receiver decodes exactly its transmitter's symbol.

    Linearity makes the unit input vectors a sufficient test set.
    """
    try:
        order_ok = net.topological_order()
    except ValueError:
        return False
    del order_ok
    d = net.d
    tx = net.transmitters
    T = transfer_matrix(net, code)
    for t, rs in net.multicast.items():
        if t not in tx:
            return False
        want = np.zeros(len(tx), dtype=np.int64)
        want[tx.index(t)] = 1
        for r in rs:
            if r not in T or not np.array_equal(T[r] % d, want):
                return False
    return True


def search_code(net: Network, max_edges: int = 10) -> LinearCode | None:
    """Brute-force a binary code by switching edges on or off (tiny instances only)."""
    if net.d != 2:
        raise ValueError("code search is only offered for d = 2")
    if len(net.edges) > max_edges:
        raise ValueError(f"too many edges for brute force ({len(net.edges)} > {max_edges})")
    for bits in itertools.product((1, 0), repeat=len(net.edges)):
        code = LinearCode({e: b for e, b in zip(net.edges, bits)})
        if validate_code(net, code):
            return code
    return None


# -- generators -------------------------------------------------------------------
def butterfly(d: int = 2) -> tuple[Network, LinearCode]:
    """Butterfly on a 2x3 grid: top row 1 2 3, bottom row 4 5 6.

    Transmitters 1 and 3 feed the encoder 2, which forwards through 5 to the
    receivers 4 and 6; the side links 1->4 and 3->6 let each receiver cancel
    the unwanted stream. Pairs are (1, 6) and (3, 4).
    """
    roles = {1: TRANSMITTER, 3: TRANSMITTER, 2: RELAY, 5: RELAY, 4: RECEIVER, 6: RECEIVER}
    edges = [(1, 2), (3, 2), (2, 5), (5, 4), (5, 6), (1, 4), (3, 6)]
    code = LinearCode({(1, 4): -1 % d, (3, 6): -1 % d}) if d > 2 else LinearCode()
    return Network(d, roles, edges, {1: [6], 3: [4]}, name="butterfly"), code


def chain(length: int, d: int = 2) -> tuple[Network, LinearCode]:
    """Path 1 -> 2 -> ... -> length+1 carrying one stream end to end."""
    if length < 1:
        raise ValueError("chain length must be positive")
    nodes = list(range(1, length + 2))
    roles = {v: RELAY for v in nodes}
    roles[nodes[0]] = TRANSMITTER
    roles[nodes[-1]] = RECEIVER
    edges = list(zip(nodes, nodes[1:]))
    return Network(d, roles, edges, {nodes[0]: [nodes[-1]]}, name=f"chain{length}"), LinearCode()


def directed_speedup(k: int, d: int = 2) -> tuple[Network, LinearCode]:
    """k pairs sharing one bottleneck m -> m'.

    Transmitter ``t_i`` (node ``i``) sends to ``m`` and to every receiver
    ``r_j`` (node ``k+j``) with ``j != i``; ``m'`` (node ``2k+2``) broadcasts
    the total, so ``r_j`` recovers ``t_j``'s symbol by cancellation.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    t = list(range(1, k + 1))
    r = list(range(k + 1, 2 * k + 1))
    m, m2 = 2 * k + 1, 2 * k + 2
    roles = {**{v: TRANSMITTER for v in t}, **{v: RECEIVER for v in r}, m: RELAY, m2: RELAY}
    edges = [(ti, m) for ti in t] + [(m, m2)] + [(m2, rj) for rj in r]
    coeffs = {}
    for i, ti in enumerate(t):
        for j, rj in enumerate(r):
            if i != j:
                edges.append((ti, rj))
                coeffs[(ti, rj)] = -1 % d
    names = {**{v: f"t{i + 1}" for i, v in enumerate(t)}, **{v: f"r{i + 1}" for i, v in enumerate(r)}, m: "m", m2: "m'"}
    net = Network(d, roles, edges, {ti: [rj] for ti, rj in zip(t, r)}, name=f"speedup{k}", names=names)
    return net, LinearCode(coeffs)


def lattice_edges(w: int, h: int) -> set:
    def nid(r, c):
        return r * w + c + 1

    out = set()
    for r in range(h):
        for c in range(w):
            if c + 1 < w:
                out.add(frozenset((nid(r, c), nid(r, c + 1))))
            if r + 1 < h:
                out.add(frozenset((nid(r, c), nid(r + 1, c))))
    return out


def grid(w: int, h: int, seed: int | None = None, d: int = 2) -> tuple[Network, LinearCode]:
    """Square lattice (row-major ids) tiled by 3x2 butterfly blocks.

    Columns and rows left over after tiling carry plain unicast paths; a
    leftover bottom row is joined onto the last leftover column. With
    ``seed`` the blocks are mirrored at random; without it (e.g. ``grid(4, 3)``)
    every block keeps its transmitters on top, giving three streams on the
    4x3 lattice: two through the butterfly and one along the border.
    """
    if w < 3 or h < 2:
        raise ValueError("grid needs w >= 3 and h >= 2")
    rng = np.random.default_rng(seed) if seed is not None else None

    def nid(r, c):
        return r * w + c + 1

    roles: dict = {}
    edges: list = []
    multicast: dict = {}
    coeffs: dict = {}
    qw, qh = w // 3, h // 2
    for br in range(qh):
        for bc in range(qw):
            flip_v = bool(rng.integers(2)) if rng is not None else False
            flip_h = bool(rng.integers(2)) if rng is not None else False
            rows = [2 * br, 2 * br + 1]
            cols = [3 * bc, 3 * bc + 1, 3 * bc + 2]
            if flip_v:
                rows.reverse()
            if flip_h:
                cols.reverse()
            top = [nid(rows[0], c) for c in cols]
            bot = [nid(rows[1], c) for c in cols]
            t1, enc, t2 = top
            r1, fan, r2 = bot
            roles.update({t1: TRANSMITTER, t2: TRANSMITTER, enc: RELAY, fan: RELAY, r1: RECEIVER, r2: RECEIVER})
            edges += [(t1, enc), (t2, enc), (enc, fan), (fan, r1), (fan, r2), (t1, r1), (t2, r2)]
            if d > 2:
                coeffs[(t1, r1)] = -1 % d
                coeffs[(t2, r2)] = -1 % d
            multicast[t1] = [r2]
            multicast[t2] = [r1]
    paths = []
    for c in range(3 * qw, w):
        paths.append([nid(r, c) for r in range(h)])
    if h % 2:
        row = [nid(h - 1, c) for c in range(3 * qw - 1, -1, -1)]
        if paths:
            paths[-1] += row
        else:
            paths.append(row)
    for p in paths:
        roles[p[0]] = TRANSMITTER
        roles[p[-1]] = RECEIVER
        for v in p[1:-1]:
            roles[v] = RELAY
        edges += list(zip(p, p[1:]))
        multicast[p[0]] = [p[-1]]
    name = f"grid{w}x{h}" + ("" if seed is None else f"s{seed}")
    return Network(d, roles, edges, multicast, lattice_edges(w, h), name=name), LinearCode(coeffs)


def star_multicast(receivers: int = 3, d: int = 2) -> tuple[Network, LinearCode]:
    """One transmitter feeding a relay that fans out to ``receivers`` nodes."""
    rs = list(range(3, 3 + receivers))
    roles = {1: TRANSMITTER, 2: RELAY, **{r: RECEIVER for r in rs}}
    edges = [(1, 2)] + [(2, r) for r in rs]
    return Network(d, roles, edges, {1: rs}, name=f"star{receivers}"), LinearCode()


def spoke_graph(spokes: int, arm: int = 2, names: Sequence[str] | None = None) -> Network:
    """Centre 0 with ``spokes`` paths of ``arm`` nodes; it carries no code.

    Endpoints are named ``names`` (default ``A``, ``B``, ...). Chains between
    opposite endpoints all cross at the centre.
    """
    if names is None:
        names = [chr(ord("A") + i) for i in range(spokes)]
    if len(names) != spokes:
        raise ValueError("need one name per spoke")
    roles = {0: RELAY}
    graph = set()
    ends = {}
    nxt = 1
    for direction in names:
        prev = 0
        for _ in range(arm):
            roles[nxt] = RELAY
            graph.add(frozenset((prev, nxt)))
            prev = nxt
            nxt += 1
        ends[direction] = prev
    net = Network(2, roles, [], {}, graph, name=f"spokes{spokes}x{arm}")
    net.names = {v: k for k, v in ends.items()}
    return net


def plus_graph(arm: int = 2) -> Network:
    """Plus-shaped graph with endpoints W, E, N, S, used for crossing chains."""
    net = spoke_graph(4, arm, "WENS")
    net.name = f"plus{arm}"
    return net


def separation_example() -> Network:
    """H-shaped graph: top row 1 2 3 4, with 5 below 2 and 6 below 3."""
    graph = {frozenset(e) for e in [(1, 2), (2, 3), (3, 4), (2, 5), (3, 6)]}
    roles = {1: TRANSMITTER, 3: TRANSMITTER, 2: RELAY, 4: RECEIVER, 5: RECEIVER, 6: RECEIVER}
    return Network(2, roles, [], {}, graph, name="separation")


def composite_swap() -> tuple[Network, LinearCode, dict]:
    """Three linked copies of the 3-pair speedup network (d = 2).

    Streams ``a`` and ``e`` each cross two components through a linking
    node; ``c``, ``f``, ``g`` stay inside one component. The two ``b``
    endpoints are both treated as transmitters routed to a common top node,
    whose Z-measurement swaps their entanglement. Returns the network, its
    (partial) code and metadata naming the swap node and the Bell pairs.
    """
    comp, _ = directed_speedup(3)
    names: dict = {}
    roles: dict = {}
    edges: list = []
    ids: dict = {}
    nxt = 1
    for ci in (1, 2, 3):
        for v in comp.nodes:
            label = f"C{ci}.{comp.names[v]}"
            ids[label] = nxt
            names[nxt] = label
            roles[nxt] = comp.roles[v]
            nxt += 1
        for a, b in comp.edges:
            edges.append((ids[f"C{ci}.{comp.names[a]}"], ids[f"C{ci}.{comp.names[b]}"]))
    for extra in ("blue", "red", "X"):
        ids[extra] = nxt
        names[nxt] = extra
        nxt += 1
    i = ids.__getitem__
    roles[i("blue")] = RELAY
    roles[i("red")] = RELAY
    roles[i("X")] = RECEIVER
    edges += [(i("C1.r1"), i("blue")), (i("blue"), i("C2.t1")), (i("C2.r2"), i("red")), (i("red"), i("C3.t2"))]
    edges += [(i("C1.r2"), i("X")), (i("C3.r3"), i("X"))]
    for lab in ("C1.r1", "C2.t1", "C2.r2", "C3.t2", "C1.r2", "C3.r3"):
        roles[i(lab)] = RELAY
    multicast = {
        i("C1.t1"): [i("C2.r1")],
        i("C1.t3"): [i("C1.r3")],
        i("C2.t2"): [i("C3.r2")],
        i("C2.t3"): [i("C2.r3")],
        i("C3.t1"): [i("C3.r1")],
    }
    net = Network(2, roles, edges, multicast, name="composite_swap", names=names)
    meta = {
        "swap_node": i("X"),
        "swap_pair": (i("C1.t2"), i("C3.t3")),
        "pairs": [(t, rs[0]) for t, rs in sorted(multicast.items())] + [(i("C1.t2"), i("C3.t3"))],
    }
    return net, LinearCode(), meta

