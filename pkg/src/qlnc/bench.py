"""Scaling benchmark: parity tableau versus the stabilizer reference.

The family keeps the number of indeterminates fixed while the qubit count
grows, and times each measurement separately. Rows follow the CSV columns
``engine, n, N, op_counts, wall_ns`` where ``wall_ns`` is the best mean
time per measurement; ``total_ns`` is the best full run.
"""

from __future__ import annotations

import csv
import io
import time
from typing import Iterable, Sequence

import numpy as np

from .circuit import MEASUREMENTS, QlncCircuit, TableauRun
from .compiler import compile_inorder
from .network import RECEIVER, RELAY, TRANSMITTER, LinearCode, Network
from .stabref import MAX_QUBITS, StabRun
from .tableau import OutcomeSource

__all__ = [
    "DEFAULT_SIZES",
    "FIELDS",
    "multicast_comb",
    "path_pairs",
    "FAMILIES",
    "time_engine",
    "run_bench",
    "loglog_slope",
    "to_csv",
]

DEFAULT_SIZES = (64, 128, 256, 512, 1024, 2048, 4096)
FIELDS = ("engine", "n", "N", "op_counts", "wall_ns", "total_ns", "measurements")


def multicast_comb(n: int, hubs: int = 2, d: int = 2) -> tuple[Network, LinearCode]:
    """One transmitter, a line of ``hubs`` relays, each fanning out to receivers.

    ``n`` counts every node; the receivers are split evenly over the hubs
    and all belong to the transmitter's multicast group, so ``N`` stays 1.
    """
    if n < hubs + 2:
        raise ValueError("n too small for the number of hubs")
    t = 1
    hub_ids = list(range(2, 2 + hubs))
    recv = list(range(2 + hubs, n + 1))
    roles = {t: TRANSMITTER, **{h: RELAY for h in hub_ids}, **{r: RECEIVER for r in recv}}
    edges = [(t, hub_ids[0])] + list(zip(hub_ids, hub_ids[1:]))
    for i, r in enumerate(recv):
        edges.append((hub_ids[i % hubs], r))
    return Network(d, roles, edges, {t: recv}, name=f"comb{n}"), LinearCode()


def path_pairs(n: int, d: int = 2) -> tuple[Network, LinearCode]:
    """Two parallel transmitter-to-receiver paths with ``n`` nodes in total."""
    length = n // 2
    rows = [list(range(1, length + 1)), list(range(length + 1, 2 * length + 1))]
    roles, edges, multicast = {}, [], {}
    for row in rows:
        roles.update({v: RELAY for v in row})
        roles[row[0]] = TRANSMITTER
        roles[row[-1]] = RECEIVER
        edges += list(zip(row, row[1:]))
        multicast[row[0]] = [row[-1]]
    return Network(d, roles, edges, multicast, name=f"paths{n}"), LinearCode()


FAMILIES = {"comb": multicast_comb, "paths": path_pairs}


def _instance(family: str, n: int) -> QlncCircuit:
    net, code = FAMILIES[family](n)
    return compile_inorder(net, code, destructive=True)


def time_engine(c: QlncCircuit, engine: str, seed: int = 0) -> tuple[int, list[int], int, int]:
    """One run; returns ``(N after the run, per-measurement ns, total ns, measurements)``."""
    src = OutcomeSource.seeded(seed)
    run = TableauRun(c.d, src) if engine == "tableau" else StabRun(c.qubits, src)
    bulk = run.apply_all if engine == "tableau" else lambda ops: [run.apply(o) for o in ops]
    per = []
    pending: list = []
    start = time.perf_counter_ns()
    for o in c.ops:
        if o.kind in MEASUREMENTS:
            bulk(pending)
            pending = []
            t0 = time.perf_counter_ns()
            run.apply(o)
            per.append(time.perf_counter_ns() - t0)
        else:
            pending.append(o)
    bulk(pending)
    total = time.perf_counter_ns() - start
    N = run.tableau.N if engine == "tableau" else None
    return N, per, total, len(per)


def run_bench(
    sizes: Iterable[int] = DEFAULT_SIZES,
    family: str = "comb",
    engines: Sequence[str] = ("tableau", "stabref"),
    repeats: int = 3,
    seed: int = 0,
) -> list[dict]:
    """Benchmark rows for each size and engine (best of ``repeats``)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    sizes = list(sizes)
    if "stabref" in engines and any(n > MAX_QUBITS for n in sizes):
        raise ValueError(f"sizes above {MAX_QUBITS} exceed the stabilizer memory guard")
    rows = []
    for n in sizes:
        c = _instance(family, n)
        counts: dict = {}
        for o in c.ops:
            counts[o.kind] = counts.get(o.kind, 0) + 1
        op_counts = ";".join(f"{k}={v}" for k, v in sorted(counts.items()))
        N_fixed = None
        for engine in engines:
            best_mean = best_total = None
            m = 0
            for _ in range(repeats):
                N, per, total, m = time_engine(c, engine, seed)
                if engine == "tableau":
                    N_fixed = N
                mean = int(np.mean(per)) if per else 0
                best_mean = mean if best_mean is None else min(best_mean, mean)
                best_total = total if best_total is None else min(best_total, total)
            rows.append(
                {
                    "engine": engine,
                    "n": n,
                    "N": N_fixed,
                    "op_counts": op_counts,
                    "wall_ns": best_mean,
                    "total_ns": best_total,
                    "measurements": m,
                }
            )
    return rows


def loglog_slope(rows: Sequence[dict], engine: str, key: str = "wall_ns") -> float:
    """Least-squares slope of log(time) against log(n) for one engine."""
    pts = [(r["n"], r[key]) for r in rows if r["engine"] == engine and r[key]]
    if len(pts) < 2:
        raise ValueError(f"need at least two sizes for {engine}")
    x, y = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k) for k in FIELDS})
    return buf.getvalue()
