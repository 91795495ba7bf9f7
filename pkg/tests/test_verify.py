import csv
import io

import numpy as np
import pytest

from qlnc import bench
from qlnc.circuit import QlncCircuit, cnot, prep_plus, prep_zero
from qlnc.compiler import butterfly_out_of_order, check_independence, compile_inorder
from qlnc.network import butterfly, directed_speedup, grid
from qlnc.oracle import MAX_AMPLITUDES
from qlnc.stabref import MAX_QUBITS
from qlnc.circuit import execute
from qlnc.tableau import OutcomeSource
from qlnc.verify import (
    walk_branches,
    BranchExplosion,
    enumerate_branches,
    ghz_tableau,
    random_distribution_circuit,
    sample_branches,
    verify_circuit,
)


def test_branch_counts():
    assert len(enumerate_branches(compile_inorder(*butterfly()))) == 4
    assert len(enumerate_branches(compile_inorder(*butterfly(3)))) == 9
    assert len(enumerate_branches(butterfly_out_of_order())) == 4


def test_no_measurements_one_branch():
    c = QlncCircuit(2, (1, 2), (prep_plus(1), prep_zero(2), cnot(1, 2, 1)))
    assert enumerate_branches(c) == [{}]


def test_branch_guard():
    with pytest.raises(BranchExplosion):
        enumerate_branches(compile_inorder(*grid(6, 4)), limit=8)


def test_sampled_branches_are_reproducible():
    c = compile_inorder(*directed_speedup(3))
    assert sample_branches(c, 5, seed=1) == sample_branches(c, 5, seed=1)


def test_ghz_target_shape():
    t = ghz_tableau(3, [[1, 2, 3], [4, 5]])
    assert t.N == 2 and t.labels == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("oracle", ["dense", "tableau", "stab"])
def test_oracles_accept_butterfly(oracle):
    v = verify_circuit(compile_inorder(*butterfly()), oracle=oracle)
    assert v.passed and v.oracle == oracle and len(v.branches) == 4


@pytest.mark.parametrize("oracle", ["dense", "tableau", "stab"])
def test_missing_cnot_is_caught(oracle):
    c = compile_inorder(*butterfly())
    i = next(i for i, o in enumerate(c.ops) if o.kind == "Cnot" and o.qubits == (5, 6))
    broken = c.with_ops(c.ops[:i] + c.ops[i + 1:])
    v = verify_circuit(broken, oracle=oracle)
    assert not v.passed
    assert v.to_json()["first_failure"] is not None


def test_unknown_group_qubit():
    with pytest.raises(KeyError):
        verify_circuit(compile_inorder(*butterfly()), groups=[[1, 99]])


def test_stab_oracle_is_binary_only():
    with pytest.raises(ValueError):
        verify_circuit(compile_inorder(*butterfly(3)), oracle="stab")


def test_auto_picks_by_size():
    assert verify_circuit(compile_inorder(*butterfly())).oracle == "dense"
    c = compile_inorder(*grid(6, 4))
    assert 2 ** len(c.qubits) > MAX_AMPLITUDES
    assert verify_circuit(c, branches="sample", samples=2, seed=0).oracle == "tableau"


@pytest.mark.parametrize("d", [2, 3])
def test_random_distribution_circuits_match_oracle(d):
    rng = np.random.default_rng(11 + d)
    for _ in range(25):
        c = random_distribution_circuit(rng, d, max_qubits=8)
        v = verify_circuit(c, oracle="dense")
        w = check_independence(c)
        assert (w.verdict and w.formulas_ok) == v.passed


def test_bench_rows_and_csv():
    rows = bench.run_bench([16, 32], repeats=1)
    assert {r["engine"] for r in rows} == {"tableau", "stabref"}
    parsed = list(csv.DictReader(io.StringIO(bench.to_csv(rows))))
    assert list(parsed[0]) == list(bench.FIELDS) and len(parsed) == 4
    again = bench.run_bench([16, 32], repeats=1)
    assert [r["op_counts"] for r in rows] == [r["op_counts"] for r in again]
    assert [r["measurements"] for r in rows] == [r["measurements"] for r in again]


def test_bench_memory_guard():
    with pytest.raises(ValueError):
        bench.run_bench([MAX_QUBITS + 1])


@pytest.mark.parametrize("family", sorted(bench.FAMILIES))
def test_bench_families_verify(family):
    net, code = bench.FAMILIES[family](6)
    assert verify_circuit(compile_inorder(net, code, destructive=True), oracle="tableau", branches="sample", samples=4, seed=0).passed


def test_walk_matches_replay():
    c = compile_inorder(*grid(6, 4))
    walked = {tuple(sorted(f.items())): r.tableau for f, r in walk_branches(c)}
    assert len(walked) == 256
    for forced in enumerate_branches(c)[:20]:
        assert walked[tuple(sorted(forced.items()))].same_state(execute(c, OutcomeSource.forced(forced)).tableau)


def test_walk_on_stab_engine():
    c = compile_inorder(*butterfly())
    assert len(list(walk_branches(c, "stab"))) == 4
    assert verify_circuit(c, oracle="stab").passed
