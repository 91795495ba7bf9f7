import pytest

from qlnc.circuit import Op, expanded_depth, quantum_depth, validate
from qlnc.coloring import directed_edge_coloring, greedy_vertex_coloring
from qlnc.compiler import (
    CompileError,
    check_independence,
    compile_chain_sequential,
    compile_constant_depth,
    compile_inorder,
    depth_bound,
    report,
)
from qlnc.network import (
    LinearCode,
    Network,
    butterfly,
    chain,
    directed_speedup,
    grid,
    plus_graph,
    spoke_graph,
    star_multicast,
)
from qlnc.verify import verify_circuit

NETWORKS = {
    "butterfly": lambda: butterfly(),
    "butterfly3": lambda: butterfly(3),
    "speedup3": lambda: directed_speedup(3),
    "speedup4": lambda: directed_speedup(4),
    "star3": lambda: star_multicast(3),
    "star3q3": lambda: star_multicast(3, 3),
    "chain4": lambda: chain(4),
    "grid4x3": lambda: grid(4, 3),
    "grid6x4": lambda: grid(6, 4),
}


def by_name(net, *names):
    ids = {v: k for k, v in net.names.items()}
    return tuple(ids[n] for n in names)


@pytest.mark.parametrize("A, B, bound", [(2, 3, 9), (2, 4, 11), (1, 5, 1), (3, 2, 13)])
def test_depth_bound(A, B, bound):
    assert depth_bound(A, B) == bound


def test_depth_bound_dominates_colour_limits():
    # any A up to 4 and B up to delta + 1 stays within the general envelope
    for delta in range(1, 6):
        assert depth_bound(4, delta + 1) <= 2 * 3 * (delta + 2) + 1


@pytest.mark.parametrize("A, B", [(0, 2), (2, 0)])
def test_depth_bound_rejects_zero(A, B):
    with pytest.raises(ValueError):
        depth_bound(A, B)


@pytest.mark.parametrize("name", sorted(NETWORKS))
@pytest.mark.parametrize("mode", ["inorder", "constdepth"])
def test_compiled_circuits_verify(name, mode):
    net, code = NETWORKS[name]()
    c = compile_inorder(net, code) if mode == "inorder" else compile_constant_depth(net, code)
    assert validate(c) == []
    oracle = "dense" if net.d ** len(c.qubits) <= 2**16 else "tableau"
    v = verify_circuit(c, oracle=oracle)
    assert v.passed, v.first_failure
    assert check_independence(c).verdict
    if mode == "constdepth":
        assert quantum_depth(c) <= depth_bound(c.meta["A"], c.meta["B"])
        assert expanded_depth(c) <= (net.d - 1) * quantum_depth(c)


def test_known_depths():
    assert quantum_depth(compile_constant_depth(*butterfly())) == 6
    star = compile_constant_depth(*star_multicast(3, 3))
    assert (quantum_depth(star), star.meta["A"], star.meta["B"]) == (7, 2, 3)


def test_single_edge_is_shallow():
    c = compile_constant_depth(*chain(1))
    assert quantum_depth(c) <= 3 and verify_circuit(c).passed


@pytest.mark.parametrize(
    "net, pairs",
    [
        (chain(4)[0], [(1, 5)]),
        (plus_graph(), [("W", "E"), ("N", "S")]),
        (spoke_graph(6), [("A", "D"), ("B", "E"), ("C", "F")]),
    ],
)
def test_chains(net, pairs):
    if net.names:
        pairs = [by_name(net, *p) for p in pairs]
    c = compile_chain_sequential(pairs, net)
    k = len(pairs) if net.names else 1
    assert c.meta["batches"] == k
    assert quantum_depth(c) <= 4 * k + 1
    assert verify_circuit(c).passed


def test_chain_rejects_shared_endpoints():
    net = plus_graph()
    w, e = by_name(net, "W", "E")
    with pytest.raises(CompileError):
        compile_chain_sequential([(w, e), (e, w)], net)


def test_independence_flags_a_final_measurement():
    c = compile_inorder(*butterfly())
    t = max(o.t for o in c.ops) + 1
    broken = c.with_ops(list(c.ops) + [Op("MeasureZ", t, (6,), record="oops")])
    w = check_independence(broken)
    assert not w.verdict and w.offending_row is not None and w.offending_record == "oops"
    assert not verify_circuit(broken).passed


def test_preconditions_enforced():
    net = Network(2, {1: "transmitter", 2: "transmitter", 3: "receiver"}, [(1, 2), (2, 3)], {1: [3]})
    with pytest.raises(CompileError, match="in-degree"):
        compile_constant_depth(net, LinearCode())


def test_invalid_code_rejected():
    net, code = butterfly()
    with pytest.raises(CompileError):
        compile_inorder(net, LinearCode({**code.coefficients, (2, 5): 0}))


def test_supplied_colourings():
    net, code = butterfly()
    vc = greedy_vertex_coloring(net.nodes, net.graph_edges)
    ec = directed_edge_coloring(net.edges, "misra_gries")
    c = compile_constant_depth(net, code, vc, ec)
    assert verify_circuit(c).passed
    bad = {v: 1 for v in net.nodes}
    with pytest.raises(CompileError):
        compile_constant_depth(net, code, bad, ec)
    with pytest.raises(CompileError):
        compile_constant_depth(net, code, vc, {e: 1 for e in net.edges})


def test_report_fields():
    r = report(compile_constant_depth(*directed_speedup(4))).to_json()
    assert r["depth"] <= r["bound"] == depth_bound(r["A"], r["B"]) and r["independence"]
