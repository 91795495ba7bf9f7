import itertools

import numpy as np
import pytest

from qlnc.network import (
    LinearCode,
    Network,
    butterfly,
    chain,
    classical_simulate,
    composite_swap,
    directed_speedup,
    grid,
    plus_graph,
    search_code,
    star_multicast,
    validate_code,
)


def test_butterfly_delivers_crossed_symbols():
    net, code = butterfly()
    assert classical_simulate(net, code, {1: 1, 3: 0}) == {4: 0, 6: 1}


def test_speedup_delivers_each_symbol():
    net, code = directed_speedup(4)
    x = dict(zip(net.transmitters, (1, 1, 0, 1)))
    out = classical_simulate(net, code, x)
    assert [out[r] for r in (5, 6, 7, 8)] == [1, 1, 0, 1]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_generators_carry_valid_codes(d):
    for net, code in [butterfly(d), chain(3, d), directed_speedup(3, d), star_multicast(3, d), grid(6, 4, d=d)]:
        assert validate_code(net, code), net.name
        assert net.precondition_violations() == []


def test_broken_encoder_invalid():
    net, code = butterfly()
    code = LinearCode({**code.coefficients, (1, 2): 0})
    assert not validate_code(net, code)


@pytest.mark.parametrize("d", [2, 3])
def test_validation_agrees_with_exhaustive_simulation(d):
    rng = np.random.default_rng(d)
    net, _ = butterfly(d)
    for _ in range(20):
        code = LinearCode({e: int(rng.integers(d)) for e in net.edges})
        brute = all(
            all(classical_simulate(net, code, dict(zip(net.transmitters, x)))[r] == x[net.transmitters.index(t)]
                for t, rs in net.multicast.items() for r in rs)
            for x in itertools.product(range(d), repeat=len(net.transmitters))
        )
        assert validate_code(net, code) == brute


def test_small_grid_has_three_streams():
    net, code = grid(4, 3)
    assert len(net.multicast) == 3 and validate_code(net, code)


def test_random_grids_valid():
    for seed in range(10):
        net, code = grid(7, 5, seed=seed)
        assert validate_code(net, code)


def test_json_round_trip():
    net, code = directed_speedup(3)
    again = Network.from_json(net.to_json())
    assert again.edges == net.edges and again.roles == net.roles and again.names == net.names
    assert LinearCode.from_json(code.to_json()).coefficients == code.coefficients


def test_cycle_invalid():
    net = Network(2, {1: "transmitter", 2: "relay", 3: "receiver"}, [(1, 2), (2, 3), (3, 2)], {1: [3]})
    with pytest.raises(ValueError):
        net.topological_order()
    assert not validate_code(net, LinearCode())


def test_code_search():
    net, _ = butterfly()
    found = search_code(net)
    assert found is not None and validate_code(net, found)


def test_plus_graph_names_endpoints():
    net = plus_graph()
    assert sorted(net.names.values()) == ["E", "N", "S", "W"]


def test_composite_swap_metadata():
    net, code, meta = composite_swap()
    assert net.d == 2 and meta
