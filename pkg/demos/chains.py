"""Crossing Bell pairs with entanglement chains need one batch per crossing pair.

Run: python demos/chains.py
"""

from qlnc import compile_chain_sequential, verify_circuit
from qlnc.circuit import quantum_depth
from qlnc.network import spoke_graph


def main():
    net = spoke_graph(6)
    ids = {name: v for v, name in net.names.items()}
    pairs = [("A", "D"), ("B", "E"), ("C", "F")]
    for k in range(1, 4):
        c = compile_chain_sequential([(ids[a], ids[b]) for a, b in pairs[:k]], net)
        v = verify_circuit(c)
        print(f"k={k}: {c.meta['batches']} batch(es), depth {quantum_depth(c)} (limit {4 * k + 1}), "
              f"{len(v.branches)} branches {'pass' if v.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
