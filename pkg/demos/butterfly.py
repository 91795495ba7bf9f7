"""Distribute two Bell pairs across the butterfly and check every branch.

Run: python demos/butterfly.py
"""

from qlnc import compile_inorder, verify_circuit
from qlnc.circuit import quantum_depth
from qlnc.compiler import butterfly_out_of_order
from qlnc.network import butterfly


def main():
    net, code = butterfly()
    c = compile_inorder(net, code)
    v = verify_circuit(c, oracle="dense")
    print(f"in-order: depth {quantum_depth(c)}, {len(v.branches)} branches")
    for b in v.branches:
        print(f"  outcomes {b.outcomes} -> fidelity {b.fidelity:.12f}")

    late = butterfly_out_of_order()
    v = verify_circuit(late, [[1, 6], [3, 4]], oracle="tableau")
    print(f"out-of-order: {'all branches pass' if v.passed else 'FAILED'} ({len(v.branches)} branches)")


if __name__ == "__main__":
    main()
