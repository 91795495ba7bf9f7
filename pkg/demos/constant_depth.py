"""Constant-depth schedules on growing lattices: depth stays flat while the network grows.

Run: python demos/constant_depth.py
"""

from qlnc import compile_constant_depth, verify_circuit
from qlnc.circuit import quantum_depth
from qlnc.compiler import depth_bound
from qlnc.network import grid


def main():
    print(f"{'lattice':>10} {'qubits':>6} {'A':>2} {'B':>2} {'depth':>5} {'bound':>5}  sampled branches")
    for w, h in [(3, 2), (6, 4), (9, 6), (12, 8), (15, 10)]:
        net, code = grid(w, h, seed=1)
        c = compile_constant_depth(net, code)
        A, B = c.meta["A"], c.meta["B"]
        v = verify_circuit(c, oracle="tableau", branches="sample", samples=8, seed=0)
        print(f"{net.name:>10} {len(c.qubits):>6} {A:>2} {B:>2} {quantum_depth(c):>5} {depth_bound(A, B):>5}  "
              f"{'ok' if v.passed else 'FAILED'}")


if __name__ == "__main__":
    main()
