"""Per-measurement cost of the parity tableau against a stabilizer tableau.

Run: python demos/benchmark.py [max_size]
"""

import sys

from qlnc import bench


def main():
    top = int(sys.argv[1]) if len(sys.argv) > 1 else 2048
    sizes = [n for n in bench.DEFAULT_SIZES if n <= top]
    rows = bench.run_bench(sizes, "comb", repeats=3)
    for r in rows:
        print(f"{r['engine']:>8} n={r['n']:>5} N={r['N']:>3} {r['wall_ns'] / 1e3:10.1f} us/measurement")
    for engine in ("tableau", "stabref"):
        print(f"{engine}: log-log slope {bench.loglog_slope(rows, engine):.2f}")


if __name__ == "__main__":
    main()
