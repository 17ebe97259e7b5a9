"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""
import argparse
import json
import timeit

from supersingular import _kernels
from supersingular.finite_form import FiniteQuadraticSpace, enumerate_generatrices, rank
from supersingular.gf import field
from supersingular.isometry import isometry_group
from supersingular.lattice import parse_lattice
from supersingular.shortvec import enumerate_norm_vectors

SIGMA2 = FiniteQuadraticSpace(3, ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
E8N = parse_lattice("E8(-1)")
D4N = parse_lattice("sum(D4(-1),A2(-1))")
F81 = field(3, 4)
ROWS = [[(7 * i + 13 * j + i * j) % 81 for j in range(12)] for i in range(10)]

CASES = {
    "short_vectors E8(-1) norm -6": lambda: enumerate_norm_vectors(E8N, -6),
    "isometry_backtrack D4(-1)+A2(-1)": lambda: isometry_group(D4N),
    "isotropic_rref Gr(2,4) over F_81": lambda: enumerate_generatrices(SIGMA2, 4, "isotropic"),
    "gf_rank 10x12 over F_81": lambda: [rank(F81, ROWS, 12) for _ in range(200)],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    results = {}
    for name, fn in CASES.items():
        row = {}
        for b in backends:
            with _kernels.use_backend(b):
                fn()                                    # warm caches (tables, imports)
                row[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        results[name] = row

    if args.json:
        print(json.dumps(results, indent=2, sort_keys=True))
        return
    print(f"{'kernel':40s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, row in results.items():
        line = f"{name:40s}" + "".join(f"{row[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            line += f"   {row['python'] / row['cython']:8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
