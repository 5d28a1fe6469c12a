"""Compare the compiled and pure-Python term kernels.

Run with ``python benchmarks/bench_kernel.py``. Both backends are imported
directly, so the comparison does not depend on ODDSYMP_PURE.
"""

import argparse
import random
import timeit

from oddsymp import _purekernel
from oddsymp.grassmann import GeneratorSet
from oddsymp.randgen import FORM_KINDS, random_poly

try:
    from oddsymp import _speedups
except ImportError:
    _speedups = None


def workload(n, terms, seed):
    rng = random.Random(seed)
    gens = GeneratorSet(n, 4)
    polys = [random_poly(rng, gens, FORM_KINDS, terms, 4).raw_terms() for _ in range(8)]
    odd_bits = [gens.odd_bit(g) for g in gens.generators() if g.parity]
    even_shifts = [gens.even_shift(g) for g in gens.generators() if not g.parity]
    return polys, odd_bits, even_shifts


def run(mod, polys, odd_bits, even_shifts):
    for a in polys:
        for b in polys:
            mod.mul_terms(a, b)
            mod.add_terms(a, b, -1)
        for bit in odd_bits:
            mod.derive_odd(a, bit)
        for s in even_shifts:
            mod.derive_even(a, s)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--terms", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    data = workload(args.n, args.terms, 0)
    backends = [("pure", _purekernel)] + ([("compiled", _speedups)] if _speedups else [])
    times = {}
    for name, mod in backends:
        times[name] = min(timeit.repeat(lambda: run(mod, *data), number=3, repeat=args.repeat))
        print(f"{name:<9} {times[name] * 1000:8.1f} ms")
    if len(times) == 2:
        print(f"speedup   {times['pure'] / times['compiled']:8.2f}x")
    else:
        print("compiled backend not built")


if __name__ == "__main__":
    main()
