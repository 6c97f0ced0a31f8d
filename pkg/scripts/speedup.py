"""Wall-time comparison of bottom-up compression against the single full-matrix NNLS solve.

    python3 scripts/speedup.py --scene torus --sizes 10000,25000,50000 --degrees 3,6,9
"""
import argparse
import time

from qsurf.compress import bottom_up_compress, caratheodory_compress, qmc_moments
from qsurf.polyspace import select_basis
from qsurf.scene import load_scene


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--scene", default="torus")
    ap.add_argument("--sizes", default="10000,25000,50000")
    ap.add_argument("--degrees", default="3,6,9")
    args = ap.parse_args()

    scene = load_scene(args.scene)
    sizes = [int(s) for s in args.sizes.split(",")]
    big = scene.sample(M0=4 * max(sizes))
    print(f"{'M':>7} {'deg':>4} {'N':>4} {'bottom-up s':>12} {'full s':>9} {'speed-up':>9}")
    for M in sizes:
        S = big.head(min(M, big.M))
        for n in (int(d) for d in args.degrees.split(",")):
            basis, V_M = select_basis(S.points, n)
            mom = qmc_moments(V_M, S.sigma_J)
            _, t_bu = timed(bottom_up_compress, S, V_M, mom, basis=basis)
            _, t_ca = timed(caratheodory_compress, S, V_M, mom, basis=basis)
            print(f"{S.M:>7} {n:>4} {basis.N:>4} {t_bu:>12.3f} {t_ca:>9.3f} {t_ca / t_bu:>9.1f}")


if __name__ == "__main__":
    main()
