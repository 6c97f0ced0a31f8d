"""Run every builtin scene across a degree range and print a summary table.

    python3 scripts/run_demos.py --out demo_out --max-degree 12
"""
import argparse
import logging
from pathlib import Path

from qsurf.cli import run_scene
from qsurf.scene import builtin_scenes, load_scene


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--max-degree", type=int, default=12)
    ap.add_argument("--m0", type=int, default=None)
    ap.add_argument("--ref-factor", type=int, default=20)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    degrees = list(range(3, args.max_degree + 1, 3))
    for name in builtin_scenes():
        report, _ = run_scene(load_scene(name), degrees, M0=args.m0, ref_factor=args.ref_factor,
                              out=Path(args.out) / name)
        print(f"\n{name}: M={report.M}  sigma_J={report.sigma_J:.6g}")
        print(f"{'deg':>4} {'dim':>5} {'N':>5} {'nu':>5} {'ratio':>9} {'residual':>9} {'iters':>5}")
        for r in report.results:
            print(f"{r.degree:>4} {r.full_dim:>5} {r.N:>5} {r.rule.nu:>5} {report.M / r.rule.nu:>9.1e} "
                  f"{r.rule.residual:>9.1e} {len(r.rule.trace):>5}")
        for fn, method, deg, _, _, err in report.errors:
            if method != "baseline":
                print(f"  {fn} {method:>6} {deg!s:>3}  rel.err {err:.2e}")


if __name__ == "__main__":
    main()
