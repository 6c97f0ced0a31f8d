"""Command-line driver: sample a scene, compress per degree, compare with the
full-matrix baseline and the plain QMC rule, and write CSV/JSON artifacts.

    qsurf run --scene torus --degrees 3,6,9 --m0 100000 --out results/
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .compress import (
    CompressParams,
    bottom_up_compress,
    caratheodory_compress,
    evaluate_rule,
    moment_residual,
    qmc_integrate,
    qmc_moments,
)
from .polyspace import select_basis
from .scene import Scene, builtin_scenes, load_scene
from .surface import EmptySampleError

log = logging.getLogger("qsurf")

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def test_functions(P0):
    """The three integrands ``exp(-|P-P0|)``, ``cos(x+y+z)``, ``|P-P0|^5``."""
    P0 = np.asarray(P0, dtype=float)

    def g1(P):
        return np.exp(-np.linalg.norm(np.atleast_2d(P) - P0, axis=1))

    def g2(P):
        return np.cos(np.atleast_2d(P).sum(axis=1))

    def g3(P):
        return np.linalg.norm(np.atleast_2d(P) - P0, axis=1) ** 5

    return g1, g2, g3


test_functions.__test__ = False  # keep pytest from collecting it


def reference_integral(scene, fs, M_ref, start_index=1, chunk=10**6):
    """High-cardinality QMC values of each function in ``fs`` (a list).

    ``M_ref`` raw Halton attempts are processed in chunks of consecutive
    indices, so the result equals one long QMC sum without holding all points.
    """
    sums = np.zeros(len(fs))
    M = M_S = 0
    for lo in range(0, M_ref, chunk):
        n = min(chunk, M_ref - lo)
        try:
            s = scene.sample(M0=n, start_index=start_index + lo)
        except EmptySampleError:
            continue
        M += s.M
        M_S += s.M_S
        sums += [float(np.sum(f(s.points))) for f in fs]
    if M == 0:
        raise EmptySampleError("reference sample misses the region")
    sigma_J = scene.sigma_J if scene.sigma_J is not None else scene.surface.total_area * M / M_S
    return list(sigma_J * sums / M)


def _g(x):
    return format(float(x), ".17g")


def _json17(obj):
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json17(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json17(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return "null"
        return _g(obj)
    return json.dumps(obj)


@dataclass
class DegreeResult:
    degree: int
    N: int
    full_dim: int
    rule: object
    baseline: object = None
    times: dict = field(default_factory=dict)


@dataclass
class RunReport:
    scene: str
    M0: int
    M_S: int
    M: int
    sigma_J: float
    degrees: list
    results: list = field(default_factory=list)
    errors: list = field(default_factory=list)  # (function, method, degree, value, reference, rel_error)

    @property
    def all_converged(self):
        return all(r.rule.converged for r in self.results)


REPORT_COLUMNS = [
    "scene", "degree", "M0", "M_S", "M", "sigma_J", "full_dim", "N",
    "nu", "compression_ratio", "residual", "converged", "iterations", "trace",
    "baseline_nu", "baseline_residual", "baseline_converged",
]


def _report_rows(report):
    for r in report.results:
        b = r.baseline
        yield [
            report.scene, r.degree, report.M0, report.M_S, report.M, _g(report.sigma_J), r.full_dim, r.N,
            r.rule.nu, _g(report.M / r.rule.nu), _g(r.rule.residual), int(r.rule.converged), len(r.rule.trace),
            "|".join(f"{t['m']}:{t['momtype']}:{t['residual']:.3e}" for t in r.rule.trace),
            "" if b is None else b.nu, "" if b is None else _g(b.residual), "" if b is None else int(b.converged),
        ]


def write_artifacts(report, sample, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        w.writerows(_report_rows(report))
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["degree", "basis_s", "compressed_s", "A_M_s", "baseline_s", "speedup"])
        for r in report.results:
            t = r.times
            speed = t["baseline"] / t["compressed"] if "baseline" in t and t["compressed"] > 0 else ""
            w.writerow([r.degree, f"{t['basis']:.4g}", f"{t['compressed']:.4g}",
                        f"{sum(s['A_M_seconds'] for s in r.rule.trace):.4g}",
                        f"{t['baseline']:.4g}" if "baseline" in t else "", speed and f"{speed:.3g}"])
    for r in report.results:
        (out / f"rule_deg{r.degree}.json").write_text(_json17(r.rule.to_dict()) + "\n")
        if r.baseline is not None:
            (out / f"baseline_deg{r.degree}.json").write_text(_json17(r.baseline.to_dict()) + "\n")
    with open(out / "points.csv", "w", newline="") as fh:
        fh.write("x,y,z\n")
        for p in sample.points:
            fh.write(f"{_g(p[0])},{_g(p[1])},{_g(p[2])}\n")
    if report.errors:
        with open(out / "errors.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["function", "method", "degree", "value", "reference", "rel_error"])
            for fn, method, deg, val, ref, err in report.errors:
                w.writerow([fn, method, deg, _g(val), _g(ref), _g(err)])


def run_scene(scene, degrees, params=None, start_index=1, M0=None, baseline="auto",
              baseline_cap=20000, ref_factor=20, out=None):
    """Run sample -> basis -> moments -> compression for each degree.

    Returns ``(report, sample)``; artifacts are written to ``out`` when given.
    ``ref_factor`` sets the reference-integral budget as a multiple of ``M0``
    (0 skips the error table).
    """
    if isinstance(scene, (str, os.PathLike)):
        scene = load_scene(scene)
    params = params or CompressParams()
    M0 = M0 or scene.M0
    if any(n < 0 for n in degrees):
        raise ValueError("degrees must be nonnegative")

    sample = scene.sample(M0=M0, start_index=start_index)
    report = RunReport(scene.name, M0, sample.M_S, sample.M, sample.sigma_J, list(degrees))
    log.info("%s: M0=%d  M=%d  sigma_J=%.6g", scene.name, M0, sample.M, sample.sigma_J)

    fs = test_functions(scene.P0)
    names = ("g1", "g2", "g3")
    refs = None
    if ref_factor:
        refs = reference_integral(scene, fs, ref_factor * M0, start_index)
        for name, f, ref in zip(names, fs, refs):
            val = qmc_integrate(sample, f)
            report.errors.append((name, "qmc", "", val, ref, abs(val - ref) / abs(ref)))

    for n in degrees:
        t0 = time.perf_counter()
        basis, V_M = select_basis(sample.points, n)
        moments = qmc_moments(V_M, sample.sigma_J)
        t_basis = time.perf_counter() - t0

        t0 = time.perf_counter()
        rule = bottom_up_compress(sample, V_M, moments, params, basis=basis)
        times = {"basis": t_basis, "compressed": time.perf_counter() - t0}
        rule.residual = moment_residual(rule, moments)

        base = None
        if baseline == "on" or (baseline == "auto" and sample.M <= baseline_cap):
            t0 = time.perf_counter()
            base = caratheodory_compress(sample, V_M, moments, basis=basis, eps=params.eps)
            times["baseline"] = time.perf_counter() - t0
            base.residual = moment_residual(base, moments)

        res = DegreeResult(n, basis.N, basis.full_dim, rule, base, times)
        report.results.append(res)
        log.info("deg %d: N=%d nu=%d res=%.2e converged=%s (%.2fs)",
                 n, basis.N, rule.nu, rule.residual, rule.converged, times["compressed"])

        if refs is not None:
            methods = [("compressed", rule)] + ([("baseline", base)] if base is not None else [])
            for name, f, ref in zip(names, fs, refs):
                for method, r in methods:
                    val = evaluate_rule(r, f)
                    report.errors.append((name, method, n, val, ref, abs(val - ref) / abs(ref)))

    if out is not None:
        write_artifacts(report, sample, out)
    return report, sample


def _parse_degrees(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="qsurf", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compress QMC integration on one scene")
    run.add_argument("--scene", required=True, help="scene JSON file or builtin name (%s)" % ", ".join(builtin_scenes()))
    run.add_argument("--degrees", type=_parse_degrees, default=[3, 6, 9])
    run.add_argument("--m0", type=int, default=None, help="raw Halton attempts (default: scene M0)")
    run.add_argument("--eps", type=float, default=1e-10)
    run.add_argument("--theta", type=float, default=2.0)
    run.add_argument("--tau", type=float, default=10.0)
    run.add_argument("--m-init", type=float, default=2.0, help="initial m as a multiple of N")
    run.add_argument("--baseline", choices=["auto", "on", "off"], default="auto")
    run.add_argument("--baseline-cap", type=int, default=20000)
    run.add_argument("--ref-factor", type=int, default=20, help="reference M0 multiple; 0 disables errors.csv")
    run.add_argument("--start-index", type=int, default=1)
    run.add_argument("--out", default="qsurf_out")
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("scenes", help="list builtin scenes")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "scenes":
        print("\n".join(builtin_scenes()))
        return EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    out = os.environ.get("QSURF_OUT") or args.out
    try:
        scene = load_scene(args.scene)
        params = CompressParams(args.eps, args.theta, args.tau, args.m_init)
        report, _ = run_scene(scene, args.degrees, params, args.start_index, args.m0, args.baseline,
                              args.baseline_cap, args.ref_factor, out)
    except (OSError, ValueError, KeyError, EmptySampleError) as exc:
        print(f"qsurf: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    for r in report.results:
        print(f"deg {r.degree:>2}  N={r.N:<4} nu={r.rule.nu:<4} ratio={report.M / r.rule.nu:.2e}  "
              f"res={r.rule.residual:.1e}  {'ok' if r.rule.converged else 'NOT CONVERGED'}")
    if not report.all_converged:
        for r in report.results:
            if not r.rule.converged:
                print(f"deg {r.degree} trace: {r.rule.trace}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
