"""The ``workbench`` command.

Subcommands
-----------
verify
    Run verification suites and write a JSON report.
spectrum
    CSV of Hodge-Laplacian eigenvalues per degree.
twopoint
    CSV of ``F(t) = <kappa f, exp(iHt) kappa g>`` and, with ``--fourier``,
    its tapered spectrum.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
3 internal numerical error.
"""

from __future__ import annotations

import argparse
import os
import sys

# pin BLAS threading before numpy loads so results do not depend on the host
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

__all__ = ["main", "build_parser"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv(rows, header):
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x):
    return format(float(x), ".17g")


def cmd_verify(args, config):
    from .report import build_report, dump_report, report_exit_code, run_suites

    records = run_suites(config, args.suite, max(1, args.jobs), args.timings)
    report = build_report(config, records)
    _write(dump_report(report), args.out)
    for r in records:
        res = "-" if r["residual"] is None else r["residual"]
        print(f"{r['status']:<8} {r['suite']}/{r['name']}  {res}  ({r['relation']} {r['tolerance']})",
              file=sys.stderr)
    s = report["summary"]
    print(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped, {s['error']} errors", file=sys.stderr)
    return report_exit_code(report)


def cmd_spectrum(args, config):
    from .model import Model

    cx = Model(config).complex
    rows = []
    for k in range(cx.dimension + 1):
        b = cx.eigenbasis(k)
        ker = set(int(i) for i in b.kernel_indices)
        for i, lam in enumerate(b.eigenvalues):
            rows.append((k, i, _num(lam), int(i in ker)))
    _write(_csv(rows, ("degree", "index", "eigenvalue", "is_kernel")), args.out)
    return EXIT_PASS


def _single_mode_form(model, rng):
    from .spacetime_forms import make_test_form
    from .spatial_complex import SpatialForm

    c = model.corpus
    return make_test_form(1, [(c.profile(rng), SpatialForm(model.complex, 1, c.exact[0]))])


def cmd_twopoint(args, config):
    from .one_particle import kappa, krein_inner, positive_frequency_spectrum
    from .model import Model

    m = Model(config)
    rng = m.rng("twopoint")
    if args.single_mode:
        f = g = _single_mode_form(m, rng)
    else:
        f, g = m.corpus.generic_form(rng), m.corpus.generic_form(rng)
    r = positive_frequency_spectrum(f, g, m.structure, samples=args.samples)
    F0 = krein_inner(kappa(f, m.structure), kappa(g, m.structure))
    header = ["index", "time", "re_F", "im_F", "F0_re", "F0_im"]
    if args.fourier:
        header += ["frequency", "magnitude", "negative_mass_ratio"]
    rows = []
    for i in range(args.samples):
        row = [i, _num(r["times"][i]), _num(r["samples"][i].real), _num(r["samples"][i].imag),
               _num(F0.real), _num(F0.imag)]
        if args.fourier:
            row += [_num(r["frequencies"][i]), _num(r["magnitudes"][i]), _num(r["negative_mass_ratio"])]
        rows.append(row)
    _write(_csv(rows, header), args.out)
    return EXIT_PASS


def build_parser():
    from .config import ENV_VAR, SUITES

    p = argparse.ArgumentParser(prog="workbench", description="Gupta-Bleuler lattice workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help=f"JSON or YAML config (default: ${ENV_VAR} or built-in defaults)")
        sp.add_argument("--seed", type=int, help="override the master seed")
        sp.add_argument("--out", help="output file (default: stdout)")

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable)")
    v.add_argument("--jobs", type=int, default=1, help="suites run concurrently")
    v.add_argument("--timings", action="store_true", help="record per-check runtimes")

    s = sub.add_parser("spectrum", help="Laplacian eigenvalues as CSV")
    common(s)

    t = sub.add_parser("twopoint", help="two-point function samples as CSV")
    common(t)
    t.add_argument("--fourier", action="store_true", help="append the tapered spectrum")
    t.add_argument("--single-mode", action="store_true", help="use a single exact mode for f = g")
    t.add_argument("--samples", type=int, default=1024)
    return p


def main(argv=None):
    from .errors import ConfigurationError, WorkbenchError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        from .config import load_config

        overrides = {"seed": args.seed} if args.seed is not None else None
        config = load_config(args.config, overrides)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"verify": cmd_verify, "spectrum": cmd_spectrum, "twopoint": cmd_twopoint}[args.command]
    try:
        return handler(args, config)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WorkbenchError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
