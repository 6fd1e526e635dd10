"""``hill-krein`` command line: classify, sweep, table, selftest."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import acceptance, coupling, kreinindex, waveforms

TABLE_COLUMNS = (
    "branch",
    "gamma_regime",
    "profile",
    "space",
    "n_L",
    "z_L",
    "n_V",
    "K_Ham",
    "verdict",
    "paper_verdict",
    "jl_max_real",
    "status",
)

REPORT_COLUMNS = (
    "kappa",
    "gamma",
    "branch",
    "B",
    "k",
    "L",
    "omega",
    "profile",
    "space",
    "N",
    "n_L",
    "z_L",
    "n_V",
    "K_Ham",
    "verdict",
    "paper_expected",
    "jl_max_real",
    "jl_verdict",
)

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class ConfigError(ValueError):
    """Invalid combination of command-line options."""


def _float_list(text):
    """``"0.3,0.5"`` or ``"start:stop:num"`` (inclusive linspace)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:num, got {text!r}")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise argparse.ArgumentTypeError("range needs num >= 1")
        if num == 1:
            return [start]
        return [start + (stop - start) * i / (num - 1) for i in range(num)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _jobs(value):
    if value is None:
        value = os.environ.get("HILL_KREIN_JOBS", "1")
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"jobs must be an integer, got {value!r}") from None
    if n < 1:
        raise ConfigError("jobs must be >= 1")
    return n


def _add_wave_options(p, multi):
    p.add_argument("--kappa", type=float, default=1.0)
    if multi:
        p.add_argument("--gamma", type=_float_list, default=[0.0], help="list or start:stop:num")
    else:
        p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--branch", default="one", help="bplus, bminus, one or minus_one")
    p.add_argument("--profile", choices=waveforms.PROFILE_KINDS, default="cnoidal")
    p.add_argument("--space", choices=("full", "odd"), default=None,
                   help="default: odd for snoidal, full for cnoidal")
    freq = p.add_mutually_exclusive_group()
    if multi:
        freq.add_argument("--k", type=_float_list, default=None, help="moduli, list or start:stop:num")
        freq.add_argument("--omega", type=_float_list, default=None, help="frequencies instead of --k")
    else:
        freq.add_argument("--k", type=float, default=None, help="elliptic modulus (default 0.5)")
        freq.add_argument("--omega", type=float, default=None, help="frequency instead of --k")
    p.add_argument("--L", type=float, default=2.0 * math.pi, help="period (default 2 pi)")
    p.add_argument("--N", type=int, default=256, help="grid size (default 256)")
    p.add_argument("--no-jl", action="store_true", help="skip the J L eigenvalue cross-check")


def _add_output_options(p):
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hill-krein",
        description="Spectral stability of periodic waves of a coupled quintic NLS system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="one stability report")
    _add_wave_options(p, multi=False)
    _add_output_options(p)

    p = sub.add_parser("sweep", help="reports over gamma and k grids")
    _add_wave_options(p, multi=True)
    _add_output_options(p)
    p.add_argument("--jobs", default=None, help="worker processes (env HILL_KREIN_JOBS)")

    p = sub.add_parser("table", help="reproduce the stability classification tables")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--k", type=_float_list, default=[0.5])
    p.add_argument("--L", type=float, default=2.0 * math.pi)
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--include-open", action="store_true", help="add cells with no proven classification")
    p.add_argument("--jobs", default=None, help="worker processes (env HILL_KREIN_JOBS)")
    _add_output_options(p)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="elliptic and waveform criteria only")
    p.add_argument("--tau-z", type=float, default=None, help="override the zero tolerance (fault injection)")
    return parser


# ---------------------------------------------------------------- config


def _validate(args):
    if args.space is None:
        args.space = "odd" if args.profile == "snoidal" else "full"
    if args.space == "odd" and args.profile != "snoidal":
        raise ConfigError("--space odd requires --profile snoidal (the odd space needs an odd wave)")
    if args.N < 32 or args.N % 2:
        raise ConfigError("--N must be even and >= 32")
    if not args.L > 0:
        raise ConfigError("--L must be positive")


def _ks(args):
    if args.omega is None:
        ks = args.k if args.k is not None else 0.5
        return ks
    if isinstance(args.omega, list):
        return [waveforms.k_of_omega(w, args.L) for w in args.omega]
    return waveforms.k_of_omega(args.omega, args.L)


def _job(kw):
    return kreinindex.stability_report(**kw).to_dict()


def _run_jobs(jobs, workers):
    if workers == 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs))


def _report_kwargs(args, gamma, k):
    return {
        "kappa": args.kappa,
        "gamma": gamma,
        "branch": args.branch,
        "k": k,
        "L": args.L,
        "profile_kind": args.profile,
        "space": args.space,
        "N": args.N,
        "with_jl": not args.no_jl,
    }


# ---------------------------------------------------------------- output


def _flat(d):
    return {
        "kappa": d["case"]["kappa"],
        "gamma": d["case"]["gamma"],
        "branch": d["case"]["branch"],
        "B": d["case"]["B"],
        "k": d["wave"]["k"],
        "L": d["wave"]["L"],
        "omega": d["wave"]["omega"],
        "profile": d["wave"]["profile"],
        "space": d["space"],
        "N": d["wave"]["N"],
        "n_L": d["counts"]["n_L"],
        "z_L": d["counts"]["z_L"],
        "n_V": d["V"]["n_neg"],
        "K_Ham": d["K_Ham"],
        "verdict": d["verdict"],
        "paper_expected": d["paper_expected"],
        "jl_max_real": d["jl"]["max_real"],
        "jl_verdict": d["jl"]["verdict"],
    }


def _csv(rows, columns):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: "" if r.get(c) is None else r[c] for c in columns})
    return buf.getvalue()


def _text_report(d):
    c, w = d["case"], d["wave"]
    lines = [
        f"case     kappa={c['kappa']:g} gamma={c['gamma']:g} branch={c['branch']} B={c['B']:.10g}",
        f"wave     {w['profile']} k={w['k']:.10g} L={w['L']:.10g} omega={w['omega']:.10g} N={w['N']}",
        f"space    {d['space']}",
    ]
    for s in d["spectra"]:
        ker = " ".join(f"{k}={v:.6f}" for k, v in s["kernel"].items())
        lines.append(f"  beta={s['beta']:<14.8g} n={s['n']} z={s['z']}  overlap {ker}")
    lines.append(f"n(L)={d['counts']['n_L']} z(L)={d['counts']['z_L']} n(V)={d['V']['n_neg']} K_Ham={d['K_Ham']}")
    for row in d["V"]["matrix"]:
        lines.append("  V " + " ".join(f"{x: .6e}" for x in row))
    lines.append(f"verdict  {d['verdict']} (expected: {d['paper_expected']})")
    jl = d["jl"]
    if jl["max_real"] is not None:
        lines.append(f"J L      max Re = {jl['max_real']:.3e} -> {jl['verdict']}")
    for msg in d["diagnostics"]:
        lines.append(f"note     {msg}")
    return "\n".join(lines) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _undecided(d):
    return d["verdict"] not in ("stable", "unstable") or d["paper_expected"] == "paper_open"


# ---------------------------------------------------------------- commands


def cmd_classify(args):
    _validate(args)
    d = _job(_report_kwargs(args, args.gamma, _ks(args)))
    if args.format == "json":
        text = json.dumps(d, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv([_flat(d)], REPORT_COLUMNS)
    else:
        text = _text_report(d)
    _emit(text, args.out)
    return EXIT_UNDECIDED if _undecided(d) else EXIT_OK


def cmd_sweep(args):
    _validate(args)
    ks = _ks(args)
    if not isinstance(ks, list):
        ks = [ks]
    jobs = [_report_kwargs(args, g, k) for g in args.gamma for k in ks]
    # surface admissibility errors before spawning workers
    for g in args.gamma:
        coupling.make_case(args.kappa, g, args.branch)
    results = _run_jobs(jobs, _jobs(args.jobs))
    if args.format == "json":
        text = json.dumps(results, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv([_flat(d) for d in results], REPORT_COLUMNS)
    else:
        text = _csv([_flat(d) for d in results], REPORT_COLUMNS).replace(",", "\t")
    _emit(text, args.out)
    return EXIT_UNDECIDED if any(_undecided(d) for d in results) else EXIT_OK


def _same(values):
    return values[0] if all(v == values[0] for v in values) else "varies"


def table_rows(kappa, ks, L, N, include_open=False, workers=1):
    """One row per classification-table cell, aggregated over the moduli ``ks``."""
    cells = list(kreinindex.EXPECTED_CELLS) + (list(kreinindex.OPEN_CELLS) if include_open else [])
    jobs = [
        {
            "kappa": kappa,
            "gamma": cell.sample * kappa,
            "branch": cell.branch,
            "k": k,
            "L": L,
            "profile_kind": cell.profile,
            "space": cell.space,
            "N": N,
        }
        for cell in cells
        for k in ks
    ]
    results = _run_jobs(jobs, workers)
    rows = []
    for i, cell in enumerate(cells):
        reps = results[i * len(ks) : (i + 1) * len(ks)]
        flat = [_flat(d) for d in reps]
        row = {
            "branch": cell.branch,
            "gamma_regime": cell.regime,
            "profile": cell.profile,
            "space": cell.space,
            "n_L": _same([f["n_L"] for f in flat]),
            "z_L": _same([f["z_L"] for f in flat]),
            "n_V": _same([f["n_V"] for f in flat]),
            "K_Ham": _same([f["K_Ham"] for f in flat]),
            "verdict": _same([f["verdict"] for f in flat]),
            "paper_verdict": cell.verdict,
            "jl_max_real": max(f["jl_max_real"] for f in flat),
        }
        if not cell.covered:
            row["status"] = "OPEN"
        else:
            want = (cell.n_L, cell.z_L, cell.n_V, cell.K_Ham, cell.verdict)
            ok = all((f["n_L"], f["z_L"], f["n_V"], f["K_Ham"], f["verdict"]) == want for f in flat)
            if cell.verdict in ("stable", "unstable"):
                ok = ok and all(f["jl_verdict"] == cell.verdict for f in flat)
            row["status"] = "PASS" if ok else "FAIL"
        row["reports"] = reps
        rows.append(row)
    return rows


def cmd_table(args):
    rows = table_rows(args.kappa, args.k, args.L, args.N, args.include_open, _jobs(args.jobs))
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv(rows, TABLE_COLUMNS)
    else:
        head = f"{'branch':10s} {'regime':14s} {'profile':8s} {'space':5s} n_L z_L n_V K   verdict      expected     jl_max_re  status"
        lines = [head]
        for r in rows:
            lines.append(
                f"{r['branch']:10s} {r['gamma_regime']:14s} {r['profile']:8s} {r['space']:5s} "
                f"{r['n_L']!s:>3} {r['z_L']!s:>3} {r['n_V']!s:>3} {r['K_Ham']!s:>3} "
                f"{r['verdict']!s:12s} {r['paper_verdict']:12s} {r['jl_max_real']:9.2e}  {r['status']}"
            )
        covered = [r for r in rows if r["status"] != "OPEN"]
        passed = sum(r["status"] == "PASS" for r in covered)
        lines.append(f"{passed}/{len(covered)} covered cells PASS")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(r["status"] != "FAIL" for r in rows) else EXIT_ERROR


def cmd_selftest(args):
    numbers = acceptance.QUICK if args.quick else None
    failed = 0
    total = 0.0
    for out in acceptance.run(numbers, tau_z=args.tau_z):
        print(out.line())
        for msg in out.details:
            print(f"    {msg}")
        failed += not out.passed
        total += out.seconds
    print(f"{'FAILED' if failed else 'OK'}: {failed} failing criteria, {total:.1f}s total")
    return EXIT_ERROR if failed else EXIT_OK


COMMANDS = {"classify": cmd_classify, "sweep": cmd_sweep, "table": cmd_table, "selftest": cmd_selftest}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (
        ConfigError,
        coupling.InadmissibleCaseError,
        waveforms.WaveDomainError,
        coupling.InconsistencyError,
    ) as exc:
        print(f"hill-krein: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
