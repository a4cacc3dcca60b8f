"""gausslab command line: ``gausslab [--seed S] [--threads T] [--out-dir D] <sum|experiment|verify> ...``"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, distexp, expsums, kernels
from .metaplectic import ReductionError, sign_class
from .numtheory import NotInvertibleError, SignFactor, coprime_residues, normalize_intervals
from .suites import SUITES, run_suite
from .weights import parse_weight

KS_TOLERANCE = 0.05
CONFIG_KEYS = {
    "q", "a", "alpha", "coeff", "N", "D", "weight", "reference_samples", "seed",
    "protocol", "reference_method", "n_max", "bins", "figure",
}


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ parsing

def parse_real(text: str) -> float:
    """A float, a fraction 'a/b', or 'sqrt(k)' / 'a/sqrt(k)'."""
    t = text.strip().replace(" ", "")
    m = re.fullmatch(r"(?:([0-9.]+)/)?sqrt\(([0-9.]+)\)", t)
    if m:
        num = float(m.group(1)) if m.group(1) else None
        root = math.sqrt(float(m.group(2)))
        return num / root if num is not None else root
    return float(Fraction(t))


def parse_intervals(text: str):
    """'lo:hi[, lo:hi ...]' with fraction or decimal endpoints."""
    out = []
    for part in text.split(","):
        lo, hi = part.split(":")
        out.append((Fraction(lo.strip()), Fraction(hi.strip())))
    return normalize_intervals(out)


def read_config(path) -> dict:
    """Flat 'key = value' file; '#' starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    raw = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        raw[key] = val
    if "q" not in raw:
        raise ConfigError(f"{path}: missing q")
    return raw


def build_config(raw: dict, seed=None) -> tuple:
    conv = {
        "q": ("q", int), "a": ("a", int), "alpha": ("alpha", Fraction), "coeff": ("coeff", parse_real),
        "N": ("N_override", int), "D": ("D", parse_intervals), "weight": ("weight", str),
        "reference_samples": ("reference_samples", int), "seed": ("seed", int),
        "protocol": ("protocol", str), "reference_method": ("reference_method", str),
        "n_max": ("n_max", int), "bins": ("bins", int),
    }
    kw = {}
    for key, val in raw.items():
        if key == "figure":
            continue
        name, fn = conv[key]
        try:
            kw[name] = fn(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key}: {val!r} ({exc})") from None
    if seed is not None:
        kw["seed"] = seed
    try:
        parse_weight(kw.get("weight", "indicator"))
        cfg = distexp.ExperimentConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    figure = raw.get("figure", "no").lower() in ("1", "yes", "true", "on")
    return cfg, figure


# ------------------------------------------------------------------ output

def _g(v: float) -> str:
    return format(float(v), ".17g")


def _write_samples(path: Path, keys, labels, values):
    with open(path, "w") as fh:
        fh.write("p,class,re,im\n")
        for k, lab, z in zip(keys, labels, values):
            fh.write(f"{int(k)},{lab},{_g(z.real)},{_g(z.imag)}\n")


def _write_reference(path: Path, xs, values):
    with open(path, "w") as fh:
        fh.write("x,re,im\n")
        for x, z in zip(xs, values):
            fh.write(f"{_g(x)},{_g(z.real)},{_g(z.imag)}\n")


def _histograms(dist, ref, bins: int):
    out = {}
    for pr in distexp.PROJECTIONS:
        v = dist.project(pr)
        rng = (float(v.min()), float(v.max()))
        if rng[0] == rng[1]:
            rng = (rng[0] - 0.5, rng[1] + 0.5)
        edges, mass = dist.histogram(pr, bins, rng)
        _, rmass = ref.histogram(pr, bins, rng)
        out[pr] = (edges, mass, rmass)
    return out


def _write_histogram(path: Path, hists):
    # gnuplot: one index block per projection, blocks separated by two blank lines
    with open(path, "w") as fh:
        blocks = []
        for pr, (edges, mass, _) in hists.items():
            rows = [f"# projection {pr}", "bin_left,bin_right,mass"]
            rows += [f"{_g(a)},{_g(b)},{_g(m)}" for a, b, m in zip(edges[:-1], edges[1:], mass)]
            blocks.append("\n".join(rows))
        fh.write("\n\n\n".join(blocks) + "\n")


def _write_figure(path: Path, hists, title: str) -> str | None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return "matplotlib not installed; figure.svg skipped"
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, pr in zip(axes, ("re", "im")):
        edges, mass, rmass = hists[pr]
        width = np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        ax.bar(edges[:-1], mass / width, width=width, align="edge", alpha=0.5, label="Gauss sums")
        ax.plot(mid, rmass / width, color="k", lw=1.2, label="theta sums")
        ax.set_title(f"{'Re' if pr == 're' else 'Im'}  {title}")
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, files, cfg, seed, started, wall):
    entries = [{"name": f.name, "sha256": _sha256(f), "bytes": f.stat().st_size} for f in files]
    manifest = {
        "tool": "gausslab",
        "version": __version__,
        "seed": seed,
        "config": cfg.to_dict(),
        "started": started,
        "wall_clock_seconds": wall,
        "backend": kernels.BACKEND,
        "files": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    for e in entries:
        if _sha256(out / e["name"]) != e["sha256"]:
            raise RuntimeError(f"hash mismatch for {e['name']}")
    return manifest


# ------------------------------------------------------------------ experiment

def _short_report(cfg, dist, ref, threads: int) -> dict:
    warns = []
    reg = cfg.regime()
    if not reg["inside_proven_regime"]:
        warns.append(f"alpha = {cfg.alpha}: N^(4/3)/q does not grow, so (q, N) lies outside the proven "
                     "regime; no acceptance bound applies")
    ks = {pr: distexp.ks_distance(dist, ref, pr) for pr in distexp.PROJECTIONS}
    grid = distexp.default_R_grid(ref)
    if grid is None:
        tail = {"status": "insufficient tail mass in the reference sample"}
    else:
        try:
            fit = distexp.tail_exponent(ref, grid)
            tail = {"status": "ok", "slope": fit.slope, "intercept": fit.intercept,
                    "power_law": fit.power_law, "local_slopes": fit.local_slopes,
                    "R_grid": grid.tolist(), "exceedances": fit.exceedances}
        except ValueError as exc:
            tail = {"status": str(exc)}
    try:
        sign = distexp.sign_joint_test(dist)
    except ValueError as exc:
        sign = {"error": str(exc)}
    ms = distexp.mean_square_check(cfg, threads=threads)
    return {
        "protocol": "short",
        "q": cfg.q,
        "N": cfg.N,
        "samples": len(dist),
        "reference_samples": len(ref),
        "ks": ks,
        "ks_tolerance": KS_TOLERANCE,
        "ks_pass": {pr: ks[pr] < KS_TOLERANCE for pr in ("re", "im")},
        "tolerance_note": "desk-scale engineering tolerance calibrated to the KS null scale",
        "second_moment": dist.second_moment(),
        "reference_second_moment": ref.second_moment(),
        "tail": tail,
        "sign_classes": sign,
        "mean_square": ms,
        "regime": reg,
        "warnings": warns,
    }


def run_experiment(cfg, out: Path, *, threads: int = 1, figure: bool = False) -> dict:
    started = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "samples.csv", out / "histogram.csv", out / "reference.csv"]
    if cfg.protocol == "short":
        dist = distexp.short_gauss_experiment(cfg, threads=threads)
        ref = distexp.reference_theta_sample(cfg.f, cfg.N, cfg.reference_samples, cfg.seed,
                                             method=cfg.reference_method, threads=threads)
        report = _short_report(cfg, dist, ref, threads)
    else:
        if cfg.alpha != 1:
            raise ConfigError("the long protocol needs alpha = 1")
        res = distexp.long_sum_experiment(cfg.q, cfg.coeff, reference_samples=cfg.reference_samples,
                                          seed=cfg.seed, n_max=cfg.n_max, threads=threads)
        emp, ref = res.pop("_empirical"), res.pop("_reference")
        labels = [str(sign_class(int(p), cfg.q)[1]) for p in emp.keys]
        dist = distexp.EmpiricalDistribution(emp.samples, labels, keys=emp.keys)
        report = dict(res, protocol="long", ks_tolerance=KS_TOLERANCE,
                      ks_pass={pr: res["ks"][pr] < KS_TOLERANCE for pr in ("re", "im")},
                      warnings=[])
    _write_samples(files[0], dist.keys, dist.labels, dist.samples)
    hists = _histograms(dist, ref, cfg.bins)
    _write_histogram(files[1], hists)
    _write_reference(files[2], ref.keys, ref.samples)
    if figure:
        msg = _write_figure(out / "figure.svg", hists, f"q={cfg.q}, N={cfg.N}")
        if msg:
            report["warnings"].append(msg)
        else:
            files.append(out / "figure.svg")
    report["config"] = cfg.to_dict()
    report["backend"] = kernels.BACKEND
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    files.append(out / "report.json")
    _write_manifest(out, files, cfg, cfg.seed, started, time.perf_counter() - t0)
    return report


# ------------------------------------------------------------------ commands

def cmd_sum(args) -> int:
    kind = args.kind
    if kind == "gauss":
        if args.N is not None:
            v = expsums.incomplete_gauss_sum(parse_weight(args.weight), args.p, args.q, args.N)
        elif args.closed:
            v = expsums.classical_gauss_sum_closed(args.p, args.q)
        else:
            v = expsums.classical_gauss_sum_direct(args.p, args.q)
    elif kind == "theta":
        x = Fraction(args.x) if "/" in args.x else float(args.x)
        v = expsums.theta_sum(parse_weight(args.weight), x, args.N)
    elif kind == "kloosterman":
        if args.sigma is not None:
            v = expsums.restricted_character_sum(args.m, args.n, args.q, SignFactor.parse(args.sigma))
        elif args.twisted:
            v = expsums.twisted_kloosterman(args.m, args.n, args.q)
        else:
            v = expsums.kloosterman(args.m, args.n, args.q)
    elif kind == "salie":
        v = expsums.salie(args.m, args.n, args.q)
    else:
        D = parse_intervals(args.D) if args.D else None
        M = expsums.mean_square(parse_weight(args.weight), args.q, args.N, D, threads=args.threads)
        v = expsums.SumValue(complex(M), 0)
    print(v.format())
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg, figure = build_config(read_config(args.config), args.seed)
    except ConfigError as exc:
        print(f"gausslab: config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    report = run_experiment(cfg, out, threads=args.threads, figure=figure or args.figure)
    for w in report.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    ks = report["ks"]
    print(f"q={cfg.q} N={cfg.N} samples={report['samples']} "
          f"KS re={ks['re']:.4f} im={ks['im']:.4f} abs={ks['abs']:.4f} -> {out}")
    return 0


def cmd_verify(args) -> int:
    ok = True
    for res in run_suite(args.suite):
        print(res.line())
        for f in res.failures:
            print(f"    {f}")
        ok &= res.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gausslab", description="Incomplete Gauss sums and their limit laws")
    parser.add_argument("--version", action="version", version=f"gausslab {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    parser.add_argument("--threads", type=int, default=kernels.default_threads(),
                        help="worker threads (default: $GAUSSLAB_THREADS or 1)")
    parser.add_argument("--out-dir", default="gausslab-out", help="experiment output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("sum", help="evaluate a single exponential sum")
    kinds = p_sum.add_subparsers(dest="kind", required=True)
    g = kinds.add_parser("gauss", help="classical (no --N) or incomplete Gauss sum")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--N", type=int)
    g.add_argument("--weight", default="indicator")
    how = g.add_mutually_exclusive_group()
    how.add_argument("--direct", action="store_true")
    how.add_argument("--closed", action="store_true")
    t = kinds.add_parser("theta", help="S_f(x, N); x as a float or exact p/q")
    t.add_argument("--x", required=True)
    t.add_argument("--N", type=int, required=True)
    t.add_argument("--weight", default="indicator")
    for name in ("kloosterman", "salie"):
        k = kinds.add_parser(name)
        k.add_argument("--m", type=int, required=True)
        k.add_argument("--n", type=int, required=True)
        k.add_argument("--q", type=int, required=True)
        if name == "kloosterman":
            k.add_argument("--twisted", action="store_true")
            k.add_argument("--sigma", help="restrict to a sign class: +1, -1, +i, -i")
    m = kinds.add_parser("meansquare")
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--N", type=int, required=True)
    m.add_argument("--weight", default="indicator")
    m.add_argument("--D", help="torus subset 'lo:hi[,lo:hi]' (default: whole torus)")

    e = sub.add_parser("experiment", help="run an experiment config and write its output files")
    e.add_argument("config")
    e.add_argument("--figure", action="store_true", help="also write figure.svg")

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("suite", choices=[*SUITES, "all"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    if args.command == "sum" and args.kind == "gauss" and args.N is not None and (args.direct or args.closed):
        parser.error("--direct/--closed apply to the classical sum only (omit --N)")
    handlers = {"sum": cmd_sum, "experiment": cmd_experiment, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"gausslab: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, NotInvertibleError, ReductionError) as exc:
        print(f"gausslab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
