"""``rgsfp`` command line interface.

Every output starts with a header recording the tool version, subcommand and
effective configuration (a ``#`` line for text/CSV, an XML comment for SVG,
a ``meta`` object for JSON).  Exit status: 0 success, 1 verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, combinat, fixdist, rgs, sampler, series
from .fixdist import float17

CACHE_ENV = "RGSFP_CACHE"
DEFAULT_CACHE = Path("~/.cache/rgsfp/tables-v1.txt")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    seed: int = 0
    order: int = 8
    max_n: int = 10
    output: Optional[str] = None
    format: str = "csv"
    cache: Optional[str] = None


def cache_path(explicit: Optional[str]) -> Path:
    if explicit:
        return Path(explicit).expanduser()
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env).expanduser()
    return DEFAULT_CACHE.expanduser()


def _load_cache(path: Path) -> None:
    if not path.is_file():
        return
    try:
        combinat.install_cache(combinat.NumberTableCache.load(path))
    except (OSError, combinat.CacheFormatError) as exc:
        print(f"rgsfp: ignoring unreadable cache {path}: {exc}", file=sys.stderr)


def _header_items(ns: argparse.Namespace) -> list[tuple[str, object]]:
    skip = {"func", "command"}
    return [(k, v) for k, v in sorted(vars(ns).items()) if k not in skip]


def header_text(ns: argparse.Namespace) -> str:
    cfg = " ".join(f"{k}={v}" for k, v in _header_items(ns))
    return f"rgsfp {__version__} {ns.command} {cfg}".rstrip()


def _emit(ns: argparse.Namespace, body: str) -> None:
    if ns.output:
        Path(ns.output).write_text(body)
    else:
        sys.stdout.write(body)


def _emit_text(ns, body: str) -> None:
    _emit(ns, f"# {header_text(ns)}\n{body}")


def _emit_json(ns, obj: dict) -> None:
    meta = {"tool": "rgsfp", "version": __version__, "command": ns.command}
    meta.update({k: v for k, v in _header_items(ns)})
    _emit(ns, json.dumps({"meta": meta, **obj}, indent=2) + "\n")


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _rational(x) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator), "float": float(float17(x))}


# -- subcommands ----------------------------------------------------------------

def cmd_bell(ns) -> int:
    ns_range = range(ns.n + 1) if ns.upto else [ns.n]
    rows = [("n", "bell")] + [(n, combinat.bell(n)) for n in ns_range]
    _emit_text(ns, _csv(rows))
    return 0


def cmd_stirling(ns) -> int:
    ks = [ns.k] if ns.k is not None else range(ns.n + 1)
    rows = [("n", "k", "stirling2")] + [(ns.n, k, combinat.stirling2(ns.n, k)) for k in ks]
    _emit_text(ns, _csv(rows))
    return 0


def cmd_theta(ns) -> int:
    _emit_text(ns, _csv([("n", "t", "theta"), (ns.n, ns.t, combinat.theta(ns.n, ns.t))]))
    return 0


def cmd_dist(ns) -> int:
    law = fixdist.distribution(ns.n)
    if ns.format == "json":
        _emit_json(ns, law.to_json_obj())
    else:
        _emit_text(ns, law.to_csv())
    return 0


_EXPECT = {
    "theta": fixdist.expectation_theta,
    "genfun": fixdist.expectation_genfun,
    "brute": fixdist.expectation_brute,
}


def cmd_expect(ns) -> int:
    if ns.method == "brute" and ns.n > 13:
        raise UsageError("--method brute enumerates R_n; use --n <= 13")
    value = _EXPECT[ns.method](ns.n)
    if ns.format == "json":
        _emit_json(ns, {"n": ns.n, "method": ns.method, "expectation": _rational(value)})
    else:
        rows = [("n", "method", "num", "den", "float"),
                (ns.n, ns.method, value.numerator, value.denominator, float17(value))]
        _emit_text(ns, _csv(rows))
    return 0


def cmd_enumerate(ns) -> int:
    stream = rgs.enumerate_rgs(ns.n) if ns.k is None else rgs.enumerate_with_max(ns.n, ns.k)
    out = sys.stdout if not ns.output else open(ns.output, "w")
    try:
        out.write(f"# {header_text(ns)}\n")
        for pi in stream:
            out.write(f"{pi}\n")
    finally:
        if ns.output:
            out.close()
    return 0


def cmd_sample(ns) -> int:
    rng = sampler.RngStream(ns.seed, ns.stream)
    rows = [("index", "m", "fixed_points", "rgs")]
    for i in range(ns.count):
        pi, trace = sampler.sample_partition(ns.n, rng)
        rows.append((i, trace.m, pi.fixed_points(), ",".join(map(str, pi))))
    _emit_text(ns, _csv(rows))
    return 0


def cmd_hist(ns) -> int:
    from . import plotting

    exact = fixdist.distribution(ns.n)
    hist = sampler.empirical_fixdist(ns.n, ns.samples, sampler.RngStream(ns.seed, ns.stream))
    if ns.format == "svg":
        _emit(ns, plotting.render_svg(hist, exact, header=header_text(ns)))
    elif ns.format == "json":
        bins = [
            {"j": j, "count": c, "empirical_p": float(float17(e)), "exact_p": _rational(x)}
            for j, c, e, x in hist.rows(exact)
        ]
        _emit_json(ns, {
            "n": ns.n,
            "samples": hist.total,
            "total_variation": hist.total_variation(exact),
            "mean": _rational(hist.mean()),
            "exact_mean": _rational(exact.expectation),
            "bins": bins,
        })
    else:
        _emit_text(ns, hist.to_csv(exact))
    if ns.figure:
        plotting.save_figure(hist, ns.figure, exact)
    return 0


def _series_for(ns) -> series.TruncSeries:
    if ns.which == "qk":
        if ns.k is None:
            raise UsageError("--which qk needs --k")
        return series.expand_Qk(ns.k, ns.order)
    if ns.which == "r":
        if ns.brute:
            if ns.order > 10:
                raise UsageError("--brute enumerates R_n; use --order <= 10")
            return series.brute_R(ns.order)
        return series.expand_R_theorem1(ns.order)
    if ns.which == "rm":
        if ns.m is None:
            raise UsageError("--which rm needs --m")
        return series.expand_Rm(ns.m, ns.order)
    return series.expand_T(ns.order)


def cmd_series(ns) -> int:
    s = _series_for(ns)
    _emit_text(ns, "".join(line + "\n" for line in series.dump_lines(s)))
    return 0


def cmd_verify(ns) -> int:
    from .verify import SUITES, run_suites

    suites = SUITES if ns.suite == "all" else (ns.suite,)
    lines = []
    first_failure = None
    for result in run_suites(suites, order=ns.order, max_n=ns.max_n, seed=ns.seed):
        lines.append(result.line())
        if not result.ok and first_failure is None:
            first_failure = result
    if first_failure is not None:
        lines.append(f"first failure: {first_failure.suite}.{first_failure.name}: {first_failure.failure}")
    _emit_text(ns, "".join(line + "\n" for line in lines))
    return 1 if first_failure else 0


def cmd_cache_build(ns) -> int:
    path = cache_path(ns.cache)
    table = combinat.NumberTableCache.build(ns.max_n)
    table.save(path)
    _emit_text(ns, f"wrote {path} max_n={table.max_n}\n")
    return 0


# -- parser ---------------------------------------------------------------------

def _nonneg(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def _positive(text: str) -> int:
    value = _nonneg(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _seed(text: str) -> int:
    value = _nonneg(text)
    if value >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rgsfp", description="Fixed points of restricted growth sequences.")
    parser.add_argument("--version", action="version", version=f"rgsfp {__version__}")
    parser.add_argument("--cache", help=f"table cache file (default ${CACHE_ENV} or {DEFAULT_CACHE})")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("bell", cmd_bell, "Bell numbers")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--upto", action="store_true", help="list B_0..B_n")

    p = add("stirling", cmd_stirling, "Stirling numbers of the second kind")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--k", type=_nonneg)

    p = add("theta", cmd_theta, "shifted Dobinski sums")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--t", type=_nonneg, required=True)

    p = add("dist", cmd_dist, "exact law of the number of fixed points")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("expect", cmd_expect, "expected number of fixed points")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--method", choices=tuple(_EXPECT), default="theta")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("enumerate", cmd_enumerate, "list all RGS of length n (optionally with max letter k)")
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--k", type=_nonneg)

    p = add("sample", cmd_sample, "draw uniform random RGS")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--stream", type=_nonneg, default=0)

    p = add("hist", cmd_hist, "sampled histogram of fixed points against the exact law")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--samples", type=_positive, default=20_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--stream", type=_nonneg, default=0)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--figure", help="also render the histogram to this file (.svg/.png/.pdf)")

    p = add("series", cmd_series, "dump generating-function coefficients")
    p.add_argument("--which", choices=("qk", "r", "rm", "t"), required=True)
    p.add_argument("--order", type=_nonneg, default=8)
    p.add_argument("--k", type=_nonneg)
    p.add_argument("--m", type=_nonneg)
    p.add_argument("--brute", action="store_true", help="for --which r: build R by enumeration")

    p = add("verify", cmd_verify, "run cross-check suites")
    p.add_argument("--suite", choices=("numbers", "dist", "series", "sampler", "identity", "all"), default="all")
    p.add_argument("--order", type=_positive, default=8)
    p.add_argument("--max-n", type=_nonneg, default=10)
    p.add_argument("--seed", type=_seed, default=0)

    p = add("cache-build", cmd_cache_build, "precompute and store Bell/Stirling tables")
    p.add_argument("--max-n", type=_nonneg, required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.command != "cache-build":
        _load_cache(cache_path(ns.cache))
    try:
        return ns.func(ns)
    except UsageError as exc:
        print(f"rgsfp {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, rgs.RgsError) as exc:
        print(f"rgsfp {ns.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
