"""Command-line front end.

Exit status: 0 on success, 1 when the data does not meet a constructor's
hypotheses (or a certificate does not pass), 2 on malformed input or any
internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .construct import (
    ClusteredOptions,
    SLSOptions,
    build_clustered,
    build_sls,
    trace_from_json,
    trace_to_json,
)
from .dataset import (
    certificate_to_json as sls_certificate_to_json,
    check_clustered,
    dataset_from_json,
    dataset_to_json,
    find_sls_certificate,
    gen_clustered,
    gen_sls,
)
from .errors import PreconditionError, ZeroLossError
from .jsonio import dump_json, load_json
from .netcore import LayerNet, layers_from_cumulative, net_from_json, net_to_json
from .plot import plot_trace
from .verify import certificate_to_json, certify, count_params, degeneracy_probe

EXIT_OK, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2


def _emit(doc, out: str | None) -> None:
    if out:
        dump_json(doc, out)
    else:
        print(json.dumps(doc, indent=1))


def _load_dataset(path):
    return dataset_from_json(load_json(path))


def _load_layernet(path) -> LayerNet:
    net = net_from_json(load_json(path))
    if not isinstance(net, LayerNet):
        net = layers_from_cumulative(net)
    return net


def cmd_gen_clustered(a) -> int:
    ds = gen_clustered(a.seed, a.dim, a.classes, a.points_per_class, a.spread)
    _emit(dataset_to_json(ds), a.out)
    return EXIT_OK


def cmd_gen_sls(a) -> int:
    ds = gen_sls(a.seed, a.dim, a.classes, a.points_per_class)
    _emit(dataset_to_json(ds), a.out)
    return EXIT_OK


def cmd_check(a) -> int:
    report = check_clustered(_load_dataset(a.in_[0]), a.c0)
    _emit(report.to_json(), a.out)
    return EXIT_OK if report.passes else EXIT_PRECONDITION


def cmd_certify_sls(a) -> int:
    cert = find_sls_certificate(_load_dataset(a.in_[0]))
    _emit(sls_certificate_to_json(cert), a.out)
    return EXIT_OK


def cmd_build(a) -> int:
    ds = _load_dataset(a.in_[0])
    if a.mode == "clustered":
        net, trace = build_clustered(ds, ClusteredOptions(mu_fractions=a.mu_frac, c0=a.c0))
    else:
        net, trace = build_sls(ds, find_sls_certificate(ds), SLSOptions(alpha=a.theta_alpha))
    _emit(net_to_json(net), a.out)
    if a.trace:
        dump_json(trace_to_json(trace), a.trace)
    verdict = certify(net, ds, a.tol)
    print(json.dumps(certificate_to_json(verdict)), file=sys.stderr)
    return EXIT_OK if verdict.passes else EXIT_INTERNAL


def cmd_verify(a) -> int:
    ds = _load_dataset(a.in_[0])
    net = _load_layernet(a.in_[1])
    verdict = certify(net, ds, a.tol)
    _emit(certificate_to_json(verdict), a.out)
    return EXIT_OK if verdict.passes else EXIT_PRECONDITION


def cmd_probe(a) -> int:
    ds = _load_dataset(a.in_[0])
    if a.mode == "clustered":
        report = check_clustered(ds, 0.125)
        if not report.passes:
            raise PreconditionError("data is not clustered: " + ", ".join(report.failure_reasons), report)
    result = degeneracy_probe(ds, a.mode, a.probes, a.seed, tol=a.tol)
    _emit({
        "builder": result.builder,
        "k": result.k,
        "passes": result.passes,
        "draws": [list(d) for d in result.draws],
        "failures": [{"draw": list(d), "error": msg} for d, msg in result.failures],
    }, a.out)
    return EXIT_OK if result.all_pass else EXIT_INTERNAL


def cmd_params(a) -> int:
    _emit(count_params(_load_layernet(a.in_[0])).to_json(), a.out)
    return EXIT_OK


def cmd_plot(a) -> int:
    ds = _load_dataset(a.in_[0])
    trace = trace_from_json(load_json(a.trace), ds) if a.trace else None
    svg = plot_trace(ds, trace)
    if a.out:
        Path(a.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


COMMANDS = {
    "gen-clustered": cmd_gen_clustered,
    "gen-sls": cmd_gen_sls,
    "check": cmd_check,
    "certify-sls": cmd_certify_sls,
    "build": cmd_build,
    "verify": cmd_verify,
    "probe": cmd_probe,
    "params": cmd_params,
    "plot": cmd_plot,
}

NEEDS_INPUT = {"check", "certify-sls", "build", "verify", "probe", "params", "plot"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zeroloss", description="Construct and verify zero-loss ReLU networks.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--in", dest="in_", nargs="+", metavar="PATH",
                   help="input JSON (verify takes the dataset then the network)")
    p.add_argument("--out", metavar="PATH", help="output file (stdout when omitted)")
    p.add_argument("--trace", metavar="PATH", help="trace JSON to write (build) or read (plot)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("clustered", "sls"), default="clustered")
    p.add_argument("--c0", type=float, default=0.125)
    p.add_argument("--mu-frac", type=float, default=2.5)
    p.add_argument("--theta-alpha", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--probes", type=int, default=20)
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--points-per-class", type=int, default=50)
    p.add_argument("--spread", type=float, default=0.5)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command.startswith("gen-") and args.seed is None:
        parser.error(f"{args.command} requires --seed")
    if args.command in NEEDS_INPUT and not args.in_:
        parser.error(f"{args.command} requires --in")
    if args.command == "verify" and len(args.in_) != 2:
        parser.error("verify requires --in DATA.json NET.json")
    if args.command == "plot" and not args.out:
        parser.error("plot requires --out")
    if args.seed is None:
        args.seed = 0
    try:
        return COMMANDS[args.command](args)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None and hasattr(report, "to_json"):
            print(json.dumps(report.to_json()), file=sys.stderr)
        elif report is not None and hasattr(report, "attempts"):
            best = {",".join(map(str, a.prefix)): (a.best_margin if math.isfinite(a.best_margin) else None)
                    for a in report.attempts}
            print(json.dumps({"min_margin": report.min_margin, "best_margin_per_prefix": best}), file=sys.stderr)
        return EXIT_PRECONDITION
    except ZeroLossError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort guard for the exit-code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
