"""Command-line entry point: ``bipartite-spectra <subcommand> ...``.

Subcommands
    moments   limiting moments from the recursion (optionally the S tables)
    oracle    limiting moments by essential-walk enumeration, or dump walks
    simulate  Monte Carlo estimates of (1/N) Tr A^k against the recursion
    scaling   log-log decay of a correlator C_{k,m} with N
    check     recursion vs oracle vs simulation, exit 0 iff all pass
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import estimator, recursion, walks
from .config import ConfigError, RunConfig, build_config, load_file
from .sampler import EnsembleParams, sample_matrix
from .weights import even_moments


def fmt(x) -> str:
    """Lossless text for CSV/JSON: fractions as "a/b", floats with 17 significant digits."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _jnum(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(cfg: RunConfig, header: list, rows: list, extra: dict | None = None, timestamp: bool = False):
    echo = cfg.echo()
    if timestamp:
        import datetime

        echo["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with _open_out(cfg.output) as fh:
        if cfg.format == "json":
            doc = {"config": echo, "rows": [dict(zip(header, map(_jnum, r))) for r in rows]}
            if extra:
                doc.update(extra)
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            fh.write("# config: " + json.dumps(echo, sort_keys=True) + "\n")
            if extra:
                for key in sorted(extra):
                    fh.write(f"# {key}: {json.dumps(extra[key], sort_keys=True)}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(x) if isinstance(x, (float, Fraction)) else x for x in r])


def _moment_seq(cfg: RunConfig, K: int):
    return even_moments(cfg.weights, K, exact=cfg.exact)


def _tables(cfg: RunConfig):
    return recursion.build_tables(cfg.p, cfg.alpha, _moment_seq(cfg, cfg.k_max), cfg.k_max)


def cmd_moments(cfg: RunConfig, args) -> int:
    tables = _tables(cfg)
    m = recursion.limiting_moments(tables)
    _emit(cfg, ["s", "m_s"], [[s, m[s]] for s in range(len(m))], timestamp=args.timestamp)
    if args.tables:
        with open(args.tables, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["l", "r", "S1", "S2"])
            for l in range(tables.K + 1):
                for r in range(l + 1):
                    w.writerow([l, r, fmt(tables.S1[l][r]), fmt(tables.S2[l][r])])
    return 0


def cmd_oracle(cfg: RunConfig, args) -> int:
    if args.dump_walks is not None:
        with _open_out(cfg.output) as fh:
            for w in walks.enumerate_essential_walks(args.dump_walks, cfg.cap):
                fh.write(",".join(map(str, w)) + "\n")
        return 0
    K = cfg.k_max
    X = _moment_seq(cfg, K)
    rows = []
    for k in range(1, K + 1):
        val = walks.oracle_moment(k, cfg.p, cfg.alpha, X, cfg.cap)
        rows.append([k, 2 * k, val, len(walks.essential_walks(k, cfg.cap))])
    _emit(cfg, ["k", "s", "oracle_m_s", "walk_count"], rows, timestamp=args.timestamp)
    return 0


def _ensemble(cfg: RunConfig) -> EnsembleParams:
    return EnsembleParams(cfg.N, float(cfg.p), float(cfg.alpha), cfg.weights, cfg.seed)


def cmd_simulate(cfg: RunConfig, args) -> int:
    params = _ensemble(cfg)
    if args.dump_matrix:
        with open(args.dump_matrix, "w") as fh:
            sample_matrix(params, 0).dump(fh)
    rep = estimator.monte_carlo(params, cfg.k_max, cfg.replicas, cfg.threads, args.hutchinson)
    K = max(1, (cfg.k_max + 1) // 2)
    m = recursion.compute_moments(float(cfg.p), float(cfg.alpha), even_moments(cfg.weights, K), K)
    rows = []
    for k in range(1, cfg.k_max + 1):
        ref = float(m[k])
        mean = float(rep.mean[k - 1])
        rows.append([k, mean, float(rep.stderr[k - 1]), ref, abs(mean - ref)])
    _emit(cfg, ["k", "empirical_mean", "empirical_se", "recursion_value", "abs_diff"], rows, timestamp=args.timestamp)
    return 0


def cmd_scaling(cfg: RunConfig, args) -> int:
    params = _ensemble(cfg)
    N_list = [int(x) for x in args.N_list.split(",")]
    res = estimator.correlator_scaling(params, args.k, args.m, N_list, cfg.replicas, args.bootstrap, cfg.threads)
    doc = {"config": cfg.echo(), "result": res.to_dict()}
    doc["config"]["N_list"] = N_list
    with _open_out(cfg.output) as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True, default=_jnum) + "\n")
    return 0


def run_check(cfg: RunConfig, timestamp: bool = False) -> tuple[int, dict]:
    """Recursion, oracle (k <= cap) and optional Monte Carlo, cross-validated.

    Returns the exit status and the report; the status is 0 iff every enabled
    comparison passes the tolerance policy.  Errors raise ``StageError``.
    """
    policy = cfg.policy
    K = cfg.k_max
    with _stage("recursion"):
        X = _moment_seq(cfg, K)
        m = recursion.limiting_moments(recursion.build_tables(cfg.p, cfg.alpha, X, K))
    rows = []
    ok = True
    with _stage("oracle"):
        for k in range(1, K + 1):
            row = {"k": k, "s": 2 * k, "recursion": m[2 * k]}
            if k <= cfg.cap:
                o = walks.oracle_moment(k, cfg.p, cfg.alpha, X, cfg.cap)
                row["oracle"] = o
                row["oracle_pass"] = policy.recursion_matches_oracle(m[2 * k], o, cfg.exact)
                ok &= row["oracle_pass"]
            rows.append(row)
    if cfg.simulate:
        with _stage("simulation"):
            params = _ensemble(cfg)
            rep = estimator.monte_carlo(params, 2 * K, cfg.replicas, cfg.threads)
        for row in rows:
            k = row["k"]
            mean = float(rep.mean[2 * k - 1])
            se = float(rep.stderr[2 * k - 1])
            band = policy.mc_band(se, cfg.N)
            row.update(empirical_mean=mean, empirical_se=se, mc_band=band)
            row["mc_pass"] = abs(mean - float(row["recursion"])) <= band
            ok &= row["mc_pass"]
        odd_zero = bool((rep.samples[:, 0::2] == 0).all())
        ok &= odd_zero
    else:
        odd_zero = None
    report = {
        "config": cfg.echo(),
        "rows": rows,
        "odd_moments_zero": odd_zero,
        "status": "pass" if ok else "fail",
    }
    if timestamp:
        import datetime

        report["config"]["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return (0 if ok else 1), report


class StageError(RuntimeError):
    def __init__(self, stage, err):
        super().__init__(f"stage '{stage}' failed: {err}")
        self.stage = stage


@contextmanager
def _stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


def cmd_check(cfg: RunConfig, args) -> int:
    status, report = run_check(cfg, args.timestamp)
    cols = ["k", "s", "recursion", "oracle", "oracle_pass", "empirical_mean", "empirical_se", "mc_band", "mc_pass"]
    with _open_out(cfg.output) as fh:
        if cfg.format == "json":
            def conv(x):
                return str(x) if isinstance(x, Fraction) else x

            doc = dict(report, rows=[{k: conv(v) for k, v in r.items()} for r in report["rows"]])
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        else:
            fh.write("# config: " + json.dumps(report["config"], sort_keys=True) + "\n")
            fh.write(f"# odd_moments_zero: {json.dumps(report['odd_moments_zero'])}\n")
            fh.write(f"# status: {report['status']}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in report["rows"]:
                w.writerow(["" if c not in r else (fmt(r[c]) if isinstance(r[c], (float, Fraction)) else r[c]) for c in cols])
    return status


def _common(p: argparse.ArgumentParser, simulation: bool):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--p", help="mean-degree parameter (e.g. 2 or 3/2)")
    p.add_argument("--alpha", help="fraction of vertices in the first part, in (0,1)")
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--weights", help="rademacher | gaussian:SIGMA | constant:C | uniform_symmetric:A | custom:X2,X4,...")
    p.add_argument("--exact", action="store_true", default=None, help="exact rational arithmetic")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output", "-o")
    p.add_argument("--timestamp", action="store_true", help="add a generation timestamp to the output")
    if simulation:
        p.add_argument("--N", dest="N", type=int)
        p.add_argument("--replicas", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bipartite-spectra", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("moments", help="limiting moments via the recursion")
    _common(p, False)
    p.add_argument("--tables", metavar="PATH", help="also write the (l, r, S1, S2) table CSV here")

    p = sub.add_parser("oracle", help="limiting moments by essential-walk enumeration")
    _common(p, False)
    p.add_argument("--k", dest="k_max", type=int, help="largest half-length k")
    p.add_argument("--cap", type=int, help="enumeration cap (default 7)")
    p.add_argument("--dump-walks", type=int, metavar="K", help="print every essential walk of length 2K")

    p = sub.add_parser("simulate", help="Monte Carlo moments of sampled matrices")
    _common(p, True)
    p.add_argument("--hutchinson", type=int, metavar="PROBES", help="randomized trace with this many probes")
    p.add_argument("--dump-matrix", metavar="PATH", help="write replica 0 in 'N nnz / i j value' format")

    p = sub.add_parser("scaling", help="decay of the correlator C_{k,m} with N (JSON)")
    _common(p, True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--N-list", dest="N_list", default="500,1000,2000,4000")
    p.add_argument("--bootstrap", type=int, default=1000)

    p = sub.add_parser("check", help="cross-validate recursion, oracle and simulation")
    _common(p, True)
    p.add_argument("--cap", type=int)
    p.add_argument("--no-simulate", dest="simulate", action="store_false", default=None)
    return parser


_CONFIG_KEYS = ("p", "alpha", "k_max", "weights", "exact", "N", "replicas", "seed", "threads", "simulate", "cap", "format", "output")


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        file_values = load_file(args.config) if args.config else {}
        overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
        cfg = build_config(args.subcommand, file_values, overrides)
    except ConfigError as e:
        print(f"bipartite-spectra: invalid configuration: {e}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as e:
        print(f"bipartite-spectra: cannot read config: {e}", file=sys.stderr)
        return 2
    handlers = {
        "moments": cmd_moments,
        "oracle": cmd_oracle,
        "simulate": cmd_simulate,
        "scaling": cmd_scaling,
        "check": cmd_check,
    }
    try:
        return handlers[args.subcommand](cfg, args)
    except StageError as e:
        print(f"bipartite-spectra: {e}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as e:
        print(f"bipartite-spectra: {args.subcommand} failed: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
