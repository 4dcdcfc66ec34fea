"""Command-line surface: batch computation with JSON (default) or CSV output.

Exit codes: 0 success, 2 domain/structural errors, 3 capacity errors.
Errors are emitted as machine-readable JSON objects on stderr.  ``sweep``
iterates a parameter grid and prints one row per point, in grid order; the
``HT_THREADS`` environment variable caps its parallelism.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import divergences, formulas, inequality_lab, reductions
from .constrained import (
    DivergenceObjective,
    huber_lfd,
    ldp_brute_optimize,
    optimal_quantizer_dp,
)
from .distributions import Distribution
from .errors import CapacityError, DistributionError, DomainError
from .oracle import (
    DEFAULT_N_CAP,
    TestingInstance,
    bayes_error_exact,
    n_star_bayes_exact,
    n_star_pf_exact,
)
from .simulate import SimConfig, simulate_boosted, simulate_lrt

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DOMAIN = 2
EXIT_CAPACITY = 3


def _plain(obj):
    """Recursively convert results to JSON-safe plain data."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            k: _plain(v)
            for k, v in dataclasses.asdict(obj).items()
            if not k.startswith("_")
        }
    if isinstance(obj, Distribution):
        return {"labels": list(obj.labels), "probs": list(obj.probs)}
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return _plain(obj.item())
    if isinstance(obj, float):
        if math.isinf(obj):
            return "unbounded" if obj > 0 else "-unbounded"
        return obj
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def _emit(payload, fmt: str) -> None:
    payload = _plain(payload)
    if fmt == "csv":
        rows = payload if isinstance(payload, list) else [payload]
        keys = sorted({k for row in rows for k in row})
        print(",".join(keys))
        for row in rows:
            print(",".join(repr(row.get(k, "")) for k in keys))
    else:
        print(json.dumps(payload, sort_keys=True))


def _load_pair(args) -> tuple[Distribution, Distribution]:
    return Distribution.from_file(args.p), Distribution.from_file(args.q)


# -- verb implementations -----------------------------------------------------


def _cmd_divergence(args) -> int:
    p, q = _load_pair(args)
    alpha = args.alpha
    gamma = args.gamma if args.gamma is not None else (1.0 - alpha) / alpha
    lam = args.lam if args.lam is not None else divergences.lambda_for_prior(alpha).lam
    cls = divergences.classic_divergences(p, q)
    out = {
        "tv": cls.tv,
        "hellinger_sq": cls.hellinger_sq,
        "kl_pq": cls.kl_pq,
        "h_lambda": divergences.h_lambda(p, q, lam),
        "js_alpha": divergences.js_alpha(p, q, alpha),
        "e_gamma": divergences.e_gamma(p, q, gamma),
        "mutual_info": divergences.mutual_info_binary(p, q, alpha),
        "alpha": alpha,
        "gamma": gamma,
        "lam": lam,
    }
    _emit(out, args.format)
    return EXIT_OK


def _cmd_exact_n(args) -> int:
    p, q = _load_pair(args)
    trace: list = []
    if args.beta is not None:
        inst = TestingInstance.prior_free(p, q, args.alpha, args.beta)
        n_star = n_star_pf_exact(inst, args.n_cap, trace)
    else:
        inst = TestingInstance.bayesian(p, q, args.alpha, args.delta)
        n_star = n_star_bayes_exact(inst, args.n_cap, trace)
    _emit(
        {
            "n_star": n_star if n_star is not None else "exceeds-cap",
            "n_cap": args.n_cap,
            "trace": sorted(trace),
        },
        args.format,
    )
    return EXIT_OK


def _cmd_estimate_n(args) -> int:
    p, q = _load_pair(args)
    if args.beta is not None:
        est = formulas.n_star_pf_estimate(p, q, args.alpha, args.beta)
    else:
        est = formulas.n_star_bayes_estimate(p, q, args.alpha, args.delta)
    _emit(est, args.format)
    return EXIT_OK


def _cmd_weak_detect(args) -> int:
    p, q = _load_pair(args)
    est = formulas.weak_detection_bounds(p, q, args.alpha, args.gamma)
    _emit(est, args.format)
    return EXIT_OK


def _cmd_verify_inequality(args) -> int:
    grid = inequality_lab.default_bias_grid(args.grid, args.corner_points)
    report = inequality_lab.check_js_h_inequality(bias_grid=grid)
    _emit(report, args.format)
    return EXIT_OK if report.ok else EXIT_FAIL


def _cmd_reduce(args) -> int:
    plan = reductions.plan_self_reduction(args.alpha, args.delta)
    out = {"plan": _plain(plan)}
    if args.tau is not None:
        bb = reductions.boost_error_bound(args.tau, args.T)
        out["boost"] = {
            "tau": args.tau,
            "T": args.T,
            "bound": bb.bound,
            "exact_tail": float(bb.exact_tail),
        }
    _emit(out, args.format)
    return EXIT_OK


def _cmd_quantize(args) -> int:
    p, q = _load_pair(args)
    obj = _objective(args)
    ch = optimal_quantizer_dp(p, q, args.levels, obj)
    payload = json.loads(ch.to_json())
    payload["objective_value"] = obj.value(
        ch.apply(p).as_array(), ch.apply(q).as_array()
    )
    _emit(payload, args.format)
    return EXIT_OK


def _cmd_ldp(args) -> int:
    p, q = _load_pair(args)
    obj = _objective(args)
    ch = ldp_brute_optimize(p, q, args.epsilon, args.levels, obj)
    payload = json.loads(ch.to_json())
    payload["objective_value"] = obj.value(
        ch.apply(p).as_array(), ch.apply(q).as_array()
    )
    _emit(payload, args.format)
    return EXIT_OK


def _cmd_robust_lfd(args) -> int:
    p, q = _load_pair(args)
    pair = huber_lfd(p, q, args.epsilon)
    _emit(json.loads(pair.to_json()), args.format)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    p, q = _load_pair(args)
    cfg = SimConfig(trials=args.trials, seed=args.seed, threshold=args.threshold)
    if args.boost > 1:
        res = simulate_boosted(p, q, args.alpha, args.n, args.boost, cfg)
    else:
        res = simulate_lrt(p, q, args.alpha, args.n, cfg)
    _emit(res, args.format)
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _cmd_sweep(args) -> int:
    p, q = _load_pair(args)
    threads = int(os.environ.get("HT_THREADS", "1"))
    if args.kind == "error-vs-n":
        points = list(range(0, args.n_max + 1))

        def work(n):
            return {"n": n, "bayes_error": bayes_error_exact(p, q, args.alpha, n)}

    elif args.kind == "nstar-vs-gamma":
        points = _parse_grid(args.gamma_grid)

        def work(gamma):
            inst = TestingInstance.bayesian(p, q, args.alpha, args.alpha * (1 - gamma))
            return {
                "gamma": gamma,
                "n_star": n_star_bayes_exact(inst, args.n_cap),
            }

    else:
        raise DomainError(f"unknown sweep kind {args.kind!r}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, points))
    else:
        rows = [work(x) for x in points]
    _emit(rows, args.format)
    return EXIT_OK


def _objective(args) -> DivergenceObjective:
    if args.objective == "h-lambda":
        lam = args.lam if args.lam is not None else 0.5
        return DivergenceObjective("h_lambda", lam)
    alpha = args.alpha if args.alpha is not None else 0.5
    return DivergenceObjective("js_alpha", alpha)


# -- parser -------------------------------------------------------------------


def _add_pair(sub) -> None:
    sub.add_argument("--p", required=True, help="distribution file (.json or .csv)")
    sub.add_argument("--q", required=True, help="distribution file (.json or .csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhtlab",
        description="sample complexities for simple binary hypothesis testing",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def add_verb(name: str, help_text: str):
        return verbs.add_parser(name, help=help_text, parents=[common])

    s = add_verb("divergence", "divergences of a pair")
    _add_pair(s)
    s.add_argument("--alpha", type=float, default=0.25)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--lam", type=float, default=None)
    s.add_argument("--all", action="store_true", help="kept for symmetry; always on")
    s.set_defaults(fn=_cmd_divergence)

    s = add_verb("exact-n", "exact sample complexity by search")
    _add_pair(s)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--delta", type=float, default=None)
    s.add_argument("--beta", type=float, default=None, help="prior-free type-II target")
    s.add_argument("--n-cap", type=int, default=DEFAULT_N_CAP)
    s.set_defaults(fn=_cmd_exact_n)

    s = add_verb("estimate-n", "formula-based estimate with bounds")
    _add_pair(s)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--delta", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.set_defaults(fn=_cmd_estimate_n)

    s = add_verb("weak-detect", "weak-detection bounds")
    _add_pair(s)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.set_defaults(fn=_cmd_weak_detect)

    s = add_verb("verify-inequality", "grid check of the JS/H bound")
    s.add_argument("--grid", type=int, default=400, help="uniform bias grid size")
    s.add_argument("--corner-points", type=int, default=30)
    s.set_defaults(fn=_cmd_verify_inequality)

    s = add_verb("reduce", "self-reduction plan and boost bound")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--tau", type=float, default=None)
    s.add_argument("--T", type=int, default=32)
    s.set_defaults(fn=_cmd_reduce)

    s = add_verb("quantize", "optimal deterministic quantizer")
    _add_pair(s)
    s.add_argument("--levels", type=int, required=True)
    s.add_argument("--objective", choices=("h-lambda", "js-alpha"), default="h-lambda")
    s.add_argument("--lam", type=float, default=None)
    s.add_argument("--alpha", type=float, default=None)
    s.set_defaults(fn=_cmd_quantize)

    s = add_verb("ldp", "locally private channel search")
    _add_pair(s)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--levels", type=int, default=2)
    s.add_argument("--objective", choices=("h-lambda", "js-alpha"), default="h-lambda")
    s.add_argument("--lam", type=float, default=None)
    s.add_argument("--alpha", type=float, default=None)
    s.set_defaults(fn=_cmd_ldp)

    s = add_verb("robust-lfd", "least favorable contaminated pair")
    _add_pair(s)
    s.add_argument("--epsilon", type=float, required=True)
    s.set_defaults(fn=_cmd_robust_lfd)

    s = add_verb("simulate", "Monte Carlo likelihood-ratio test")
    _add_pair(s)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threshold", type=float, default=None)
    s.add_argument("--boost", type=int, default=1, help="majority over T runs")
    s.set_defaults(fn=_cmd_simulate)

    s = add_verb("sweep", "grid sweep, one row per point")
    _add_pair(s)
    s.add_argument("--kind", choices=("error-vs-n", "nstar-vs-gamma"), required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--n-max", type=int, default=32)
    s.add_argument("--gamma-grid", type=str, default="0.5,0.25,0.125")
    s.add_argument("--n-cap", type=int, default=DEFAULT_N_CAP)
    s.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DomainError, DistributionError) as exc:
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return EXIT_DOMAIN
    except CapacityError as exc:
        json.dump(
            {"error": {"type": "CapacityError", "message": str(exc)}}, sys.stderr
        )
        sys.stderr.write("\n")
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
