"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 size guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
import warnings

import numpy as np

from . import __version__
from .errors import GuardViolation, KusuokaError, NonUniqueWarning
from .ergodicity import (
    M_MAX_CAP,
    ergodicity_verdict,
    lemma_trace_limit,
    nonergodic_tail_mass,
    verify_witness,
)
from .general_kusuoka import OperatorFamily, fixed_point_residual, stationary_density
from .markov import is_irreducible, transition_matrix
from .model import ModelError, load_model
from .pifs import cylinder_prob_pair, format_outcomes, parse_outcomes
from .reversibility import reversibility_scan
from .tolerances import Tolerances
from .trajectories import empirical_cylinder_freq, sample_outcomes, sample_trajectory

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 2, 3


def _cpair(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _cmat(m) -> list:
    m = np.asarray(m)
    if m.ndim == 1:
        return [_cpair(z) for z in m]
    return [_cmat(row) for row in m]


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands; each returns (json payload, csv rows)


def cmd_validate(model, args, tol):
    kind = model.povm.kind
    out = {
        "dimension": model.povm.dim,
        "outcomes": model.povm.k,
        "kind": kind.tag.value,
        "ranks": list(kind.ranks),
        "is_pvm": kind.is_pvm,
        "is_rank_one": kind.is_rank_one,
        "is_two_proj_rank_one": kind.is_two_proj,
        "is_scaled_projection": kind.is_scaled_projection,
    }
    if kind.is_rank_one:
        out["rank_one"] = {"scale": kind.scale, "vectors": _cmat(kind.phis)}
    if kind.is_two_proj:
        out["two_proj"] = {"z": _cmat(kind.z), "theta_dim": kind.theta.dim}
    return out, [["field", "value"]] + [[k, v] for k, v in out.items() if not isinstance(v, dict)]


def cmd_prob(model, args, tol):
    p = model.pifs(tol)
    s = p.check_string(parse_outcomes(args.string))
    a, b = cylinder_prob_pair(p, s)
    out = {"string": format_outcomes(s), "probability": min(1.0, max(0.0, a)),
           "trace_formula": a, "hs_formula": b, "difference": abs(a - b)}
    return out, [list(out), list(out.values())]


def cmd_transition(model, args, tol):
    p = model.pifs(tol)
    q = transition_matrix(p)
    irr = is_irreducible(q)
    out = {"matrix": q.q.tolist(), "bistochastic": q.is_bistochastic(tol.tol_sum),
           "irreducible": irr.irreducible,
           "closed_set": None if irr.closed_set is None else [i + 1 for i in irr.closed_set]}
    return out, [[repr(float(x)) for x in row] for row in q.q]


def cmd_ergodicity(model, args, tol):
    p = model.pifs(tol)
    v = ergodicity_verdict(p)
    out = v.to_dict()
    out["cross_check"] = {"consistent": v.consistent, "witness_verified": verify_witness(p, v)}
    if p.povm.kind.is_two_proj:
        out["cross_check"]["eventually_all_1_mass"] = nonergodic_tail_mass(p.u, p.povm, tol)
    return out, [["status", "criterion", "consistent"],
                 [v.status.value, v.criterion_used.value, v.consistent]]


def cmd_lemma(model, args, tol):
    p = model.pifs(tol)
    res = lemma_trace_limit(p.u, p.povm, args.m_max, tol, cap=None if args.uncapped else M_MAX_CAP)
    out = {"sequence": res.sequence.tolist(), "spectral_value": res.spectral_value,
           "m_max": res.m_max, "rate": res.rate, "convergence_gap": res.convergence_gap,
           "converged": res.converged}
    rows = [["m", "trace"]] + [[m + 1, repr(float(x))] for m, x in enumerate(res.sequence)]
    rows.append(["spectral_value", res.spectral_value])
    return out, rows


def cmd_reversibility(model, args, tol):
    p = model.pifs(tol)
    res = reversibility_scan(p, args.n_max)
    out = {"max_discrepancy": res.max_discrepancy, "worst_string": format_outcomes(res.worst_string),
           "strings_checked": res.strings_checked, "n_max": args.n_max}
    return out, [list(out), list(out.values())]


def cmd_sample(model, args, tol):
    p = model.pifs(tol)
    if args.stats:
        stats = empirical_cylinder_freq(p, args.prefix_len, args.samples, args.len, args.seed, args.threads)
        out = stats.to_dict()
        rows = [["string", "count", "frequency", "standard_error"]] + [
            [c["string"], c["count"], c["frequency"], c["standard_error"]] for c in out["cylinders"]]
        return out, rows
    if args.record_states:
        trajs = [sample_trajectory(p, args.len, args.seed, record_states=True, index=j)
                 for j in range(args.samples)]
        out = {"trajectories": [{"outcomes": t.render(), "states": [_cmat(s.matrix) for s in t.states]}
                                for t in trajs]}
        return out, [[t.render()] for t in trajs]
    outcomes = sample_outcomes(p, args.samples, args.len, args.seed, args.threads)
    lines = [format_outcomes(row) for row in outcomes]
    return {"trajectories": lines}, [[line] for line in lines]


def cmd_fixed_point(model, args, tol):
    p = model.pifs(tol)
    fam = OperatorFamily.from_pifs(p)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonUniqueWarning)
        rho = stationary_density(fam, tol)
    unique = not any(issubclass(w.category, NonUniqueWarning) for w in caught)
    dev = float(np.linalg.norm(rho.matrix - np.eye(p.dim) / p.dim))
    out = {"rho": _cmat(rho.matrix), "residual": fixed_point_residual(fam, rho),
           "unique": unique, "distance_to_maximally_mixed": dev}
    return out, [["residual", "unique", "distance_to_maximally_mixed"],
                 [out["residual"], unique, dev]]


COMMANDS = {
    "validate": cmd_validate,
    "prob": cmd_prob,
    "transition": cmd_transition,
    "ergodicity": cmd_ergodicity,
    "lemma-limit": cmd_lemma,
    "reversibility": cmd_reversibility,
    "sample": cmd_sample,
    "fixed-point": cmd_fixed_point,
}
CSV_DEFAULT = {"transition", "lemma-limit"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "csv"], default=None)
    common.add_argument("--threads", type=int, default=1, help="worker threads (never changes results)")
    common.add_argument("-v", "--verbose", action="store_true")
    for name in Tolerances.names():
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None,
                            metavar="VALUE")

    parser = argparse.ArgumentParser(prog="kusuoka", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("model")
        return sp

    add("validate", "classify the measurement")
    add("prob", "exact cylinder probability").add_argument("--string", required=True)
    add("transition", "transition matrix (rank-1 POVMs)")
    add("ergodicity", "ergodicity verdict with witness")
    sp = add("lemma-limit", "trace sequence and its spectral limit")
    sp.add_argument("--m-max", type=int, default=None)
    sp.add_argument("--uncapped", action="store_true", help="lift the 500-step cap on the automatic m_max")
    add("reversibility", "string-reversal discrepancy scan").add_argument(
        "--n-max", type=int, default=8)
    sp = add("sample", "Monte Carlo trajectories")
    sp.add_argument("--len", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--record-states", action="store_true")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--prefix-len", type=int, default=3)
    add("fixed-point", "stationary density of the operator family")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        model = load_model(args.model)
        overrides = {n: getattr(args, n) for n in Tolerances.names() if getattr(args, n) is not None}
        tol = model.tolerances.replace(**overrides)
        payload, rows = COMMANDS[args.command](model, args, tol)
    except GuardViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ModelError, KusuokaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    fmt = args.output
    if fmt is None:
        fmt = "csv" if args.command in CSV_DEFAULT else "json"
        if args.command == "sample" and not (args.stats or args.record_states):
            fmt = "text"
    if fmt == "json":
        params = {k: v for k, v in vars(args).items()
                  if k not in Tolerances.names() and k not in ("command", "model", "verbose", "threads")}
        report = {
            "command": args.command,
            "model_digest": model.digest,
            "parameters": params,
            "results": payload,
            "tolerances": tol.as_dict(),
            "wall_time": time.perf_counter() - start,
        }
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    elif fmt == "text":
        sys.stdout.write("".join(r[0] + "\n" for r in rows))
    else:
        sys.stdout.write(_csv(rows))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
