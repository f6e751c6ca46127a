"""Command-line interface.

Exit codes: 0 success, 1 domain error (bad file, violated precondition,
failed property check), 2 usage error.  Output formats: ``human``
(line-oriented ``key: value``), ``json`` (one structured document) and
``csv`` (tabular reports only).  All randomness flows from ``--seed``,
which defaults to a fixed constant so runs are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import distill, fileio, properties
from .distributions import (
    CanonicalParams,
    canonical_distribution,
    point_mass_eve,
    satellite_scenario,
    tensor_power,
)
from .errors import SecbitError, UnsupportedFormatError
from .filtration import apply, decompose, recompose
from .measures import (
    mesbf_decoupled,
    mesbf_decoupled_power,
    mesbf_reversible,
    secret_bit_fraction,
)
from .optimizer import DEFAULT_SEED, SearchConfig, brute_force_mesbf, estimate_mesbf, local_randomization_demo


@dataclass
class CommandResult:
    report: dict
    rows: Optional[list[dict]] = None
    exit_code: int = 0


def _fmt_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return json.dumps(value)
    return str(value)


def _human_lines(report: dict, prefix: str = ""):
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _human_lines(value, f"{name}.")
        else:
            yield f"{name}: {_fmt_value(value)}"


def emit_report(result: CommandResult, fmt: str, out: Optional[str]) -> None:
    if fmt == "human":
        text = "\n".join(_human_lines(result.report))
        if result.rows:
            text += "\n" + "\n".join(json.dumps(row) for row in result.rows)
        text += "\n"
    elif fmt == "json":
        doc = dict(result.report)
        if result.rows is not None:
            doc["rows"] = result.rows
        text = json.dumps(doc, indent=2) + "\n"
    elif fmt == "csv":
        if not result.rows:
            raise UnsupportedFormatError("csv output applies only to tabular reports")
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(result.rows[0].keys()))
        writer.writeheader()
        writer.writerows(result.rows)
        text = buffer.getvalue()
    else:
        raise UnsupportedFormatError(f"unknown format {fmt!r}")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _witness_report(result) -> dict:
    doc = {"witness_kind": result.witness_kind}
    if result.witness is not None:
        doc["witness_alice"] = result.witness[0].matrix.tolist()
        doc["witness_bob"] = result.witness[1].matrix.tolist()
    return doc


def _parse_eta(text: str) -> tuple[float, float, float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise SecbitError("--eta needs four comma-separated values: eta00,eta01,eta10,eta11")
    return tuple(parts)  # type: ignore[return-value]


def _cmd_sbf(args) -> CommandResult:
    p = fileio.read_tripartite(args.file)
    return CommandResult({"lambda": secret_bit_fraction(p), "dims": list(p.dims), "mass": p.mass})


def _cmd_mesbf_r(args) -> CommandResult:
    p = fileio.read_tripartite(args.file)
    result = mesbf_reversible(p)
    report = {"Lambda_R": result.value}
    report.update(result.detail)
    report.update(_witness_report(result))
    if result.witness is not None:
        filtered = apply(result.witness[0], result.witness[1], p)
        report["achieved_lambda"] = secret_bit_fraction(filtered)
    return CommandResult(report)


def _cmd_mesbf_decoupled(args) -> CommandResult:
    p = fileio.read_bipartite(args.file)
    if args.power > 1:
        result = mesbf_decoupled_power(p, args.power)
        report = {"Lambda": result.value, "copies": args.power}
    else:
        result = mesbf_decoupled(p)
        report = {"Lambda": result.value}
    report.update({k: v for k, v in result.detail.items() if k != "copies"})
    report.update(_witness_report(result))
    if result.witness is not None:
        filtered = apply(result.witness[0], result.witness[1], point_mass_eve(p))
        report["achieved_lambda"] = secret_bit_fraction(filtered)
    return CommandResult(report)


def _cmd_mesbf_opt(args) -> CommandResult:
    p = fileio.read_tripartite(args.file)
    cfg = SearchConfig(restarts=args.restarts, iterations=args.iters, seed=args.seed)
    result = estimate_mesbf(p, cfg)
    report = {
        "Lambda_lower_bound": result.value,
        "source": result.detail.get("source"),
        "coin_toss_baseline": 0.5,
    }
    if p.is_binary:
        report["lambda_unfiltered"] = secret_bit_fraction(p)
    report.update(_witness_report(result))
    if args.oracle:
        oracle = brute_force_mesbf(p, cfg)
        report["oracle_value"] = oracle.value
        report["oracle_grid_points"] = oracle.detail["grid_points"]
    return CommandResult(report)


def _cmd_decompose(args) -> CommandResult:
    filt = fileio.read_filtration(args.file)
    factors = decompose(filt)
    rebuilt = recompose(factors)
    roundtrip = float(np.abs(rebuilt.matrix - filt.matrix).max())
    block = factors.enlarged_product()[:2, 2:]
    product_error = 0.0
    for slot, source in enumerate(factors.permutation):
        product_error = max(product_error, float(np.abs(block[:, slot] - filt.matrix[:, source]).max()))
    rows = [
        {
            "slot": k,
            "source_column": step.source_column,
            "weight": step.weight,
            "omega": step.omega,
            "mu": step.mu,
            "nu": step.nu,
        }
        for k, step in enumerate(factors.steps)
    ]
    report = {
        "rows": filt.rows,
        "cols": filt.cols,
        "proper": filt.proper,
        "roundtrip_max_error": roundtrip,
        "elementary_product_max_error": product_error,
        "permutation": list(factors.permutation),
    }
    return CommandResult(report, rows=rows)


def _cmd_distill(args) -> CommandResult:
    params = CanonicalParams(args.mu, _parse_eta(args.eta))
    if args.sweep:
        rows = []
        for n in range(1, args.sweep + 1):
            rep = distill.protocol_report(params, n)
            rows.append(
                {
                    "N": n,
                    "epsilon": rep.epsilon,
                    "block_error_rate": rep.block_error_rate,
                    "bob_uncertainty": rep.bob_uncertainty,
                    "eve_uncertainty": rep.eve_uncertainty,
                    "satisfied": rep.satisfied,
                }
            )
        return CommandResult({"mu": params.mu, "epsilon": params.epsilon, "sweep": args.sweep}, rows=rows)
    if args.block_length is not None:
        rep = distill.protocol_report(params, args.block_length)
        return CommandResult(_protocol_report_doc(rep))
    rep = distill.minimal_block_length(params, args.nmax)
    if rep is None:
        note = "no block length satisfies the strict entropy condition"
        if params.epsilon == 0.0:
            note += " (degenerate perfect-secrecy case: both uncertainties are zero)"
        return CommandResult({"mu": params.mu, "epsilon": params.epsilon, "nmax": args.nmax, "minimal_N": None, "note": note})
    doc = _protocol_report_doc(rep)
    doc["minimal_N"] = rep.block_length
    return CommandResult(doc)


def _protocol_report_doc(rep: distill.ProtocolReport) -> dict:
    return {
        "mu": rep.params.mu,
        "eta": list(rep.params.eta),
        "N": rep.block_length,
        "epsilon": rep.epsilon,
        "block_error_rate": rep.block_error_rate,
        "bob_uncertainty": rep.bob_uncertainty,
        "eve_uncertainty": rep.eve_uncertainty,
        "satisfied": rep.satisfied,
    }


def _cmd_distill_sim(args) -> CommandResult:
    p = fileio.read_tripartite(args.file)
    sim = distill.simulate_advantage_distillation(p, args.block_length, args.samples, args.seed)
    exact = distill.exact_block_statistics(p, args.block_length)
    pab = p.table.sum(axis=2) / p.mass
    eps = float(pab[0, 1] + pab[1, 0])
    if 0.0 < eps < 0.5:
        gap = args.block_length * (np.log1p(-eps) - np.log(eps))
        formula = float(np.exp(-np.logaddexp(0.0, gap)))
    else:
        formula = 0.0 if eps == 0.0 else 0.5
    report = {
        "N": args.block_length,
        "samples": args.samples,
        "seed": args.seed,
        "accepted": sim.accepted,
        "empirical_acceptance_rate": sim.acceptance_rate,
        "analytic_acceptance_rate": exact["acceptance_rate"],
        "empirical_disagreement_rate": sim.disagreement_rate,
        "analytic_disagreement_rate": exact["disagreement_rate"],
        "formula_block_error_rate": formula,
        "empirical_eve_blank_rate": sim.eve_blank_rate,
        "analytic_eve_blank_rate": exact["eve_blank_rate"],
    }
    return CommandResult(report)


def _cmd_demo_randomization(args) -> CommandResult:
    demo = local_randomization_demo()
    return CommandResult(
        {
            "lambda_before": demo.lambda_before,
            "Lambda_R": demo.lambda_reversible,
            "noise": demo.noise,
            "noise_filter": demo.noise_filter.matrix.tolist(),
            "filter_reversible": demo.filter_reversible,
            "lambda_after": demo.lambda_after,
            "improvement": demo.lambda_after - demo.lambda_before,
        }
    )


def _cmd_gen_satellite(args) -> CommandResult:
    p = satellite_scenario(args.err_a, args.err_b, args.err_e)
    fileio.write_tripartite(p, args.out)
    return CommandResult(
        {"out": args.out, "dims": list(p.dims), "lambda": secret_bit_fraction(p)}
    )


def _cmd_gen_canonical(args) -> CommandResult:
    params = CanonicalParams(args.mu, _parse_eta(args.eta))
    p = canonical_distribution(params)
    fileio.write_tripartite(p, args.out)
    return CommandResult(
        {
            "out": args.out,
            "dims": list(p.dims),
            "mu": params.mu,
            "epsilon": params.epsilon,
            "lambda": secret_bit_fraction(p),
        }
    )


def _cmd_tensor_power(args) -> CommandResult:
    p = fileio.read_bipartite(args.file)
    powered = tensor_power(p, args.power)
    fileio.write_bipartite(powered, args.out)
    return CommandResult(
        {"out": args.out, "dims": list(powered.dims), "copies": args.power, "mass": powered.mass}
    )


def _cmd_check_properties(args) -> CommandResult:
    dist = fileio.read_distribution(args.file)
    outcomes = properties.run_checks(dist, args.trials, args.seed)
    rows = [
        {
            "check": o.name,
            "trials": o.trials,
            "violations": o.violations,
            "worst": o.worst,
            "tolerance": o.tolerance,
            "passed": o.passed,
        }
        for o in outcomes
    ]
    failed = [o.name for o in outcomes if not o.passed]
    report: dict = {"checks": len(outcomes), "failed": len(failed)}
    if failed:
        report["error"] = f"property checks failed: {', '.join(failed)}"
    return CommandResult(report, rows=rows, exit_code=1 if failed else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secbit",
        description="Secrecy measures of tripartite distributions and the advantage-distillation protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("human", "json", "csv"), default="human")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    sp = sub.add_parser("sbf", help="secret-bit fraction of a binary tripartite distribution")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=_cmd_sbf)

    sp = sub.add_parser("mesbf-r", help="best secret-bit fraction under reversible filters")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=_cmd_mesbf_r)

    sp = sub.add_parser("mesbf-decoupled", help="exact MESBF for a decoupled eavesdropper")
    sp.add_argument("file")
    sp.add_argument("--power", type=int, default=1, help="number of independent copies")
    common(sp)
    sp.set_defaults(func=_cmd_mesbf_decoupled)

    sp = sub.add_parser("mesbf-opt", help="numerical MESBF lower bound for coupled distributions")
    sp.add_argument("file")
    sp.add_argument("--restarts", type=int, default=64)
    sp.add_argument("--iters", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--oracle", action="store_true", help="also run the grid oracle")
    common(sp)
    sp.set_defaults(func=_cmd_mesbf_opt)

    sp = sub.add_parser("decompose", help="factor a bit-output filtration into elementary steps")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("distill", help="analytic report of the advantage-distillation step")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--eta", required=True, help="eta00,eta01,eta10,eta11")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--N", dest="block_length", type=int, default=None)
    group.add_argument("--auto", action="store_true", help="search for the minimal block length")
    group.add_argument("--sweep", type=int, default=None, help="tabulate N = 1..SWEEP")
    sp.add_argument("--nmax", type=int, default=200)
    common(sp)
    sp.set_defaults(func=_cmd_distill)

    sp = sub.add_parser("distill-sim", help="Monte-Carlo simulation of the block protocol")
    sp.add_argument("file")
    sp.add_argument("--N", dest="block_length", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common(sp)
    sp.set_defaults(func=_cmd_distill_sim)

    sp = sub.add_parser("demo-randomization", help="joint local noise beating reversible filters")
    common(sp)
    sp.set_defaults(func=_cmd_demo_randomization)

    sp = sub.add_parser("gen-satellite", help="write a broadcast-source distribution file")
    sp.add_argument("--err-a", type=float, required=True)
    sp.add_argument("--err-b", type=float, required=True)
    sp.add_argument("--err-e", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.set_defaults(func=_cmd_gen_satellite, report_out=None)

    sp = sub.add_parser("gen-canonical", help="write a canonical partially secret distribution file")
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--eta", required=True, help="eta00,eta01,eta10,eta11")
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.set_defaults(func=_cmd_gen_canonical, report_out=None)

    sp = sub.add_parser("tensor-power", help="write the N-copy power of a bipartite file")
    sp.add_argument("file")
    sp.add_argument("--power", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.set_defaults(func=_cmd_tensor_power, report_out=None)

    sp = sub.add_parser("check-properties", help="run randomized invariant suites on a file")
    sp.add_argument("file")
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common(sp)
    sp.set_defaults(func=_cmd_check_properties)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result: CommandResult = args.func(args)
        # Generator commands use --out for the produced file, so their
        # report always goes to stdout (report_out defaults to None there).
        report_out = getattr(args, "report_out", getattr(args, "out", None))
        emit_report(result, args.format, report_out)
        return result.exit_code
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except SecbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
