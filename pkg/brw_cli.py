#!/usr/bin/env python
"""
Command-line front end for the self-repellent branching random walk toolkit

Commands:
    dirichlet   solve the Dirichlet problem on T^(M), write the profile
    trajectory  build h*_r (K from the cost model unless given), write occupations and costs
    validate    run the acceptance suites, write a JSON report
    sample      Metropolis chain plus partition estimate, write thinned samples

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 model assumption violated.
Every command writes manifest.json next to its data files.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from admissible_profiles import build_trajectory, optimal_K
from cost_asymptotics import model_minimum
from dirichlet_solver import (
    dirichlet_spreading_cost,
    harmonicity_residual,
    solve_recursive,
    spacing_check,
    spreading_bounds,
    spreading_cost_closed_form,
    standard_boundary,
)
from metropolis_sampler import estimate_partition, exact_partition_one_generation, run_chain
from run_manifest import RunManifest
from tree_core import DegenerateRegime, ModelAssumptionError, ModelParams
from validation_suite import DEFAULT_SEED, SUITES, format_report, run_validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_ASSUMPTION = 3

DIRICHLET_CLI_CAP = 24
SAMPLER_CLI_CAP = 8
DEFAULT_OUT_DIR = "srbrw_out"


class UsageError(Exception):
    """Flag combination the commands refuse; maps to exit code 2"""


def _banner(title: str) -> None:
    print("=" * 70)
    print(title)
    print("=" * 70)


def _check_model_flags(args: argparse.Namespace) -> None:
    """Malformed N, eps or beta are usage errors; only beta <= eps^2/2 is an assumption failure"""
    if args.N < 1 or args.N > ModelParams.MAX_DEPTH:
        raise UsageError(f"need 1 <= N <= {ModelParams.MAX_DEPTH}, got N={args.N}")
    if not args.eps > 0:
        raise UsageError(f"need eps > 0, got eps={args.eps}")
    if args.beta < 0:
        raise UsageError(f"need beta >= 0, got beta={args.beta}")


# == dirichlet ==

def cmd_dirichlet(args: argparse.Namespace) -> int:
    if args.M > DIRICHLET_CLI_CAP:
        raise UsageError(f"M exceeds cap ({args.M} > {DIRICHLET_CLI_CAP})")
    if args.M < 1 or args.eps <= 0:
        raise UsageError("need M >= 1 and eps > 0")
    _banner(f"DIRICHLET PROFILE M={args.M} eps={args.eps}")

    sol = solve_recursive(standard_boundary(args.M, args.eps))
    rows = []
    for n in range(args.M + 1):
        positions = sol.profile.generation(n)
        for index, (x, a) in enumerate(zip(positions, sol.increments[n])):
            rows.append({'generation': n, 'node_index': index, 'position': float(x), 'increment': float(a)})

    S_spr = dirichlet_spreading_cost(sol)
    lower, upper = spreading_bounds(args.M, args.eps)
    manifest = RunManifest(command='dirichlet', out_dir=args.out,
                           params={'M': args.M, 'eps': args.eps, 'boundary': 'standard'})
    manifest.write_csv('dirichlet_profile.csv', ['generation', 'node_index', 'position', 'increment'], rows)
    manifest.headline.update(
        S_spr=S_spr,
        S_spr_closed_form=spreading_cost_closed_form(args.M, args.eps),
        lower_bound=lower,
        upper_bound=upper,
        within_bounds=bool(lower * (1 - 1e-12) <= S_spr <= upper),
        harmonicity_residual=harmonicity_residual(sol),
        min_gap=spacing_check(sol, args.eps),
    )
    manifest.save()
    print(f"✓ {len(rows)} nodes, S_spr = {S_spr:.10g}")
    print(f"✓ bounds [{lower:.6g}, {upper:.6g}]: {'ok' if manifest.headline['within_bounds'] else 'VIOLATED'}")
    print(f"✅ written to {args.out}")
    return EXIT_OK


# == trajectory ==

def cmd_trajectory(args: argparse.Namespace) -> int:
    _check_model_flags(args)
    params = ModelParams(N=args.N, beta=args.beta, eps=args.eps)
    r_star = model_minimum(params).r_star
    K = args.K
    if K is None:
        try:
            K, _ = optimal_K(params)
        except DegenerateRegime as e:
            logger.warning("%s; using K=0", e)
            K = 0
    _banner(f"TRAJECTORY N={args.N} beta={args.beta} eps={args.eps} K={K}")

    try:
        report = build_trajectory(params, K)
    except ValueError as e:
        raise UsageError(str(e)) from e

    occupation_rows = []
    for occ in report.occupations:
        for site, (x, a) in enumerate(zip(occ.site_positions(args.eps), occ.counts)):
            occupation_rows.append({'generation': occ.generation, 'site_index': site,
                                    'position': float(x), 'occupation': int(a)})
    cost_rows = []
    for n in range(1, args.N + 1):
        cost_rows.append({'generation': n,
                          'phase': 'dirichlet' if n <= report.M else 'staircase',
                          'spreading': report.costs.spr_per_gen[n - 1],
                          'interaction': report.costs.interaction_per_gen[n - 1]})

    manifest = RunManifest(command='trajectory', out_dir=args.out,
                           params={'N': args.N, 'beta': args.beta, 'eps': args.eps, 'K': K})
    manifest.write_csv('trajectory_occupations.csv',
                       ['generation', 'site_index', 'position', 'occupation'], occupation_rows)
    manifest.write_csv('trajectory_costs.csv', ['generation', 'phase', 'spreading', 'interaction'], cost_rows)
    if report.profile is not None:
        profile_rows = [{'generation': n, 'node_index': i, 'position': float(x)}
                        for n in range(args.N + 1) for i, x in enumerate(report.profile.generation(n))]
        manifest.write_csv('trajectory_profile.csv', ['generation', 'node_index', 'position'], profile_rows)
    final = report.final_shape
    manifest.headline.update(K=K, M=report.M, r=report.r, d=final.d, L=final.L, r_star=r_star,
                             S_spr=report.costs.S_spr, J=report.costs.J, S_total=report.costs.S_total,
                             final_occupation=list(final.counts))
    manifest.save()
    print(f"✓ K={K}, r={report.r}, d={final.d}, final range {final.L} sites")
    print(f"✓ S_spr = {report.costs.S_spr:.10g}, J = {report.costs.J}, S = {report.costs.S_total:.10g}")
    print(f"✅ written to {args.out}")
    return EXIT_OK


# == validate ==

def cmd_validate(args: argparse.Namespace) -> int:
    results = run_validation(args.suite, seed=args.seed)
    for line in format_report(results):
        print(line)
    manifest = RunManifest(command='validate', out_dir=args.out, params={'suite': args.suite, 'seed': args.seed})
    manifest.write_json('validation_report.json', results)
    manifest.headline.update(passed=results['passed'], failed=results['failed'],
                             critical_failures=results['critical_failures'])
    manifest.save()
    return EXIT_OK if results['all_passed'] else EXIT_VALIDATION


# == sample ==

def cmd_sample(args: argparse.Namespace) -> int:
    _check_model_flags(args)
    if args.N > SAMPLER_CLI_CAP:
        raise UsageError(f"sampler capped at N={SAMPLER_CLI_CAP}, got N={args.N}")
    if args.steps < 1 or args.sigma <= 0:
        raise UsageError("need steps >= 1 and sigma > 0")
    build = ModelParams.exploratory if args.exploratory else ModelParams
    params = build(N=args.N, beta=args.beta, eps=args.eps)
    _banner(f"SAMPLER N={args.N} beta={args.beta} eps={args.eps} seed={args.seed}")

    try:
        run = run_chain(params, n_steps=args.steps, seed=args.seed, burn_in=args.burn_in,
                        thin=args.thin, proposal_sigma=args.sigma)
    except ValueError as e:
        raise UsageError(str(e)) from e
    estimate = estimate_partition(params, n_samples=max(args.steps, 1000), seed=args.seed + 1)

    rows = [{'sample': s, 'particle': i, 'position': float(x), 'action': float(run.actions[s])}
            for s, sample in enumerate(run.samples) for i, x in enumerate(sample)]
    manifest = RunManifest(command='sample', out_dir=args.out,
                           params={'N': args.N, 'beta': args.beta, 'eps': args.eps, 'steps': args.steps,
                                   'seed': args.seed, 'burn_in': run.burn_in, 'thin': run.thin,
                                   'sigma': args.sigma, 'exploratory': args.exploratory})
    manifest.write_csv('samples.csv', ['sample', 'particle', 'position', 'action'], rows)
    manifest.headline.update(Z_hat=estimate.Z_hat, Z_std_err=estimate.std_err, Z_samples=estimate.n_samples,
                             acceptance_rate=run.acceptance_rate, kept_samples=len(run.samples))
    if args.N == 1:
        manifest.headline['Z_exact'] = exact_partition_one_generation(args.beta, args.eps)
    manifest.save()
    print(f"✓ {len(run.samples)} thinned samples, acceptance {run.acceptance_rate:.3f}")
    print(f"✓ Z_hat = {estimate.Z_hat:.6g} ± {estimate.std_err:.2g}")
    print(f"✅ written to {args.out}")
    return EXIT_OK


# == parser ==

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='brw_cli', description="Self-repellent branching random walk toolkit")
    parser.add_argument('--verbose', '-v', action='store_true', help="debug logging")
    sub = parser.add_subparsers(dest='command', required=True)

    def with_out(p):
        p.add_argument('--out', default=os.getenv('SRBRW_OUT_DIR', DEFAULT_OUT_DIR),
                       help="output directory (CLI > env:SRBRW_OUT_DIR > default)")
        return p

    def model_flags(p):
        p.add_argument('--N', type=int, required=True)
        p.add_argument('--beta', type=float, required=True)
        p.add_argument('--eps', type=float, required=True)

    p = with_out(sub.add_parser('dirichlet', help="Dirichlet profile on T^(M)"))
    p.add_argument('--M', type=int, required=True)
    p.add_argument('--eps', type=float, default=1.0)
    p.set_defaults(func=cmd_dirichlet)

    p = with_out(sub.add_parser('trajectory', help="trajectory h*_r and its costs"))
    model_flags(p)
    p.add_argument('--K', type=int, default=None, help="staircase depth (default: cost-model optimum)")
    p.set_defaults(func=cmd_trajectory)

    p = with_out(sub.add_parser('validate', help="acceptance suites"))
    p.add_argument('--suite', choices=SUITES + ('all',), default='all')
    p.add_argument('--seed', type=int, default=int(os.getenv('SRBRW_SEED', DEFAULT_SEED)),
                   help="seed (CLI > env:SRBRW_SEED > default)")
    p.set_defaults(func=cmd_validate)

    p = with_out(sub.add_parser('sample', help="Metropolis sampler and partition estimate"))
    model_flags(p)
    p.add_argument('--steps', type=int, default=100_000)
    p.add_argument('--seed', type=int, default=int(os.getenv('SRBRW_SEED', DEFAULT_SEED)),
                   help="seed (CLI > env:SRBRW_SEED > default)")
    p.add_argument('--burn-in', type=int, default=None)
    p.add_argument('--thin', type=int, default=None)
    p.add_argument('--sigma', type=float, default=1.0, help="proposal standard deviation")
    p.add_argument('--exploratory', action='store_true', help="allow beta <= eps^2/2")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except ModelAssumptionError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
