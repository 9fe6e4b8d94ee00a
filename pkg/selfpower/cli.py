"""
Command line front end.

Exit codes: 0 success, 1 identity violation, 2 domain error, 3 cap
exceeded, 4 unwritable output.
"""

import functools
import os
import sys

import click
import pandas as pd

import selfpower.sweep as sweep
from selfpower.common import CapExceededError, DomainError, IdentityViolation, write_csv, write_json
from selfpower.config import default_params, merge_params, params_of_json_file
from selfpower.congruence import count_J, spectrum_frame, xx_spectrum
from selfpower.numtheory import make_context, multiplicative_order
from selfpower.reports import THEOREMS, expsum_report, rows_to_frame, theorem_report
from selfpower.verify import FAULTS, LEVELS, run_suites

EXIT_VIOLATION = 1
EXIT_DOMAIN = 2
EXIT_CAP = 3
EXIT_OUTPUT = 4

# Violations listed per suite before we summarize the rest.
MAX_LISTED = 20


def exit_codes(f):
    """
    Turn our exceptions into the documented exit codes, with the message on
    stderr.
    """

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except IdentityViolation as e:
            click.echo(f"Identity violation: {e}", err=True)
            sys.exit(EXIT_VIOLATION)
        except DomainError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_DOMAIN)
        except CapExceededError as e:
            click.echo(f"Cap exceeded: {e}", err=True)
            sys.exit(EXIT_CAP)
        except OSError as e:
            click.echo(f"Cannot write output: {e}", err=True)
            sys.exit(EXIT_OUTPUT)

    return wrapper


def param_options(f):
    """
    The options that overlay the run parameters.
    """
    options = [
        click.option('--params', 'params_json', type=click.Path(exists=True), help="JSON parameter file."),
        click.option('--seed', type=int, help="Random seed for sampling and factoring."),
        click.option('--sample-a', type=int, help="Number of random frequencies in sampled mode."),
        click.option('--cap-spectrum', type=int, help="Largest p for which we build the full spectrum."),
        click.option('--cap-expsum-work', type=int, help="Largest p*d for an exhaustive maximum over frequencies."),
        click.option('--cap-subgroup', type=int, help="Largest subgroup we materialize."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def load_params(params_json, **overrides):
    params = default_params() if params_json is None else params_of_json_file(params_json)
    return merge_params(params, overrides)


def emit(df, out, fmt, digits):
    if fmt == 'json':
        write_json(df, out, digits=digits)
    else:
        write_csv(df, out, digits=digits)


def parse_int_list(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(x) for x in value.split(',') if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'")


format_option = click.option(
    '--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True, help="Output format.")
out_option = click.option('--out', default='-', show_default=True, help="Output file; '-' is stdout.")


@click.group()
def cli():
    pass


@cli.command()
@click.option('--p', 'p', type=int, required=True, help="The prime modulus.")
@click.option('--lambda', 'lam', type=int, help="Count solutions of x^x = lambda.")
@click.option('--all-lambda', is_flag=True, help="Emit the whole spectrum.")
@click.option('--threads', default=1, show_default=True, help="Worker processes for the spectrum.")
@format_option
@out_option
@param_options
@exit_codes
def solve(p, lam, all_lambda, threads, fmt, out, params_json, **overrides):
    """
    Count the x in [1, p-1] with x^x = lambda mod p, for one lambda or all of
    them.
    """
    params = load_params(params_json, **overrides)
    ctx = make_context(p, seed=params['seed'], trial_limit=params['trial_division_limit'])
    if all_lambda:
        spectrum = xx_spectrum(ctx, cap=params['cap_spectrum'], chunk=params['chunk_size'], threads=threads)
        df = spectrum_frame(spectrum, ctx)
    elif lam is not None:
        J = count_J(ctx, lam, chunk=params['chunk_size'])
        df = pd.DataFrame({'p': [p], 'lambda': [lam], 'J': [J], 'ord_lambda': [multiplicative_order(lam, ctx)]})
    else:
        raise DomainError("give --lambda or --all-lambda")
    emit(df, out, fmt, params['float_digits'])


@cli.command(name='sweep')
@click.option('--p-min', type=int, help="Smallest p of the range.")
@click.option('--p-max', type=int, help="Largest p of the range.")
@click.option('--primes', callback=parse_int_list, help="Comma-separated primes, instead of a range.")
@click.option(
    '--tasks',
    default='T1',
    show_default=True,
    help="Comma-separated tasks among " + ', '.join(sweep.TASK_COLUMNS) + ".")
@click.option('--threads', default=1, show_default=True, help="Worker processes over primes.")
@click.option('--out', required=True, help="Output directory for the task CSVs and the manifest.")
@param_options
@exit_codes
def sweep_command(p_min, p_max, primes, tasks, threads, out, params_json, **overrides):
    """
    Run tasks over every prime in a range, writing one CSV per task and a
    JSON manifest into the output directory.
    """
    params = load_params(params_json, **overrides)
    task_list = [task.strip().upper() for task in tasks.split(',') if task.strip()]
    if not task_list:
        raise DomainError("no tasks given")
    for task in task_list:
        if task not in sweep.TASK_COLUMNS:
            raise DomainError(f"Unknown task '{task}'")
    prime_list = sweep.sweep_primes(p_min, p_max, primes)
    os.makedirs(out, exist_ok=True)

    started = sweep.now()
    click.echo(f"Sweeping {len(prime_list)} primes for {', '.join(task_list)}...", err=True)
    frames = sweep.run_sweep(prime_list, task_list, params, threads=threads, progress=True)
    paths = sweep.write_frames(frames, out, digits=params['float_digits'])

    statuses = {}
    n_violations = 0
    for task, frame in frames.items():
        violations = sweep.check_task_frame(task, frame)
        n_violations += len(violations)
        for p, key, expected, got in violations[:MAX_LISTED]:
            click.echo(f"{task} violation at p={p}, {key}: expected {expected}, got {got}", err=True)
        statuses[task] = {'path': paths[task], 'rows': len(frame), 'violations': len(violations)}
        for flag, flagged in sweep.flagged_primes(task, frame).items():
            statuses[task][flag] = flagged
            if flagged:
                click.echo(f"{task}: {flag} at p = {', '.join(map(str, flagged))}", err=True)
        fit = sweep.fit_task(task, frame)
        if fit is not None:
            click.echo(f"{task} empirical exponent: {fit.slope:.6f} (r2 {fit.r2:.4f})", err=True)
            statuses[task]['fit'] = {'slope': fit.slope, 'intercept': fit.intercept, 'r2': fit.r2}

    manifest = sweep.build_manifest(' '.join(sys.argv), params, prime_list, started, sweep.now(), statuses)
    sweep.write_manifest(manifest, os.path.join(out, 'manifest.json'))
    if n_violations:
        sys.exit(EXIT_VIOLATION)


@cli.command()
@click.option('--p', 'p', type=int, required=True, help="The prime modulus.")
@click.option('--d', 'd', type=int, help="Subgroup order; every divisor of p-1 if omitted.")
@click.option('--threads', default=1, show_default=True, help="Worker processes over frequencies.")
@format_option
@out_option
@param_options
@exit_codes
def expsum(p, d, threads, fmt, out, params_json, **overrides):
    """
    Maximal subgroup exponential sums with their bound curves.
    """
    params = load_params(params_json, **overrides)
    ctx = make_context(p, seed=params['seed'], trial_limit=params['trial_division_limit'])
    divisors = ctx.divisors if d is None else [d]
    for e in divisors:
        ctx.check_divisor(e)
    df = pd.DataFrame([sweep.expsum_row(ctx, e, params, threads=threads) for e in divisors],
                      columns=sweep.TASK_COLUMNS['EXPSUM'])
    emit(df, out, fmt, params['float_digits'])


@cli.command()
@click.option('--p', 'p', type=int, required=True, help="The prime modulus.")
@click.option(
    '--which', type=click.Choice(THEOREMS + ('EXPSUM',)), required=True, help="Which quantity to report on.")
@click.option('--t', 't', type=int, help="Multiplicative order t (T2, TD, ORDER_SPLIT).")
@click.option('--d', 'd', type=int, help="Divisor d (JD, TD, EXPSUM).")
@click.option('--n', 'n', type=int, help="Exponent n (LEMMA1).")
@click.option('--M', 'M', type=int, help="Range limit M (LEMMA1).")
@click.option('--lambda', 'lam', type=int, help="Right-hand side lambda (LEMMA1).")
@click.option('--U', 'U', type=int, help="Interval start (L1SUM).")
@click.option('--V', 'V', type=int, help="Interval end (L1SUM).")
@click.option(
    '--mode', type=click.Choice(['exhaustive', 'sampled']), default='exhaustive', show_default=True,
    help="Maximum over frequencies (EXPSUM).")
@format_option
@out_option
@param_options
@exit_codes
def report(p, which, t, d, n, M, lam, U, V, mode, fmt, out, params_json, **overrides):
    """
    Set an exactly computed quantity against its bound curves.
    """
    params = load_params(params_json, **overrides)
    ctx = make_context(p, seed=params['seed'], trial_limit=params['trial_division_limit'])
    if which == 'EXPSUM':
        if d is None:
            raise DomainError("EXPSUM needs --d")
        rows = expsum_report(ctx, d, mode=mode, params=params)
    else:
        rows = theorem_report(ctx, which, t=t, d=d, n=n, M=M, lam=lam, U=U, V=V, params=params)
    emit(rows_to_frame(rows), out, fmt, params['float_digits'])


@cli.command()
@click.option(
    '--level', type=click.Choice(list(LEVELS)), default='quick', show_default=True, help="Scale of the suites.")
@click.option('--seed', default=0, show_default=True, help="Random seed for sampled checks.")
@click.option('--inject-fault', type=click.Choice(FAULTS), hidden=True)
@exit_codes
def verify(level, seed, inject_fault):
    """
    Run the exact-identity suites, printing one line per suite.
    """
    failed = False
    for result in run_suites(level, fault=inject_fault, seed=seed):
        click.echo(f"{result.name}: {result.checked} checks, {len(result.violations)} violations")
        for p, key, expected, got in result.violations[:MAX_LISTED]:
            click.echo(f"  p={p}, {key}: expected {expected}, got {got}", err=True)
        if len(result.violations) > MAX_LISTED:
            click.echo(f"  ... and {len(result.violations) - MAX_LISTED} more", err=True)
        failed = failed or bool(result.violations)
    if failed:
        sys.exit(EXIT_VIOLATION)


if __name__ == '__main__':
    cli()
