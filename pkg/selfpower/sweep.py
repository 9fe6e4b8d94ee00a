"""
Prime-range sweeps: per-prime task rows, a worker pool over primes, the
emission-time checks, and the run manifest.

Rows are gathered in prime order and sorted by (p, secondary key) before
emission, so the output doesn't depend on the number of workers.
"""

import datetime
import json
from concurrent.futures import ProcessPoolExecutor

import click
import pandas as pd

from selfpower.common import EXPONENTS, DomainError, power, task_path, version, write_csv
from selfpower.congruence import count_J, gcd_class_counts, xx_spectrum
from selfpower.expsum import bound_curves, max_subgroup_sum
from selfpower.numtheory import make_context, primes_in_range, subgroup_elements
from selfpower.reports import exponent_fit

COLUMNS_VERSION = 2

TASK_COLUMNS = {
    'T1': ['p', 'J1', 'bound_27_82', 'ratio'],
    'T2': ['p', 't', 'sum', 'bound', 'ratio', 'in_range'],
    'T3': ['p', 'I', 'bound_23_12', 'ratio'],
    'EXPSUM': [
        'p', 'd', 'max_abs', 'a_max', 'exact', 'classical', 'shteinikov', 'in_hyp_sht', 'shkredov', 'in_hyp_shk'
    ],
    'DECOMP': ['p', 'd', 'Jprime', 'Jd'],
    'IMAGE': ['p', 'image_size', 'lower_bound', 'below_lower_bound', 'upper_curve_3p4'],
}

SORT_KEYS = {'T1': ['p'], 'T2': ['p', 't'], 'T3': ['p'], 'EXPSUM': ['p', 'd'], 'DECOMP': ['p', 'd'], 'IMAGE': ['p']}

# Tasks that need the full spectrum of a prime; it gets computed once.
SPECTRUM_TASKS = {'T2', 'T3', 'IMAGE'}


def sweep_primes(p_min=None, p_max=None, primes=None):
    """
    The odd primes to sweep: an explicit list, or every prime in
    [p_min, p_max].
    """
    if primes:
        for p in primes:
            make_context(p)
        return sorted(set(int(p) for p in primes))
    if p_min is None or p_max is None:
        raise DomainError("give either --primes or both --p-min and --p-max")
    if p_min > p_max:
        raise DomainError(f"--p-min {p_min} exceeds --p-max {p_max}")
    return [int(p) for p in primes_in_range(max(p_min, 3), p_max)]


def expsum_row(ctx, d, params, threads=1):
    """
    One EXPSUM row: exhaustive when p*d is within the work cap, sampled
    otherwise.
    """
    p = ctx.p
    H = subgroup_elements(d, ctx, cap=params['cap_subgroup'])
    mode = 'exhaustive'
    if p * d > params['cap_expsum_work']:
        mode = 'sampled'
        click.echo(f"EXPSUM p={p} d={d}: p*d exceeds --cap-expsum-work, using sampled mode", err=True)
    stat = max_subgroup_sum(
        H, ctx, mode=mode, sample=params['sample_a'], seed=params['seed'], work_cap=params['cap_expsum_work'],
        threads=threads)
    curves = bound_curves(p, d)
    return {
        'p': p,
        'd': d,
        'max_abs': stat.max_magnitude,
        'a_max': stat.a_max,
        'exact': int(stat.exact),
        'classical': stat.curve_classical,
        'shteinikov': stat.curve_shteinikov,
        'in_hyp_sht': int(curves['shteinikov'].in_range),
        'shkredov': stat.curve_shkredov,
        'in_hyp_shk': int(curves['shkredov'].in_range),
    }


def prime_rows(p, tasks, params):
    """
    The rows every task contributes for one prime, as a dict from task to a
    list of row dicts.
    """
    ctx = make_context(p, seed=params['seed'], trial_limit=params['trial_division_limit'])
    chunk = params['chunk_size']
    spectrum = None
    if SPECTRUM_TASKS.intersection(tasks):
        spectrum = xx_spectrum(ctx, cap=params['cap_spectrum'], chunk=chunk)

    out = {}
    for task in tasks:
        if task == 'T1':
            j1 = int(spectrum.counts[1]) if spectrum is not None else count_J(ctx, 1, chunk=chunk)
            bound = power(p, EXPONENTS['theorem1'])
            out[task] = [{'p': p, 'J1': j1, 'bound_27_82': bound, 'ratio': j1 / bound}]
        elif task == 'T2':
            out[task] = []
            for t in ctx.divisors:
                total = spectrum.by_order.get(t, 0)
                bound = t + power(p, EXPONENTS['theorem2_p']) * power(t, EXPONENTS['theorem2_t'])
                out[task].append({
                    'p': p, 't': t, 'sum': total, 'bound': bound, 'ratio': total / bound, 'in_range': int(t**3 < p)
                })
        elif task == 'T3':
            bound = power(p, EXPONENTS['theorem3'])
            out[task] = [{'p': p, 'I': spectrum.I, 'bound_23_12': bound, 'ratio': spectrum.I / bound}]
        elif task == 'EXPSUM':
            out[task] = [expsum_row(ctx, d, params) for d in ctx.divisors]
        elif task == 'IMAGE':
            # Reported, not checked: p = 19 and p = 1321 fall below (p-1)/2.
            out[task] = [{
                'p': p,
                'image_size': spectrum.image_size,
                'lower_bound': (p - 1) // 2,
                'below_lower_bound': int(spectrum.image_size < (p - 1) // 2),
                'upper_curve_3p4': 3 * p / 4 + power(p, EXPONENTS['image_upper_p']),
            }]
        elif task == 'DECOMP':
            # Violations are reported at emission rather than raised here.
            table = gcd_class_counts(ctx, chunk=chunk, check=False)
            out[task] = [{
                'p': p, 'd': int(d), 'Jprime': int(jp), 'Jd': int(jd)
            } for d, jp, jd in table.rows[['d', 'primary_count', 'bound_count']].itertuples(index=False)]
        else:
            raise DomainError(f"Unknown task '{task}'")
    return out


def _prime_job(args):
    return prime_rows(*args)


def iter_prime_rows(primes, tasks, params, threads=1):
    """
    Yield prime_rows for each prime, in prime order, using `threads` worker
    processes.
    """
    jobs = [(p, tuple(tasks), params) for p in primes]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            yield from executor.map(_prime_job, jobs)
    else:
        yield from map(_prime_job, jobs)


def collect_frames(results, tasks):
    """
    Stack per-prime rows into one sorted data frame per task.
    """
    rows = {task: [] for task in tasks}
    for result in results:
        for task in tasks:
            rows[task].extend(result[task])
    return {
        task: pd.DataFrame(rows[task], columns=TASK_COLUMNS[task]).sort_values(
            SORT_KEYS[task], kind='mergesort').reset_index(drop=True)
        for task in tasks
    }


def run_sweep(primes, tasks, params, threads=1, progress=False):
    """
    Run `tasks` over `primes` and return a dict from task to its sorted
    data frame. With `progress` a progress bar goes to stderr.
    """
    results = iter_prime_rows(primes, tasks, params, threads)
    if not progress:
        return collect_frames(results, tasks)
    stderr = click.get_text_stream('stderr')
    with click.progressbar(results, length=len(primes), label='Sweeping primes', file=stderr) as bar:
        return collect_frames(bar, tasks)


def write_frames(frames, out_dir, digits=12):
    """
    Write one CSV per task into `out_dir`, returning the paths.
    """
    paths = {}
    for task, frame in frames.items():
        paths[task] = task_path(out_dir, task)
        write_csv(frame, paths[task], digits=digits)
    return paths


def check_task_frame(task, frame):
    """
    The exact statements we can check at emission time, as a list of
    violations (p, key, expected, got).
    """
    violations = []
    if task == 'DECOMP':
        for row in frame[frame['Jprime'] > frame['Jd']].itertuples(index=False):
            violations.append((row.p, f'd={row.d}', f'<= {row.Jd}', row.Jprime))
    elif task == 'T1':
        # x = 1 and x = p-1 always solve x^x = 1.
        for row in frame[frame['J1'] < 2].itertuples(index=False):
            violations.append((row.p, 'J1', '>= 2', row.J1))
    return violations


def flagged_primes(task, frame):
    """
    Report-only flags worth surfacing in the manifest, as a dict from flag
    to the primes that raise it.
    """
    if task == 'IMAGE':
        return {'below_lower_bound': [int(p) for p in frame.loc[frame['below_lower_bound'] == 1, 'p']]}
    return {}


def fit_task(task, frame):
    """
    The empirical exponent of the observed column against p, for the tasks
    where that's meaningful; None otherwise.
    """
    column = {'T1': 'J1', 'T3': 'I'}.get(task)
    if column is None or frame['p'].nunique() < 2:
        return None
    return exponent_fit(zip(frame['p'], frame[column]))


def now():
    return datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")


def build_manifest(command, params, primes, started, finished, suites):
    return {
        'version': version(),
        'columns_version': COLUMNS_VERSION,
        'command': command,
        'seed': params['seed'],
        'caps': {key: params[key] for key in ('cap_spectrum', 'cap_expsum_work', 'cap_subgroup')},
        'primes': list(primes),
        'started': started,
        'finished': finished,
        'suites': suites,
        'columns': {task: TASK_COLUMNS[task] for task in suites},
    }


def write_manifest(manifest, path):
    with open(path, 'w') as fp:
        fp.write(json.dumps(manifest, indent=4))
