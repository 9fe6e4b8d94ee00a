"""
Useful functions that don't deserve a CLI: errors, formatting and paths.
"""

import math
import os
from fractions import Fraction
from importlib import metadata, resources

import click
import pandas as pd

# ### Errors ###


class DomainError(ValueError):
    """
    A precondition of a mathematical operation does not hold, e.g. a
    composite modulus or a divisor that does not divide p-1.
    """


class CapExceededError(RuntimeError):
    """
    A configured work or memory cap would be exceeded.
    """

    def __init__(self, what, value, cap, flag, hint=''):
        self._init_args = (what, value, cap, flag, hint)
        self.cap = cap
        self.flag = flag
        super().__init__(f"{what} {value} exceeds the cap {cap}; raise it with {flag}{hint}")

    def __reduce__(self):
        # Rebuild from the constructor arguments when crossing process boundaries.
        return (type(self), self._init_args)


class IdentityViolation(AssertionError):
    """
    An exact identity failed. We keep the coordinates so that `verify` can
    list them.
    """

    def __init__(self, p, key, expected, got, what=''):
        self._init_args = (p, key, expected, got, what)
        self.p = p
        self.key = key
        self.expected = expected
        self.got = got
        super().__init__(f"{what} violated at p={p}, {key}: expected {expected}, got {got}")

    def __reduce__(self):
        return (type(self), self._init_args)


def require(condition, message):
    """
    Raise a DomainError with `message` unless `condition` holds.
    """
    if not condition:
        raise DomainError(message)


# ### Formatting ###


def write_csv(df, path, digits=12):
    """
    Write a data frame to CSV with our fixed float format and '\\n' line
    endings. A path of '-' means stdout.
    """
    float_format = f'%.{digits}g'
    if path == '-':
        click.echo(df.to_csv(index=False, float_format=float_format), nl=False)
        return
    with open(path, 'w', newline='\n') as fp:
        df.to_csv(fp, index=False, float_format=float_format)


def write_json(df, path, digits=12):
    """
    Write a data frame as a JSON list of records; '-' means stdout.
    """
    text = df.to_json(orient='records', double_precision=digits) + '\n'
    if path == '-':
        click.echo(text, nl=False)
        return
    with open(path, 'w', newline='\n') as fp:
        fp.write(text)


# ### Path functions ###


def task_path(out_dir, task, extn='csv'):
    """
    The output path for a sweep task, e.g. `out/T1.csv`.
    """
    return os.path.join(out_dir, f'{task}.{extn}')


def read_data_csv(fname):
    """
    Read a CSV from our data path.
    """
    with resources.as_file(resources.files('selfpower') / 'data' / fname) as path:
        return pd.read_csv(path)


def version():
    """
    The installed version of this package, or 'unknown' when running from a
    source tree that hasn't been installed.
    """
    try:
        return metadata.version('selfpower')
    except metadata.PackageNotFoundError:
        return 'unknown'


# ### Bound exponents ###

# Every exponent appearing in a bound curve, kept as an exact rational in
# one place.
EXPONENTS = {
    'theorem1': Fraction(27, 82),
    'earlier_j1': Fraction(1, 3),
    'theorem2_p': Fraction(1, 3),
    'theorem2_t': Fraction(1, 2),
    'theorem3': Fraction(23, 12),
    'classical': Fraction(1, 2),
    'shteinikov_p': Fraction(1, 18),
    'shteinikov_d': Fraction(101, 126),
    'shkredov_p': Fraction(1, 6),
    'shkredov_d': Fraction(1, 2),
    'bbs_order_sum_p': Fraction(1, 2),
    'bbs_fiber_t': Fraction(-1, 12),
    'image_upper_p': Fraction(1, 2),
    'split_scale': Fraction(2, 7),
}


def power(x, exponent):
    """
    x^exponent for positive x and a rational exponent, through exp and log.
    """
    assert x > 0
    return math.exp(float(exponent) * math.log(x))
