"""
Run parameters: defaults plus optional JSON parameter files.

The parameters below should be self explanatory except for:

* cap_expsum_work bounds p*d for an exhaustive maximum over frequencies.
* chunk_size is the number of x values handled per vectorized block.
"""

import json

from selfpower.common import DomainError


def default_params():
    """
    Return a dictionary with default parameters.
    """
    return dict(
        # Reproducibility.
        seed=0,
        # Work and memory caps.
        cap_spectrum=10**7,
        cap_expsum_work=10**10,
        cap_subgroup=10**8,
        # Sampled maximum over frequencies.
        sample_a=1000,
        # Lemma 1 curve parameters.
        lemma1_ks=[2, 3],
        # Output.
        float_digits=12,
        # Kernels.
        chunk_size=2**20,
        trial_division_limit=2**16)


def merge_params(params, overrides):
    """
    Overlay `overrides` on `params`, ignoring None values (unset CLI flags)
    and rejecting keys we don't know about.
    """
    merged = dict(params)
    for key, value in overrides.items():
        if key not in merged:
            raise DomainError(f"Unknown parameter '{key}'")
        if value is not None:
            merged[key] = value
    return merged


def params_of_json_file(fname):
    """
    Build a parameter dictionary from a JSON file layered over the defaults.
    A 'comment' key is allowed and dropped.
    """
    with open(fname, 'r') as fp:
        loaded = json.load(fp)
    loaded.pop('comment', None)
    return merge_params(default_params(), loaded)
