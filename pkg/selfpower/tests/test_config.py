import json
import pickle
from fractions import Fraction

import pandas as pd
import pytest

import selfpower.common as common
import selfpower.config as config


def test_params_of_json_file(tmpdir):
    path = str(tmpdir.join('params.json'))
    with open(path, 'w') as fp:
        json.dump({'comment': 'a demo', 'seed': 3, 'lemma1_ks': [2]}, fp)
    params = config.params_of_json_file(path)
    assert params['seed'] == 3
    assert params['lemma1_ks'] == [2]
    assert params['cap_spectrum'] == config.default_params()['cap_spectrum']
    assert 'comment' not in params


def test_merge_params():
    params = config.merge_params(config.default_params(), {'seed': None, 'sample_a': 10})
    assert params['seed'] == 0
    assert params['sample_a'] == 10
    with pytest.raises(common.DomainError, match="Unknown parameter"):
        config.merge_params(config.default_params(), {'nope': 1})


def test_errors_cross_processes():
    e = pickle.loads(pickle.dumps(common.CapExceededError('p =', 11, 10, '--cap-spectrum')))
    assert str(e) == "p = 11 exceeds the cap 10; raise it with --cap-spectrum"
    assert e.flag == '--cap-spectrum'
    e = pickle.loads(pickle.dumps(common.IdentityViolation(7, 'd=2', 1, 0, 'J_d')))
    assert (e.p, e.key, e.expected, e.got) == (7, 'd=2', 1, 0)


def test_write_csv(tmpdir):
    path = str(tmpdir.join('x.csv'))
    common.write_csv(pd.DataFrame({'p': [7], 'x': [1 / 3]}), path)
    with open(path, 'rb') as fp:
        assert fp.read() == b'p,x\n7,0.333333333333\n'
    assert common.task_path('out', 'T1') == 'out/T1.csv'


def test_exponents():
    assert common.EXPONENTS['theorem1'] == Fraction(27, 82)
    assert common.power(8, Fraction(1, 3)) == pytest.approx(2)


def test_version(monkeypatch):
    assert isinstance(common.version(), str)

    def missing(name):
        raise common.metadata.PackageNotFoundError(name)

    monkeypatch.setattr(common.metadata, 'version', missing)
    assert common.version() == 'unknown'
