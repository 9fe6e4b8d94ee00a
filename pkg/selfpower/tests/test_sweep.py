import json

import pytest

import selfpower.sweep as sweep
from selfpower.common import EXPONENTS, DomainError, power
from selfpower.config import default_params


def test_sweep_primes():
    assert sweep.sweep_primes(3, 20) == [3, 5, 7, 11, 13, 17, 19]
    assert sweep.sweep_primes(1, 7) == [3, 5, 7]
    assert sweep.sweep_primes(primes=[13, 7, 7]) == [7, 13]
    with pytest.raises(DomainError, match="not prime"):
        sweep.sweep_primes(primes=[7, 9])
    with pytest.raises(DomainError):
        sweep.sweep_primes(20, 3)
    with pytest.raises(DomainError):
        sweep.sweep_primes()


def test_prime_rows_p7():
    rows = sweep.prime_rows(7, list(sweep.TASK_COLUMNS), default_params())
    assert rows['T1'][0]['J1'] == 2
    assert [(row['t'], row['sum']) for row in rows['T2']] == [(1, 2), (2, 1), (3, 2), (6, 1)]
    assert rows['T3'][0]['I'] == 10
    assert rows['IMAGE'][0]['image_size'] == 4
    assert rows['IMAGE'][0]['lower_bound'] == 3
    assert rows['IMAGE'][0]['below_lower_bound'] == 0
    assert [(row['d'], row['Jprime'], row['Jd']) for row in rows['DECOMP']] == [(1, 1, 1), (2, 0, 1), (3, 0, 0),
                                                                                 (6, 1, 1)]
    assert [row['a_max'] for row in rows['EXPSUM']] == [1, 3, 1, 1]
    for task, task_rows in rows.items():
        for row in task_rows:
            assert list(row) == sweep.TASK_COLUMNS[task]


def test_expsum_falls_back_to_sampling():
    params = dict(default_params(), cap_expsum_work=202, sample_a=5)
    rows = sweep.prime_rows(101, ['EXPSUM'], params)['EXPSUM']
    assert [row['exact'] for row in rows if row['d'] <= 2] == [1, 1]
    assert [row['exact'] for row in rows if row['d'] == 100] == [0]


def test_run_sweep_deterministic():
    primes = sweep.sweep_primes(3, 200)
    tasks = ['T1', 'T2', 'DECOMP', 'IMAGE']
    one = sweep.run_sweep(primes, tasks, default_params())
    two = sweep.run_sweep(primes, tasks, default_params(), threads=3)
    for task in tasks:
        assert list(one[task].columns) == sweep.TASK_COLUMNS[task]
        assert one[task].equals(two[task])
        assert sweep.check_task_frame(task, one[task]) == []
    assert one['T1']['p'].tolist() == primes
    # 19 is the only prime below 200 whose image is smaller than (p-1)/2.
    assert one['IMAGE'].loc[one['IMAGE']['below_lower_bound'] == 1, 'p'].tolist() == [19]
    assert sweep.flagged_primes('IMAGE', one['IMAGE']) == {'below_lower_bound': [19]}
    assert sweep.flagged_primes('T1', one['T1']) == {}
    t2 = one['T2']
    assert t2.equals(t2.sort_values(['p', 't']))


def test_check_task_frame():
    frames = sweep.run_sweep([7, 11], ['T1', 'DECOMP', 'IMAGE'], default_params())
    decomp = frames['DECOMP'].copy()
    decomp.loc[0, 'Jprime'] = 5
    assert sweep.check_task_frame('DECOMP', decomp) == [(7, 'd=1', '<= 1', 5)]
    # The image lower bound is flagged in the rows, never checked.
    assert sweep.check_task_frame('IMAGE', frames['IMAGE']) == []
    assert frames['IMAGE']['below_lower_bound'].tolist() == [0, 0]
    t1 = frames['T1'].copy()
    t1.loc[0, 'J1'] = 1
    assert len(sweep.check_task_frame('T1', t1)) == 1
    assert sweep.check_task_frame('T3', frames['T1']) == []


def test_fit_task():
    frames = sweep.run_sweep(sweep.sweep_primes(3, 300), ['T1', 'T3', 'IMAGE'], default_params())
    fit = sweep.fit_task('T3', frames['T3'])
    # I(p) is about 2p.
    assert fit.slope == pytest.approx(1, abs=0.2)
    assert sweep.fit_task('T1', frames['T1']) is not None
    assert sweep.fit_task('IMAGE', frames['IMAGE']) is None


def test_write_frames_and_manifest(tmpdir):
    params = default_params()
    frames = sweep.run_sweep([5, 7], ['T1', 'T3'], params)
    paths = sweep.write_frames(frames, str(tmpdir))
    b5, b7 = power(5, EXPONENTS['theorem3']), power(7, EXPONENTS['theorem3'])
    with open(paths['T3']) as fp:
        assert fp.read() == f'p,I,bound_23_12,ratio\n5,6,{b5:.12g},{6 / b5:.12g}\n7,10,{b7:.12g},{10 / b7:.12g}\n'
    manifest = sweep.build_manifest('selfpower sweep', params, [5, 7], 'start', 'end', {'T1': {}, 'T3': {}})
    path = str(tmpdir.join('manifest.json'))
    sweep.write_manifest(manifest, path)
    with open(path) as fp:
        loaded = json.load(fp)
    for field in ['version', 'command', 'seed', 'caps', 'primes', 'started', 'finished', 'suites']:
        assert field in loaded
    assert loaded['columns']['T3'] == sweep.TASK_COLUMNS['T3']
    assert loaded['caps']['cap_spectrum'] == params['cap_spectrum']
