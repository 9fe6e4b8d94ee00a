import numpy as np
import pytest
from click.testing import CliRunner

import selfpower.verify as verify
from selfpower.cli import cli
from selfpower.common import DomainError


def test_quick_suites_pass():
    result = CliRunner().invoke(cli, ['verify', '--level', 'quick'])
    assert result.exit_code == 0
    lines = [line for line in result.output.splitlines() if ': ' in line]
    assert [line.split(':')[0] for line in lines] == [name for name, _ in verify.SUITES]
    for line in lines:
        assert line.endswith(' 0 violations')
        assert int(line.split(': ')[1].split()[0]) > 0


def test_injected_fault():
    results = list(verify.run_suites('quick', fault='jd-range', only=['dual-counters', 'gcd-decomposition']))
    assert [r.name for r in results] == ['gcd-decomposition', 'dual-counters']
    for r in results:
        assert r.violations
        assert r.violations[0][:2] == (3, 'd=2')
    dual = results[1]
    assert dual.violations[0] == (3, 'd=2', 1, 0)

    result = CliRunner().invoke(cli, ['verify', '--inject-fault', 'jd-range'])
    assert result.exit_code == 1
    assert 'p=3, d=2: expected 1, got 0' in result.output


def test_decomposition_primes():
    rng = np.random.default_rng(0)
    scale = dict(verify.LEVELS['full'])
    primes = verify.decomposition_primes(scale, rng)
    small = [p for p in primes if p <= 2000]
    assert small == verify.primes_up_to(2000)
    large = primes[len(small):]
    assert len(large) == 200
    assert large == sorted(large)
    assert max(large) <= 10**5


def test_run_suites_errors():
    with pytest.raises(DomainError):
        list(verify.run_suites('medium'))
    with pytest.raises(DomainError):
        list(verify.run_suites('quick', fault='no-such-fault'))


def test_small_image_is_not_a_violation():
    assert (19, 'image_size', 8) in [spot[:3] for spot in verify.SPOT_VALUES]
    scale = dict(verify.LEVELS['quick'], spectrum=30, pairwise=30)
    tally = verify.suite_spectrum(scale, None, np.random.default_rng(0))
    assert tally.checked > 0
    assert tally.violations == []


def test_suite_extensions():
    rng = np.random.default_rng(0)
    scale = dict(verify.LEVELS['quick'], structure=50, exhaustive_order=50, dlog_large=5, dual=40, fourier=40)

    tally = verify.suite_discrete_log(scale, None, rng)
    primes = verify.primes_up_to(50)
    assert tally.violations == []
    assert tally.checked == 3 * sum(p - 1 for p in primes) + 5 * len(verify.DLOG_LARGE_PRIMES)

    with_scan = verify.suite_subgroups(dict(scale, root_scan=50), None, rng)
    without_scan = verify.suite_subgroups(dict(scale, root_scan=0), None, rng)
    assert with_scan.violations == []
    assert 3 * with_scan.checked == 4 * without_scan.checked

    with_fourier = verify.suite_dual_counters(scale, None, rng)
    without_fourier = verify.suite_dual_counters(dict(scale, fourier=0), None, rng)
    assert with_fourier.violations == []
    assert with_fourier.checked == 2 * without_fourier.checked
