import mpmath
import pytest

from bbpert import AnsatzSpec, PotentialSpec, run_series

PRECISION = 80


@pytest.fixture(autouse=True)
def _restore_mp():
    dps = mpmath.mp.dps
    yield
    mpmath.mp.dps = dps


@pytest.fixture(scope="session")
def quartic():
    return run_series(PotentialSpec.pure_power(2), AnsatzSpec(1), 50, PRECISION)


@pytest.fixture(scope="session")
def sextic_b():
    return run_series(PotentialSpec.pure_power(3), AnsatzSpec(2), 30, PRECISION)


@pytest.fixture(scope="session")
def octic():
    return run_series(PotentialSpec.pure_power(4), AnsatzSpec(3), 20, PRECISION)


@pytest.fixture(scope="session")
def harmonic():
    return run_series(PotentialSpec.pure_power(1), AnsatzSpec(0), 10, PRECISION)


@pytest.fixture(scope="session")
def all_series(harmonic, quartic, sextic_b, octic):
    return {1: harmonic, 2: quartic, 3: sextic_b, 4: octic}


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("BBPERT_CACHE_DIR", str(d))
    return d


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
