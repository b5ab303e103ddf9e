import numpy as np
import pytest

from modelchart.scenario import SystemConfig, generate_scenario


def random_hermitian(rng, n, scale=1.0):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (x + x.conj().T) / 2


def single_ray(theta_deg, rho, n_sc, n_rx, delta_f=312.5e3, phase=0.3):
    """Noiseless one-ray CSI built straight from the closed form."""
    c = 299_792_458.0
    s = np.arange(n_sc)[:, None]
    n = np.arange(n_rx)[None, :]
    return (np.exp(-1j * phase) * np.exp(1j * np.pi * n * np.cos(np.radians(theta_deg)))
            * np.exp(-2j * np.pi * rho * s * delta_f / c))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_scene():
    return generate_scenario(128, seed=3)


@pytest.fixture(scope="session")
def cfg8():
    return SystemConfig(n_sc=8, n_ave=3)


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary
_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else "error"
    _ACCEPTANCE[number] = (rep.passed and rep.when == "call", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, title, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  [{detail}]")
