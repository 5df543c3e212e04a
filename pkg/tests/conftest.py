import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def spike():
    from logitsbm.synth import SpikeSpec, gen_spike

    return gen_spike(SpikeSpec(n1=10, r=5))


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert the outcome."""
    def record(number, ok, detail):
        word = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"criterion {number:>2}: {word}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        if ok is None:
            pytest.skip(detail)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
