import pytest

from k3kit.diophantine import DiophantinePair, liouville_number


@pytest.fixture(scope="session")
def dioph_pair():
    return DiophantinePair.parse("sqrt(2)-1", "sqrt(3)-1")


@pytest.fixture(scope="session")
def torsion_pair():
    return DiophantinePair.rational("1/2", "1/3")


@pytest.fixture(scope="session")
def liouville_pair():
    # q = sum 10**(-k!) carried at enough bits to resolve n up to 10**6
    return DiophantinePair(DiophantinePair.parse("sqrt(2)-1", "0", precision=256).p,
                           liouville_number(10, 256), "decimal", 256)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
