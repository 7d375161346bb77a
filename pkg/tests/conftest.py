import pytest

from zerosum.games import fig1_bad_case, kuhn_poker, leduc_poker


@pytest.fixture(scope="session")
def kuhn():
    return kuhn_poker()


@pytest.fixture(scope="session")
def leduc():
    return leduc_poker()


@pytest.fixture()
def fig1():
    return fig1_bad_case()
