import pytest

from thresholdcred import AttributeVector, setup
from thresholdcred.scheme import (
    aggregate_credentials,
    aggregate_keys,
    blind_sign,
    dealer_keygen,
    prepare_blind_sign,
    unblind,
)


@pytest.fixture(scope="session")
def params1():
    return setup(128, 1)


@pytest.fixture(scope="session")
def params3():
    return setup(128, 3)


@pytest.fixture(scope="session")
def keys3(params3):
    """2-of-3 keys over q=3 with the dealer's master key retained."""
    sks, vks, master = dealer_keygen(params3, 2, 3)
    return sks, vks, master, aggregate_keys(vks[:2])


def issue_partials(params, sks, attrs, predicate=None):
    d, request = prepare_blind_sign(params, attrs, predicate)
    return [(sk.index, unblind(blind_sign(params, sk, request), d)) for sk in sks]


def issue(params, sks, attrs):
    return aggregate_credentials(issue_partials(params, sks, attrs))


@pytest.fixture
def mixed_attrs():
    # position 1: random private key, 2: private, 3: public
    return AttributeVector.with_random_key((11, 22), public_positions=(2,))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
