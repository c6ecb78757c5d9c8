import pytest

from wreathwalk.designer import design_sequence, power_target
from wreathwalk.sequences import constant_sequence


@pytest.fixture(scope="session")
def seq2():
    return constant_sequence(2)


@pytest.fixture(scope="session")
def seq4():
    return constant_sequence(4)


@pytest.fixture(scope="session")
def seq23():
    """Two-level head (2, 3) extended by 3s."""
    from wreathwalk.sequences import DegreeSequence

    return DegreeSequence(head=(2, 3))


@pytest.fixture(scope="session")
def designed_06():
    """Sequence designed for f(n) = n**0.6 with gamma = 0.65."""
    seq, cert = design_sequence(power_target(0.6, gamma=0.65), levels=40)
    return seq, cert
