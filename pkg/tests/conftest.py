import pytest

from offshell.numerics import set_precision


@pytest.fixture(autouse=True)
def working_precision():
    """All tests run at 256 bits unless they set their own context."""
    set_precision(256)
    yield
    set_precision(256)
