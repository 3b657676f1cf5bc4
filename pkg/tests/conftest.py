import pytest

from wavetank.profiles import WavemakerProfile


@pytest.fixture(scope="session")
def h1():
    return WavemakerProfile.linear()


@pytest.fixture(scope="session")
def h2():
    return WavemakerProfile.cosine()


@pytest.fixture(scope="session")
def h_ns():
    return WavemakerProfile.nonstrategic()
