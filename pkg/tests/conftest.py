import pytest

from _synth import GitOracle


@pytest.fixture(scope="session")
def git_oracle():
    oracle = GitOracle()
    yield oracle
    oracle.close()
