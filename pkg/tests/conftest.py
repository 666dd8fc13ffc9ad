import pytest

from lyricmeter.lexicon import (
    default_remnants,
    default_stopword_policy,
    load_lexicon,
)

FIG2_LYRICS = """\
i can see the birds flying
my eyeballs are going up and down
my head's turning around
my hands are clapping
my feet are jumping
i want to fly like a bird
like a bird
"""


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def policy():
    return default_stopword_policy()


@pytest.fixture(scope="session")
def remnants():
    return default_remnants()


@pytest.fixture(scope="session")
def fig2_lyrics():
    return FIG2_LYRICS
