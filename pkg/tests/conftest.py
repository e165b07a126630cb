import pytest

from proxsearch.lexicon import FlList, LemmaDictionary, LexiconConfig

# Ranks of the worked example used across the suite: a short English
# sentence whose lemmas span all three classes under the default
# sw_count=700 / fu_count=2100 boundaries.
SENTENCE = "All was fresh around them, familiar and yet new, tinged with the beauty"
SENTENCE_RANKS = {
    "all": 60,
    "be": 21,
    "fresh": 2667,
    "around": 2177,
    "they": 134,
    "and": 28,
    "yet": 632,
    "new": 376,
    "with": 40,
    "the": 10,
}
SENTENCE_DICTIONARY = {
    "was": ["be"],
    "them": ["they"],
    "tinged": ["ting", "tinge"],
    "mine": ["mine", "my"],
    "are": ["are", "be"],
}

# Ranks for the four-word song-title query; all four lemmas are stop
# lemmas under the default boundaries.
SONG_RANKS = {"who": 293, "are": 268, "you": 47, "be": 21}


@pytest.fixture
def default_config():
    return LexiconConfig(sw_count=700, fu_count=2100, max_distance=5)


@pytest.fixture
def sentence_fl_list(default_config):
    return FlList.from_ranks(SENTENCE_RANKS, default_config)


@pytest.fixture
def sentence_dictionary():
    return LemmaDictionary(SENTENCE_DICTIONARY)


@pytest.fixture
def song_fl_list(default_config):
    return FlList.from_ranks(SONG_RANKS, default_config)


@pytest.fixture
def song_dictionary():
    return LemmaDictionary({"are": ["are", "be"]})
