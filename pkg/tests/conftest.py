from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gazeswipe.decoder import Decoder, DecoderConfig
from gazeswipe.dataio import load_assets
from gazeswipe.geometry import build_qwerty_layout
from gazeswipe.lexicon import CharNgramModel, Lexicon, WordNgramModel


@pytest.fixture(scope="session")
def layout():
    return build_qwerty_layout()


@pytest.fixture(scope="session")
def assets():
    return load_assets()


@pytest.fixture(scope="session")
def decoder(assets):
    return Decoder(assets.lexicon, assets.word_model, assets.layout)


@pytest.fixture(scope="session")
def uniform_decoder(assets):
    """Bundled word list, flat language model: spatial evidence only."""
    return Decoder(assets.lexicon, WordNgramModel.uniform(assets.lexicon), assets.layout)


# Toy vocabulary where one word dominates the language model. A swipe over
# t then o must surface all five t-words with the frequent one first.
TEASER_COUNTS = {
    "today": 10**9,
    "to": 1,
    "the": 1,
    "tomorrow": 1,
    "tyrannosaurus": 1,
}


@pytest.fixture(scope="session")
def teaser_lexicon():
    return Lexicon(dict(TEASER_COUNTS))


@pytest.fixture(scope="session")
def teaser_models(teaser_lexicon):
    word_model = WordNgramModel(teaser_lexicon)
    char_model = CharNgramModel.from_words(teaser_lexicon.entries)
    return word_model, char_model


@pytest.fixture(scope="session")
def teaser_decoder(teaser_lexicon, layout, teaser_models):
    word_model, _ = teaser_models
    return Decoder(teaser_lexicon, word_model, layout, DecoderConfig(top_k=4))


@pytest.fixture(scope="session")
def teaser_lexicon_file(tmp_path_factory, teaser_lexicon):
    path = tmp_path_factory.mktemp("teaser") / "lexicon.tsv"
    teaser_lexicon.to_tsv(path)
    return path
