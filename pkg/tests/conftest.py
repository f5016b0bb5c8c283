import shutil

import pytest

from probmodels.corpus import default_corpus_dir
from probmodels.parser import SourceFile, load_theory, merge_theories, parse_theory


@pytest.fixture
def corpus_dir():
    return default_corpus_dir()


@pytest.fixture
def load(corpus_dir):
    """Load a theory of the bundled corpus by file name"""

    def _load(name):
        return load_theory(corpus_dir / name)

    return _load


@pytest.fixture
def merged(load):
    """The possible-models theory of a puzzle with its favorable constraints added"""

    def _merged(possible, favorable):
        return merge_theories(load(possible), load(favorable))

    return _merged


@pytest.fixture
def parse():
    """Parse theory text, failing the test on diagnostics"""

    def _parse(text):
        result = parse_theory(SourceFile(text))
        assert not isinstance(result, list), [str(d) for d in result]
        return result

    return _parse


@pytest.fixture
def corpus_copy(corpus_dir, tmp_path):
    """A writable copy of the bundled corpus"""
    target = tmp_path / "puzzles"
    shutil.copytree(corpus_dir, target)
    return target
