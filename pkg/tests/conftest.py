import pytest

from textcontours.contours import ContourExtractor
from textcontours.resources import load_store
from textcontours.synthetic import write_store_files


@pytest.fixture(scope="session")
def store_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("resources")
    write_store_files(str(directory))
    return directory


@pytest.fixture(scope="session")
def manifest(store_dir):
    return str(store_dir / "manifest.tsv")


@pytest.fixture(scope="session")
def store(manifest):
    return load_store(manifest)


@pytest.fixture(scope="session")
def extractor(store):
    return ContourExtractor(store)


@pytest.fixture(scope="session")
def registry(extractor):
    return extractor.registry
