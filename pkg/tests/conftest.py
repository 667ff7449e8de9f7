import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reprokit.bundle import AppBundle
from reprokit.fixtures import write_fiveact_bundle, write_minidoc_bundle
from reprokit.pipeline import analyze
from reprokit.store import Store


@pytest.fixture(scope="session")
def minidoc_root(tmp_path_factory) -> Path:
    return write_minidoc_bundle(tmp_path_factory.mktemp("minidoc-bundle") / "minidoc")


@pytest.fixture(scope="session")
def fiveact_root(tmp_path_factory) -> Path:
    return write_fiveact_bundle(tmp_path_factory.mktemp("fiveact-bundle") / "fiveact")


@pytest.fixture(scope="session")
def minidoc_bundle(minidoc_root) -> AppBundle:
    return AppBundle.open(minidoc_root)


@pytest.fixture(scope="session")
def minidoc_analysis(minidoc_root, tmp_path_factory):
    """Analyzed minidoc in a session store; treat both as read-only."""
    store = Store(tmp_path_factory.mktemp("minidoc-store"))
    return store, analyze(minidoc_root, store)


@pytest.fixture(scope="session")
def minidoc_graph(minidoc_analysis):
    return minidoc_analysis[1].graph


@pytest.fixture(scope="session")
def minidoc_model(minidoc_analysis):
    return minidoc_analysis[1].static_model


@pytest.fixture
def minidoc_store(minidoc_root, tmp_path) -> Store:
    """A private analyzed store for tests that write drafts or reports."""
    store = Store(tmp_path / "store")
    analyze(minidoc_root, store)
    return store
