import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metaonce import Engine, load_bundled_ontology
from metaonce.engine import bundled_seed_path


@pytest.fixture(scope="session")
def ontology():
    return load_bundled_ontology()


@pytest.fixture
def golden_engine(ontology):
    """In-memory engine seeded with the bundled three-scene scenario."""
    engine = Engine.in_memory(ontology)
    engine.run_seed(bundled_seed_path())
    return engine
