"""
Wspólne fixtures testów CLBPFACE.

Katalog aplikacji (clbpface/) trafia na sys.path, tak jak w skryptach.
Testy oznaczone `orl` wymagają prawdziwej bazy ORL pod ORL_ROOT.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

APP_DIR = Path(__file__).resolve().parent / 'clbpface'
sys.path.insert(0, str(APP_DIR))

from collectors.orl_collector import load_orl  # noqa: E402
from collectors.synthetic import export_orl_layout, synth_dataset  # noqa: E402
from utils.config import Config  # noqa: E402


def _orl_available() -> bool:
    return (Config.ORL_ROOT / 's1').is_dir()


def pytest_configure(config):
    config.addinivalue_line('markers', 'orl: wymaga bazy ORL (ustaw ORL_ROOT)')


def pytest_collection_modifyitems(config, items):
    if _orl_available():
        return
    skip = pytest.mark.skip(reason=f"brak bazy ORL pod {Config.ORL_ROOT}")
    for item in items:
        if 'orl' in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope='session')
def synthetic():
    """4 klasy x 10 obrazów 32x32."""
    return synth_dataset(class_count=4, per_class=10, side=32, seed=7)


@pytest.fixture
def orl_tree(tmp_path, synthetic):
    """Syntetyczny zbiór zapisany w układzie ORL (s1..s4, 1.pgm..10.pgm)."""
    return export_orl_layout(synthetic, tmp_path / 'faces')


@pytest.fixture(scope='session')
def orl_dataset():
    return load_orl(Config.ORL_ROOT)


@pytest.fixture
def memory_db():
    """Globalny engine bazy historii podmieniony na SQLite w pamięci."""
    from database import db

    db.configure('sqlite://')
    db.init_database()
    yield db
    db.configure(None)
