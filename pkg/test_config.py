"""
Testy konfiguracji: Config (env) i PipelineConfig (plik JSON + flagi CLI).
"""

import json

import pytest

from utils.config import Config, PipelineConfig, parse_grid


def test_pipeline_defaults():
    config = PipelineConfig()
    assert (config.descriptor, config.P, config.R, config.mapping) == ('clbp_s_m', 8, 1.0, 'riu2')
    assert config.grid == ((1, 1), (2, 2), (4, 4))
    assert (config.classifier, config.lam, config.include_c) == ('src', 0.01, False)


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ValueError, match='Nieznane klucze'):
        PipelineConfig.from_dict({'lambda': 0.1})


def test_from_dict_accepts_grid_string_and_lists():
    assert PipelineConfig.from_dict({'grid': '1x1, 3x2'}).grid == ((1, 1), (3, 2))
    assert PipelineConfig.from_dict({'grid': [[2, 2]]}).grid == ((2, 2),)


def test_merged_ignores_missing_flags():
    base = PipelineConfig(classifier='chi2_nn', lam=0.5)
    merged = base.merged(descriptor=None, lam=None, P=16, grid='2x2')
    assert merged.lam == 0.5
    assert merged.classifier == 'chi2_nn'
    assert (merged.P, merged.grid) == (16, ((2, 2),))


def test_to_dict_round_trip():
    config = PipelineConfig(descriptor='lbp', mapping='u2', classifier='chi2_nn', grid=((1, 1),))
    assert PipelineConfig.from_dict(json.loads(json.dumps(config.to_dict()))) == config


def test_descriptor_hash_tracks_descriptor_fields_only():
    base = PipelineConfig()
    assert base.descriptor_hash() == base.merged(lam=0.2, max_iter=10, classifier='chi2_nn').descriptor_hash()
    assert base.descriptor_hash() != base.merged(P=16).descriptor_hash()
    assert base.descriptor_hash() != base.merged(include_c=True).descriptor_hash()
    assert base.descriptor_hash() != base.merged(grid='1x1').descriptor_hash()
    assert len(base.descriptor_hash()) == 64


def test_json_and_flag_types_give_same_descriptor_hash():
    from_json = PipelineConfig.from_dict({'R': 1, 'P': 8.0, 'include_c': 0, 'lam': 1, 'max_iter': 50.0})
    from_flags = PipelineConfig().merged(R=1.0, P=8, include_c=False, lam=1.0, max_iter=50)
    assert from_json.descriptor_hash() == from_flags.descriptor_hash()
    assert from_json == from_flags
    assert type(from_json.P) is int and type(from_json.max_iter) is int
    assert type(from_json.R) is float and type(from_json.lam) is float
    assert from_json.include_c is False


def test_from_json_file(tmp_path):
    path = tmp_path / 'pipeline.json'
    path.write_text(json.dumps({'descriptor': 'lbp', 'mapping': 'u2', 'R': 2.0}), encoding='utf-8')
    config = PipelineConfig.from_json_file(path)
    assert (config.descriptor, config.mapping, config.R) == ('lbp', 'u2', 2.0)

    path.write_text('{not json', encoding='utf-8')
    with pytest.raises(ValueError):
        PipelineConfig.from_json_file(path)
    with pytest.raises(ValueError):
        PipelineConfig.from_json_file(tmp_path / 'missing.json')


@pytest.mark.parametrize('kwargs', [
    {'descriptor': 'hog'},
    {'classifier': 'svm'},
    {'mapping': 'ri'},
    {'lam': 0.0},
    {'max_iter': 0},
    {'P': 8.5},
    {'P': True},
    {'R': None},
    {'include_c': 'yes'},
    {'max_iter': 'many'},
])
def test_pipeline_validation(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(**kwargs)


@pytest.mark.parametrize('text', ['', ' , ', '2by2', '1x1,x2'])
def test_parse_grid_errors(text):
    with pytest.raises(ValueError):
        parse_grid(text)


def test_parse_grid():
    assert parse_grid('1x1,2X2,4x4') == [(1, 1), (2, 2), (4, 4)]


def test_config_validate(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, 'ORL_ROOT', tmp_path / 'orl')
    monkeypatch.setattr(Config, 'CACHE_DIR', tmp_path / 'cache')
    monkeypatch.setattr(Config, 'REPORTS_DIR', tmp_path / 'reports')
    monkeypatch.setattr(Config, 'LOG_LEVEL', 'INFO')

    is_valid, errors = Config.validate()
    assert not is_valid
    assert set(errors) == {'ORL_ROOT'}
    assert (tmp_path / 'cache').is_dir()

    (tmp_path / 'orl').mkdir()
    assert Config.validate() == (True, {})

    monkeypatch.setattr(Config, 'LOG_LEVEL', 'LOUD')
    assert set(Config.validate()[1]) == {'LOG_LEVEL'}
