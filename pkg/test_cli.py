"""
Testy CLI (main(argv) -> kod wyjścia) na syntetycznym drzewie ORL.
"""

import json
import logging

import pytest

from cli import main
from collectors.orl_collector import load_orl
from descriptors.feature_cache import read_feature_csv

QUIET = ['--log-level', 'WARNING']


@pytest.fixture(autouse=True)
def restore_root_logger():
    # main() podmienia handler roota na stderr przechwycony przez capsys
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(*argv) -> int:
    return main(QUIET + [str(arg) for arg in argv])


def test_synth_writes_orl_layout(tmp_path, synthetic, capsys):
    out = tmp_path / 'synth'
    assert run('synth', '--out', out, '--classes', 4, '--per-class', 10, '--side', 32, '--seed', 7) == 0
    assert '[OK] 40 obrazów' in capsys.readouterr().out
    loaded = load_orl(out)
    assert loaded.labels == synthetic.labels
    assert loaded.images == synthetic.images


def test_evaluate_writes_json_report(tmp_path, orl_tree, capsys):
    report = tmp_path / 'reports' / 'out.json'
    assert run('evaluate', '--data', orl_tree, '--protocol', 'first_d', '--d', 5,
               '--classifier', 'src', '--lambda', 0.01, '--report', report) == 0
    data = json.loads(report.read_text(encoding='utf-8'))
    assert data['protocol']['kind'] == 'first_d'
    assert data['config']['lam'] == 0.01
    assert data['mean'] >= 0.95
    assert 'mean' in capsys.readouterr().out


def test_evaluate_random_split_csv_report(tmp_path, orl_tree):
    report = tmp_path / 'out.csv'
    assert run('evaluate', '--data', orl_tree, '--protocol', 'random', '--d', 4, '--runs', 3,
               '--seed', 11, '--classifier', 'chi2_nn', '--report', report) == 0
    lines = report.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'run,accuracy,percent'
    assert [line.split(',')[0] for line in lines[1:]] == ['1', '2', '3', 'mean', 'std']


def test_evaluate_infeasible_d_fails(orl_tree, capsys):
    assert run('evaluate', '--data', orl_tree, '--d', 10, '--classifier', 'chi2_nn') == 1
    assert '[ERROR]' in capsys.readouterr().err


def test_evaluate_missing_data_fails(tmp_path, capsys):
    assert run('evaluate', '--data', tmp_path / 'nope') == 1
    assert 'ORL_ROOT' in capsys.readouterr().err


def test_extract_then_classify(tmp_path, orl_tree, capsys):
    gallery = tmp_path / 'gallery.csv'
    assert run('extract', '--data', orl_tree, '--out', gallery) == 0
    table = read_feature_csv(gallery)
    assert table.features.shape == (40, 21 * 20)

    capsys.readouterr()
    assert run('classify', '--gallery', gallery, '--probe', orl_tree / 's2' / '7.pgm') == 0
    out = capsys.readouterr().out
    assert 'predicted=1' in out
    assert 'class 1: residual' in out

    assert run('classify', '--gallery', gallery, '--probe', orl_tree / 's3' / '2.pgm',
               '--classifier', 'chi2_nn') == 0
    assert 'predicted=2' in capsys.readouterr().out


def test_classify_rejects_descriptor_mismatch(tmp_path, orl_tree, capsys):
    gallery = tmp_path / 'gallery.csv'
    assert run('extract', '--data', orl_tree, '--out', gallery) == 0
    assert run('classify', '--gallery', gallery, '--probe', orl_tree / 's1' / '1.pgm', '--p', 16) == 1
    assert 'extract' in capsys.readouterr().err


@pytest.mark.parametrize('header', ['{"config": {}}', '{"layout": [{"name": "S"}], "config": {}}'])
def test_classify_with_incomplete_gallery_header_fails(tmp_path, orl_tree, capsys, header):
    gallery = tmp_path / 'gallery.csv'
    gallery.write_text(f'# {header}\n0,0.5,0.5\n', encoding='utf-8')
    assert run('classify', '--gallery', gallery, '--probe', orl_tree / 's1' / '1.pgm') == 1
    err = capsys.readouterr().err
    assert '[ERROR]' in err and 'gallery.csv' in err


def test_sweep_writes_curve(tmp_path, orl_tree):
    out = tmp_path / 'sweep.csv'
    assert run('sweep', '--data', orl_tree, '--d-values', '1,3,5', '--classifier', 'chi2_nn',
               '--out', out) == 0
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'd,accuracy,percent'
    assert [line.split(',')[0] for line in lines[1:]] == ['1', '3', '5']


def test_sweep_rejects_bad_d_values(orl_tree):
    assert run('sweep', '--data', orl_tree, '--d-values', '1,x') == 1


def test_config_file_is_overridden_by_flags(tmp_path, orl_tree):
    config = tmp_path / 'pipeline.json'
    config.write_text(json.dumps({'classifier': 'chi2_nn', 'lam': 0.5, 'grid': '1x1,2x2'}), encoding='utf-8')
    out = tmp_path / 'features.csv'
    assert run('extract', '--data', orl_tree, '--config', config, '--descriptor', 'lbp',
               '--mapping', 'u2', '--out', out) == 0
    loaded = read_feature_csv(out).config
    assert (loaded.descriptor, loaded.mapping) == ('lbp', 'u2')
    assert (loaded.classifier, loaded.lam) == ('chi2_nn', 0.5)
    assert loaded.grid == ((1, 1), (2, 2))


def test_bad_config_file_fails(tmp_path, orl_tree):
    config = tmp_path / 'pipeline.json'
    config.write_text('{"lambda": 0.1}', encoding='utf-8')
    assert run('extract', '--data', orl_tree, '--config', config, '--out', tmp_path / 'f.csv') == 1


def test_evaluate_store_and_history(orl_tree, memory_db, capsys):
    assert run('history') == 0
    assert 'Brak zapisanych' in capsys.readouterr().out

    assert run('evaluate', '--data', orl_tree, '--d', 5, '--classifier', 'chi2_nn', '--store') == 0
    assert 'historii jako #1' in capsys.readouterr().out
    assert run('history', '--limit', 5) == 0
    out = capsys.readouterr().out
    assert '#1' in out and 'first_d' in out and 'clbp_s_m+chi2_nn' in out


def test_unknown_command_exits_with_usage():
    with pytest.raises(SystemExit):
        main(['frobnicate'])


def test_benchmark_script_without_orl(tmp_path, capsys):
    from scripts.run_orl_benchmark import main as benchmark

    assert benchmark([str(tmp_path / 'missing')]) == 1
    assert '[ERROR]' in capsys.readouterr().out


@pytest.mark.orl
def test_benchmark_script_on_orl():
    from scripts.run_orl_benchmark import main as benchmark
    from utils.config import Config

    assert benchmark([str(Config.ORL_ROOT)]) == 0
