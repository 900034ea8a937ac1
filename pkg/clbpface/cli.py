"""
CLBPFACE - Command Line Interface

Rozpoznawanie twarzy: deskryptory CLBP_S_M / LBP + klasyfikator SRC / chi2-NN,
protokoły oceny ORL.

Usage:
    py cli.py extract --data orl_faces --descriptor clbp_s_m --p 8 --r 1 --mapping riu2 \\
        --grid 1x1,2x2,4x4 --out features.csv
    py cli.py evaluate --data orl_faces --protocol first_d --d 5 --classifier src \\
        --lambda 0.01 --report out.json
    py cli.py evaluate --protocol random --d 5 --runs 10 --seed 42 --store
    py cli.py sweep --d-values 1,2,3,4,5 --out sweep.csv
    py cli.py classify --gallery features.csv --probe img.pgm
    py cli.py history --limit 10
    py cli.py synth --out synthetic_faces --classes 4 --per-class 10

Flagi nadpisują wartości z pliku --config (JSON z tymi samymi kluczami).
Kod wyjścia 0 przy sukcesie, 1 przy każdym błędzie.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from sqlalchemy.exc import SQLAlchemyError

from collectors.orl_collector import load_orl
from collectors.pgm_reader import read_pgm_file
from collectors.synthetic import export_orl_layout, synth_dataset
from descriptors.feature_cache import read_feature_csv, write_feature_csv
from descriptors.features import extract_feature
from services.classifier import build_dictionary, nn_classify, src_classify
from services.evaluation import Protocol, extract_dataset_features, run_protocol, run_sweep
from services.l1_solver import SolverParams
from services.report import emit_report, emit_sweep
from utils.config import Config, PipelineConfig, setup_logging
from utils.constants import CLASSIFIERS, DESCRIPTORS, MAPPINGS, ORL_DOWNLOAD_HINT, PROTOCOLS

logger = logging.getLogger(__name__)


# ============================================
# ARGUMENTS
# ============================================

def _pipeline_options() -> argparse.ArgumentParser:
    """Flagi wspólne dla poleceń liczących cechy / klasyfikujących."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', type=Path, help='Plik JSON z konfiguracją pipeline\'u')
    parent.add_argument('--descriptor', choices=DESCRIPTORS)
    parent.add_argument('--p', dest='P', type=int, help='Liczba sąsiadów P')
    parent.add_argument('--r', dest='R', type=float, help='Promień R')
    parent.add_argument('--mapping', choices=MAPPINGS)
    parent.add_argument('--grid', help='Poziomy siatki, np. 1x1,2x2,4x4')
    parent.add_argument('--include-c', dest='include_c', action='store_true', default=None,
                        help='Dołącz histogramy CLBP_C')
    parent.add_argument('--classifier', choices=CLASSIFIERS)
    parent.add_argument('--lambda', dest='lam', type=float, help='Waga kary l1 (SRC)')
    parent.add_argument('--max-iter', dest='max_iter', type=int)
    parent.add_argument('--tol', type=float)
    return parent


def _data_option(parser: argparse.ArgumentParser):
    parser.add_argument('--data', type=Path, default=None,
                        help=f'Katalog bazy w układzie ORL (domyślnie ORL_ROOT={Config.ORL_ROOT})')
    parser.add_argument('--cache', type=Path, default=None, help='Plik CSV cache cech')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='clbpface', description='CLBP_S_M + SRC face recognition')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING, ...')
    sub = parser.add_subparsers(dest='command', required=True)
    pipeline = _pipeline_options()

    extract = sub.add_parser('extract', parents=[pipeline], help='Ekstrakcja cech do CSV')
    extract.add_argument('--data', type=Path, default=None)
    extract.add_argument('--out', type=Path, required=True)

    evaluate = sub.add_parser('evaluate', parents=[pipeline], help='Ocena protokołem ORL')
    _data_option(evaluate)
    evaluate.add_argument('--protocol', choices=PROTOCOLS + ('random',), default='first_d')
    evaluate.add_argument('--d', type=int, default=5)
    evaluate.add_argument('--runs', type=int, default=10)
    evaluate.add_argument('--seed', type=int, default=None)
    evaluate.add_argument('--report', type=Path, help='Plik raportu (.json albo .csv)')
    evaluate.add_argument('--format', choices=('csv', 'json'), default=None,
                          help='Format raportu (domyślnie wg rozszerzenia)')
    evaluate.add_argument('--store', action='store_true', help='Zapisz raport w bazie historii')

    sweep = sub.add_parser('sweep', parents=[pipeline], help='Krzywa first_d dla kolejnych d')
    _data_option(sweep)
    sweep.add_argument('--d-values', default='1,2,3,4,5')
    sweep.add_argument('--out', type=Path, help='Plik CSV (domyślnie stdout)')

    classify = sub.add_parser('classify', parents=[pipeline], help='Klasyfikacja jednego obrazu')
    classify.add_argument('--gallery', type=Path, required=True, help='CSV z cechami galerii')
    classify.add_argument('--probe', type=Path, required=True, help='Obraz PGM')

    history = sub.add_parser('history', help='Zapisane przebiegi ewaluacji')
    history.add_argument('--limit', type=int, default=20)

    synth = sub.add_parser('synth', help='Syntetyczny zbiór w układzie ORL')
    synth.add_argument('--out', type=Path, required=True)
    synth.add_argument('--classes', type=int, default=4)
    synth.add_argument('--per-class', dest='per_class', type=int, default=10)
    synth.add_argument('--side', type=int, default=32)
    synth.add_argument('--seed', type=int, default=None)
    return parser


def pipeline_config(args: argparse.Namespace, base: Optional[PipelineConfig] = None) -> PipelineConfig:
    """Plik --config (albo base / domyślne), potem flagi podane jawnie."""
    if args.config is not None:
        base = PipelineConfig.from_json_file(args.config)
    base = base or PipelineConfig()
    return base.merged(
        descriptor=args.descriptor, P=args.P, R=args.R, mapping=args.mapping, grid=args.grid,
        include_c=args.include_c, classifier=args.classifier, lam=args.lam,
        max_iter=args.max_iter, tol=args.tol,
    )


def _load_data(path: Optional[Path]):
    root = path or Config.ORL_ROOT
    if not root.exists():
        raise FileNotFoundError(f"{root} nie istnieje. {ORL_DOWNLOAD_HINT}")
    return load_orl(root)


# ============================================
# COMMANDS
# ============================================

def cmd_extract(args) -> int:
    config = pipeline_config(args)
    dataset = _load_data(args.data)
    table = extract_dataset_features(dataset, config)
    write_feature_csv(args.out, table)
    print(f"[OK] {table.features.shape[0]} wektorów x {table.features.shape[1]} -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    config = pipeline_config(args)
    seed = Config.DEFAULT_SEED if args.seed is None else args.seed
    protocol = Protocol(args.protocol, d=args.d, runs=args.runs, seed=seed)
    dataset = _load_data(args.data)

    report = run_protocol(dataset, protocol, config, cache_path=args.cache)
    print(f"[OK] {protocol.kind.value} d={protocol.d} runs={protocol.runs} seed={protocol.seed}: "
          f"mean {100 * report.mean:.2f}% std {100 * report.std:.2f}")

    if args.report is not None:
        fmt = args.format or ('csv' if args.report.suffix.lower() == '.csv' else 'json')
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_bytes(emit_report(report, fmt))
        print(f"[OK] Raport ({fmt}) -> {args.report}")
    if args.store:
        from database.db import save_report
        print(f"[OK] Zapisano w historii jako #{save_report(report)}")
    return 0


def cmd_sweep(args) -> int:
    config = pipeline_config(args)
    try:
        d_values = [int(token) for token in args.d_values.split(',') if token.strip()]
    except ValueError:
        raise ValueError(f"Niepoprawna lista --d-values: '{args.d_values}'")
    dataset = _load_data(args.data)

    payload = emit_sweep(run_sweep(dataset, d_values, config, cache_path=args.cache))
    if args.out is None:
        sys.stdout.write(payload.decode('utf-8'))
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(payload)
        print(f"[OK] Krzywa first_d -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    table = read_feature_csv(args.gallery)
    # Deskryptor zawsze z galerii; flagi mogą zmienić tylko klasyfikator/solver
    config = pipeline_config(args, base=table.config)
    if config.descriptor_hash() != table.config.descriptor_hash():
        raise ValueError("Flagi deskryptora różnią się od konfiguracji galerii - przelicz galerię (extract)")

    probe = extract_feature(read_pgm_file(args.probe), table.config).values
    if probe.size != table.features.shape[1]:
        raise ValueError(f"Cechy próbki ({probe.size}) nie pasują do galerii ({table.features.shape[1]})")

    if config.classifier == 'chi2_nn':
        label = nn_classify(table.features, table.labels, probe)
        print(f"[OK] predicted={label}")
        return 0

    dictionary = build_dictionary(table.features, table.labels)
    result = src_classify(dictionary, probe, SolverParams(lam=config.lam, max_iter=config.max_iter, tol=config.tol))
    print(f"[OK] predicted={result.predicted} sci={result.sci:.4f} "
          f"iterations={result.solution.iterations} converged={result.solution.converged}")
    for index in np.argsort(result.residuals, kind='stable')[:5]:
        print(f"   class {int(result.classes[index])}: residual {result.residuals[index]:.6f}")
    return 0


def cmd_history(args) -> int:
    from database.db import list_runs

    runs = list_runs(limit=args.limit)
    if not runs:
        print("[INFO] Brak zapisanych przebiegów")
        return 0
    for run in runs:
        print(f"#{run.id:<4} {run.created_at:%Y-%m-%d %H:%M}  {run.protocol:<12} d={run.d} runs={run.runs:<3} "
              f"{run.descriptor}+{run.classifier:<8} {100 * run.mean:6.2f}% +/- {100 * run.std:.2f}")
    return 0


def cmd_synth(args) -> int:
    seed = Config.DEFAULT_SEED if args.seed is None else args.seed
    dataset = synth_dataset(args.classes, args.per_class, args.side, seed)
    export_orl_layout(dataset, args.out)
    print(f"[OK] {len(dataset)} obrazów ({dataset.class_count} klas, seed={seed}) -> {args.out}")
    return 0


COMMANDS = {
    'extract': cmd_extract,
    'evaluate': cmd_evaluate,
    'sweep': cmd_sweep,
    'classify': cmd_classify,
    'history': cmd_history,
    'synth': cmd_synth,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        setup_logging(args.log_level)
        return COMMANDS[args.command](args)
    except (ValueError, OSError, SQLAlchemyError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
