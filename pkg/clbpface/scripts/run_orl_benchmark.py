"""
CLBPFACE - ORL Benchmark Script

Uruchamia eksperymenty referencyjne na bazie ORL i porównuje wyniki z progami
z utils.constants.BENCHMARK_TARGETS:

1. CLBP_S_M + SRC, first_d, d=5
2. CLBP_S_M + SRC, 10 losowych podziałów, d=5 (średnia i odchylenie)
3. LBP u2 + chi2 NN, 10 losowych podziałów, d=5
4. Trend: first_d d=5 > first_d d=1

Usage:
    py run_orl_benchmark.py [orl_root] [--store]

Kod wyjścia 1, gdy którykolwiek próg nie jest spełniony.
"""

import sys
from datetime import datetime
from pathlib import Path

# Add parent directories to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from collectors.orl_collector import load_orl
from services.evaluation import Protocol, ProtocolKind, run_protocol, run_sweep
from utils.config import Config, PipelineConfig, setup_logging
from utils.constants import BENCHMARK_TARGETS, ORL_DOWNLOAD_HINT


def _check(name: str, value: float, passed: bool, results: list):
    status = "[OK]  " if passed else "[FAIL]"
    print(f"   {status} {name}: {value:.4f}")
    results.append(passed)


def main(argv=None):
    """ORL benchmark"""
    argv = sys.argv[1:] if argv is None else argv
    store = '--store' in argv
    paths = [a for a in argv if not a.startswith('--')]
    root = Path(paths[0]) if paths else Config.ORL_ROOT

    print(f"""
===============================================================
         ORL BENCHMARK - {datetime.now().strftime('%Y-%m-%d %H:%M')}
===============================================================
    """)
    setup_logging('WARNING')

    if not root.exists():
        print(f"[ERROR] {root} nie istnieje. {ORL_DOWNLOAD_HINT}")
        return 1

    try:
        dataset = load_orl(root)
        proposed = PipelineConfig()
        baseline = PipelineConfig(descriptor='lbp', mapping='u2', grid=((1, 1), (2, 2), (4, 4)),
                                  classifier='chi2_nn')
        seed = Config.DEFAULT_SEED
        # osobny cache dla każdej kopii bazy (odcisk zbioru w nazwie)
        tag = dataset.fingerprint()[:12]
        proposed_cache = Config.CACHE_DIR / f'orl_{tag}_clbp_s_m.csv'
        results = []
        reports = []

        print("[INFO] CLBP_S_M + SRC, first_d d=1 i d=5...")
        first_1, first_5 = run_sweep(dataset, [1, 5], proposed, cache_path=proposed_cache)
        reports += [first_1, first_5]
        _check('first_d d=5', first_5.mean, first_5.mean >= BENCHMARK_TARGETS['first_d_min_accuracy'], results)
        _check('trend d=5 - d=1', first_5.mean - first_1.mean, first_5.mean > first_1.mean, results)

        print(f"[INFO] CLBP_S_M + SRC, 10 losowych podziałów (seed={seed})...")
        random_report = run_protocol(dataset, Protocol(ProtocolKind.RANDOM_SPLIT, d=5, runs=10, seed=seed), proposed,
                                     cache_path=proposed_cache)
        reports.append(random_report)
        _check('random mean', random_report.mean, random_report.mean >= BENCHMARK_TARGETS['random_min_mean'], results)
        _check('random std', random_report.std, random_report.std <= BENCHMARK_TARGETS['random_max_std'], results)

        print(f"[INFO] LBP u2 + chi2 NN, 10 losowych podziałów (seed={seed})...")
        lbp_report = run_protocol(dataset, Protocol(ProtocolKind.RANDOM_SPLIT, d=5, runs=10, seed=seed), baseline,
                                  cache_path=Config.CACHE_DIR / f'orl_{tag}_lbp_u2.csv')
        reports.append(lbp_report)
        _check('LBP baseline mean', lbp_report.mean, lbp_report.mean >= BENCHMARK_TARGETS['lbp_baseline_min_mean'],
               results)

        if store:
            from database.db import save_report
            ids = [save_report(report) for report in reports]
            print(f"\n[OK] Zapisano przebiegi: {ids}")

        failed = results.count(False)
        if failed:
            print(f"\n[ERROR] {failed} z {len(results)} progów niespełnionych")
            return 1
        print(f"\n[OK] Wszystkie {len(results)} progi spełnione")
        return 0

    except Exception as e:
        print(f"\n[ERROR] Benchmark failed: {e}")
        return 1


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
