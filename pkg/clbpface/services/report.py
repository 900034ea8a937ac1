"""
CLBPFACE - Report Serialization

Raport ewaluacji jako CSV albo JSON (bajty UTF-8).

CSV (kolumny run, accuracy, percent):
    run,accuracy,percent
    1,0.985,98.50
    ...
    mean,0.98,98.00
    std,0.0075,0.75

JSON: protocol, per_run_accuracy, per_run_percent, mean, std, percent,
config (echo), timing - zawsze w tej kolejności.

Użycie:
    from services.report import emit_report

    Path('out.json').write_bytes(emit_report(report, 'json'))
"""

import io
import json
from typing import Any, Dict, List

import pandas as pd

from services.evaluation import EvalReport

REPORT_FORMATS = ('csv', 'json')


def percent(fraction: float) -> str:
    """Ułamek -> procent z dwoma miejscami po przecinku."""
    return f"{100.0 * fraction:.2f}"


def _rows(report: EvalReport) -> List[Dict[str, Any]]:
    rows = [
        {'run': index, 'accuracy': accuracy, 'percent': percent(accuracy)}
        for index, accuracy in enumerate(report.per_run_accuracy, start=1)
    ]
    rows.append({'run': 'mean', 'accuracy': report.mean, 'percent': percent(report.mean)})
    rows.append({'run': 'std', 'accuracy': report.std, 'percent': percent(report.std)})
    return rows


def report_to_dict(report: EvalReport) -> Dict[str, Any]:
    return {
        'protocol': dict(report.protocol),
        'per_run_accuracy': list(report.per_run_accuracy),
        'per_run_percent': [percent(a) for a in report.per_run_accuracy],
        'mean': report.mean,
        'std': report.std,
        'percent': {'mean': percent(report.mean), 'std': percent(report.std)},
        'config': dict(sorted(report.config_echo.items())),
        'timing': dict(sorted(report.timing.items())),
    }


def report_from_dict(data: Dict[str, Any]) -> EvalReport:
    return EvalReport(
        per_run_accuracy=tuple(data['per_run_accuracy']),
        mean=data['mean'],
        std=data['std'],
        protocol=data['protocol'],
        config_echo=data['config'],
        timing=data.get('timing', {}),
    )


def emit_report(report: EvalReport, fmt: str = 'json') -> bytes:
    """
    Serializuje raport.

    Raises:
        ValueError: nieznany format, raport bez przebiegów
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"Nieznany format raportu '{fmt}' (dostępne: {REPORT_FORMATS})")
    if not report.per_run_accuracy:
        raise ValueError("Raport musi zawierać co najmniej jeden przebieg")

    if fmt == 'json':
        return (json.dumps(report_to_dict(report), indent=2) + '\n').encode('utf-8')

    buffer = io.StringIO()
    pd.DataFrame(_rows(report), columns=['run', 'accuracy', 'percent']).to_csv(
        buffer, index=False, lineterminator='\n'
    )
    return buffer.getvalue().encode('utf-8')


def emit_sweep(reports: List[EvalReport]) -> bytes:
    """Krzywa first_d jako CSV: jeden wiersz na d."""
    if not reports:
        raise ValueError("Brak raportów do zapisania")
    frame = pd.DataFrame([
        {'d': r.protocol['d'], 'accuracy': r.mean, 'percent': percent(r.mean)}
        for r in reports
    ])
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue().encode('utf-8')
