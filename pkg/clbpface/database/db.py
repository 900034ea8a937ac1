"""
CLBPFACE - Database Connection & Run History

Ten moduł zarządza bazą historii ewaluacji (SQLite):
- Tworzenie engine SQLAlchemy (ścieżka z Config.DATABASE_PATH)
- Tworzenie sesji
- Inicjalizacja tabel
- Zapis i odczyt raportów (EvalRun)

Użycie:
    from database.db import init_database, save_report, list_runs

    init_database()
    run_id = save_report(report)
    for run in list_runs(limit=10):
        print(run.id, run.mean)
"""

import json
import logging
from typing import List, Optional

from sqlalchemy import create_engine, event, inspect
from sqlalchemy.orm import scoped_session, sessionmaker
from sqlalchemy.pool import StaticPool

from database.models import Base, EvalRun
from services.evaluation import EvalReport
from services.report import report_to_dict
from utils.config import Config

logger = logging.getLogger(__name__)


# ============================================
# DATABASE ENGINE
# ============================================

def get_database_url() -> str:
    """
    Zwraca URL połączenia z bazą danych.

    Example:
        >>> get_database_url()
        'sqlite:////home/user/clbpface/clbpface.db'
    """
    return f'sqlite:///{Config.DATABASE_PATH}'


def create_database_engine(url: Optional[str] = None):
    """
    Tworzy SQLAlchemy engine dla SQLite (StaticPool, WAL dla plików).

    Args:
        url: nadpisuje URL z konfiguracji (np. 'sqlite://' w testach)
    """
    url = url or get_database_url()
    engine = create_engine(
        url,
        echo=False,
        poolclass=StaticPool,
        connect_args={'check_same_thread': False}
    )

    @event.listens_for(engine, "connect")
    def set_sqlite_pragma(dbapi_conn, connection_record):
        cursor = dbapi_conn.cursor()
        if url != 'sqlite://':
            cursor.execute("PRAGMA journal_mode=WAL")
        cursor.execute("PRAGMA foreign_keys=ON")
        cursor.close()

    return engine


# Global engine (singleton pattern)
_engine = None
_SessionFactory = None


def configure(url: Optional[str] = None):
    """
    Podmienia globalny engine (testy przekazują 'sqlite://').

    url=None wraca do leniwego engine z Config.DATABASE_PATH.
    """
    global _engine, _SessionFactory
    if _SessionFactory is not None:
        _SessionFactory.remove()
    if _engine is not None:
        _engine.dispose()
    _engine = create_database_engine(url) if url else None
    _SessionFactory = None


def get_engine():
    global _engine
    if _engine is None:
        _engine = create_database_engine()
    return _engine


def get_session_factory():
    global _SessionFactory
    if _SessionFactory is None:
        _SessionFactory = scoped_session(sessionmaker(bind=get_engine()))
    return _SessionFactory


def get_session():
    """
    Tworzy nową sesję database.

    WAŻNE: Pamiętaj zamknąć sesję po użyciu (albo użyj DatabaseSession).
    """
    return get_session_factory()()


# ============================================
# DATABASE INITIALIZATION
# ============================================

def init_database(drop_existing: bool = False) -> List[str]:
    """
    Tworzy tabele (idempotentne).

    Args:
        drop_existing: Jeśli True, usuwa istniejące tabele (UWAGA: DESTRUCTIVE!)

    Returns:
        nazwy tabel w bazie
    """
    engine = get_engine()
    if drop_existing:
        logger.warning("[DB] Usuwam wszystkie tabele")
        Base.metadata.drop_all(engine)
    Base.metadata.create_all(engine)
    tables = inspect(engine).get_table_names()
    logger.debug(f"[DB] Tabele: {tables}")
    return tables


# ============================================
# CONTEXT MANAGER (zalecane użycie)
# ============================================

class DatabaseSession:
    """
    Context manager dla sesji database - automatyczne zamykanie.

    Example:
        >>> with DatabaseSession() as session:
        >>>     run = session.query(EvalRun).first()
    """

    def __enter__(self):
        self.session = get_session()
        return self.session

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            self.session.rollback()
        self.session.close()


# ============================================
# RUN HISTORY
# ============================================

def save_report(report: EvalReport) -> int:
    """Zapisuje raport i zwraca id wiersza."""
    init_database()
    payload = report_to_dict(report)
    config = report.config_echo
    row = EvalRun(
        protocol=report.protocol['kind'],
        d=report.protocol['d'],
        runs=report.protocol['runs'],
        seed=report.protocol.get('seed'),
        descriptor=config['descriptor'],
        classifier=config['classifier'],
        mean=report.mean,
        std=report.std,
        per_run_json=json.dumps(list(report.per_run_accuracy)),
        config_json=json.dumps(config, sort_keys=True),
        report_json=json.dumps(payload),
    )
    with DatabaseSession() as session:
        session.add(row)
        session.commit()
        run_id = row.id
    logger.info(f"[DB] Zapisano przebieg #{run_id}")
    return run_id


def list_runs(limit: int = 20) -> List[EvalRun]:
    """Ostatnie przebiegi (najnowsze pierwsze)."""
    init_database()
    with DatabaseSession() as session:
        rows = (session.query(EvalRun)
                .order_by(EvalRun.created_at.desc(), EvalRun.id.desc())
                .limit(limit)
                .all())
        session.expunge_all()
    return rows


if __name__ == "__main__":
    print("=" * 60)
    print("CLBPFACE - Database Initialization")
    print("=" * 60)
    for table in init_database():
        print(f"  - {table}")
    print(f"\n[OK] Database is ready at: {Config.DATABASE_PATH}")
    print("=" * 60)
