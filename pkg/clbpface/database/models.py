"""
CLBPFACE - Database Models (SQLAlchemy ORM)

Definicje tabel bazy danych:
1. EvalRun - Historia przebiegów ewaluacji (raport + echo konfiguracji)

Liczby zapisywane jako kolumny (do filtrowania), pełny raport jako JSON.
"""

from datetime import datetime

from sqlalchemy import Column, DateTime, Float, Index, Integer, String, Text
from sqlalchemy.orm import declarative_base

# Base class dla wszystkich modeli
Base = declarative_base()


# ============================================
# MODEL 1: EVAL RUN
# ============================================

class EvalRun(Base):
    """
    Jeden zapisany raport ewaluacji.

    Example:
        >>> run = EvalRun(protocol='first_d', d=5, runs=1, seed=0,
        ...               descriptor='clbp_s_m', classifier='src', mean=0.985, std=0.0)
        >>> session.add(run)
        >>> session.commit()
    """
    __tablename__ = 'eval_runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    created_at = Column(DateTime, default=datetime.utcnow, nullable=False, index=True)

    # Protokół
    protocol = Column(String(20), nullable=False, index=True)  # first_d, random_split
    d = Column(Integer, nullable=False)
    runs = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=True)

    # Pipeline
    descriptor = Column(String(20), nullable=False)  # lbp, clbp_s_m
    classifier = Column(String(20), nullable=False)  # chi2_nn, src

    # Wyniki (ułamki w [0, 1])
    mean = Column(Float, nullable=False)
    std = Column(Float, nullable=False)

    per_run_json = Column(Text, nullable=False)
    config_json = Column(Text, nullable=False)
    report_json = Column(Text, nullable=False)

    def __repr__(self):
        return (f"<EvalRun(id={self.id}, protocol={self.protocol}, d={self.d}, "
                f"{self.descriptor}+{self.classifier}, mean={self.mean})>")


Index('idx_eval_runs_pipeline', EvalRun.descriptor, EvalRun.classifier)


def get_all_tables():
    """Zwraca listę wszystkich tabel"""
    return [EvalRun.__tablename__]
