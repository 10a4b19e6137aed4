from sqlalchemy import (
    create_engine,
    select,
    Boolean,
    Column,
    Integer,
    String,
    Text,
    UniqueConstraint,
)
from sqlalchemy.orm import declarative_base
from sqlalchemy.exc import IntegrityError
from pathlib import Path
from typing import List
import json
import logging
import pandas as pd

from .models import CheckResult

Base = declarative_base()

DEFAULT_DB_PATH = "cantorval.db"


class Report(Base):
    __tablename__ = "reports"
    id = Column(Integer, primary_key=True)
    verb = Column(String, nullable=False)
    params_key = Column(String, nullable=False)
    payload = Column(Text, nullable=False)
    __table_args__ = (UniqueConstraint("verb", "params_key", name="_verb_params_uc"),)


class BoxCount(Base):
    __tablename__ = "box_counts"
    id = Column(Integer, primary_key=True)
    m = Column(Integer, nullable=False)
    k = Column(Integer, nullable=False)
    epsilon = Column(String, nullable=False)
    count = Column(Integer, nullable=False)
    __table_args__ = (UniqueConstraint("m", "k", name="_m_k_uc"),)


class VerificationResult(Base):
    __tablename__ = "verification_results"
    id = Column(Integer, primary_key=True)
    m = Column(Integer, nullable=False)
    name = Column(String, nullable=False)
    suite = Column(String, nullable=False)
    reference = Column(String, nullable=False)
    statement = Column(Text, nullable=False)
    passed = Column(Boolean, nullable=False)
    detail = Column(Text, nullable=True)
    __table_args__ = (UniqueConstraint("m", "name", name="_m_name_uc"),)


def get_engine(db_path: str = DEFAULT_DB_PATH):
    """Engine bound to the SQLite ledger file at `db_path`."""
    return create_engine(f"sqlite:///{db_path}", echo=False, future=True)


def init_db(db_path: str = DEFAULT_DB_PATH):
    """
    Open the run ledger, creating its directory and the three tables on first use.

    Args:
            db_path (str): Ledger file; its parent directory is created if missing.

    Returns:
            Engine: engine with reports, box_counts and verification_results in place.
    """
    Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    engine = get_engine(db_path)
    Base.metadata.create_all(engine)
    logging.debug(f"Run ledger ready at {db_path}")
    return engine


def params_key(params: dict) -> str:
    return json.dumps(params, sort_keys=True, default=str)


def _upsert(session, model, lookup: dict, values: dict):
    existing = session.execute(select(model).filter_by(**lookup)).scalar_one_or_none()
    row = model(**lookup, **values)
    if existing is not None:
        row.id = existing.id
    try:
        session.merge(row)
        session.commit()
    except IntegrityError:
        session.rollback()


def save_report(session, verb: str, params: dict, payload: dict):
    """
    Save a command's JSON report, replacing an earlier run with the same parameters.

    Args:
            session: SQLAlchemy session.
            verb (str): CLI verb that produced the report.
            params (dict): Command parameters; their canonical JSON is the key.
            payload (dict): Report body.
    """
    _upsert(session, Report, {"verb": verb, "params_key": params_key(params)},
            {"payload": json.dumps(payload, sort_keys=True, default=str)})


def save_box_counts(session, m: int, df: pd.DataFrame):
    """
    Save a box-count table to the database.

    Args:
            session: SQLAlchemy session.
            m (int): Family parameter.
            df (pd.DataFrame): Columns k, epsilon, count.
    """
    for _, row in df.iterrows():
        _upsert(session, BoxCount, {"m": m, "k": int(row["k"])},
                {"epsilon": row["epsilon"], "count": int(row["count"])})


def save_verification_results(session, m: int, results: List[CheckResult]):
    for r in results:
        _upsert(
            session,
            VerificationResult,
            {"m": m, "name": r.name},
            {
                "suite": r.suite,
                "reference": r.reference,
                "statement": r.statement,
                "passed": r.passed,
                "detail": r.detail,
            },
        )

