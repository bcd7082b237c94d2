"""
CSV export of run, study and consistency results
Locale-independent text with 17 significant digits
"""

import csv
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from ..analysis.consistency import ConsistencyReport
from ..analysis.convergence import StudyTable
from ..analysis.diagnostics import DiagnosticsRecord

logger = logging.getLogger(__name__)

TIMESERIES_FIELDS = [
    "step", "t", "mass", "e_kin", "e_int", "e_tot", "diss_eps", "diss_dt", "diss_up", "diss_alpha",
    "energy_residual", "entropy_prod", "rho_min", "rho_max", "theta_min", "theta_max", "picard_iters",
]

EOC_FIELDS = [
    "N", "h", "dt", "err_rho", "err_u", "err_theta", "err_gradu", "err_gradtheta", "sup_relenergy",
    "rate_rho", "rate_u", "rate_theta", "as_rho_min", "as_rho_max", "as_theta_min", "as_theta_max",
]

CONSISTENCY_FIELDS = ["N", "h", "dt", "eps", "e_rho", "e_m", "e_s_signed"]


def format_value(value: Any) -> str:
    """Integers as is, floats with 17 significant digits, nan as 'nan'"""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path: Union[str, Path], fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    """
    Write rows to a CSV file

    Args:
        path: Destination file; parent directories are created
        fieldnames: Header in column order
        rows: Dictionaries keyed by the header names

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(fieldnames), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: format_value(row[key]) for key in fieldnames})
                count += 1
    except OSError as e:
        logger.error(f"Could not write {path}: {e}")
        raise

    logger.info(f"Wrote {count} rows to {path}")
    return path


def timeseries_rows(records: Iterable[DiagnosticsRecord]) -> List[Dict[str, Any]]:
    return [record.model_dump() for record in records]


def eoc_rows(table: StudyTable) -> List[Dict[str, Any]]:
    rows = []
    for row in table.rows:
        report, window = row.report, row.window
        rows.append(
            {
                "N": row.N,
                "h": row.h,
                "dt": row.dt,
                "err_rho": report.err_rho,
                "err_u": report.err_u,
                "err_theta": report.err_theta,
                "err_gradu": report.err_gradu,
                "err_gradtheta": report.err_gradtheta,
                "sup_relenergy": report.sup_relenergy,
                "rate_rho": row.rate_rho,
                "rate_u": row.rate_u,
                "rate_theta": row.rate_theta,
                "as_rho_min": window.rho_min,
                "as_rho_max": window.rho_max,
                "as_theta_min": window.theta_min,
                "as_theta_max": window.theta_max,
            }
        )
    return rows


def consistency_row(reports: Sequence[ConsistencyReport]) -> Dict[str, Any]:
    """One level: worst |e_rho|, worst |e_m| and the smallest signed entropy defect"""
    first = reports[0]
    entropy = [report.e_s_signed for report in reports if report.e_s_signed is not None]
    return {
        "N": first.N,
        "h": first.h,
        "dt": first.dt,
        "eps": first.eps,
        "e_rho": max(abs(report.e_rho) for report in reports),
        "e_m": max(report.e_m_norm for report in reports),
        "e_s_signed": min(entropy) if entropy else math.nan,
    }
