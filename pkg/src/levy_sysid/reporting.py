# levy_sysid/reporting.py
"""
Report emission: ``report.json`` (full structured report), ``estimates.csv``
(one row per successful replication) and, for Monte Carlo studies,
``timing.json`` with the wall-clock data kept out of the main report.
"""
import logging
import math
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from levy_sysid.models.experiment_config import ReportFormat
from levy_sysid.models.mc_report import McReport
from levy_sysid.models.pipeline_result import PipelineResult
from levy_sysid.storage.base import ReportStoreInterface, ReportStoreProvider

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
ESTIMATES_CSV = "estimates.csv"
TIMING_JSON = "timing.json"

Report = Union[McReport, PipelineResult]


def format_number(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(value), ".17g")


def json_safe(data: Any) -> Any:
    """Replace non-finite floats with None so the document is strict JSON."""
    if isinstance(data, float):
        return data if math.isfinite(data) else None
    if isinstance(data, dict):
        return {key: json_safe(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [json_safe(value) for value in data]
    return data


def _estimate_columns(report: Report) -> Tuple[List[str], List[str], bool]:
    if isinstance(report, McReport):
        theta_labels, eta_labels = report.theta_labels, report.eta_labels
        plain = any(run.theta_plain is not None for run in report.successful_runs)
    else:
        theta_labels, eta_labels = report.pe.system.labels(), report.ecf.noise.labels()
        plain = report.stage3_plain is not None
    return theta_labels, eta_labels, plain


def estimate_header(report: Report) -> List[str]:
    """seed, theta_pe_*, eta_*, theta_s3_* and, with the baseline, theta_plain_*."""
    theta_labels, eta_labels, plain = _estimate_columns(report)
    header = ["seed"]
    header += [f"theta_pe_{label}" for label in theta_labels]
    header += [f"eta_{label}" for label in eta_labels]
    header += [f"theta_s3_{label}" for label in theta_labels]
    if plain:
        header += [f"theta_plain_{label}" for label in theta_labels]
    return header


def estimate_rows(report: Report) -> List[List[str]]:
    _, _, plain = _estimate_columns(report)

    def row(seed: int, *blocks: Optional[Iterable[float]]) -> List[str]:
        cells = [str(seed)]
        for block in blocks:
            if block is not None:
                cells += [format_number(v) for v in block]
        return cells

    if isinstance(report, PipelineResult):
        return [
            row(
                report.seed,
                report.pe.theta_hat,
                report.ecf.eta_hat,
                report.stage3.theta_hat2,
                report.stage3_plain.theta_hat2 if plain else None,
            )
        ]
    return [
        row(run.seed, run.theta_pe, run.eta, run.theta_s3, run.theta_plain if plain else None)
        for run in report.successful_runs
    ]


def report_document(report: Report, config: Optional[dict] = None) -> dict:
    if isinstance(report, McReport):
        return json_safe(report.to_document())
    return json_safe(report.to_document(config))


async def emit_report(
    report: Report,
    formats: Sequence[Union[ReportFormat, str]] = (ReportFormat.JSON, ReportFormat.CSV),
    store: Optional[ReportStoreInterface] = None,
    config: Optional[dict] = None,
) -> List[str]:
    """
    Write ``report`` in the requested formats to ``store`` (default: the
    provider's store) and return the names written.

    ``config`` is echoed into the JSON of a single pipeline result; Monte
    Carlo reports carry their own config echo.

    Raises:
        ReportStorageError: the store cannot persist a document
    """
    store = store or ReportStoreProvider.get_store()
    wanted = {ReportFormat(f) for f in formats}
    written: List[str] = []

    if ReportFormat.JSON in wanted:
        await store.save_json(REPORT_JSON, report_document(report, config))
        written.append(REPORT_JSON)
        if isinstance(report, McReport):
            await store.save_json(TIMING_JSON, json_safe(report.timing_document()))
            written.append(TIMING_JSON)

    if ReportFormat.CSV in wanted:
        await store.save_csv(ESTIMATES_CSV, estimate_header(report), estimate_rows(report))
        written.append(ESTIMATES_CSV)

    logger.info(f"Emitted {', '.join(written) or 'nothing'}")
    return written
