"""JSON and CSV output with 17 significant digits."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping

from .experiments import ProtocolResult

SWEEP_HEADER = ("axis_value", "dE", "dt", "product", "analytic_product", "bound_ratio")


def fmt(value) -> str:
    """Scientific notation with 17 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return f"{value:.16e}"
    return str(value)


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt(value) if math.isfinite(value) else "null"
    if isinstance(value, int):
        return str(value)
    return json.dumps(value)


def to_json(record: Mapping) -> str:
    """Flat JSON object; floats keep 17 significant digits."""
    body = ",\n".join(f"  {json.dumps(k)}: {_json_value(v)}" for k, v in record.items())
    return "{\n" + body + "\n}\n"


def result_json(result: ProtocolResult) -> str:
    return to_json(result.record())


def result_csv(result: ProtocolResult) -> str:
    record = result.record()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.keys())
    writer.writerow(["" if v is None else fmt(v) for v in record.values()])
    return buf.getvalue()


def sweep_csv(rows: Iterable[tuple[float, ProtocolResult]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for axis_value, r in rows:
        writer.writerow(
            [fmt(float(axis_value))]
            + [fmt(x) for x in (r.dE_est, r.dt_est, r.product, r.analytic_product, r.bound_ratio)]
        )
    return buf.getvalue()


def summary_line(result: ProtocolResult) -> str:
    return (
        f"{result.protocol}: dE*dt = {result.product:.6e} J s "
        f"(analytic {result.analytic_product:.6e}), bound_ratio = {result.bound_ratio:.6g}, "
        f"N = {result.n_samples}"
    )
