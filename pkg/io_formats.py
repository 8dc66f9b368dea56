"""
CSV matrices and JSON manifests/reports.

CSV: header `f0,...,f{d-1}[,label]`, comma delimited, `\n` line endings,
floats in their shortest round-trip form, so read(write(X)) == X bit for bit.
JSON: fixed field order, two-space indent, trailing newline.
"""

import csv
import io
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config import MANIFEST_SCHEMA_VERSION, SOURCE_DATE_EPOCH
from privacy.errors import CalibrationError, InvalidDataError, ReleaseError
from privacy.noise import check_calibration
from privacy.types import DataMatrix
from schemas import ExperimentReport, PrivacyParams, RunManifest

PathLike = Union[str, Path]
LABEL_COLUMN = "label"


class CsvFormatError(ReleaseError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ManifestError(ReleaseError):
    """Schema drift or a manifest whose derived fields do not recompute."""


def format_float(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidDataError(f"cannot write non-finite value {value}")
    if value == 0.0:
        return "-0" if math.copysign(1.0, value) < 0 else "0"
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def render_csv(matrix: DataMatrix, labels: Optional[Sequence[int]] = None) -> str:
    if labels is not None and len(labels) != matrix.rows:
        raise InvalidDataError(f"{len(labels)} labels for {matrix.rows} rows")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_NONE)
    header = [f"f{j}" for j in range(matrix.cols)]
    if labels is not None:
        header.append(LABEL_COLUMN)
    writer.writerow(header)
    for i in range(matrix.rows):
        row = [format_float(v) for v in matrix.values[i]]
        if labels is not None:
            row.append(str(int(labels[i])))
        writer.writerow(row)
    return buffer.getvalue()


def parse_csv(text: str) -> Tuple[DataMatrix, Optional[List[int]]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CsvFormatError("empty file", 1)
    header = lines[0].split(",")
    has_labels = header[-1] == LABEL_COLUMN
    n_features = len(header) - (1 if has_labels else 0)
    expected = [f"f{j}" for j in range(n_features)]
    if n_features < 1 or header[:n_features] != expected:
        raise CsvFormatError(f"header must be f0,...,f{{d-1}}[,label], got {lines[0]!r}", 1)

    rows: List[List[float]] = []
    labels: List[int] = []
    for number, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise CsvFormatError(f"expected {len(header)} fields, got {len(cells)}", number)
        try:
            values = [float(cell) for cell in cells[:n_features]]
        except ValueError:
            raise CsvFormatError(f"non-numeric cell in {line!r}", number) from None
        if not all(math.isfinite(v) for v in values):
            raise CsvFormatError(f"non-finite value in {line!r}", number)
        rows.append(values)
        if has_labels:
            try:
                labels.append(int(cells[-1]))
            except ValueError:
                raise CsvFormatError(f"label {cells[-1]!r} is not an integer", number) from None
    if not rows:
        raise CsvFormatError("no data rows", 2)
    return DataMatrix(np.array(rows, dtype=np.float64)), (labels if has_labels else None)


def write_csv(matrix: DataMatrix, labels: Optional[Sequence[int]], path: PathLike) -> None:
    Path(path).write_text(render_csv(matrix, labels), encoding="utf-8", newline="")


def decode_csv(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CsvFormatError("not UTF-8 text", raw[: e.start].count(b"\n") + 1) from None


def read_csv(path: PathLike) -> Tuple[DataMatrix, Optional[List[int]]]:
    return parse_csv(decode_csv(Path(path).read_bytes()))


def write_table(header: Sequence[str], rows: Sequence[Sequence], path: PathLike) -> None:
    """Plain CSV table for experiment outputs (numbers rendered like matrices)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8", newline="")


# ---------- manifests ----------

def utc_timestamp() -> str:
    if SOURCE_DATE_EPOCH:
        moment = datetime.fromtimestamp(int(SOURCE_DATE_EPOCH), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def build_manifest(command: str, seed: int, params: Optional[PrivacyParams] = None, **fields) -> RunManifest:
    """Assemble a manifest; calibrated parameters are copied in field by field."""
    values = {}
    if params is not None:
        values.update(params.model_dump(exclude={"d"}))
        values["d"] = params.d
    values.update(fields)
    return RunManifest(
        schema_version=MANIFEST_SCHEMA_VERSION,
        command=command,
        timestamp=utc_timestamp(),
        seed=seed,
        **values,
    )


def manifest_params(m: RunManifest) -> Optional[PrivacyParams]:
    """Rebuild the PrivacyParams a manifest describes, or None if it has no release."""
    if m.mode is None:
        return None
    return PrivacyParams(
        mode=m.mode,
        epsilon=m.epsilon,
        k=m.k,
        d=m.d if m.mode.value == "element" else None,
        alpha=m.alpha,
        t=m.t,
        t_multiplier=m.t_multiplier,
        c=m.c,
        b=m.b,
        sigma2=m.sigma2,
        failure_bound=m.failure_bound,
        vacuous_bound=bool(m.vacuous_bound),
    )


def _dump(model) -> str:
    return json.dumps(model.model_dump(mode="json"), indent=2) + "\n"


def write_manifest(m: RunManifest, path: PathLike) -> None:
    Path(path).write_text(_dump(m), encoding="utf-8", newline="")


def read_manifest(path: PathLike) -> RunManifest:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}: not valid JSON ({e})") from None
    if raw.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise ManifestError(
            f"{path}: schema_version {raw.get('schema_version')!r}, expected {MANIFEST_SCHEMA_VERSION!r}"
        )
    try:
        manifest = RunManifest.model_validate(raw)
        params = manifest_params(manifest)
        if params is not None:
            check_calibration(params)
    except CalibrationError as e:
        raise ManifestError(f"{path}: derived fields do not match the primaries: {e}") from None
    except ValueError as e:
        raise ManifestError(f"{path}: {e}") from None
    return manifest


def write_report(report: ExperimentReport, path: PathLike) -> None:
    Path(path).write_text(_dump(report), encoding="utf-8", newline="")
