"""JSON and CSV emission for experiment reports.

Every JSON document is an envelope
``{"kind", "version", "config_hash", "seed", "reports": [...]}`` validated
against the schema for its kind before it is written.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from typing import Any, Iterable

import jsonschema

from . import __version__

_num = {"type": "number"}
_int = {"type": "integer"}
_str = {"type": "string"}
_bool = {"type": "boolean"}
_nullable_num = {"type": ["number", "null"]}
_ratio = {"type": "string", "pattern": r"^-?\d+/\d+$"}


def _obj(props: dict, required: Iterable[str] | None = None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props if required is None else required),
        "additionalProperties": False,
    }


REPORT_SCHEMAS: dict[str, dict] = {
    "bias": _obj(
        {
            "p": _int,
            "n": _int,
            "source_x": _str,
            "source_y": _str,
            "size_x": _int,
            "size_y": _int,
            "admissible": _bool,
            "prob_one": _str,
            "sd": {"type": "number", "minimum": 0, "maximum": 0.5},
            "sd_exact": _str,
            "max_exp_sum": _num,
            "argmax_lambda": _int,
            "coefficient_sum": _num,
            "chain_bound": _num,
            "chain_holds": _bool,
            "wall_time": _num,
        }
    ),
    "expsum": _obj(
        {
            "p": _int,
            "n": _int,
            "form": {"enum": ["bilinear", "extractor"]},
            "size_a": _int,
            "size_b": _int,
            "lhs": _num,
            "argmax_lambda": _int,
            "rhs_bound": _num,
            "energy_a": _int,
            "energy_b": _int,
            "indicator": _bool,
        }
    ),
    "energy": _obj(
        {
            "descriptor": _str,
            "p": _int,
            "n": _int,
            "size": _int,
            "energy": _int,
            "exponent": _nullable_num,
            "method": {"enum": ["brute", "spectral"]},
        }
    ),
    "scan": _obj(
        {
            "p": _int,
            "d": _int,
            "family": {"enum": ["random", "cartesian", "line-biased"]},
            "size": _int,
            "trial": _int,
            "energy": _int,
            "fitted_exponent": _nullable_num,
            "seed": _int,
        }
    ),
    "rate": _obj(
        {
            "n": _int,
            "d": _int,
            "alpha": _ratio,
            "rate": _ratio,
            "formula": _str,
            "alternative_formula": _str,
            "alternative_value": {"type": ["string", "null"]},
            "set_size_exponent": _str,
        }
    ),
    "fourier": _obj({"p": _int, "coefficient_sum": _num, "log_p": _num, "ratio": _num}),
    "checklemma": _obj(
        {
            "p": _int,
            "n": _int,
            "weights": {"enum": ["indicator", "disc"]},
            "trials": _int,
            "violations": _int,
            "max_ratio": _num,
        }
    ),
}


def envelope_schema(kind: str) -> dict:
    return _obj(
        {
            "kind": {"const": kind},
            "version": _str,
            "config_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
            "seed": {"type": ["integer", "null"]},
            "summary": {"type": "object"},
            "reports": {"type": "array", "items": REPORT_SCHEMAS[kind]},
        },
        required=["kind", "version", "config_hash", "seed", "reports"],
    )


def _clean(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def as_record(report) -> dict:
    if dataclasses.is_dataclass(report):
        report = dataclasses.asdict(report)
    return _clean(dict(report))


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def build_document(kind: str, reports: list, config: dict, seed: int | None, summary: dict | None = None) -> dict:
    doc = {
        "kind": kind,
        "version": __version__,
        "config_hash": config_hash(config),
        "seed": seed,
        "reports": [as_record(r) for r in reports],
    }
    if summary is not None:
        doc["summary"] = _clean(summary)
    validate_document(doc)
    return doc


def validate_document(doc: dict) -> None:
    jsonschema.validate(doc, envelope_schema(doc["kind"]))


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    if v is None:
        return ""
    return str(v)


def dumps_csv(header: list[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


SWEEP_HEADER = ["p", "n", "|A|", "|B|", "metric", "value", "seed", "millis"]
SCAN_HEADER = ["p", "d", "family", "size", "trial", "energy", "fitted_exponent", "seed"]


def scan_csv(scan) -> str:
    return dumps_csv(SCAN_HEADER, (dataclasses.astuple(r) for r in scan.rows))
