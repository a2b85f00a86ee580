"""Machine-readable report trees: audits, censuses, probability tables.

JSON is the carrier.  Floats survive a round trip exactly (repr-based
encoding), so parse(serialize(x)) == x for every report object.
"""

from __future__ import annotations

import json

from .audit import AuditReport, DimensionCensus, EvidenceRow
from .correlations import ProbabilityTable, TableRow
from .network import EvaluationResult, NormalizationReport


def report_to_dict(report: AuditReport) -> dict:
    return {
        "kind": "audit",
        "postulate": report.postulate,
        "subject": report.subject,
        "verdict": report.verdict,
        "seed": report.seed,
        "evidence": [
            {"check": e.check, "value": e.value, "tolerance": e.tolerance}
            for e in report.evidence
        ],
        "notes": list(report.notes),
    }


def report_from_dict(data: dict) -> AuditReport:
    return AuditReport(
        postulate=data["postulate"],
        subject=data["subject"],
        verdict=data["verdict"],
        seed=data["seed"],
        evidence=tuple(
            EvidenceRow(e["check"], e["value"], e["tolerance"])
            for e in data["evidence"]
        ),
        notes=tuple(data.get("notes", [])),
    )


def census_to_dict(census: DimensionCensus) -> dict:
    return {
        "kind": "census",
        "d_a": census.d_a,
        "d_b": census.d_b,
        "d_ab": census.d_ab,
        "c_ab": census.c_ab,
        "t_ab": census.t_ab,
        "t_ba": census.t_ba,
        "d_bb": census.d_bb,
        "r_ab": census.r_ab,
        "l_ab": census.l_ab,
        "slack": census.slack,
    }


def census_from_dict(data: dict) -> DimensionCensus:
    fields = {k: data[k] for k in (
        "d_a", "d_b", "d_ab", "c_ab", "t_ab", "t_ba", "d_bb", "r_ab", "l_ab", "slack"
    )}
    return DimensionCensus(**fields)


def table_to_dict(table: ProbabilityTable) -> dict:
    return {
        "kind": "table",
        "total_weight": table.total_weight,
        "rows": [
            {
                "outcome": list(r.outcome),
                "weight": r.weight,
                "probability": r.probability,
            }
            for r in table.rows
        ],
    }


def table_from_dict(data: dict) -> ProbabilityTable:
    return ProbabilityTable(
        rows=tuple(
            TableRow(tuple(r["outcome"]), r["weight"], r["probability"])
            for r in data["rows"]
        ),
        total_weight=data["total_weight"],
    )


def evaluation_to_dict(result: EvaluationResult) -> dict:
    return {
        "kind": "evaluation",
        "table": table_to_dict(result.table),
        "weights_shape": list(result.weights.shape),
        "normalization": [
            {
                "operation": n.operation,
                "action": n.action,
                "trace_total": n.trace_total,
                "expected": n.expected,
                "satisfied": n.satisfied,
                "note": n.note,
            }
            for n in result.normalization
        ],
    }


def evaluation_from_dict(data: dict) -> EvaluationResult:
    table = table_from_dict(data["table"])
    weights = table.weights().reshape(data["weights_shape"])
    normalization = tuple(
        NormalizationReport(
            operation=n["operation"],
            action=n["action"],
            trace_total=n["trace_total"],
            expected=n["expected"],
            satisfied=n["satisfied"],
            note=n.get("note", ""),
        )
        for n in data["normalization"]
    )
    return EvaluationResult(table=table, weights=weights, normalization=normalization)


_TO = {
    AuditReport: report_to_dict,
    DimensionCensus: census_to_dict,
    ProbabilityTable: table_to_dict,
    EvaluationResult: evaluation_to_dict,
}
_FROM = {
    "audit": report_from_dict,
    "census": census_from_dict,
    "table": table_from_dict,
    "evaluation": evaluation_from_dict,
}


def serialize_reports(objects) -> str:
    """A deterministic JSON document for a list of report objects."""
    items = [_TO[type(obj)](obj) for obj in objects]
    return json.dumps(items, sort_keys=True, indent=2) + "\n"


def parse_reports(text: str) -> list:
    items = json.loads(text)
    return [_FROM[item["kind"]](item) for item in items]
