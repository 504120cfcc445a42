"""Structured verification reports with deterministic serialization.

A report is a list of per-check records.  Each record names the check, the
identity it certifies (``ref``; the literal ``"plumbing"`` marks
infrastructure checks with no mathematical content), the arithmetic mode,
the parameter specialization, the outcome, and the wall-clock time.

Canonical JSON serialization is byte-identical across runs with the same
seeds, parameters, and mode: records are sorted, keys are sorted, and the
machine-dependent timing field is blanked.  The markdown rendering keeps
the measured timings and is not intended for byte comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

__all__ = [
    "SCHEMA_VERSION",
    "MODES",
    "PLUMBING",
    "CheckRecord",
    "VerificationReport",
]

SCHEMA_VERSION = "1"
MODES = ("exact-symbolic", "specialized", "sampled")
PLUMBING = "plumbing"


@dataclass
class CheckRecord:
    """Outcome of one verification check."""

    check_id: str
    ref: str
    mode: str
    params: str
    passed: bool
    seconds: float = 0.0
    details: str = ""

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.ref:
            raise ValueError(
                f"check {self.check_id!r} carries no reference string; "
                f"use the literal {PLUMBING!r} for infrastructure checks"
            )

    def sort_key(self):
        return (self.check_id, self.params, self.mode)

    def to_dict(self, include_timing: bool = False) -> Dict[str, object]:
        return {
            "check_id": self.check_id,
            "ref": self.ref,
            "mode": self.mode,
            "params": self.params,
            "result": "pass" if self.passed else "fail",
            "seconds": round(self.seconds, 3) if include_timing else None,
            "details": self.details,
        }

    @staticmethod
    def from_dict(data: Dict[str, object]) -> "CheckRecord":
        return CheckRecord(
            check_id=str(data["check_id"]),
            ref=str(data["ref"]),
            mode=str(data["mode"]),
            params=str(data["params"]),
            passed=data["result"] == "pass",
            seconds=float(data["seconds"] or 0.0),
            details=str(data.get("details", "")),
        )


@dataclass
class VerificationReport:
    """An ordered-independent aggregate of check records."""

    group: str
    seed: int
    mode: str
    records: List[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord) -> None:
        self.records.append(record)

    def extend(self, records) -> None:
        self.records.extend(records)

    @property
    def exit_code(self) -> int:
        return 0 if all(r.passed for r in self.records) else 1

    def sorted_records(self) -> List[CheckRecord]:
        return sorted(self.records, key=CheckRecord.sort_key)

    def to_dict(self, include_timing: bool = False) -> Dict[str, object]:
        return {
            "schema": SCHEMA_VERSION,
            "group": self.group,
            "seed": self.seed,
            "mode": self.mode,
            "exit_code": self.exit_code,
            "checks": len(self.records),
            "records": [r.to_dict(include_timing) for r in self.sorted_records()],
        }

    def to_json(self, include_timing: bool = False) -> str:
        return (
            json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)
            + "\n"
        )

    @staticmethod
    def from_json(text: str) -> "VerificationReport":
        data = json.loads(text)
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported report schema {data.get('schema')!r}; "
                f"expected {SCHEMA_VERSION!r}"
            )
        report = VerificationReport(
            group=str(data["group"]),
            seed=int(data["seed"]),
            mode=str(data["mode"]),
        )
        for item in data["records"]:
            report.add(CheckRecord.from_dict(item))
        return report

    def to_markdown(self) -> str:
        lines = [
            f"# Verification report: {self.group}",
            "",
            f"- seed: {self.seed}",
            f"- mode: {self.mode}",
            f"- checks: {len(self.records)}",
            f"- exit code: {self.exit_code}",
            "",
            "| check | ref | mode | params | result | seconds | details |",
            "| --- | --- | --- | --- | --- | --- | --- |",
        ]
        for r in self.sorted_records():
            result = "pass" if r.passed else "fail"
            lines.append(
                f"| {r.check_id} | {r.ref} | {r.mode} | {r.params} "
                f"| {result} | {r.seconds:.3f} | {r.details} |"
            )
        return "\n".join(lines) + "\n"
