"""Verification reports: per-obligation records, per-thread and program

summaries, a stable versioned JSON schema, and the human rendering derived
from the same records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA = "lacecheck-report/1"

EXIT_PROVED = 0
EXIT_REFUTED = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 3


@dataclass
class ObligationRecord:
    kind: str
    location: str
    verdict: str  # valid | invalid | unknown | timeout | solver-error
    time: float = 0.0
    evidence: str = ""  # solver | frame | twiddle | structural | cached
    trail: str = ""
    countermodel: str | None = None

    def to_json(self) -> dict:
        d = {
            "kind": self.kind,
            "location": self.location,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "trail": self.trail,
            "time": round(self.time, 4),
        }
        if self.countermodel:
            d["countermodel"] = self.countermodel
        return d


@dataclass
class VerificationReport:
    program: str
    status: str  # proved | refuted | incomplete | error
    flags: dict = field(default_factory=dict)
    solver: str = ""
    records: list = field(default_factory=list)
    error: str | None = None

    def add(self, rec: ObligationRecord):
        self.records.append(rec)

    def finalize(self) -> str:
        if self.error is not None:
            self.status = "error"
            return self.status
        verdicts = [r.verdict for r in self.records]
        if any(v == "invalid" for v in verdicts):
            self.status = "refuted"
        elif any(v in ("unknown", "timeout", "solver-error") for v in verdicts):
            self.status = "incomplete"
        else:
            self.status = "proved"
        return self.status

    @property
    def exit_code(self) -> int:
        return {
            "proved": EXIT_PROVED,
            "refuted": EXIT_REFUTED,
            "incomplete": EXIT_INCOMPLETE,
        }.get(self.status, EXIT_USAGE)

    def invalid(self) -> list:
        return [r for r in self.records if r.verdict == "invalid"]

    def thread_summary(self) -> dict:
        out: dict = {}
        for r in self.records:
            key = r.location.split(".")[0]
            d = out.setdefault(key, {"valid": 0, "invalid": 0, "other": 0})
            if r.verdict == "valid":
                d["valid"] += 1
            elif r.verdict == "invalid":
                d["invalid"] += 1
            else:
                d["other"] += 1
        return out

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "program": self.program,
            "status": self.status,
            "flags": self.flags,
            "solver": self.solver,
            "threads": self.thread_summary(),
            "obligations": [r.to_json() for r in self.records],
            **({"error": self.error} if self.error else {}),
        }

    def json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def human_text(self, verbose: bool = False) -> str:
        lines = [f"{self.program}: {self.status}"]
        if self.error:
            lines.append(f"  error: {self.error}")
            return "\n".join(lines) + "\n"
        for r in self.records:
            if r.verdict == "valid" and not verbose:
                continue
            lines.append(f"  {r.verdict:8} {r.kind:13} {r.location}")
            if r.trail and r.verdict != "valid":
                lines.append(f"           {r.trail}")
            if r.countermodel and verbose:
                for ln in r.countermodel.split("\n")[:12]:
                    lines.append(f"           | {ln}")
        counts: dict = {}
        for r in self.records:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        lines.append(
            "  " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
        )
        return "\n".join(lines) + "\n"


def normalized_json(report: VerificationReport) -> str:
    """Report JSON with timing stripped, for determinism comparisons."""
    d = report.to_json()
    for r in d["obligations"]:
        r.pop("time", None)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"
