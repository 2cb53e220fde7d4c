"""Structured detector findings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

#: Evidence tx-id samples are capped so reports stay small.
EVIDENCE_CAP = 20

FLAGGED = "flagged"
CLEAN = "clean"


@dataclass
class AnomalyReport:
    """One finding. Metrics always include the thresholds that were applied,
    so a flagged verdict is reproducible from the report alone."""

    detector: str
    subject: str
    metrics: dict[str, Any]
    evidence: list[str] = field(default_factory=list)
    verdict: str = CLEAN

    @property
    def flagged(self) -> bool:
        return self.verdict == FLAGGED

    def as_dict(self) -> dict[str, Any]:
        return {
            "detector": self.detector,
            "subject": self.subject,
            "verdict": self.verdict,
            "metrics": {k: str(v) for k, v in self.metrics.items()},
            "evidence": list(self.evidence),
        }


def cap_evidence(tx_ids: list[str]) -> list[str]:
    return tx_ids[:EVIDENCE_CAP]
