from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Decision(str, enum.Enum):
    LOCAL = "local"
    FAR = "far"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    """Outcome of one tester run.

    ``statistic`` is the quantity compared with ``threshold``: the success
    tally for the Trotterized tester, an estimate or empirical mean for the
    others.  ``details`` carries tester-specific fields for reports.
    """

    tester: str
    decision: Decision
    statistic: float
    threshold: float
    transcript: dict
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def total_time(self) -> float:
        return self.transcript["total_evolution_time"]

    @property
    def queries(self) -> int:
        return self.transcript["query_count"]

    def to_dict(self, with_entries: bool = True) -> dict:
        transcript = dict(self.transcript)
        if not with_entries:
            transcript.pop("entries", None)
        return {
            "tester": self.tester,
            "decision": self.decision.value,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "transcript": transcript,
            "details": self.details,
        }
