"""Check records and plain-text ledger lines shared by reports."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class CheckRecord:
    """One named check with its parameters and outcome."""

    name: str
    params: str = ""
    passed: bool = True
    details: str = ""

    def ledger_line(self) -> str:
        parts = [self.name]
        if self.params:
            parts.append(self.params)
        parts.append("PASS" if self.passed else "FAIL")
        if self.details:
            parts.append(self.details)
        return " ".join(parts)
