"""Result type shared by trace checks and exhaustive analyses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class StateBoundExceeded(RuntimeError):
    """The instance is too large for exhaustive treatment."""

    def __init__(self, what: str, estimate: int, bound: int):
        super().__init__(f"{what}: about {estimate} states exceeds the bound of {bound}")
        self.estimate = estimate
        self.bound = bound


@dataclass
class CheckReport:
    verdict: str  # "pass" | "fail" | "exhausted"
    witness: Optional[dict] = None
    stats: dict = field(default_factory=dict)
    vacuous: bool = False
    detail: str = ""

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "exhausted"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "fail" and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness, "stats": dict(self.stats),
                "vacuous": self.vacuous, "detail": self.detail}
