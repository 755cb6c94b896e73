"""Result records shared by the checkers."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


@dataclass
class IdentityCheck:
    """Outcome of one identity checked over a batch of samples."""

    name: str
    passed: bool = True
    first_failing_order: Optional[int] = None
    witness: Optional[Tuple[Any, ...]] = None
    samples: int = 0

    def record(self, failing_order: Optional[int], witness: Tuple[Any, ...]) -> None:
        """Count one sample; keep the witness with the lowest failing order."""
        self.samples += 1
        if failing_order is None:
            return
        self.passed = False
        if self.first_failing_order is None or failing_order < self.first_failing_order:
            self.first_failing_order = failing_order
            self.witness = witness


@dataclass
class CheckReport:
    """A named batch of identity checks plus conventions in force."""

    subject: str
    checks: List[IdentityCheck] = field(default_factory=list)
    conventions: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, name: str) -> IdentityCheck:
        check = IdentityCheck(name)
        self.checks.append(check)
        return check
