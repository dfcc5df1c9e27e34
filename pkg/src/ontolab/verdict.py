from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a yes/no check.

    ``witness`` is always populated when ``holds`` is false. ``value`` carries
    whatever the check computed on success (e.g. extracted properties).
    Truthiness follows ``holds``.
    """

    holds: bool
    reason: str | None = None
    witness: Any = None
    value: Any = None

    def __bool__(self) -> bool:
        return self.holds

    @classmethod
    def ok(cls, value: Any = None) -> CheckResult:
        return cls(True, value=value)

    @classmethod
    def fail(cls, reason: str, witness: Any) -> CheckResult:
        if witness is None:
            raise ValueError("a failing check must carry a witness")
        return cls(False, reason=reason, witness=witness)
