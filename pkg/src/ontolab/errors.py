"""Exception hierarchy. Negative verdicts are results, not exceptions."""

from __future__ import annotations


class OntolabError(ValueError):
    """Base class for malformed input and violated preconditions."""


class DistributionError(OntolabError):
    pass


class ScenarioError(OntolabError):
    pass


class ModelError(OntolabError):
    pass


class PreconditionError(OntolabError):
    pass


class ScenarioTooLarge(OntolabError):
    """Raised when materializing E(X) would exceed the configured bound."""


class NotLocalError(PreconditionError):
    """Canonicalization was asked of a model that is not local."""

    def __init__(self, verdict) -> None:
        super().__init__(f"model is not local: {verdict.reason} at {verdict.witness!r}")
        self.verdict = verdict


class InconsistentRoutes(AssertionError):
    """Two independent decision routes disagreed; indicates a bug."""
