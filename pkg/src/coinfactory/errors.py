"""Shared exception types."""


class UsageError(ValueError):
    """Caller violated a precondition (bad index, bad probability, bad weights)."""


class ResourceLimitError(RuntimeError):
    """A configured work limit (lattice size, enumeration depth, level cap) was hit."""


class LevelCapExceeded(ResourceLimitError):
    """A sampled recursion level exceeded the schedule's cap.

    Raised per-trial and surfaced explicitly (never silently truncated); the
    statistical harness records such trials separately, like budget
    exhaustion, so they never contaminate frequency cells.
    """

    def __init__(self, level: int, cap: int):
        super().__init__(f"sampled level {level} exceeds the schedule cap {cap}")
        self.level = level
        self.cap = cap


class CertificateViolationError(RuntimeError):
    """A decomposition level left [0,1]: the chosen sample-count schedule is too small."""


class BudgetExhausted(Exception):
    """A run hit its flip budget; carries the number of flips performed."""

    def __init__(self, flips_used: int):
        super().__init__(f"flip budget exhausted after {flips_used} flips")
        self.flips_used = flips_used
