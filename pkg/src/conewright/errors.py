"""Exception types shared across the toolkit."""


class ContractViolation(ValueError):
    """An operation was called with arguments that break its contract."""


class ResourceLimit(RuntimeError):
    """A computation would exceed its declared resource budget."""


class UnconvergedEstimate(RuntimeError):
    """A cone estimate did not converge; callers must treat the result as
    inconclusive evidence, never as a verdict."""
