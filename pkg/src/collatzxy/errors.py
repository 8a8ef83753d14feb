"""Exception hierarchy shared by every module."""


class CollatzError(Exception):
    """Base class for all errors raised by collatzxy."""


class BudgetExceeded(CollatzError):
    """A trajectory did not reach 1 within the step budget.

    Signals either an insufficient budget or a potential counterexample to the
    conjecture; callers record it, they do not crash on it.
    """

    def __init__(self, n: int, last_value: int, steps: int):
        super().__init__(f"n={n} did not reach 1 within {steps} steps (last value {last_value})")
        self.n = n
        self.last_value = last_value
        self.steps = steps


class UnknownClaim(CollatzError, KeyError):
    def __init__(self, claim_id: str):
        super().__init__(claim_id)
        self.claim_id = claim_id

    def __str__(self) -> str:
        return f"unknown claim id {self.claim_id!r}"


class CheckpointError(CollatzError):
    """Base class for checkpoint problems."""


class CorruptCheckpoint(CheckpointError):
    pass


class ConfigMismatch(CheckpointError):
    pass


class CheckpointLocked(CheckpointError):
    pass


class CheckpointWriteError(CheckpointError, OSError):
    pass
