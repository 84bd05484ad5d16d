"""Exception types shared across the simulator.

Every error raised by this package derives from MarketSimError so callers
can catch broadly. The CLI maps ConfigError subclasses to exit code 2
(usage/config) and everything else to exit code 1 (runtime).
"""


class MarketSimError(Exception):
    """Base class for all marketsim errors."""


class ConfigError(MarketSimError):
    """Base class for errors that indicate a bad scenario/config."""


# --- governance graph ---

class CycleDetected(ConfigError):
    pass


class UnknownStakeholder(ConfigError):
    pass


class NoUserStakeholder(ConfigError):
    pass


class UnreachableStakeholder(ConfigError):
    pass


# --- selection policies ---

class EmptyCandidateSet(MarketSimError):
    pass


class UnknownAgent(MarketSimError):
    pass


class DuplicateAgent(ConfigError):
    pass


# --- oracle ---

class MissingScore(MarketSimError):
    """A cached score table lacks a (query, agent) entry; the scenario is misconfigured."""


class DomainError(MarketSimError):
    """An input fell outside its documented domain (e.g. quality not in [0,1])."""


# --- engine ---

class ConfigInvalid(ConfigError):
    """Scenario validation failed; the message names the first violated constraint."""


class PoolExhausted(MarketSimError):
    pass


class DigestMismatch(MarketSimError):
    pass


class DivergenceAt(MarketSimError):
    """Replay produced a record differing from the stored log."""

    def __init__(self, step: int, record_index: int, detail: str = ""):
        self.step = step
        self.record_index = record_index
        msg = f"replay diverged at step {step}, record {record_index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class LogParseError(MarketSimError):
    """A log file could not be parsed; the message names the offending line."""


# --- metrics ---

class EmptyWindow(MarketSimError):
    pass


class NotNormalized(MarketSimError):
    pass


class AllZeroScores(MarketSimError):
    pass


class SetMismatch(MarketSimError):
    pass


# --- validation ---

class EmptySample(MarketSimError):
    pass
