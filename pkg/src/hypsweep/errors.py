"""Exception types shared across the package.

Caller-bug rejections (AlreadyOpened, OutOfBounds, EpisodeOver) never mutate
state. BeliefCollapse is deliberately loud: an empty hypothesis set cannot
occur under a correct simulation, so hitting it means a replay or harness bug.
"""


class HypsweepError(Exception):
    """Base class for all package errors."""


class OutOfBounds(HypsweepError):
    pass


class AlreadyOpened(HypsweepError):
    pass


class EpisodeOver(HypsweepError):
    pass


class EmptyUniverse(HypsweepError):
    """No pose of the template fits on the board."""


class BeliefCollapse(HypsweepError):
    """The hypothesis set became empty: an impossible observation stream."""


class MixedConfig(HypsweepError):
    """Demonstrations with differing config fingerprints in one dataset."""


class EmptyDataset(HypsweepError):
    pass


class NonFiniteLoss(HypsweepError):
    """Training objective diverged."""


class DemoReplayError(HypsweepError):
    """A recorded demonstration does not replay to its recorded state."""


class AgentStalled(HypsweepError):
    """No legal move available to the agent.

    Carries the agent's per-direction diagnostic scores when it has any.
    """

    def __init__(self, message: str, scores=None):
        super().__init__(message)
        self.scores = scores


class NotActionable(AgentStalled):
    """B8 failure: no neighbor classified actionable (all scores <= 0)."""


class EmptyFrontier(AgentStalled):
    """BE has no frontier cell to act on (whole board opened)."""


class FingerprintMismatchWarning(UserWarning):
    """A model is being used with a config it was not trained on."""
