"""Exception types shared across the package."""


class FppError(Exception):
    """Base class for all package errors."""


class ConfigError(FppError):
    """Invalid family, law, or experiment configuration.

    Carries a list of human-readable messages so callers can report every
    problem at once instead of the first one found.
    """

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class KeyDecodeError(FppError):
    """A vertex key did not decode under the family's encoding."""


class ResourceBudgetError(FppError):
    """A vertex/settled/enumeration budget was exceeded.

    The message names the budget that was hit.
    """


class ContractError(FppError):
    """A precondition that callers must guarantee was violated."""
