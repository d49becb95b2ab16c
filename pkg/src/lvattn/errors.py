"""Exception types raised across the package."""


class LVAttnError(Exception):
    """Base class for all package errors."""


class InvalidStateError(LVAttnError, ValueError):
    pass


class IntegrationError(LVAttnError):
    """Integration produced a non-positive or non-finite state."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step


class InsufficientDataError(LVAttnError, ValueError):
    pass


class NumericError(LVAttnError, FloatingPointError):
    def __init__(self, message: str, epoch: int | None = None):
        if epoch is not None:
            message = f"{message} (epoch {epoch})"
        super().__init__(message)
        self.epoch = epoch


class DomainError(LVAttnError, ValueError):
    pass


class DegeneratePointError(LVAttnError, ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (index {index})")
        self.index = index


class InvalidPerturbationError(LVAttnError, ValueError):
    pass


class UndefinedCorrelationError(LVAttnError, ValueError):
    pass


class ConfigError(LVAttnError, ValueError):
    pass
