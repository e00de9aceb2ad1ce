class LabError(Exception):
    """
    Base error of the lab. Carries the process exit code the CLI reports,
    the way an HTTP error carries its status code.
    """

    exit_code = 1

    def __init__(self, detail: str, exit_code: int | None = None, payload: dict | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload or {}


class ConfigError(LabError):
    exit_code = 2


class RegimeError(LabError):
    exit_code = 3


class NumericalError(LabError):
    exit_code = 4


class DomainError(NumericalError):
    """Invalid argument handed to a numerical operation (zero field, order out of range, ...)"""


class StepFailure(NumericalError):
    """Time step produced non-finite values"""
