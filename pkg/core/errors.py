# elephantwalk/core/errors.py
from typing import Optional


class WalkError(Exception):
    """Base class for every error raised by the engine"""


class DomainError(WalkError, ValueError):
    """Input outside the mathematical domain of an operation"""


class ConfigError(WalkError, ValueError):
    """Invalid experiment configuration, tagged with the offending key"""

    def __init__(self, key: str, problem: str, value: Optional[object] = None):
        self.key = key
        self.problem = problem
        self.value = value
        detail = f" (got {value!r})" if value is not None else ""
        super().__init__(f"{key}: {problem}{detail}")
