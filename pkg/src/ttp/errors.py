class TTPError(Exception):
    """Base class for errors raised by this package."""


class ParseError(TTPError, ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}" if lineno else message)
        self.lineno = lineno


class ValidationError(TTPError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConfigError(TTPError, ValueError):
    pass


class OracleLimitError(TTPError):
    """Raised when an exact solver is asked to enumerate beyond its limits."""
