class ConfigError(ValueError):
    """Bad or missing configuration (CLI exit code 2)."""


class InsufficientDataError(ValueError):
    """Too few observations for the requested statistic (CLI exit code 2)."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach its tolerance (CLI exit code 3)."""

    def __init__(self, message, value=float("nan"), abserr=float("nan")):
        super().__init__(f"{message} (value={value!r}, abserr={abserr!r})")
        self.value = value
        self.abserr = abserr
