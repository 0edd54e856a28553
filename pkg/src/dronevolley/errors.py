"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """Invalid parameters, task config, or unknown registry ids.

    CLI maps this to exit code 1.
    """


class SimulationFault(RuntimeError):
    """Numerical fault during integration (non-finite state).

    Carries the name of the offending field so the harness can report what
    diverged. The episode runner treats the faulting drone as crashed.
    """

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(message or f"non-finite value in '{field}'")


class TraceError(ValueError):
    """Malformed or truncated trace file. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
