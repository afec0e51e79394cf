"""Exception hierarchy shared by every qfrag module.

Each error carries the tag of the module that raised it and the process exit
code the CLI maps it to.
"""


class QFragError(Exception):
    """Base class for all qfrag errors."""

    module: str = "qfrag"
    exit_code: int = 1

    def __str__(self) -> str:
        return f"[{self.module}] {super().__str__()}"


# ============== circuit ==============

class CircuitError(QFragError, ValueError):
    module = "circuit"
    exit_code = 2


class QasmSyntaxError(CircuitError):
    """Malformed OpenQASM input."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedGateError(CircuitError):
    """Gate name outside the 17 supported kinds."""

    def __init__(self, gate: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unsupported gate '{gate}'{where}")
        self.gate = gate
        self.line = line


class RegisterError(CircuitError):
    """Register layout the front-end does not handle (multiple qregs, conditionals)."""


# ============== learn ==============

class LearnError(QFragError, ValueError):
    module = "learn"
    exit_code = 3


class DatasetError(LearnError):
    pass


class ModelError(LearnError):
    pass


class SchemaVersionError(ModelError):
    pass


class ConvergenceError(LearnError):
    """Iterative solver stopped at its iteration bound.

    Raised only when the caller asks for strict convergence; by default solvers
    log a warning and keep the best iterate.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved {achieved:.3e})")
        self.achieved = achieved


# ============== execution ==============

class ExecutionError(QFragError, ValueError):
    exit_code = 4


class SimulationError(ExecutionError):
    module = "simulator"


class QubitLimitError(SimulationError):
    pass


class BoundaryError(SimulationError):
    pass


class ShotsError(SimulationError):
    pass


class MetricError(ExecutionError):
    module = "metrics"


class FragmentationError(ExecutionError):
    module = "fragment"


class ReconstructionError(ExecutionError):
    module = "reconstruct"


# ============== cli ==============

class ConfigError(QFragError, ValueError):
    module = "cli"
    exit_code = 5
