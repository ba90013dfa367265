"""Exception types raised across the package."""


class ToperError(Exception):
    """Base class for all errors raised by toper."""


class ParseError(ToperError):
    """Malformed or missing dataset file.

    ``path`` names the offending file; ``line`` is the 1-based line number
    when the problem is localised to a single row.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class EmptyInput(ToperError, ValueError):
    pass


class InvalidParam(ToperError, ValueError):
    pass


class MissingAttribute(ToperError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing attribute"


class StratificationError(ToperError, ValueError):
    pass


class TrainingDiverged(ToperError, RuntimeError):
    pass


class MetricUndefined(ToperError, ValueError):
    pass


class GraphComputeError(ToperError):
    """Wraps a per-graph failure inside a dataset-level computation."""

    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"graph {index}: {type(cause).__name__}: {cause}")
