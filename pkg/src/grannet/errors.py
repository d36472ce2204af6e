"""Exception hierarchy shared by every module."""


class GrannetError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GrannetError, ValueError):
    pass


class DimensionError(GrannetError, ValueError):
    pass


class ConfigurationError(GrannetError, ValueError):
    pass


class DivergenceError(GrannetError, ArithmeticError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss!r})")
        self.epoch = epoch
        self.loss = loss


class OptimizerError(GrannetError, ArithmeticError):
    def __init__(self, particle: int, iteration: int, value: float):
        super().__init__(
            f"non-finite fitness {value!r} for particle {particle} at iteration {iteration}"
        )
        self.particle = particle
        self.iteration = iteration


class ParseError(GrannetError, ValueError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.row = row
        self.column = column


class LookupFailure(GrannetError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
