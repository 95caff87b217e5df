"""Exception hierarchy shared by the numerical engines and the command line."""


class RamanCombError(Exception):
    """Base class for every error raised by ramancomb."""


class DomainError(RamanCombError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class OrderRangeError(RamanCombError, IndexError):
    """A sideband order falls outside the sideband window."""

    def __init__(self, order, window):
        self.order = order
        self.window = window
        super().__init__(f"sideband order {order} outside window {window}")


class UndefinedStatisticError(RamanCombError, ArithmeticError):
    """A normalized statistic was requested for an empty sideband."""


class CapacityError(RamanCombError, MemoryError):
    """A Fock basis would exceed the configured size limit."""


class TruncationError(RamanCombError, RuntimeError):
    """Too much probability was lost to the photon-number cap."""

    def __init__(self, message, leakage=None):
        self.leakage = leakage
        super().__init__(message)


class WindowTooSmallError(TruncationError):
    """Population reached the edge modes of the sideband window."""


class RootShortfallError(RamanCombError, LookupError):
    """Fewer interference zeros were found than requested."""

    def __init__(self, message, roots):
        self.roots = list(roots)
        super().__init__(message)


class ConfigError(RamanCombError, ValueError):
    """Invalid scenario configuration, with the offending field or line."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
