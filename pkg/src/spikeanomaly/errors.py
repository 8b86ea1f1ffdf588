"""Exception hierarchy shared by all modules."""


class SpikeAnomalyError(Exception):
    pass


class InputDomainError(SpikeAnomalyError, ValueError):
    """A value outside the domain an operation accepts (e.g. NaN, inf)."""


class EmptyStateError(SpikeAnomalyError):
    """Statistics were queried before any sample was seen."""


class TimeOrderError(SpikeAnomalyError, ValueError):
    """An event arrived earlier than the neuron's last update."""


class ConfigError(SpikeAnomalyError, ValueError):
    pass


class DataError(SpikeAnomalyError):
    """Malformed or unreadable input file.

    ``line`` is the 1-based line number when the problem is row-specific.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}"
            if line is not None:
                prefix += f":{line}"
            prefix += ": "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)
