"""Exception hierarchy; the CLI maps each class to an exit code."""


class UavmonError(Exception):
    exit_code = 3


class ConfigError(UavmonError, ValueError):
    """Invalid parameter or configuration file."""

    exit_code = 1


class DataError(UavmonError, ValueError):
    """A trace file or trace sample could not be ingested."""

    exit_code = 2


class ContractViolation(UavmonError, RuntimeError):
    """A component broke its runtime contract (e.g. a policy left the grid)."""

    exit_code = 3


class AggregationError(UavmonError, ValueError):
    """Run results that cannot be combined (e.g. different lengths)."""

    exit_code = 3
