"""Exception hierarchy shared by all modules."""


class ConfigError(Exception):
    """Base class for anything wrong with a scenario configuration."""


class ParseError(ConfigError):
    """The config file is not valid JSON or does not follow the schema."""


class ValidationError(ConfigError, ValueError):
    """A config value violates an invariant; the message names the field."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(ValueError):
    """A numeric argument lies outside the domain of a model formula."""


class ContractError(RuntimeError):
    """A caller broke the calling contract of a stateful tracker."""


class EmptyError(ValueError):
    """An average was requested over no samples."""


class InsufficientData(ValueError):
    """Too few deliveries were observed to form a statistic."""


class SimulationError(RuntimeError):
    """Internal consistency guard tripped during a run."""
