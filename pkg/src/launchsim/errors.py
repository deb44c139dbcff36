"""Exception types shared across the package."""


class LaunchSimError(Exception):
    """Base class for all launchsim errors."""


class DomainError(LaunchSimError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(LaunchSimError, ValueError):
    """A scenario configuration is malformed or inconsistent."""


class HorizonExhausted(LaunchSimError):
    """A first-passage target was not reached within the simulated horizon."""
