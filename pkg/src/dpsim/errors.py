"""Exception types raised across the simulator."""


class DPSimError(Exception):
    """Base class for all simulator errors."""


class ParameterError(DPSimError, ValueError):
    """Invalid physical parameter (non-positive dimension, negative factor, ...)."""


class ModelConfigError(DPSimError):
    """Model matrices cannot be used (e.g. singular mass matrix)."""


class SingularityError(DPSimError):
    """Euler-angle kinematics evaluated too close to pitch = +-90 deg."""


class IntegrationDiverged(DPSimError):
    """A non-finite derivative or state appeared during integration."""

    def __init__(self, t, state, msg="integration diverged"):
        self.t = t
        self.state = state
        super().__init__(f"{msg} at t={t:.6g} s")


class ConfigError(DPSimError, ValueError):
    """Controller, allocator or scenario configuration is invalid."""


class UnderactuatedError(ConfigError):
    """Thruster configuration matrix does not have full row rank."""


class DomainError(DPSimError, ValueError):
    """Argument outside the domain of a mathematical function."""


class NotReady(DPSimError):
    """Observer queried before any valid measurement arrived."""


class AlignmentError(DPSimError, ValueError):
    """Time series that must be aligned have mismatched lengths."""


class EmptyWindowError(DPSimError, ValueError):
    """Metric evaluation window contains no samples."""


class MissionTimeout(DPSimError):
    """Mission hold conditions were not all met before the scenario ended."""
