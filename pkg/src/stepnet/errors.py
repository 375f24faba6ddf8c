"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class SchedulingError(SimulationError):
    """An event was scheduled in the past or at a non-finite time."""


class TopologyError(SimulationError):
    """Invalid topology construction or lookup."""


class RoutingError(SimulationError):
    """Unreachable destination, or a packet delivered to the wrong host."""


class MetricsError(SimulationError):
    """A metric was requested that the run did not (or cannot) record."""


class ScenarioError(SimulationError):
    """Scenario text failed validation. Carries every error found, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
