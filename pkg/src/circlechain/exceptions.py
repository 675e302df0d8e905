class CircleChainError(Exception):
    """Base class for all errors raised by circlechain."""


class DomainError(CircleChainError, ValueError):
    """A length or exponent outside the domain of the interaction law."""


class OrderingError(CircleChainError, ValueError):
    """Positions are not strictly increasing in (0, L] or a gap vanished."""


class ParityError(CircleChainError, ValueError):
    """Odd particle count for a mirror-symmetric two-piece field."""


class InfeasibleTargetError(CircleChainError, ValueError):
    """No shift of the symmetric equilibrium places a particle on the target."""


class PartitionImbalanceError(CircleChainError, ValueError):
    """F1*N1 + F2*N2 != 0 for the requested partition."""


class CommensurabilityError(CircleChainError, ValueError):
    """M1/M2 differs from N1/N2."""


class CirculationError(CircleChainError, ValueError):
    """The field has nonzero circulation, so no single-valued potential exists."""


class NotConstructibleError(CircleChainError, ValueError):
    """A sweep asked for an N that admits no symmetric equilibrium."""


class NotEquilibriumError(CircleChainError, ValueError):
    """A configuration expected to be an equilibrium has a large residual."""


class ConfigError(CircleChainError, ValueError):
    """Invalid run configuration."""
