"""Exception types shared across the toolkit."""


class AfmiError(Exception):
    """Base class for all toolkit errors."""


class DomainError(AfmiError):
    """Input outside the positively invariant quadrant, or non-finite."""


class ParameterError(AfmiError):
    """Model parameters violate the feasibility constraints."""


class SingularNullclineError(AfmiError):
    """Prey-nullcline denominator vanishes (only possible when eps >= 1)."""


class InfeasibleGeometryError(AfmiError):
    """Requested geometric quantity undefined for eps >= 1."""


class StiffnessError(AfmiError):
    """Adaptive step size underflowed; the problem is locally too stiff."""


class BracketError(AfmiError):
    """A locator bracket does not enclose a sign change."""


class PreconditionError(AfmiError):
    """An operation was called on a state that violates its contract."""


class StaleEquilibriumError(PreconditionError):
    """Point passed as an equilibrium no longer annihilates the field."""


class NoReturnError(AfmiError):
    """Orbit never returned to the Poincare section."""


class ConfigError(AfmiError):
    """Run configuration file or flags are malformed."""


class LayoutError(AfmiError):
    """A plot was requested over a degenerate axis range."""
