"""Exception types shared across the toolkit."""


class SuperposeError(Exception):
    """Base class for all toolkit errors."""


class ZeroEdgeMass(SuperposeError):
    """The layer distribution produces no edges in the limit (P_21 = 0)."""


class ZeroP10(SuperposeError):
    """The layer distribution has zero mean size (P_10 = 0)."""


class ZeroMean(SuperposeError):
    """Size-biasing requested for a distribution with zero mean."""


class InvalidLambda(SuperposeError):
    """Compound Poisson rate must be positive."""


class EmptyGraph(SuperposeError):
    """Operation requires at least one edge."""


class DegenerateMarginal(SuperposeError):
    """Correlation undefined: a marginal has zero variance."""


class ZeroDenominator(SuperposeError):
    """Closed-form assortativity denominator vanishes."""


class MissingRecords(SuperposeError):
    """Per-layer records were not kept for this sample."""


class HypothesisViolation(SuperposeError):
    """Power-law tail hypotheses violated.

    Carries the full list of failed conditions in ``violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InsufficientSupport(SuperposeError):
    """Too few positive-mass points in the requested fit range."""


class DegenerateStatistic(SuperposeError):
    """A per-cell statistic is undefined for this sample (recorded, not fatal)."""


class ConfigError(SuperposeError):
    """Invalid run configuration.

    ``field`` is a dotted path into the offending config entry.
    """

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
