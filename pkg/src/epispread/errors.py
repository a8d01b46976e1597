"""Exception types shared across the package."""


class IntegrationFault(RuntimeError):
    """The integrator produced a non-finite state."""


class SingularityFault(IntegrationFault):
    """A transformed coordinate reached zero or below where a negative
    exponent applies."""


class DivergenceFault(RuntimeError):
    """Network training drove the mean squared error non-finite."""


class DegenerateFeature(ValueError):
    """A feature column has zero variance and cannot be standardized."""


class MalformedModel(ValueError):
    """A serialized network file has bad dimensions or unparsable fields."""


class RankDeficient(ValueError):
    """Too few distinct abscissae to determine the polynomial."""


class TooFewSamples(ValueError):
    """Not enough samples to carry out the requested split."""
