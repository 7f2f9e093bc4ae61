"""Exception hierarchy shared by all modules."""


class WhirlLabError(Exception):
    """Base class for domain errors raised by this package."""


class TooFewSamples(WhirlLabError):
    pass


class NotUnitSpeed(WhirlLabError):
    pass


class GeodesicPoint(WhirlLabError):
    """The curve has vanishing acceleration where a Frenet frame was required."""


class NullAcceleration(WhirlLabError):
    pass


class NotLegendre(WhirlLabError):
    pass


class SignConditionViolated(WhirlLabError):
    pass


class ImaginaryRadius(WhirlLabError):
    pass


class EmptyDomain(WhirlLabError):
    pass


class ContradictionDetected(WhirlLabError):
    """A non-Legendre magnetic trajectory passed the whirl test.

    In the Sasakian model this cannot happen, so it flags a numerical or
    implementation fault.
    """


class ParseError(WhirlLabError):
    pass
