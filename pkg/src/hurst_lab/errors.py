"""Exception hierarchy shared by all hurst_lab modules."""


class HurstLabError(ValueError):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class NonPositivePrice(HurstLabError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"price at position {index} is not strictly positive: {value!r}")


class TooShort(HurstLabError):
    pass


class NonFiniteValue(HurstLabError):
    pass


class WindowOutOfBounds(HurstLabError):
    pass


class NotEnoughDivisors(HurstLabError):
    pass


class PlanViolatesInvariants(HurstLabError):
    pass


class OutOfRange(HurstLabError):
    pass


class NotADivisor(HurstLabError):
    pass


class BoxTooSmall(HurstLabError):
    pass


class DegenerateFluctuation(HurstLabError):
    pass


class TooFewPoints(HurstLabError):
    pass


class EmbeddingNotPSD(HurstLabError):
    pass


class AllDegenerate(HurstLabError):
    pass


class EmptySamples(HurstLabError):
    pass
