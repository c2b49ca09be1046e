"""Exception types. All derive from ValueError so callers can catch broadly."""


class WRTError(ValueError):
    pass


class InvalidLevel(WRTError):
    pass


class InvalidGenus(WRTError):
    pass


class LabelOutOfRange(WRTError):
    pass


class NonIntegerVerlinde(WRTError):
    pass


class GenusUnsupported(WRTError):
    pass


class DegenerateSample(WRTError):
    pass


class InvalidConfig(WRTError):
    pass


class DimensionMismatch(WRTError):
    pass


class TooFewSamples(WRTError):
    pass


class NonPrimeLevel(WRTError):
    pass
