"""Exception types shared across the package."""


class SingerLatticeError(Exception):
    """Base class for all errors raised here."""


class NonPrime(SingerLatticeError, ValueError):
    pass


class TooLarge(SingerLatticeError, ValueError):
    pass


class SpecMismatch(SingerLatticeError, TypeError):
    pass


class DivisionByZero(SingerLatticeError, ZeroDivisionError):
    pass


class DegreeMismatch(SingerLatticeError, ValueError):
    pass


class InvalidOrder(SingerLatticeError, ValueError):
    pass
