"""Exception hierarchy shared by every mds22 module."""


class MDSError(Exception):
    """Base class for all library errors."""


# fields
class NotPrime(MDSError, ValueError):
    pass


class ReducibleModulus(MDSError, ValueError):
    pass


class NoGeneratorFound(MDSError, RuntimeError):
    pass


class DivisionByZero(MDSError, ZeroDivisionError):
    pass


class BadFieldDescriptor(MDSError, ValueError):
    pass


# matrices
class DimensionMismatch(MDSError, ValueError):
    pass


class FieldMismatch(MDSError, ValueError):
    pass


class Singular(MDSError, ArithmeticError):
    pass


class NotSquare(MDSError, ValueError):
    pass


# codes
class SingularParityPair(MDSError, ArithmeticError):
    pass


class HasErasures(MDSError, ValueError):
    pass


class TooManyErasures(MDSError, ValueError):
    pass


class BadArity(MDSError, ValueError):
    pass


class FieldTooSmall(MDSError, ValueError):
    pass


class MdsCheckFailed(MDSError, ValueError):
    pass


# repair
class NotARepairMatrix(MDSError, ValueError):
    pass


class BadHelperIndex(MDSError, IndexError):
    pass


class MissingPayload(MDSError, KeyError):
    pass


class ZeroMatrix(MDSError, ValueError):
    pass


# oracle
class FieldTooLarge(MDSError, ValueError):
    pass


class NotMds(MDSError, ValueError):
    pass


class NotFound(MDSError, LookupError):
    pass


# storage
class TooFewShards(MDSError):
    pass


class HeaderMismatch(MDSError):
    pass


class MissingHelper(MDSError):
    pass
