"""Exception types shared across the package."""


class LaxcalError(Exception):
    """Base class for all package errors."""


class InputError(LaxcalError):
    """Base class for errors caused by invalid user input."""


class OutOfRangeEntry(InputError):
    pass


class WrongTableLength(InputError):
    pass


class EmptyWithConstant(InputError):
    pass


class SignatureMismatch(InputError):
    pass


class NotACongruence(InputError):
    pass


class NotAHomomorphism(InputError):
    def __init__(self, symbol, args, message=None):
        self.symbol = symbol
        self.args_tuple = tuple(args)
        super().__init__(message or f"map fails to commute with {symbol} at {self.args_tuple}")


class MismatchedCarriers(InputError):
    pass


class NotNormalizable(InputError):
    pass


class NotInVariety(InputError):
    pass


class NotInHSP(InputError):
    pass


class NotSubdirectlyIrreducible(InputError):
    pass


class ParseError(InputError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BudgetExceeded(LaxcalError):
    """An internal construction overflowed its configured budget."""


class ModularAssertionWarning(UserWarning):
    """The user asserted congruence-modularity but a computed lattice refutes it."""
