"""Exception types shared across the package."""


class AlcError(Exception):
    """Base class for all errors raised by this library."""


class ParseError(AlcError):
    """Malformed concept/GCI/theory text."""

    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.position = position
        self.line = line
        where = ""
        if line is not None:
            where += f" (line {line})"
        if position is not None:
            where += f" (at offset {position})"
        super().__init__(message + where)


class UnknownNameError(ParseError):
    """Identifier not declared in the signature in use."""

    def __init__(self, name: str, position: int | None = None, line: int | None = None):
        self.name = name
        super().__init__(f"unknown name {name!r}", position=position, line=line)


class IllFormedSystemError(AlcError):
    """A system of cyclic definitions that cannot be reduced to self-cycles."""


class ModelFormatError(AlcError):
    """Malformed model file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message + (f" (line {line})" if line is not None else ""))


class WrongGciKindError(AlcError):
    """Operation received a GCI kind it does not handle."""


class NonMonotoneBodyError(AlcError):
    """Fixpoint body with odd/mixed occurrences of the defined name."""


class SignatureMismatchError(AlcError):
    """Operation over models that do not share a signature."""


class EmptyFamilyError(AlcError):
    """Coproduct of an empty family (carrier would be empty)."""


class NotAMorphismError(AlcError):
    """A map expected to be a morphism is not one."""


class NotABisimulationPartitionError(AlcError):
    """Quotient by a partition whose projection is not a morphism."""


class DomainTooLargeError(AlcError):
    """Carrier exceeds the configured bound for subset enumeration."""


class NotSeparableError(AlcError):
    """Representative construction on a model that fails the separation condition."""

    def __init__(self, pair: tuple[str, str]):
        self.pair = pair
        super().__init__(f"individuals {pair[0]!r} and {pair[1]!r} are not separable")


class UnsupportedAxiomError(AlcError):
    """Reasoner received an axiom kind it does not support (fixpoint definitions)."""


class SearchBudgetExceededError(AlcError):
    """Bounded model search ran out of budget."""
