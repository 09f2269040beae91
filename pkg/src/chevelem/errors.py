class ChevelemError(Exception):
    """Base class for errors raised by this package."""


class DescriptorError(ChevelemError, ValueError):
    """A root-system or ring descriptor could not be parsed or is invalid."""


class DomainError(ChevelemError, ValueError):
    """An argument lies outside the domain of an operation."""


class MorphismError(ChevelemError, ValueError):
    """A linear map does not induce a morphism of root systems."""


class CoverError(ChevelemError, ValueError):
    """The idempotents of a proposed cover do not join to the target idempotent."""


class AxiomError(ChevelemError):
    """An algebraic axiom failed; ``witness`` holds the offending data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CapExceeded(ChevelemError):
    """A closure hit its element cap before stabilizing."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
