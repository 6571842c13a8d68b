"""Exception types shared across the library."""


class BtpglError(Exception):
    """Base class for all library-specific errors."""


class NegativeValuation(BtpglError):
    """A scalar expected to be p-integral has negative valuation."""


class NonIntegralEntry(BtpglError):
    """A matrix or coordinate entry lies outside the valuation ring."""


class SingularTransition(BtpglError):
    """A transition matrix between supposedly full-rank lattices is singular."""


class NotSplitInside(BtpglError):
    """The inner submodule is not split inside the outer one."""


class NotUnimodular(BtpglError):
    """A matrix expected to be invertible over the valuation ring is not."""


class EnumerationTooLarge(BtpglError):
    """A requested enumeration exceeds the configured subspace cap."""


class ImproperGenericIntersection(BtpglError):
    """The cycles fail to meet properly on the generic fibre (zero determinant)."""


class ProperFail(BtpglError):
    """The configuration lacks the properness class the operation requires."""


class RankMismatch(BtpglError):
    """A derived submodule does not have the rank the construction guarantees."""


class GenerationExhausted(BtpglError):
    """Random instance generation hit the attempt cap without an acceptable draw."""


class SchemaError(BtpglError):
    """An instance or report file does not match the expected schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
