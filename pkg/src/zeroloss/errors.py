"""Exception hierarchy shared by all modules.

Every error raised on purpose by this package derives from
:class:`ZeroLossError`, so callers (the CLI in particular) can separate
expected failures from programming bugs.
"""


class ZeroLossError(Exception):
    """Base class for deliberate failures."""


class InvalidInputError(ZeroLossError, ValueError):
    """Malformed arguments: non-finite entries, bad shapes, out-of-range options."""


class RankError(ZeroLossError):
    """A matrix that must have full rank does not."""


class NoPermutationError(RankError):
    """No row permutation yields an invertible leading block."""


class DegenerateDirectionError(ZeroLossError):
    """A class mean coincides with the barycenter, so its direction is undefined."""


class BallTouchesApexError(ZeroLossError):
    """A ball reaches the apex of a cone, so no aperture can enclose it."""


class InconsistencyError(ZeroLossError):
    """A round trip or algebraic identity failed beyond tolerance."""


class ProjectorIdentityError(InconsistencyError):
    """A projector identity broke at a given layer (non-surjective input)."""

    def __init__(self, layer: int, message: str):
        super().__init__(f"layer {layer}: {message}")
        self.layer = layer


class PreconditionError(ZeroLossError):
    """Input data does not meet the hypotheses of a constructor.

    ``report`` carries the diagnostic object (a cluster report, a failed
    separability search, ...) when one is available.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotSeparableError(PreconditionError):
    """The ordering search found no sequential separation certificate."""


class StaleCertificateError(PreconditionError):
    """A separation certificate does not hold on the given dataset."""


class InfeasibleConeError(ZeroLossError):
    """A required cone aperture reached pi."""


class ConstructionError(ZeroLossError):
    """A constructor could not produce an interpolating network."""


class GenerationError(ZeroLossError):
    """A synthetic generator failed to meet its guarantee within its retry budget."""


class SchemaError(ZeroLossError, ValueError):
    """A JSON document is malformed or has the wrong shape."""


class SchemaVersionError(SchemaError):
    """A JSON document declares an unsupported schema version."""
