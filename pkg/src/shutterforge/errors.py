"""Exception hierarchy shared by all shutterforge modules."""


class ShutterForgeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ShutterForgeError):
    """A tensor container was constructed with invalid data."""


class ShapeError(ShutterForgeError):
    """Operands do not agree in height/width/channels."""


class BoundsError(ShutterForgeError):
    """An index or window falls outside the valid range."""


class ArgumentError(ShutterForgeError):
    """A scalar argument violates an operation precondition."""


class FormatError(ShutterForgeError):
    """An on-disk container (SFT or PNG) could not be parsed."""


class WriteError(ShutterForgeError):
    """An on-disk container could not be written."""


class PipelineError(ShutterForgeError):
    """A multi-step synthesis pipeline cannot run on the given inputs."""


class IngestError(ShutterForgeError):
    """A source directory cannot be turned into a dataset manifest."""


class DegenerateInputError(ShutterForgeError):
    """A metric has no valid pixels to evaluate."""


class NumericError(ShutterForgeError):
    """A scalar input is NaN or infinite."""
