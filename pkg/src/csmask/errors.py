"""Exception hierarchy shared by every csmask module."""


class CsmError(Exception):
    """Base class for library errors."""


class NumericalError(CsmError):
    """Failures of a numerical nature (CLI exit code 3)."""


# signal_io
class UnsupportedChannels(CsmError):
    pass


class UnsupportedEncoding(CsmError):
    pass


class MalformedHeader(CsmError):
    pass


class InvalidWaveform(CsmError):
    pass


# stft
class InvalidParams(CsmError):
    pass


class ColaViolation(NumericalError):
    pass


class MissingLength(CsmError):
    pass


class LengthMismatch(CsmError):
    pass


class ShapeMismatch(CsmError):
    pass


# consistency
class InvalidMagnitude(CsmError):
    pass


# mixer
class DegenerateSignal(CsmError):
    pass


class RateMismatch(CsmError):
    pass


class NoiseTooShort(CsmError):
    pass


class InvalidFrequency(CsmError):
    pass


# optim
class UnsupportedBeta(CsmError):
    pass


class Divergence(NumericalError):
    pass


# metrics
class DegenerateReference(CsmError):
    pass


class NoValidFrames(CsmError):
    pass
