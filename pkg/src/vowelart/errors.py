"""Exception types shared across the package."""


class VowelArtError(Exception):
    """Base class for all errors raised by this package."""


class AudioError(VowelArtError):
    """Unreadable, unsupported, or degenerate audio input."""


class NoSpeechError(AudioError):
    """Energy trimming found no frames above the threshold."""


class SignalTooShortError(AudioError):
    """Signal shorter than one analysis window."""


class DegenerateFrameError(VowelArtError):
    """All-zero or otherwise unusable analysis frame."""


class UnstableRecursionError(VowelArtError):
    """Burg recursion produced a reflection coefficient outside (-1, 1)."""


class RootFindingError(VowelArtError):
    """Polynomial root residuals exceeded the accuracy contract."""


class PosteriorgramFormatError(VowelArtError):
    """Interchange file violates the posteriorgram schema."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyVowelSetError(VowelArtError):
    """A corner vowel has no valid frames to aggregate."""

    def __init__(self, vowel):
        super().__init__(f"no valid frames for corner vowel /{vowel}/")
        self.vowel = vowel


class StatsError(VowelArtError):
    """Invalid input to a statistical routine."""


class PipelineError(VowelArtError):
    """Per-recording failure, wrapped with recording context."""
