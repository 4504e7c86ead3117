"""Exception types shared across the toolkit.

Validation problems (bad inputs, malformed files, impossible requests)
raise subclasses of :class:`ValidationError`; broken image or store
payloads raise subclasses of :class:`FormatError`.  IO failures use the
builtin ``OSError`` family.
"""


class DemorphEvalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(DemorphEvalError):
    """Input violates a documented precondition."""


class FormatError(DemorphEvalError):
    """A file's bytes do not follow the expected format."""


# image domain

class UnsupportedFormatError(FormatError):
    """File is neither PNG nor uncompressed 24-bit BMP (or uses an
    unsupported sample depth)."""


class CorruptImageError(FormatError):
    """File matched a known format but its payload is broken."""


class DimensionMismatchError(ValidationError):
    """Two operands must share dimensions/channels but do not."""


class ImageTooSmallError(ValidationError):
    """Image is smaller than the analysis window."""


# biometric domain

class ZeroVectorError(ValidationError):
    """Cosine similarity is undefined for an all-zero embedding."""


class EmptyImpostorSetError(ValidationError):
    """Threshold calibration needs at least one impostor score."""


class EmptyGenuineSetError(ValidationError):
    """TMR needs at least one genuine score."""


class EmptyGalleryAfterExclusionError(ValidationError):
    """Impostor mining excluded every gallery entry."""


class EmptyRecordSetError(ValidationError):
    """An aggregate was requested over zero records."""


class EmptySetError(ValidationError):
    """A scenario split side is empty."""


# dataset domain

class ManifestError(ValidationError):
    """Base class for evaluation-manifest problems."""


class MalformedLineError(ManifestError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"manifest line {lineno}: {reason}")
        self.lineno = lineno


class MissingFieldError(ManifestError):
    def __init__(self, lineno: int, field: str):
        super().__init__(f"manifest line {lineno}: missing field {field!r}")
        self.lineno = lineno
        self.field = field


class DuplicateMorphIdError(ManifestError):
    def __init__(self, morph_id: str):
        super().__init__(f"duplicate morph_id {morph_id!r}")
        self.morph_id = morph_id


class InvalidRecordError(ManifestError):
    """A record violates a MorphRecord invariant."""


class BadMagicError(FormatError):
    """Embedding store does not start with the BEMB magic/version."""


class TruncatedFileError(FormatError):
    """Embedding store ended before the declared payload."""


class DuplicateIdError(ValidationError):
    """Embedding store declares the same id twice."""


class MissingEmbeddingError(ValidationError):
    def __init__(self, embedding_id: str):
        super().__init__(f"no embedding for id {embedding_id!r}")
        self.embedding_id = embedding_id


class SanityCheckError(DemorphEvalError):
    """The metric sanity suite found no SSIM/BW crossover level."""
