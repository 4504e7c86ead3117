"""Face-image batch embedder emitting BEMB stores."""

from .core import EmbedError, EmbedJob, EmbedResult, embed_directory

__all__ = ["EmbedError", "EmbedJob", "EmbedResult", "embed_directory"]
