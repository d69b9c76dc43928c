"""Intent-guided infilling toolkit.

Turns raw corpora into intent-labeled infilling training data, encodes and
decodes the tag-based template, serves an interactive authoring assistant
over a pluggable completion backend, and evaluates outputs span by span.
"""

__version__ = "0.1.0"

from .tags import TagKind

__all__ = ["TagKind", "__version__"]
