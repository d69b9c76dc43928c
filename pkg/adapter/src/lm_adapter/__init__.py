"""Reference completion server over a small fine-tuned causal LM."""

__version__ = "0.1.0"
