"""Annotation sidecar: NER, entity linking, and dependency parsing for
biomedical text, emitting newline-delimited interchange records."""

__version__ = "0.1.0"
