"""Reference embedder adapter: CNN GAP features exported as CFGE files."""

from .extract import ExtractError, build_backbone, extract_embeddings
from .cfge import write_cfge

__version__ = "0.1.0"
